use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use plenoptiforge::eval::{contrast_sweep, write_profile_csv, write_sweep_csv, PatternKind, RenderSettings};
use plenoptiforge::io::{
    build_design, read_design, read_experiment, write_design, DesignFile, DesignMethod, Provenance, SUMMARY_FILE,
};
use plenoptiforge::lenses::load_lens;
use plenoptiforge::measure::{
    best_visual_focus, camera_dof, measure_disparity, measure_magnification, mli_overlap_pixels, visible_mli_size,
    DofInterval, MeasureConfig, RAYS_ENV,
};
use plenoptiforge::optics::SensorSpec;
use plenoptiforge::paraxial::DesignConstraints;
use plenoptiforge::refine::{model_gamma, RefineSettings};
use plenoptiforge::Result;

#[derive(Parser, Debug)]
#[command(name = "plenoptiforge", version, about = "Design focused plenoptic cameras by ray tracing")]
#[command(after_help = format!("Environment: {RAYS_ENV} overrides the bundle ray count."))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct SensorArgs {
    /// Pixel pitch in mm.
    #[arg(long, default_value_t = 0.006)]
    pixel_size: f64,
    /// Sensor width in mm.
    #[arg(long, default_value_t = 4.0)]
    sensor_width: f64,
    /// Keep the microlens pitch as computed instead of rounding to whole pixels.
    #[arg(long)]
    no_snap: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Thin,
    Thick,
    Refined,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Focus,
    Magnification,
    Mli,
    Disparity,
    Dof,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PatternArg {
    Stripes,
    Star,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design a camera for one set of constraints.
    Design {
        /// Prescription file or builtin name (`builtin:double_gauss`).
        #[arg(long)]
        lens: String,
        #[arg(long)]
        a_main: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        f_ml: f64,
        #[arg(long)]
        d_ml: f64,
        #[arg(long, value_enum, default_value = "refined")]
        method: MethodArg,
        #[command(flatten)]
        sensor: SensorArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Find object distance and microlens pitch for a target depth of field.
    DofMatch {
        #[arg(long)]
        lens: String,
        #[arg(long)]
        dof_min: f64,
        #[arg(long)]
        dof_max: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        f_ml: f64,
        /// Starting microlens pitch in mm.
        #[arg(long, default_value_t = 0.3)]
        d_ml: f64,
        #[command(flatten)]
        sensor: SensorArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Trace a design file and print a measured quantity.
    Measure {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, value_enum)]
        what: What,
    },
    /// Render a contrast sweep over object distances.
    Evaluate {
        #[arg(long)]
        design: PathBuf,
        #[arg(long, value_enum, default_value = "star")]
        pattern: PatternArg,
        /// Comma-separated distances in mm, or a file with one distance per line.
        #[arg(long)]
        distances: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the normalized sensor profile at the first distance.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        rays: Option<usize>,
    },
    /// Run a batch experiment.
    Batch {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn flags() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn save(path: &Path, mut file: DesignFile, snap: bool) -> Result<()> {
    if snap {
        file = file.snap_pitch_to_pixels();
    }
    write_design(path, &file)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn parse_distances(arg: &str) -> Result<Vec<f64>> {
    let text = if Path::new(arg).is_file() { std::fs::read_to_string(arg)? } else { arg.to_string() };
    let values: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .filter(|t| t.parse::<f64>().is_ok() || !t.chars().any(|c| c.is_ascii_alphabetic()))
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| plenoptiforge::Error::Validation(format!("bad distance {t:?}")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(plenoptiforge::Error::Validation("no distances given".into()));
    }
    Ok(values)
}

fn print_kv(key: &str, value: f64) {
    println!("{key} = {value}");
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Design {
            lens,
            a_main,
            gamma,
            f_ml,
            d_ml,
            method,
            sensor,
            output,
        } => {
            let prescription = load_lens(&lens)?;
            let c = DesignConstraints::new(a_main, gamma, f_ml, d_ml, SensorSpec::new(sensor.pixel_size, sensor.sensor_width));
            c.validate()?;
            let method = match method {
                MethodArg::Thin => DesignMethod::Thin,
                MethodArg::Thick => DesignMethod::Thick,
                MethodArg::Refined => DesignMethod::Refined,
            };
            let settings = RefineSettings::for_constraints(&c);
            let (design, derived) = build_design(method, &c, &prescription, &settings)?;
            let provenance = Provenance::now(method).with_parameter("flags", flags());
            let file = DesignFile::new(design, c, provenance).with_derived(derived.unwrap_or_default());
            save(&output, file, !sensor.no_snap)?;
        }
        Command::DofMatch {
            lens,
            dof_min,
            dof_max,
            gamma,
            f_ml,
            d_ml,
            sensor,
            output,
        } => {
            let prescription = load_lens(&lens)?;
            let target = DofInterval::new(dof_min, dof_max);
            let c = DesignConstraints::new(target.center(), gamma, f_ml, d_ml, SensorSpec::new(sensor.pixel_size, sensor.sensor_width))
                .with_dof_target(target);
            c.validate()?;
            let settings = RefineSettings::for_constraints(&c);
            let (design, derived) = build_design(DesignMethod::DofMatched, &c, &prescription, &settings)?;
            let mut matched = c;
            matched.a_main = design.a_main;
            matched.d_ml = design.mla.d_ml;
            let provenance = Provenance::now(DesignMethod::DofMatched).with_parameter("flags", flags());
            let file = DesignFile::new(design, matched, provenance).with_derived(derived.unwrap_or_default());
            save(&output, file, !sensor.no_snap)?;
        }
        Command::Measure { design, what } => {
            let file = read_design(&design)?;
            let d = &file.design;
            let cfg = MeasureConfig::from_env();
            match what {
                What::Focus => {
                    let f = best_visual_focus(&d.lens, d.a_main, d.d_main, &cfg)?;
                    print_kv("b_parax", f.b_parax);
                    print_kv("b_blur", f.b_blur);
                    print_kv("b_bv", f.b_bv);
                }
                What::Magnification => print_kv("m", measure_magnification(d)?),
                What::Mli => {
                    let m = measure_magnification(d)?;
                    print_kv("d_vis", visible_mli_size(d, 0, cfg.alpha, &cfg)?);
                    print_kv("m_d_ml", m * d.mla.d_ml);
                    println!("overlap_pixels = {}", mli_overlap_pixels(d, cfg.alpha, &cfg)?);
                }
                What::Disparity => {
                    print_kv("gamma_tilde", measure_disparity(d, d.a_main, &cfg)?);
                    print_kv("gamma_model", model_gamma(d));
                    print_kv("gamma_target", file.constraints.gamma);
                }
                What::Dof => {
                    let dof = camera_dof(d, 0, cfg.alpha, &cfg)?;
                    print_kv("dof_min", dof.delta_min);
                    print_kv("dof_max", dof.delta_max);
                }
            }
        }
        Command::Evaluate {
            design,
            pattern,
            distances,
            output,
            profile,
            rays,
        } => {
            let file = read_design(&design)?;
            let d = &file.design;
            let mut settings = RenderSettings::default();
            if let Some(n) = rays {
                settings = settings.with_rays(n);
            }
            let kind = match pattern {
                PatternArg::Stripes => PatternKind::Stripes,
                PatternArg::Star => PatternKind::StarRadialProfile,
            };
            let distances = parse_distances(&distances)?;
            let sweep = contrast_sweep(d, &distances, kind, &settings)?;
            write_sweep_csv(std::fs::File::create(&output)?, &sweep)?;
            eprintln!("wrote {}", output.display());
            if let Some(path) = profile {
                let image = plenoptiforge::eval::render_normalized(d, kind, distances[0], &settings)?;
                write_profile_csv(std::fs::File::create(&path)?, &image)?;
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Batch { spec, output } => {
            let experiment = read_experiment(&spec)?;
            let out_dir = match output.or_else(|| experiment.output_dir.clone()) {
                Some(dir) => dir,
                None => return Err(plenoptiforge::Error::Validation("batch needs -o DIR or output_dir".into())),
            };
            let summary = plenoptiforge::io::run_experiment(&experiment, &out_dir)?;
            let fatal = summary.fatal_failures();
            eprintln!(
                "{} rows, {} files, {} failed designs; summary in {}",
                summary.rows.len(),
                summary.files.len(),
                fatal,
                out_dir.join(SUMMARY_FILE).display()
            );
            if fatal > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
