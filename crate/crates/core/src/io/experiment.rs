//! Batch experiments: every lens against every constraint set with each
//! design method, optional sweeps, one CSV summary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::design_file::{write_design, Derived, DesignFile, DesignMethod, Provenance};
use crate::error::{Error, Result};
use crate::eval::{
    contrast_sweep, line_width_sweep, period_for_pixels, write_sweep_csv, PatternKind,
    RenderSettings, SWEEP_MAX_LINE_PX,
};
use crate::lenses::load_lens;
use crate::measure::{camera_dof, measure_disparity, DofInterval};
use crate::optics::{CameraDesign, LensPrescription, SensorSpec};
use crate::paraxial::{thick_lens_design, thin_design_for_lens, DesignConstraints};
use crate::refine::{dof_match, refined_design, RefineSettings};

pub const SUMMARY_FILE: &str = "summary.csv";

/// One parameter setup applied to every lens of the batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    #[serde(default)]
    pub id: Option<String>,
    pub a_main: f64,
    pub gamma: f64,
    pub f_ml: f64,
    pub d_ml: f64,
    pub pixel_size: f64,
    pub sensor_width: f64,
    #[serde(default)]
    pub dof_min: Option<f64>,
    #[serde(default)]
    pub dof_max: Option<f64>,
}

impl ConstraintSet {
    pub fn constraints(&self) -> Result<DesignConstraints> {
        let mut c = DesignConstraints::new(
            self.a_main,
            self.gamma,
            self.f_ml,
            self.d_ml,
            SensorSpec::new(self.pixel_size, self.sensor_width),
        );
        match (self.dof_min, self.dof_max) {
            (Some(lo), Some(hi)) => c = c.with_dof_target(DofInterval::new(lo, hi)),
            (None, None) => {}
            _ => return Err(Error::Validation("dof_min and dof_max must be given together".into())),
        }
        c.validate()?;
        Ok(c)
    }
}

fn default_steps() -> usize {
    20
}

fn default_max_line_px() -> f64 {
    SWEEP_MAX_LINE_PX
}

/// Sweep definitions. The first sweep of a batch provides `mean_contrast`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    /// Stripe widths up to `max_line_px` image pixels at the focus distance.
    /// The width scale comes from the thick design of the same setup, so
    /// every method sees the same scene.
    LineWidth {
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default = "default_max_line_px")]
        max_line_px: f64,
    },
    /// Contrast at `count` distances from `from` to `to`.
    Distance {
        pattern: PatternKind,
        from: f64,
        to: f64,
        #[serde(default = "default_steps")]
        count: usize,
    },
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            SweepSpec::LineWidth { steps, max_line_px } if steps == 0 || !(max_line_px > 0.0) => {
                Err(Error::Validation("line-width sweep needs steps >= 1 and max_line_px > 0".into()))
            }
            SweepSpec::Distance { from, to, count, .. } if count < 2 || !(from > 0.0 && to > from) => {
                Err(Error::Validation("distance sweep needs count >= 2 and 0 < from < to".into()))
            }
            _ => Ok(()),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SweepSpec::LineWidth { .. } => "linewidth",
            SweepSpec::Distance { .. } => "distance",
        }
    }
}

fn default_methods() -> Vec<DesignMethod> {
    vec![DesignMethod::Thin, DesignMethod::Thick, DesignMethod::Refined]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Builtin names (`builtin:double_gauss` or `double_gauss`) or prescription paths.
    pub lenses: Vec<String>,
    pub constraints: Vec<ConstraintSet>,
    #[serde(default)]
    pub sweeps: Vec<SweepSpec>,
    #[serde(default = "default_methods")]
    pub methods: Vec<DesignMethod>,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub render: Option<RenderSettings>,
    /// Round the microlens pitch to whole pixels in every design file.
    #[serde(default)]
    pub snap_pitch: bool,
    /// Directory that relative lens paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.constraints.is_empty() {
            return Err(Error::Validation("experiment needs at least one constraint set".into()));
        }
        if self.lenses.is_empty() {
            return Err(Error::Validation("experiment needs at least one lens".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Validation("experiment needs at least one method".into()));
        }
        for c in &self.constraints {
            c.constraints()?;
        }
        self.sweeps.iter().try_for_each(SweepSpec::validate)
    }

    fn resolve_lens(&self, spec: &str) -> Result<LensPrescription> {
        match (&self.base_dir, Path::new(spec).is_relative()) {
            (Some(base), true) if base.join(spec).is_file() => load_lens(&base.join(spec).to_string_lossy()),
            _ => load_lens(spec),
        }
    }
}

pub fn parse_experiment(text: &str) -> Result<ExperimentSpec> {
    let spec: ExperimentSpec = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
        message: e.message().to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn read_experiment(path: &Path) -> Result<ExperimentSpec> {
    let mut spec = parse_experiment(&crate::io::read_text(path)?)?;
    spec.base_dir = path.parent().map(Path::to_path_buf);
    Ok(spec)
}

/// Designs one camera with the given method. Refined and DoF-matched
/// designs carry their measured quantities.
pub fn build_design(
    method: DesignMethod,
    constraints: &DesignConstraints,
    lens: &LensPrescription,
    settings: &RefineSettings,
) -> Result<(CameraDesign, Option<Derived>)> {
    match method {
        DesignMethod::Thin => Ok((thin_design_for_lens(constraints, lens)?, None)),
        DesignMethod::Thick => Ok((thick_lens_design(constraints, lens)?, None)),
        DesignMethod::Refined => {
            let (d, trace) = refined_design(constraints, lens, settings)?;
            let derived = Derived {
                m: Some(trace.m_final),
                gamma_tilde: measure_disparity(&d, d.a_main, &settings.measure)
                    .ok()
                    .or(trace.iterations.last().map(|it| it.gamma_tilde)),
                dof: None,
                d_vis: Some(trace.d_vis_final),
            };
            Ok((d, Some(derived)))
        }
        DesignMethod::DofMatched => {
            let (d, trace) = dof_match(constraints, lens, settings)?;
            let derived = Derived {
                dof: trace.history.last().map(|h| h.dof),
                ..Default::default()
            };
            Ok((d, Some(derived)))
        }
    }
}

/// One row of the batch summary. Metric columns are empty when not measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub design_id: String,
    pub method: DesignMethod,
    pub mean_contrast: Option<f64>,
    pub gamma_err: Option<f64>,
    pub dof_min: Option<f64>,
    pub dof_max: Option<f64>,
    pub wall_ms: u64,
    /// Failure messages, `; `-separated; empty on success.
    pub error: String,
    /// No design file could be produced. Metric failures alone are not fatal.
    #[serde(skip)]
    pub fatal: bool,
}

impl SummaryRow {
    fn new(design_id: &str, method: DesignMethod) -> Self {
        Self {
            design_id: design_id.to_string(),
            method,
            mean_contrast: None,
            gamma_err: None,
            dof_min: None,
            dof_max: None,
            wall_ms: 0,
            error: String::new(),
            fatal: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    /// Design files and sweep CSVs, in job order.
    pub files: Vec<PathBuf>,
}

impl Summary {
    /// Rows without a design file.
    pub fn fatal_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.fatal).count()
    }
}

pub fn write_summary_csv<W: std::io::Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

struct Job<'a> {
    design_id: String,
    lens_spec: &'a str,
    set: &'a ConstraintSet,
}

struct JobOutput {
    rows: Vec<SummaryRow>,
    files: Vec<PathBuf>,
}

fn mean(values: &[(f64, f64)]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().map(|v| v.1).sum::<f64>() / values.len() as f64)
}

struct Metrics {
    mean_contrast: Option<f64>,
    gamma_err: Option<f64>,
    dof: Option<DofInterval>,
    errors: Vec<String>,
}

fn run_sweep(
    sweep: &SweepSpec,
    design: &CameraDesign,
    scale_reference: &CameraDesign,
    render: &RenderSettings,
) -> Result<Vec<(f64, f64)>> {
    match *sweep {
        SweepSpec::LineWidth { steps, max_line_px } => {
            let w = period_for_pixels(scale_reference, design.a_main, max_line_px)?;
            line_width_sweep(design, design.a_main, w, steps, render)
        }
        SweepSpec::Distance { pattern, from, to, count } => {
            let distances: Vec<f64> =
                (0..count).map(|i| from + (to - from) * i as f64 / (count - 1) as f64).collect();
            contrast_sweep(design, &distances, pattern, render)
        }
    }
}

fn measure_design(
    spec: &ExperimentSpec,
    design: &CameraDesign,
    c: &DesignConstraints,
    scale_reference: &CameraDesign,
    file_stem: &str,
    out_dir: &Path,
    settings: &RefineSettings,
) -> (Metrics, Vec<PathBuf>) {
    let mut files = Vec::new();
    let render = spec.render.unwrap_or_default();
    let cfg = &settings.measure;
    let mut errors = Vec::new();
    let mut mean_contrast = None;
    for (i, sweep) in spec.sweeps.iter().enumerate() {
        let result = run_sweep(sweep, design, scale_reference, &render).and_then(|values| {
            let path = out_dir.join(format!("{file_stem}-{}{}.csv", sweep.label(), i + 1));
            write_sweep_csv(std::fs::File::create(&path)?, &values)?;
            files.push(path);
            Ok(values)
        });
        match result {
            Ok(values) if i == 0 => mean_contrast = mean(&values),
            Ok(_) => {}
            Err(e) => errors.push(format!("sweep {}: {e}", i + 1)),
        }
    }
    let gamma_err = match measure_disparity(design, design.a_main, cfg) {
        Ok(g) => Some((g - c.gamma).abs()),
        Err(e) => {
            errors.push(format!("disparity: {e}"));
            None
        }
    };
    let dof = match camera_dof(design, 0, cfg.alpha, cfg) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(format!("dof: {e}"));
            None
        }
    };
    let metrics = Metrics {
        mean_contrast,
        gamma_err,
        dof,
        errors,
    };
    (metrics, files)
}

fn run_job(spec: &ExperimentSpec, job: &Job, out_dir: &Path) -> JobOutput {
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let fail_all = |msg: String, rows: &mut Vec<SummaryRow>| {
        for &method in &spec.methods {
            let mut row = SummaryRow::new(&job.design_id, method);
            row.error = msg.clone();
            row.fatal = true;
            rows.push(row);
        }
    };
    let setup = spec.resolve_lens(job.lens_spec).and_then(|lens| Ok((lens, job.set.constraints()?)));
    let (lens, c) = match setup {
        Ok(s) => s,
        Err(e) => {
            fail_all(e.to_string(), &mut rows);
            return JobOutput { rows, files };
        }
    };
    let settings = RefineSettings::for_constraints(&c);
    let built: Vec<_> = spec
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            (method, build_design(method, &c, &lens, &settings), start.elapsed())
        })
        .collect();
    // One stripe scene per setup, scaled from the refined design's image.
    let reference = if spec.sweeps.iter().any(|s| matches!(s, SweepSpec::LineWidth { .. })) {
        built
            .iter()
            .find_map(|(m, r, _)| r.as_ref().ok().filter(|_| *m == DesignMethod::Refined).map(|r| r.0.clone()))
            .or_else(|| refined_design(&c, &lens, &settings).ok().map(|r| r.0))
            .or_else(|| thick_lens_design(&c, &lens).ok())
    } else {
        None
    };

    for (method, result, build_time) in built {
        let start = Instant::now();
        let stem = format!("{}-{}", job.design_id, method);
        let mut row = SummaryRow::new(&job.design_id, method);
        match result {
            Ok((design, derived)) => {
                let provenance = Provenance::now(method)
                    .with_parameter("lens", job.lens_spec)
                    .with_parameter("design_id", &job.design_id);
                let mut file = DesignFile::new(design.clone(), c, provenance).with_derived(derived.unwrap_or_default());
                if spec.snap_pitch {
                    file = file.snap_pitch_to_pixels();
                }
                let path = out_dir.join(format!("{stem}.toml"));
                match write_design(&path, &file) {
                    Ok(()) => files.push(path),
                    Err(e) => {
                        row.error = format!("write: {e}");
                        row.fatal = true;
                    }
                }
                if !spec.sweeps.is_empty() {
                    let scale = reference.as_ref().unwrap_or(&design);
                    let (m, sweep_files) = measure_design(spec, &design, &c, scale, &stem, out_dir, &settings);
                    files.extend(sweep_files);
                    row.mean_contrast = m.mean_contrast;
                    row.gamma_err = m.gamma_err;
                    row.dof_min = m.dof.map(|d| d.delta_min);
                    row.dof_max = m.dof.map(|d| d.delta_max);
                    let mut errors: Vec<String> = (!row.error.is_empty()).then(|| row.error.clone()).into_iter().collect();
                    errors.extend(m.errors);
                    row.error = errors.join("; ");
                }
            }
            Err(e) => {
                row.error = e.to_string();
                row.fatal = true;
            }
        }
        row.wall_ms = (build_time + start.elapsed()).as_millis() as u64;
        rows.push(row);
    }
    JobOutput { rows, files }
}

fn lens_label(spec: &str) -> String {
    let name = spec.strip_prefix("builtin:").unwrap_or(spec);
    Path::new(name)
        .file_stem()
        .map_or_else(|| name.to_string(), |s| s.to_string_lossy().into_owned())
}

/// Runs the batch and writes design files, sweep CSVs and `summary.csv`
/// into `out_dir`. Per-design failures land in the summary's `error` column.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<Summary> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let jobs: Vec<Job> = spec
        .lenses
        .iter()
        .flat_map(|lens| {
            spec.constraints.iter().enumerate().map(move |(i, set)| Job {
                design_id: format!(
                    "{}-{}",
                    lens_label(lens),
                    set.id.clone().unwrap_or_else(|| format!("c{}", i + 1))
                ),
                lens_spec: lens,
                set,
            })
        })
        .collect();
    let mut ids: Vec<&str> = jobs.iter().map(|j| j.design_id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Validation(format!("duplicate design id {:?}", w[0])));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let outputs: Vec<JobOutput> = pool.install(|| jobs.par_iter().map(|job| run_job(spec, job, out_dir)).collect());

    let mut summary = Summary::default();
    for out in outputs {
        summary.rows.extend(out.rows);
        summary.files.extend(out.files);
    }
    write_summary_csv(std::fs::File::create(out_dir.join(SUMMARY_FILE))?, &summary.rows)?;
    Ok(summary)
}
