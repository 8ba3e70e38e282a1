//! Command implementations behind the `lsa` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use lsa_core::auxiliary::{lsa_aux_solve_with_clock, AuxParams, BoundVariant};
use lsa_core::baselines::{
    brute_force_min, ipfp_solve_with_clock, lsa_tr_l_solve_with_clock, parallel_icm_solve_with_clock, truncation_solve,
};
use lsa_core::problems::{
    build_deconvolution_energy, build_repulsion_energy, synthesize_deconv_instance, RepulsionParams, Shape,
};
use lsa_core::trust_region::lsa_tr_solve_with_clock;
use lsa_core::{BinaryEnergy, Clock, Labeling, SolverTrace, Termination, TrustRegionParams};

use crate::format::{read_energy, write_energy};
use crate::pgm;
use crate::report::{trace_csv, Summary};

/// Wall clock started at construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl StdClock {
    pub fn start() -> Self {
        StdClock(Instant::now())
    }
}

impl Clock for StdClock {
    fn elapsed_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    LsaTr,
    LsaTrL,
    LsaAux,
    LsaAuxP,
    Icm,
    Ipfp,
    Truncate,
    Brute,
}

impl Method {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitSpec {
    AllOnes,
    AllZeros,
    File(PathBuf),
}

impl FromStr for InitSpec {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "all-ones" => InitSpec::AllOnes,
            "all-zeros" => InitSpec::AllZeros,
            path => InitSpec::File(PathBuf::from(path)),
        })
    }
}

impl InitSpec {
    pub fn resolve(&self, num_vars: usize) -> Result<Labeling> {
        let s = match self {
            InitSpec::AllOnes => Labeling::ones(num_vars),
            InitSpec::AllZeros => Labeling::zeros(num_vars),
            InitSpec::File(path) => read_labeling(path)?,
        };
        if s.len() != num_vars {
            bail!("initial labeling has {} entries, energy has {num_vars} variables", s.len());
        }
        Ok(s)
    }

    fn describe(&self) -> String {
        match self {
            InitSpec::AllOnes => "all-ones".into(),
            InitSpec::AllZeros => "all-zeros".into(),
            InitSpec::File(p) => p.display().to_string(),
        }
    }
}

/// Solver settings independent of where the energy comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub method: Method,
    pub trust_region: TrustRegionParams,
    pub seed: u64,
    pub max_iters: usize,
    /// Permutation variant redraws its coins every iteration.
    pub redraw: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            method: Method::LsaTr,
            trust_region: TrustRegionParams::default(),
            seed: 0,
            max_iters: 1000,
            redraw: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub energy: PathBuf,
    pub init: InitSpec,
    pub settings: SolverSettings,
    pub labeling_out: Option<PathBuf>,
    pub trace_out: Option<PathBuf>,
    pub summary_out: Option<PathBuf>,
    /// Row length of the labeling image; defaults to a single row.
    pub width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trace: SolverTrace,
    /// Minimum of the truncated energy, for the truncation baseline.
    pub model_energy: Option<f64>,
}

/// Runs one solver on an in-memory energy.
pub fn solve(e: &BinaryEnergy, init: &Labeling, settings: &SolverSettings, clock: &dyn Clock) -> Result<Solution> {
    let max_iters = settings.max_iters;
    let direct = |labeling: Labeling, energy: f64| SolverTrace {
        records: Vec::new(),
        labeling,
        energy,
        termination: Termination::Direct,
    };
    let aux = AuxParams { max_iters, ..AuxParams::default() };
    let tr = TrustRegionParams { max_iters, ..settings.trust_region };
    let mut model_energy = None;
    let trace = match settings.method {
        Method::LsaTr => lsa_tr_solve_with_clock(e, &tr, init, clock)?,
        Method::LsaTrL => lsa_tr_l_solve_with_clock(e, &tr, init, clock)?,
        Method::LsaAux => lsa_aux_solve_with_clock(e, BoundVariant::Standard, init, &aux, clock)?,
        Method::LsaAuxP => {
            let variant = BoundVariant::Permutation { seed: settings.seed, redraw: settings.redraw };
            lsa_aux_solve_with_clock(e, variant, init, &aux, clock)?
        }
        Method::Icm => parallel_icm_solve_with_clock(e, init, max_iters, clock)?,
        Method::Ipfp => ipfp_solve_with_clock(e, init, max_iters, clock)?.trace,
        Method::Truncate => {
            let result = truncation_solve(e)?;
            model_energy = Some(result.model_energy);
            direct(result.labeling, result.energy)
        }
        Method::Brute => {
            let (labeling, energy) = brute_force_min(e)?;
            direct(labeling, energy)
        }
    };
    Ok(Solution { trace, model_energy })
}

/// `solve` subcommand: loads the energy, runs the method, writes the
/// requested outputs and returns the summary.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Summary> {
    let e = read_energy(&cfg.energy).with_context(|| format!("reading {}", cfg.energy.display()))?;
    let init = cfg.init.resolve(e.num_vars())?;
    let clock = StdClock::start();
    let solution = solve(&e, &init, &cfg.settings, &clock)?;
    let wall_ms = clock.elapsed_ms();
    let trace = &solution.trace;

    let mut summary = Summary::new();
    summary
        .push("method", cfg.settings.method.name())
        .push("seed", cfg.settings.seed)
        .push("init", cfg.init.describe())
        .push("num_vars", e.num_vars())
        .push_trace(trace);
    if let Some(model) = solution.model_energy {
        summary.push_real("model_energy", model);
    }
    summary.push("wall_ms", format!("{wall_ms:.3}"));

    if let Some(path) = &cfg.labeling_out {
        write_labeling(path, &trace.labeling, cfg.width)?;
    }
    if let Some(path) = &cfg.trace_out {
        fs::write(path, trace_csv(&trace.records)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &cfg.summary_out {
        fs::write(path, summary.render()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Disk,
    Rect,
    Empty,
    Full,
}

impl ShapeKind {
    /// Centred disk of radius min(w,h)/3, or the centred rectangle covering
    /// the middle half of each side.
    pub fn shape(self, width: usize, height: usize) -> Shape {
        match self {
            ShapeKind::Disk => Shape::centered_disk(width, height),
            ShapeKind::Rect => {
                Shape::Rect { x0: width / 4, y0: height / 4, x1: width - width / 4, y1: height - height / 4 }
            }
            ShapeKind::Empty => Shape::Empty,
            ShapeKind::Full => Shape::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeconvConfig {
    pub width: usize,
    pub height: usize,
    pub sigma: f64,
    pub seed: u64,
    pub shape: ShapeKind,
    pub out_prefix: PathBuf,
}

/// Output paths written by [`cmd_make_deconv`].
pub fn deconv_paths(prefix: &Path) -> [PathBuf; 3] {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    [with(".observed.pgm"), with(".truth.pgm"), with(".bpbe")]
}

/// `make-deconv`: synthetic instance plus its energy. The observed image is
/// stored as a 16-bit PGM clamped to [0, 1]; the energy is built from the
/// unquantized intensities.
pub fn cmd_make_deconv(cfg: &DeconvConfig) -> Result<Summary> {
    let shape = cfg.shape.shape(cfg.width, cfg.height);
    let (observed, truth) = synthesize_deconv_instance(cfg.width, cfg.height, shape, cfg.sigma, cfg.seed)?;
    let energy = build_deconvolution_energy(&observed)?;
    let [observed_path, truth_path, energy_path] = deconv_paths(&cfg.out_prefix);
    pgm::write(&observed_path, &pgm::from_image(&observed, 65535))?;
    write_labeling(&truth_path, &truth, Some(cfg.width))?;
    write_energy(&energy_path, &energy)?;

    let mut summary = Summary::new();
    summary
        .push("width", cfg.width)
        .push("height", cfg.height)
        .push_real("sigma", cfg.sigma)
        .push("seed", cfg.seed)
        .push("num_vars", energy.num_vars())
        .push("num_pairs", energy.pairs().len())
        .push_real("truth_energy", energy.eval(&truth)?)
        .push("energy_path", energy_path.display());
    Ok(summary)
}

/// `make-repulsion`: segmentation energy from a PGM image.
pub fn cmd_make_repulsion(image: &Path, params: &RepulsionParams, out: &Path) -> Result<Summary> {
    let img = pgm::read(image).with_context(|| format!("reading {}", image.display()))?.to_image();
    let energy = build_repulsion_energy(&img, params)?;
    write_energy(out, &energy)?;
    let sup = energy.pairs().iter().filter(|p| p.w > 0.0).count();
    let mut summary = Summary::new();
    summary
        .push_real("mu_fg", params.mu_fg)
        .push_real("mu_bg", params.mu_bg)
        .push_real("sigma_app", params.sigma_app)
        .push_real("lambda_reg", params.lambda_reg)
        .push_real("c", params.c)
        .push("num_vars", energy.num_vars())
        .push("num_pairs", energy.pairs().len())
        .push("num_sup_pairs", sup)
        .push("energy_path", out.display());
    Ok(summary)
}

/// `eval`: exact energy of a stored labeling.
pub fn cmd_eval(energy: &Path, labeling: &Path) -> Result<f64> {
    let e = read_energy(energy).with_context(|| format!("reading {}", energy.display()))?;
    let s = read_labeling(labeling)?;
    Ok(e.eval(&s)?)
}

pub fn read_labeling(path: &Path) -> Result<Labeling> {
    Ok(pgm::read(path).with_context(|| format!("reading {}", path.display()))?.to_labeling())
}

pub fn write_labeling(path: &Path, s: &Labeling, width: Option<usize>) -> Result<()> {
    let width = width.unwrap_or(s.len());
    if width != 0 && !s.len().is_multiple_of(width) {
        bail!("width {width} does not divide {} variables", s.len());
    }
    pgm::write(path, &pgm::from_labeling(s, width)).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names() {
        let names: Vec<String> = Method::value_variants().iter().map(|m| m.name()).collect();
        assert_eq!(names, ["lsa-tr", "lsa-tr-l", "lsa-aux", "lsa-aux-p", "icm", "ipfp", "truncate", "brute"]);
    }

    #[test]
    fn init_spec_parsing() {
        assert_eq!("all-ones".parse::<InitSpec>().unwrap(), InitSpec::AllOnes);
        assert_eq!("all-zeros".parse::<InitSpec>().unwrap(), InitSpec::AllZeros);
        assert_eq!("x.pgm".parse::<InitSpec>().unwrap(), InitSpec::File("x.pgm".into()));
        assert!(InitSpec::File("/nonexistent/x.pgm".into()).resolve(3).is_err());
    }

    #[test]
    fn truncate_reports_model_energy() {
        let e = BinaryEnergy::new(vec![-1.0, -1.0], vec![lsa_core::Pair::new(0, 1, 3.0)], 0.0).unwrap();
        let settings = SolverSettings { method: Method::Truncate, ..Default::default() };
        let solution = solve(&e, &Labeling::ones(2), &settings, &lsa_core::NoClock).unwrap();
        assert_eq!(solution.model_energy, Some(-2.0));
        assert_eq!(solution.trace.energy, 1.0);
    }
}
