//! Experiment driver: reproducible batch runs over the laboratory modules,
//! emitting CSV or JSON documents.
//!
//! Every run is a pure function of its [`ExperimentConfig`]: one seeded
//! generator feeds all stochastic stages in a fixed order, and floats are
//! printed with 17 significant digits, so identical configs produce
//! byte-identical output.

use std::fmt::Write as _;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use detlab::algebra::Mat2;
use detlab::integrand::{hp_check, ConvexIntegrand, HpFailure};
use detlab::laminate::{
    build_laminate, check_pair, interior_l1_det_error, l1_det_error, mc_phase_fractions,
    mc_sup_deviation, mean_fiber_residual, LaminatePair,
};
use detlab::pde::{
    beta_deviation, beta_recover, el_residual, fmt_g, locally_constant_components,
    stationarity_check, Normalization, TestMap, VectorField2,
};
use detlab::young::{max_gap_histogram, two_atom_search, YoungError};

pub mod config;

pub use config::{Command, ExperimentConfig};

/// Run failures, split by exit code: configuration problems exit 1,
/// numerical failures (degenerate inputs, solver stagnation) exit 2.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }
}

fn integrand_of(cfg: &ExperimentConfig) -> Result<ConvexIntegrand, RunError> {
    ConvexIntegrand::from_label(&cfg.integrand).map_err(|e| RunError::Config(e.to_string()))
}

fn pair_of(cfg: &ExperimentConfig) -> Result<LaminatePair, RunError> {
    match (cfg.pair_a, cfg.pair_b) {
        (None, None) => Ok(LaminatePair::default_shear()),
        (Some(a), Some(b)) => {
            let a = Mat2::new(a[0], a[1], a[2], a[3]);
            let b = Mat2::new(b[0], b[1], b[2], b[3]);
            check_pair(&a, &b, cfg.lambda).map_err(|e| RunError::Config(e.to_string()))
        }
        _ => Err(RunError::Config(
            "pair_a and pair_b must be given together".into(),
        )),
    }
}

/// Dispatches one configured experiment and returns the output document.
pub fn run(cfg: &ExperimentConfig) -> Result<String, RunError> {
    match cfg.command {
        Command::Laminate => run_laminate(cfg),
        Command::Rigidity => run_rigidity(cfg),
        Command::Moments => run_moments(cfg),
        Command::Recover => run_recover(cfg),
        Command::Stationarity => run_stationarity(cfg),
        Command::Hpcheck => run_hpcheck(cfg),
    }
}

/// Phase-classification tolerance when no override is given.
const PHASE_TOL: f64 = 1e-8;
/// Monte-Carlo sample counts pinned by the experiment design.
const SUP_SAMPLES: usize = 100_000;
const FRACTION_SAMPLES: usize = 1_000_000;

pub fn run_laminate(cfg: &ExperimentConfig) -> Result<String, RunError> {
    if cfg.n_osc.is_empty() {
        return Err(RunError::Config("empty n_osc list".into()));
    }
    let pair = pair_of(cfg)?;
    let tol = cfg.tol.unwrap_or(PHASE_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = String::from("n_osc,sup_deviation,frac_A,frac_B,frac_other,l1_det_error\n");
    for &n in &cfg.n_osc {
        let lam = build_laminate(&pair, n).map_err(|e| RunError::Config(e.to_string()))?;
        let sup = mc_sup_deviation(&lam, SUP_SAMPLES, &mut rng);
        let fr = mc_phase_fractions(&lam, tol, FRACTION_SAMPLES, &mut rng);
        let det_err = l1_det_error(&lam, 64, 8192);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            n,
            fmt_g(sup),
            fmt_g(fr.frac_a),
            fmt_g(fr.frac_b),
            fmt_g(fr.frac_other),
            fmt_g(det_err)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn run_rigidity(cfg: &ExperimentConfig) -> Result<String, RunError> {
    if cfg.n_osc.is_empty() {
        return Err(RunError::Config("empty n_osc list".into()));
    }
    let gi = integrand_of(cfg)?;
    let pair = pair_of(cfg)?;
    let mut out = String::from("n_osc,mean_fiber_residual,l1_det_error,l1_det_interior\n");
    for &n in &cfg.n_osc {
        let lam = build_laminate(&pair, n).map_err(|e| RunError::Config(e.to_string()))?;
        writeln!(
            out,
            "{},{},{},{}",
            n,
            fmt_g(mean_fiber_residual(&gi, &lam, 64, 8192)),
            fmt_g(l1_det_error(&lam, 64, 8192)),
            fmt_g(interior_l1_det_error(&lam, 128, 1024))
        )
        .unwrap();
    }
    Ok(out)
}

pub fn run_moments(cfg: &ExperimentConfig) -> Result<String, RunError> {
    if cfg.levels.is_empty() {
        return Err(RunError::Config("empty level list".into()));
    }
    let gi = integrand_of(cfg)?;
    let grid = cfg.weight_grid;
    if grid < 10 {
        return Err(RunError::Config(format!(
            "weight grid must be at least 10, got {grid}"
        )));
    }
    let mut entries = Vec::new();
    for &level in &cfg.levels {
        if level == 0.0 {
            entries.push(format!(
                "{{\"level\": {}, \"roots\": [0], \"note\": \"zero level forces the zero fiber; weight sweep skipped\"}}",
                fmt_g(level)
            ));
            continue;
        }
        match two_atom_search(&gi, level, grid) {
            Ok(search) => {
                let hist = max_gap_histogram(&search.max_gaps);
                entries.push(format!(
                    "{{\"level\": {}, \"e1\": {}, \"e2\": {}, \"discriminant\": {}, \"admissible_t\": [{}], \"max_gap_histogram\": [{}]}}",
                    fmt_g(search.level),
                    fmt_g(search.e1),
                    fmt_g(search.e2),
                    fmt_g(search.discriminant),
                    search
                        .admissible
                        .iter()
                        .map(|t| fmt_g(*t))
                        .collect::<Vec<_>>()
                        .join(", "),
                    hist.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            Err(YoungError::NoFiberRoots(l)) => {
                entries.push(format!(
                    "{{\"level\": {}, \"error\": \"no fiber roots\"}}",
                    fmt_g(l)
                ));
            }
            Err(e) => return Err(RunError::Numerical(e.to_string())),
        }
    }
    Ok(format!(
        "{{\"integrand\": \"{}\", \"grid\": {}, \"levels\": [{}]}}\n",
        cfg.integrand,
        grid,
        entries.join(", ")
    ))
}

enum MapSource {
    Builtin(TestMap),
    File(VectorField2),
}

fn map_of(cfg: &ExperimentConfig) -> Result<MapSource, RunError> {
    if let Some(map) = TestMap::from_name(&cfg.map) {
        return Ok(MapSource::Builtin(map));
    }
    let text = std::fs::read_to_string(&cfg.map).map_err(|e| {
        RunError::Config(format!(
            "map '{}' is neither a built-in name (affine, shear, nonconst-det) nor a readable field file: {e}",
            cfg.map
        ))
    })?;
    let field = VectorField2::read_text(&text).map_err(|e| RunError::Config(e.to_string()))?;
    Ok(MapSource::File(field))
}

fn fields_of(cfg: &ExperimentConfig) -> Result<Vec<VectorField2>, RunError> {
    match map_of(cfg)? {
        MapSource::Builtin(map) => {
            if cfg.grids.is_empty() {
                return Err(RunError::Config("empty grid list".into()));
            }
            cfg.grids
                .iter()
                .map(|&g| {
                    detlab::pde::test_map_field(map, g).map_err(|e| RunError::Config(e.to_string()))
                })
                .collect()
        }
        MapSource::File(field) => Ok(vec![field]),
    }
}

pub fn run_recover(cfg: &ExperimentConfig) -> Result<String, RunError> {
    let gi = integrand_of(cfg)?;
    let fields = fields_of(cfg)?;
    let mut out =
        String::from("grid_n,strong_l2,weak_max,beta_dev,order_estimate,beta_components\n");
    let mut prev: Option<(f64, f64)> = None; // (h, deviation)
    for field in &fields {
        let residual = el_residual(&gi, field);
        let rec = beta_recover(field, Normalization::MeanOne)
            .map_err(|e| RunError::Numerical(e.to_string()))?;
        let dev = beta_deviation(&rec.beta);
        let order = match prev {
            Some((h_prev, dev_prev)) if dev > 0.0 && dev_prev > 0.0 => {
                (dev_prev / dev).ln() / (h_prev / field.h()).ln()
            }
            _ => f64::NAN,
        };
        prev = Some((field.h(), dev));
        writeln!(
            out,
            "{},{},{},{},{},{}",
            field.nx(),
            fmt_g(residual.l2),
            fmt_g(residual.weak_max()),
            fmt_g(dev),
            fmt_g(order),
            locally_constant_components(&rec.beta)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn run_stationarity(cfg: &ExperimentConfig) -> Result<String, RunError> {
    let gi = integrand_of(cfg)?;
    let fields = fields_of(cfg)?;
    let mut out = String::from("grid_n,grad_norm,h_mean,root_count,root_lo,root_hi\n");
    for field in &fields {
        let report =
            stationarity_check(&gi, field).map_err(|e| RunError::Numerical(e.to_string()))?;
        let roots = &report.fiber.roots;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            field.nx(),
            fmt_g(report.grad_norm),
            fmt_g(report.h_field.mean()),
            roots.len(),
            fmt_g(roots.first().copied().unwrap_or(f64::NAN)),
            fmt_g(roots.last().copied().unwrap_or(f64::NAN))
        )
        .unwrap();
    }
    Ok(out)
}

pub fn run_hpcheck(cfg: &ExperimentConfig) -> Result<String, RunError> {
    let gi = integrand_of(cfg)?;
    let (lo, hi) = cfg.interval;
    let report =
        hp_check(&gi, lo, hi, cfg.samples).map_err(|e| RunError::Numerical(e.to_string()))?;
    let witnesses: Vec<String> = report
        .witnesses
        .iter()
        .map(|w| {
            let kind = match w.failure {
                HpFailure::NonPositiveSecondDerivative => "non-positive second derivative",
                HpFailure::NormalizationValue => "g(0) not zero",
                HpFailure::NormalizationSlope => "g'(0) not zero",
                HpFailure::FirstDerivativeMismatch => "g' inconsistent with g",
                HpFailure::SecondDerivativeMismatch => "g'' inconsistent with g",
            };
            format!(
                "{{\"t\": {}, \"kind\": \"{}\", \"value\": {}}}",
                fmt_g(w.t),
                kind,
                fmt_g(w.value)
            )
        })
        .collect();
    Ok(format!(
        "{{\"integrand\": \"{}\", \"lo\": {}, \"hi\": {}, \"samples\": {}, \"pass\": {}, \"witnesses\": [{}]}}\n",
        cfg.integrand,
        fmt_g(lo),
        fmt_g(hi),
        cfg.samples,
        report.pass,
        witnesses.join(", ")
    ))
}
