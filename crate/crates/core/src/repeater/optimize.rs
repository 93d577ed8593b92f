use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::{AmplitudeSpec, CodeParams, Fraction};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::qec::QecConfig;

use super::link::{Exposure, RepeaterConfig, SweepRecord};

/// Quantity the optimizer drives down (or up, for the key rate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Error accumulation rate `(1 - F) / L0`.
    Tau,
    /// Key rate over the whole line.
    Skrpm,
    /// `1 - F` of a single cycle.
    Infidelity,
}

impl Objective {
    /// Value to minimize. A zero key rate falls back to the infidelity so
    /// the search still sees a slope where no key can be distilled.
    pub fn value(&self, rec: &SweepRecord) -> f64 {
        match self {
            Objective::Tau => rec.tau,
            Objective::Infidelity => rec.infidelity(),
            Objective::Skrpm if rec.skrpm > 0.0 => -rec.skrpm,
            Objective::Skrpm => rec.infidelity(),
        }
    }
}

/// Where the per-cycle noise comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSource {
    /// Derived from a repeater line; the search also scans its spacing.
    Repeater(RepeaterConfig),
    Fixed(NoiseParams),
}

/// Continuous amplitude parameters of a Gaussian family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianSearch {
    /// Scans `r` over the interval at fixed `nbar_code`, with
    /// `alpha = sqrt(nbar / s - sinh^2 r)`; `|r|` is capped where `alpha`
    /// would vanish.
    FixedNbar { nbar: f64, r: (f64, f64) },
    /// Box over `(alpha, r)`.
    Free { alpha: (f64, f64), r: (f64, f64) },
}

/// Amplitude family of one code lattice.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyAmplitude {
    /// Every listed `K` is simulated.
    Binomial { k_values: Vec<u32> },
    Gaussian(GaussianSearch),
}

/// Discrete lattice `(s, f)` with its amplitude family.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeFamily {
    pub s: u32,
    pub f: Fraction,
    pub amplitude: FamilyAmplitude,
}

/// Discrete enumeration of families and, for repeater noise, spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub families: Vec<CodeFamily>,
    /// Ignored for [`NoiseSource::Fixed`]; empty keeps the configured spacing.
    pub spacings_km: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Simulations per discrete point (at least 10).
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Phase grid of each correction cycle.
    pub phase_points: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { budget: 30, restarts: 3, seed: 0, phase_points: QecConfig::DEFAULT_PHASE_POINTS }
    }
}

/// Best record plus every successful evaluation, in a reproducible order.
#[derive(Debug, Clone)]
pub struct Optimized {
    pub best: SweepRecord,
    pub log: Vec<SweepRecord>,
    pub failures: usize,
}

/// Maps a point of the unit box to code parameters.
struct Parametrization<'a> {
    family: &'a CodeFamily,
    search: GaussianSearch,
}

impl Parametrization<'_> {
    fn dims(&self) -> usize {
        match self.search {
            GaussianSearch::FixedNbar { .. } => 1,
            GaussianSearch::Free { .. } => 2,
        }
    }

    fn code(&self, x: &[f64]) -> Result<CodeParams> {
        let (alpha, r) = match self.search {
            GaussianSearch::FixedNbar { nbar, r: (lo, hi) } => {
                let per_mode = nbar / self.family.s as f64;
                if !(per_mode > 0.0) {
                    return Err(Error::InvalidParameter(format!("nbar = {nbar} must be > 0")));
                }
                let cap = per_mode.sqrt().asinh();
                let r = lerp((lo.max(-cap), hi.min(cap)), x[0]);
                ((per_mode - r.sinh().powi(2)).max(0.0).sqrt(), r)
            }
            GaussianSearch::Free { alpha, r } => (lerp(alpha, x[0]), lerp(r, x[1])),
        };
        CodeParams::new(self.family.s, self.family.f, AmplitudeSpec::gaussian_real(alpha, r))
    }
}

fn lerp((lo, hi): (f64, f64), t: f64) -> f64 {
    lo + (hi - lo) * t
}

/// Nelder-Mead on the unit box; trial points are clamped into it.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect::<Vec<_>>();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let start = clamp(x0.to_vec());
    let v = eval(&start, &mut evals);
    simplex.push((start.clone(), v));
    for i in 0..n {
        if evals >= max_evals {
            break;
        }
        let mut x = start.clone();
        x[i] = if x[i] + step <= 1.0 { x[i] + step } else { x[i] - step };
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    if simplex.len() < n + 1 {
        order(&mut simplex);
        return simplex.swap_remove(0);
    }
    while evals < max_evals {
        order(&mut simplex);
        let worst = simplex[n].clone();
        let centroid: Vec<f64> =
            (0..n).map(|d| simplex[..n].iter().map(|p| p.0[d]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| clamp(centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect());
        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            if evals >= max_evals {
                simplex[n] = (xr, fr);
                break;
            }
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            if evals >= max_evals {
                break;
            }
            let (xc, fc) = if fr < worst.1 {
                let x = along(0.5);
                let v = eval(&x, &mut evals);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = eval(&x, &mut evals);
                (x, v)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    if evals >= max_evals {
                        break;
                    }
                    p.0 = best.iter().zip(&p.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    p.1 = eval(&p.0, &mut evals);
                }
            }
        }
        let spread = simplex.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
            - simplex.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        if spread.abs() < 1e-14 && spread.is_finite() {
            break;
        }
    }
    order(&mut simplex);
    simplex.swap_remove(0)
}

/// One discrete point of the search: a family at one spacing.
struct DiscretePoint<'a> {
    family: &'a CodeFamily,
    exposure: Exposure,
}

#[derive(Default)]
struct PointLog {
    records: Vec<SweepRecord>,
    failures: usize,
    first_error: Option<String>,
}

impl PointLog {
    fn push(&mut self, outcome: Result<SweepRecord>, objective: Objective) -> f64 {
        match outcome {
            Ok(rec) => {
                let v = objective.value(&rec);
                self.records.push(rec);
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            }
            Err(e) => {
                self.failures += 1;
                self.first_error.get_or_insert_with(|| e.to_string());
                f64::INFINITY
            }
        }
    }
}

fn search_point(
    point: &DiscretePoint<'_>,
    objective: Objective,
    settings: &OptimizerSettings,
    seed: u64,
) -> PointLog {
    let mut log = PointLog::default();
    let simulate = |code: Result<CodeParams>| -> Result<SweepRecord> {
        let code = code?;
        let qec = QecConfig::for_code(&code).with_phase_points(settings.phase_points);
        SweepRecord::evaluate(&code, &point.exposure, &qec)
    };
    match &point.family.amplitude {
        FamilyAmplitude::Binomial { k_values } => {
            for &k in k_values {
                let code = CodeParams::new(point.family.s, point.family.f, AmplitudeSpec::Binomial { k });
                log.push(simulate(code), objective);
            }
        }
        FamilyAmplitude::Gaussian(search) => {
            let param = Parametrization { family: point.family, search: *search };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let restarts = settings.restarts.max(1);
            let per_restart = (settings.budget / restarts).max(param.dims() + 1);
            for _ in 0..restarts {
                let x0: Vec<f64> = (0..param.dims()).map(|_| rng.gen::<f64>()).collect();
                nelder_mead(|x| log.push(simulate(param.code(x)), objective), &x0, 0.25, per_restart);
            }
        }
    }
    log
}

fn validate_search(space: &SearchSpace, settings: &OptimizerSettings) -> Result<()> {
    if settings.budget < 10 {
        return Err(Error::InvalidParameter(format!("optimizer budget {} must be >= 10", settings.budget)));
    }
    if space.families.is_empty() {
        return Err(Error::InvalidParameter("search space has no code families".into()));
    }
    for fam in &space.families {
        match &fam.amplitude {
            FamilyAmplitude::Binomial { k_values } if k_values.is_empty() => {
                return Err(Error::InvalidParameter("binomial family lists no K values".into()));
            }
            FamilyAmplitude::Gaussian(GaussianSearch::FixedNbar { nbar, r: (lo, hi) }) => {
                if !(nbar.is_finite() && *nbar > 0.0 && lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::InvalidParameter(format!("bad fixed-nbar search ({nbar}, [{lo}, {hi}])")));
                }
            }
            FamilyAmplitude::Gaussian(GaussianSearch::Free { alpha, r }) => {
                for (lo, hi, floor) in [(alpha.0, alpha.1, 0.0), (r.0, r.1, f64::NEG_INFINITY)] {
                    if !(lo.is_finite() && hi.is_finite() && lo >= floor && lo <= hi) {
                        return Err(Error::InvalidParameter(format!("bad search interval [{lo}, {hi}]")));
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Simplex descent over the continuous amplitude parameters, restarted from
/// seeded random points, nested inside an exhaustive scan over families and
/// spacings. Discrete points run in parallel; the log keeps input order.
pub fn optimize_code(
    objective: Objective,
    noise: &NoiseSource,
    space: &SearchSpace,
    settings: &OptimizerSettings,
) -> Result<Optimized> {
    validate_search(space, settings)?;
    let exposures: Vec<Exposure> = match noise {
        NoiseSource::Fixed(params) => vec![Exposure::fixed(*params)],
        NoiseSource::Repeater(cfg) if space.spacings_km.is_empty() => vec![Exposure::repeater(cfg)?],
        NoiseSource::Repeater(cfg) => {
            space.spacings_km.iter().map(|&sp| Exposure::repeater(&cfg.with_spacing(sp))).collect::<Result<_>>()?
        }
    };
    let points: Vec<DiscretePoint<'_>> = space
        .families
        .iter()
        .flat_map(|family| exposures.iter().map(move |&exposure| DiscretePoint { family, exposure }))
        .collect();
    let logs: Vec<PointLog> = points
        .par_iter()
        .enumerate()
        .map(|(i, pt)| {
            let seed = settings.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            search_point(pt, objective, settings, seed)
        })
        .collect();

    let failures = logs.iter().map(|l| l.failures).sum();
    let first_error = logs.iter().find_map(|l| l.first_error.clone());
    let log: Vec<SweepRecord> = logs.into_iter().flat_map(|l| l.records).collect();
    let best = log
        .iter()
        .filter(|r| objective.value(r).is_finite())
        .min_by(|a, b| objective.value(a).total_cmp(&objective.value(b)))
        .cloned()
        .ok_or_else(|| Error::OptimizationFailed {
            evaluations: failures,
            first_error: first_error.unwrap_or_else(|| "no finite objective".into()),
        })?;
    Ok(Optimized { best, log, failures })
}
