//! Iterative sidelobe pinning under mainlobe and REIN constraints.
//!
//! Outer rounds fix a REIN floor `eps0` and the ball `|w|^2 <= 1 / (eps0 Dmax)`;
//! any weight with unit look gain inside that ball has REIN at least `eps0`.
//! Inner iterations start from the ball-constrained directivity maximizer,
//! locate the strongest sidelobes of the current pattern and constrain the
//! pattern at those points to the desired level (keeping the current phase),
//! until every sampled sidelobe is at or below the level. When the ball
//! leaves no room to do so, `eps0` is relaxed and the round restarts.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    steering_derivatives, steering_vector, CarrierContext, Direction, SensorArray,
};
use crate::metrics::{
    find_sidelobe_peaks, from_db, hermitian_form, mainlobe_radius, rein, sample_azimuth_cut,
    sample_pattern, to_db, worst_sidelobe, DirectivityMatrices, GridResolution, MainlobeExclusion,
    PatternGrid, QuadratureReport, QuadratureSpec, SidelobePeak, WeightVector, WeightedArray,
};
use crate::par::Execution;
use crate::qp::{
    mainlobe_constraints, solve_equality_qp, solve_norm_constrained_qp, EqualityConstraints,
    MainlobeConstraints, MainlobeRow,
};
use crate::reallift::{lift_matrix, lift_steering, lift_weight, unlift_weight};

/// Largest number of sidelobe points that can be pinned with `n` sensors
/// and `m` real mainlobe constraint rows.
pub fn m_max(n: usize, m: usize) -> Result<usize> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig(format!(
            "m_max needs N >= 1 and M >= 1 (got {n}, {m})"
        )));
    }
    let value = if m % 2 == 1 {
        n as i64 - (m as i64 + 1) / 2
    } else {
        n as i64 - m as i64 / 2
    };
    if value <= 0 {
        return Err(Error::OverConstrained { n, m, m_max: value });
    }
    Ok(value as usize)
}

/// Where sidelobes are sampled and controlled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SidelobeRegion {
    /// The cone `theta = theta0` through the look direction.
    #[default]
    AzimuthCut,
    /// The whole sphere.
    FullSphere,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    pub look: Direction,
    /// REIN floor `eps`, dB.
    pub epsilon_db: f64,
    /// Desired sidelobe level relative to the look-direction gain, dB (< 0).
    pub sidelobe_level_db: f64,
    /// Slack on the REIN termination test, dB.
    pub delta_db: f64,
    pub max_outer_iterations: usize,
    pub max_pin_iterations: usize,
    /// REIN floor relaxation per outer round, dB.
    pub relax_step_db: f64,
    /// Sidelobes count as met within this margin above the level, dB.
    pub sidelobe_tolerance_db: f64,
    pub region: SidelobeRegion,
    pub grid: GridResolution,
    pub exclusion: MainlobeExclusion,
    /// Sidelobe points pinned per iteration; defaults to `m_max`.
    pub peaks_per_iteration: Option<usize>,
    pub quadrature: QuadratureSpec,
    /// Include the zero-slope rows in the mainlobe constraints.
    pub mainlobe_slopes: bool,
}

impl SynthesisConfig {
    pub fn new(look: Direction, epsilon_db: f64, sidelobe_level_db: f64) -> Self {
        Self {
            look,
            epsilon_db,
            sidelobe_level_db,
            delta_db: 0.1,
            max_outer_iterations: 10,
            max_pin_iterations: 50,
            relax_step_db: 1.0,
            sidelobe_tolerance_db: 0.1,
            region: SidelobeRegion::AzimuthCut,
            grid: GridResolution::default(),
            exclusion: MainlobeExclusion::Auto,
            peaks_per_iteration: None,
            quadrature: QuadratureSpec::default(),
            mainlobe_slopes: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sidelobe_level_db < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sidelobe level {} dB must be < 0",
                self.sidelobe_level_db
            )));
        }
        if !(self.delta_db > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delta {} dB must be > 0",
                self.delta_db
            )));
        }
        if !self.epsilon_db.is_finite() {
            return Err(Error::InvalidConfig("epsilon must be finite".into()));
        }
        if !(self.relax_step_db > 0.0) {
            return Err(Error::InvalidConfig("relaxation step must be > 0".into()));
        }
        if !(self.grid.theta_step > 0.0 && self.grid.phi_step > 0.0) {
            return Err(Error::InvalidConfig("grid steps must be > 0".into()));
        }
        self.quadrature.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthesisStatus {
    Converged,
    SidelobeInfeasible,
    ReinInfeasible,
}

impl SynthesisStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SynthesisStatus::Converged => "converged",
            SynthesisStatus::SidelobeInfeasible => "sidelobe-infeasible",
            SynthesisStatus::ReinInfeasible => "rein-infeasible",
        }
    }
}

/// Sidelobe point constrained to a complex pattern value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinTarget {
    pub direction: Direction,
    pub target: Complex64,
    /// The pattern vanished here, so the target phase was set to zero.
    pub zero_phase: bool,
}

/// Desired magnitude `level` with the phase of the current pattern at each peak.
pub fn pin_targets(peaks: &[SidelobePeak], level: f64) -> Vec<PinTarget> {
    peaks
        .iter()
        .map(|p| {
            let mag = p.response.norm();
            if mag > 0.0 && mag.is_finite() {
                PinTarget {
                    direction: p.direction,
                    target: p.response * (level / mag),
                    zero_phase: false,
                }
            } else {
                log::warn!("pattern vanishes at a sidelobe peak; pinning with zero phase");
                PinTarget {
                    direction: p.direction,
                    target: Complex64::new(level, 0.0),
                    zero_phase: true,
                }
            }
        })
        .collect()
}

/// Appends `F(dir) = target` as two lifted rows: since `F = w^H v`,
/// `v_tilde . w_tilde = Re target` and `v_hat . w_tilde = -Im target`.
pub fn push_pin_rows(set: &mut EqualityConstraints, v: &DVector<Complex64>, target: Complex64) {
    let (vt, vh) = lift_steering(v);
    set.push(&vt, target.re);
    set.push(&vh, -target.im);
}

/// One pass of the pinning loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub round: usize,
    pub iteration: usize,
    pub epsilon_db: f64,
    pub bound: f64,
    pub norm_squared: f64,
    /// `None` when nothing lies outside the mainlobe.
    pub worst_sidelobe_db: Option<f64>,
    pub gamma_db: f64,
    pub directivity_db: f64,
    /// `w^H A w`.
    pub objective: f64,
    pub mu: f64,
    pub ball_active: bool,
    pub pins: usize,
    /// `F(look)` as `[re, im]`.
    pub mainlobe_gain: [f64; 2],
    /// Largest `|F(dir_i) - f_i|` over the pins that produced this weight.
    pub max_pin_residual: f64,
    /// `gamma - eps0` in linear units.
    pub rein_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedPeak {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub target: [f64; 2],
    pub zero_phase: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisDiagnostics {
    pub mainlobe_rows: Vec<MainlobeRow>,
    pub dropped_rows: Vec<MainlobeRow>,
    pub m_max: Option<usize>,
    pub quadrature: QuadratureReport,
    /// Factorizations that needed a diagonal load.
    pub loading_events: usize,
    pub max_loading: f64,
    pub final_mu: f64,
    pub mainlobe_residual: f64,
    pub slope_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub status: SynthesisStatus,
    pub weights: WeightVector,
    pub directivity_db: f64,
    pub gamma_db: f64,
    pub dmax_db: f64,
    pub epsilon_db: f64,
    pub epsilon_final_db: f64,
    pub sidelobe_level_db: f64,
    /// `None` when nothing lies outside the mainlobe.
    pub worst_sidelobe_db: Option<f64>,
    pub mainlobe_radius_deg: f64,
    pub pinned_peaks: Vec<PinnedPeak>,
    pub iterations: Vec<IterationRecord>,
    pub diagnostics: SynthesisDiagnostics,
}

impl SynthesisResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Pattern grid over the configured sidelobe region.
pub fn region_grid(
    array: &SensorArray,
    ctx: &CarrierContext,
    w: &WeightVector,
    look: &Direction,
    region: SidelobeRegion,
    grid: GridResolution,
    exec: Execution,
) -> PatternGrid {
    let src = WeightedArray {
        array,
        ctx,
        weights: w,
    };
    match region {
        SidelobeRegion::AzimuthCut => sample_azimuth_cut(&src, look.theta(), grid.phi_step, exec),
        SidelobeRegion::FullSphere => sample_pattern(&src, grid, exec),
    }
}

struct Evaluated {
    grid_worst_db: f64,
    radius: f64,
    grid: PatternGrid,
}

struct Problem<'a> {
    array: &'a SensorArray,
    ctx: &'a CarrierContext,
    cfg: &'a SynthesisConfig,
    mats: DirectivityMatrices,
    a_tilde: nalgebra::DMatrix<f64>,
    mainlobe: MainlobeConstraints,
    v0: DVector<Complex64>,
    slopes: (DVector<Complex64>, DVector<Complex64>),
    level: f64,
}

impl Problem<'_> {
    fn evaluate(&self, w: &WeightVector) -> Result<Evaluated> {
        let grid = region_grid(
            self.array,
            self.ctx,
            w,
            &self.cfg.look,
            self.cfg.region,
            self.cfg.grid,
            Execution::Sequential,
        );
        let radius = mainlobe_radius(&grid, &self.cfg.look, self.cfg.exclusion);
        let gain = w.0.dotc(&self.v0).norm();
        // a pattern with no sidelobe region meets any level
        let grid_worst_db = match worst_sidelobe(&grid, &self.cfg.look, radius) {
            Ok(worst) => 20.0 * (worst.magnitude / gain).log10(),
            Err(Error::EmptySidelobeRegion) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        Ok(Evaluated {
            grid_worst_db,
            radius,
            grid,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        round: usize,
        iteration: usize,
        eps0_db: f64,
        bound: f64,
        w: &WeightVector,
        eval: &Evaluated,
        mu: f64,
        active: bool,
        pins: &[PinTarget],
    ) -> Result<IterationRecord> {
        let objective = hermitian_form(&self.mats.a, &w.0);
        let gamma = rein(w, &self.mats.a)?;
        let gain = w.0.dotc(&self.v0);
        let d = hermitian_form(&self.mats.b, &w.0) / objective;
        let max_pin_residual = pins
            .iter()
            .map(|p| {
                (w.0.dotc(&steering_vector(self.array, self.ctx, &p.direction).0) - p.target).norm()
            })
            .fold(0.0, f64::max);
        Ok(IterationRecord {
            round,
            iteration,
            epsilon_db: eps0_db,
            bound,
            norm_squared: w.norm_squared(),
            worst_sidelobe_db: finite(eval.grid_worst_db),
            gamma_db: gamma.db,
            directivity_db: to_db(d),
            objective,
            mu,
            ball_active: active,
            pins: pins.len(),
            mainlobe_gain: [gain.re, gain.im],
            max_pin_residual,
            rein_margin: gamma.linear - from_db(eps0_db),
        })
    }
}

/// Runs the full synthesis for one array and carrier.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn synthesize(
    array: &SensorArray,
    ctx: &CarrierContext,
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult> {
    cfg.validate()?;
    let n = array.len();
    let mats = DirectivityMatrices::build_with(
        array,
        ctx,
        &cfg.look,
        &cfg.quadrature,
        Execution::Sequential,
    )?;
    let a_tilde = lift_matrix(&mats.a)?;
    let v0 = steering_vector(array, ctx, &cfg.look).0;
    let slopes = steering_derivatives(array, ctx, &cfg.look);
    let mainlobe = mainlobe_constraints(&v0, cfg.mainlobe_slopes.then_some((&slopes.0, &slopes.1)));

    let w_dmax = unlift_weight(&solve_equality_qp(&a_tilde, &mainlobe.set)?);
    let dmax = 1.0 / hermitian_form(&mats.a, &w_dmax);

    let m_cap = m_max(n, mainlobe.kept.len()).ok();
    let per_iteration = match (cfg.peaks_per_iteration, m_cap) {
        (Some(p), Some(cap)) if p > cap => {
            return Err(Error::OverConstrained {
                n,
                m: mainlobe.kept.len(),
                m_max: cap as i64,
            })
        }
        (Some(0), _) => {
            return Err(Error::InvalidConfig(
                "peaks per iteration must be >= 1".into(),
            ))
        }
        (Some(p), _) => Some(p),
        (None, cap) => cap,
    };

    let problem = Problem {
        array,
        ctx,
        cfg,
        mats,
        a_tilde,
        mainlobe,
        v0,
        slopes,
        level: from_db(cfg.sidelobe_level_db / 2.0),
    };

    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut loading_events = 0usize;
    let mut max_loading: f64 = 0.0;
    let mut note_loading = |load: f64| {
        if load > 0.0 {
            loading_events += 1;
            max_loading = max_loading.max(load);
        }
    };

    struct Best {
        worst_db: f64,
        w: WeightVector,
        pins: Vec<PinTarget>,
        eps0_db: f64,
        mu: f64,
        radius: f64,
    }
    let mut best: Option<Best> = None;
    let mut last_eps0 = cfg.epsilon_db;

    for round in 0..=cfg.max_outer_iterations {
        let eps0_db = cfg.epsilon_db - round as f64 * cfg.relax_step_db;
        last_eps0 = eps0_db;
        let bound = 1.0 / (from_db(eps0_db) * dmax);

        let start = match solve_norm_constrained_qp(&problem.a_tilde, &problem.mainlobe.set, bound)
        {
            Ok(s) => s,
            Err(Error::InfeasibleBall { .. }) => continue,
            Err(e) => return Err(e),
        };
        note_loading(start.diagonal_loading);
        let mut w = WeightVector(unlift_weight(&start.w()));
        let mut mu = start.mu;
        let mut active = start.active;
        let mut ball_limited = start.active;
        let mut pins: Vec<PinTarget> = Vec::new();

        for iteration in 0..=cfg.max_pin_iterations {
            let eval = problem.evaluate(&w)?;
            let rec = problem.record(
                round, iteration, eps0_db, bound, &w, &eval, mu, active, &pins,
            )?;
            let gamma_db = rec.gamma_db;
            trace.push(rec);

            if best
                .as_ref()
                .is_none_or(|b| eval.grid_worst_db < b.worst_db)
            {
                best = Some(Best {
                    worst_db: eval.grid_worst_db,
                    w: w.clone(),
                    pins: pins.clone(),
                    eps0_db,
                    mu,
                    radius: eval.radius,
                });
            }

            if eval.grid_worst_db <= cfg.sidelobe_level_db + cfg.sidelobe_tolerance_db {
                if gamma_db >= eps0_db - cfg.delta_db {
                    return finish(
                        &problem,
                        SynthesisStatus::Converged,
                        w,
                        pins,
                        eps0_db,
                        mu,
                        eval.radius,
                        dmax,
                        trace,
                        m_cap,
                        loading_events,
                        max_loading,
                    );
                }
                // REIN misses its floor by more than delta: relax and restart
                break;
            }
            if iteration == cfg.max_pin_iterations {
                break;
            }
            let Some(cap) = per_iteration else {
                return Err(Error::OverConstrained {
                    n,
                    m: problem.mainlobe.kept.len(),
                    m_max: n as i64 - problem.mainlobe.kept.len().div_ceil(2) as i64,
                });
            };

            let src = WeightedArray {
                array,
                ctx,
                weights: &w,
            };
            let gain = w.0.dotc(&problem.v0).norm();
            let mut peaks: Vec<SidelobePeak> =
                find_sidelobe_peaks(&eval.grid, &cfg.look, eval.radius, usize::MAX, Some(&src))?
                    .into_iter()
                    .filter(|p| p.magnitude > problem.level * gain)
                    .take(cap)
                    .collect();
            if peaks.is_empty() {
                // worst sample sits on a slope of the cap edge rather than a maximum
                peaks.push(worst_sidelobe(&eval.grid, &cfg.look, eval.radius)?);
            }

            let mut solved = None;
            while !peaks.is_empty() {
                let targets = pin_targets(&peaks, problem.level);
                let mut set = problem.mainlobe.set.clone();
                for t in &targets {
                    push_pin_rows(
                        &mut set,
                        &steering_vector(array, ctx, &t.direction).0,
                        t.target,
                    );
                }
                match solve_norm_constrained_qp(&problem.a_tilde, &set, bound) {
                    Ok(sol) => {
                        solved = Some((sol, targets));
                        break;
                    }
                    Err(Error::InfeasibleBall { .. }) => break,
                    Err(Error::RankDeficient { .. }) | Err(Error::Singular(_)) => {
                        peaks.pop();
                    }
                    Err(e) => return Err(e),
                }
            }
            let Some((sol, targets)) = solved else {
                ball_limited = true;
                break;
            };
            note_loading(sol.diagonal_loading);
            w = WeightVector(unlift_weight(&sol.w()));
            mu = sol.mu;
            active = sol.active;
            ball_limited |= sol.active;
            pins = targets;
        }

        if !ball_limited {
            let b = best.expect("at least one iterate");
            return finish(
                &problem,
                SynthesisStatus::SidelobeInfeasible,
                b.w,
                b.pins,
                b.eps0_db,
                b.mu,
                b.radius,
                dmax,
                trace,
                m_cap,
                loading_events,
                max_loading,
            );
        }
    }

    match best {
        Some(b) => finish(
            &problem,
            SynthesisStatus::ReinInfeasible,
            b.w,
            b.pins,
            b.eps0_db,
            b.mu,
            b.radius,
            dmax,
            trace,
            m_cap,
            loading_events,
            max_loading,
        ),
        None => {
            // no floor admitted a weight with unit gain: report the
            // unconstrained maximizer
            let w = WeightVector(w_dmax);
            let radius = problem.evaluate(&w)?.radius;
            finish(
                &problem,
                SynthesisStatus::ReinInfeasible,
                w,
                Vec::new(),
                last_eps0,
                0.0,
                radius,
                dmax,
                trace,
                m_cap,
                loading_events,
                max_loading,
            )
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &Problem<'_>,
    status: SynthesisStatus,
    w: WeightVector,
    pins: Vec<PinTarget>,
    eps0_db: f64,
    mu: f64,
    radius: f64,
    dmax: f64,
    iterations: Vec<IterationRecord>,
    m_cap: Option<usize>,
    loading_events: usize,
    max_loading: f64,
) -> Result<SynthesisResult> {
    let objective = hermitian_form(&p.mats.a, &w.0);
    let d = hermitian_form(&p.mats.b, &w.0) / objective;
    let gamma = rein(&w, &p.mats.a)?;
    let eval = p.evaluate(&w)?;
    let gain = w.0.dotc(&p.v0);
    let wt = lift_weight(&w.0);
    let slope_residual = if p.cfg.mainlobe_slopes {
        let (st, sp) = (&p.slopes.0, &p.slopes.1);
        let rt = lift_steering(st).0.dot(&wt);
        let rp = lift_steering(sp).0.dot(&wt);
        rt.abs().max(rp.abs())
    } else {
        0.0
    };
    Ok(SynthesisResult {
        status,
        directivity_db: to_db(d),
        gamma_db: gamma.db,
        dmax_db: to_db(dmax),
        epsilon_db: p.cfg.epsilon_db,
        epsilon_final_db: eps0_db,
        sidelobe_level_db: p.cfg.sidelobe_level_db,
        worst_sidelobe_db: finite(eval.grid_worst_db),
        mainlobe_radius_deg: radius.to_degrees(),
        pinned_peaks: pins
            .iter()
            .map(|t| PinnedPeak {
                theta_deg: t.direction.theta().to_degrees(),
                phi_deg: t.direction.phi().to_degrees(),
                target: [t.target.re, t.target.im],
                zero_phase: t.zero_phase,
            })
            .collect(),
        iterations,
        diagnostics: SynthesisDiagnostics {
            mainlobe_rows: p.mainlobe.kept.clone(),
            dropped_rows: p.mainlobe.dropped.clone(),
            m_max: m_cap,
            quadrature: p.mats.quadrature,
            loading_events,
            max_loading,
            final_mu: mu,
            mainlobe_residual: (gain - Complex64::new(1.0, 0.0)).norm(),
            slope_residual,
        },
        weights: w,
    })
}

/// Result of the radius search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSolution {
    pub radius_m: f64,
    pub r_over_lambda: f64,
    pub gamma_db: f64,
    pub dmax_db: f64,
    pub evaluations: usize,
}

/// Bracket and tolerances for [`radius_for_rein`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSearch {
    pub lo_over_lambda: f64,
    pub hi_over_lambda: f64,
    pub tolerance_db: f64,
    pub quadrature: QuadratureSpec,
    pub max_evaluations: usize,
}

impl Default for RadiusSearch {
    fn default() -> Self {
        Self {
            lo_over_lambda: 0.01,
            hi_over_lambda: 0.3,
            tolerance_db: 0.05,
            quadrature: QuadratureSpec::default(),
            max_evaluations: 100,
        }
    }
}

/// `(Dmax, gamma)` in dB of the maximum-directivity weight of an `n`-sensor
/// circular array of radius `radius`.
pub fn uca_max_directivity(
    n: usize,
    radius: f64,
    ctx: &CarrierContext,
    look: &Direction,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let array = crate::geometry::make_uca(n, radius, 0.0)?;
    let mats = DirectivityMatrices::build_with(&array, ctx, look, quad, Execution::Sequential)?;
    let v0 = steering_vector(&array, ctx, look).0;
    let (st, sp) = steering_derivatives(&array, ctx, look);
    let md = crate::qp::max_directivity(&mats.a, &v0, Some((&st, &sp)))?;
    let gamma = rein(&md.weights, &mats.a)?;
    Ok((to_db(md.dmax), gamma.db))
}

/// Radius at which the maximum-directivity weight of an `n`-sensor circular
/// array has REIN `epsilon_db`, by bisection on the radius.
pub fn radius_for_rein(
    n: usize,
    ctx: &CarrierContext,
    epsilon_db: f64,
    look: &Direction,
    search: &RadiusSearch,
) -> Result<RadiusSolution> {
    let lambda = ctx.wavelength();
    let eval = |r_over: f64| uca_max_directivity(n, r_over * lambda, ctx, look, &search.quadrature);
    let (mut lo, mut hi) = (search.lo_over_lambda, search.hi_over_lambda);
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidConfig(format!(
            "radius bracket [{lo}, {hi}] lambda is empty"
        )));
    }
    let (_, mut g_lo) = eval(lo)?;
    let (_, mut g_hi) = eval(hi)?;
    let mut evaluations = 2;
    if !(g_lo <= epsilon_db && epsilon_db <= g_hi) {
        return Err(Error::BracketFailure(format!(
            "REIN target {epsilon_db} dB outside [{g_lo:.3}, {g_hi:.3}] dB over r in [{lo}, {hi}] lambda"
        )));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let (d_mid, g_mid) = eval(mid)?;
        evaluations += 1;
        if !(g_lo <= g_mid && g_mid <= g_hi) {
            return Err(Error::BracketFailure(format!(
                "REIN not monotone in radius near {mid:.5} lambda ({g_lo:.3}, {g_mid:.3}, {g_hi:.3} dB)"
            )));
        }
        if (g_mid - epsilon_db).abs() <= search.tolerance_db {
            return Ok(RadiusSolution {
                radius_m: mid * lambda,
                r_over_lambda: mid,
                gamma_db: g_mid,
                dmax_db: d_mid,
                evaluations,
            });
        }
        if evaluations >= search.max_evaluations {
            return Err(Error::BracketFailure(format!(
                "no convergence after {evaluations} evaluations"
            )));
        }
        if g_mid < epsilon_db {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
}

/// Default look direction: the horizon along +x.
pub fn default_look() -> Direction {
    Direction::horizontal(0.0)
}
