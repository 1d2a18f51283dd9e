//! Quadratic-transform / penalty / CCCP beamformer.
//!
//! The sum-of-ratios objective `q1(x) = Σ_m A_m²/(ρA_m² + σ²)` is lifted to
//! `Σ_m 2λ_m·A_m(x) − λ_m²(ρA_m²(x) + σ²)`, which is tight at
//! `λ_m = A_m/(ρA_m² + σ²)`. For fixed `λ` the unit-amplitude constraint is
//! relaxed with a penalty `μ·‖x − t‖²` towards a feasible vector `t`, and the
//! resulting difference-of-convex problem in `x` is handled by CCCP: the
//! concave part `f1 = Σ 2λ_m A_m` is linearized, which leaves a strictly
//! convex quadratic with a closed-form minimizer. The feasible vector is then
//! refreshed by a per-element phase search.
//!
//! Complex gradients follow the Wirtinger convention `g = ∂f/∂x` (with `x*`
//! held fixed). For a real `f`, `∂f/∂Re x_n = 2·Re g_n` and
//! `∂f/∂Im x_n = −2·Im g_n`.

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{rng_from_seed, ChannelRealization};
use crate::error::{check_len, Error, Result};
use crate::hardware::{
    feasibility_residual, feasible_point, reflection_coefficient, wrap_phase,
    PhaseModelParams, ReflectionState,
};
use crate::linalg::{hermitian_pd_solve, is_finite_vec, max_abs};
use crate::metrics::{amplitudes, q1_from_amplitudes, se_from_q1, ImpairmentParams};
use crate::scalar::{lit, unit_phasor, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitStrategy {
    ZeroPhase,
    RandomPhase,
    /// Co-phase every reflected path with the direct path at antenna 1.
    DirectAlign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Initial penalty weight as a multiple of `ρ·max_m λ_m²`.
    pub penalty_mu: f64,
    /// Multiplier applied to `μ` after every inner round; 1 keeps `μ` fixed.
    pub penalty_growth: f64,
    pub outer_tol: f64,
    pub inner_tol: f64,
    /// Largest tolerated `max_n |x_n − t_n|` before the inner loop may stop.
    pub feasibility_tol: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    pub line_search_grid: usize,
    /// Golden-section iterations after the grid pass.
    pub line_search_refine: usize,
    pub init_strategy: InitStrategy,
    /// Draws evaluated by `RandomPhase` initialization; the best is kept.
    pub init_restarts: usize,
    pub init_seed: u64,
    /// Times an outer step that fails to raise `q1` is retried with a
    /// tenfold larger starting penalty before the solver stops.
    pub penalty_retries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            penalty_mu: 10.0,
            penalty_growth: 2.0,
            outer_tol: 1e-6,
            inner_tol: 1e-6,
            feasibility_tol: 1e-6,
            max_outer_iters: 200,
            max_inner_iters: 50,
            line_search_grid: 64,
            line_search_refine: 20,
            init_strategy: InitStrategy::DirectAlign,
            init_restarts: 1,
            init_seed: 0,
            penalty_retries: 4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("solver.penalty_mu", self.penalty_mu),
            ("solver.outer_tol", self.outer_tol),
            ("solver.inner_tol", self.inner_tol),
            ("solver.feasibility_tol", self.feasibility_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "must be finite and positive"));
            }
        }
        if !(self.penalty_growth >= 1.0) || !self.penalty_growth.is_finite() {
            return Err(Error::validation("solver.penalty_growth", "must be at least 1"));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::validation("solver.max_outer_iters", "must be at least 1"));
        }
        if self.max_inner_iters == 0 {
            return Err(Error::validation("solver.max_inner_iters", "must be at least 1"));
        }
        if self.line_search_grid < 8 {
            return Err(Error::validation("solver.line_search_grid", "must be at least 8"));
        }
        if self.line_search_refine == 0 {
            return Err(Error::validation("solver.line_search_refine", "must be at least 1"));
        }
        if self.init_restarts == 0 {
            return Err(Error::validation("solver.init_restarts", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct SolveReport<T: Real> {
    pub final_state: ReflectionState<T>,
    /// `q1` at the initial point, then after every accepted outer iteration.
    pub objective_trace: Vec<T>,
    pub se_trace: Vec<T>,
    pub lambda_final: Array1<T>,
    /// Penalty weight reached at the end of each outer iteration.
    pub mu_trace: Vec<T>,
    pub outer_iters: usize,
    pub total_inner_iters: usize,
    pub termination: Termination,
    pub feasibility_residual: T,
    /// Gradient terms evaluated with a clamped amplitude.
    pub clamped_terms: usize,
}

impl<T: Real> SolveReport<T> {
    pub fn final_q1(&self) -> T {
        *self.objective_trace.last().expect("trace holds the initial point")
    }

    pub fn final_se(&self) -> T {
        *self.se_trace.last().expect("trace holds the initial point")
    }
}

/// Optimal auxiliaries `λ_m = A_m/(ρA_m² + σ²)`.
pub fn update_lambda<T: Real>(amps: &Array1<T>, imp: &ImpairmentParams<T>) -> Array1<T> {
    let rho = imp.rho();
    amps.mapv(|a| a / (rho * a * a + imp.sigma2))
}

fn transformed_from_amplitudes<T: Real>(amps: &Array1<T>, lambda: &Array1<T>, imp: &ImpairmentParams<T>) -> T {
    let rho = imp.rho();
    amps.iter()
        .zip(lambda.iter())
        .map(|(&a, &l)| lit::<T>(2.0) * l * a - l * l * (rho * a * a + imp.sigma2))
        .sum()
}

/// `Σ_m 2λ_m·A_m(x) − λ_m²(ρA_m²(x) + σ²)`.
pub fn transformed_objective<T: Real>(
    real: &ChannelRealization<T>,
    x: &Array1<Cx<T>>,
    lambda: &Array1<T>,
    imp: &ImpairmentParams<T>,
) -> Result<T> {
    check_len("transformed_objective lambda", real.m(), lambda.len())?;
    Ok(transformed_from_amplitudes(&amplitudes(real, x)?, lambda, imp))
}

/// Penalized objective: transformed objective minus `μ·‖x − t‖²`.
pub fn penalized_objective<T: Real>(
    real: &ChannelRealization<T>,
    x: &Array1<Cx<T>>,
    target: &Array1<Cx<T>>,
    lambda: &Array1<T>,
    mu: T,
    imp: &ImpairmentParams<T>,
) -> Result<T> {
    check_len("penalized_objective target", x.len(), target.len())?;
    let dist: T = x.iter().zip(target.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok(transformed_objective(real, x, lambda, imp)? - mu * dist)
}

#[derive(Debug, Clone)]
pub struct F1Gradient<T: Real> {
    pub grad: Array1<Cx<T>>,
    /// Number of antennas whose amplitude fell below the division guard.
    pub clamped: usize,
}

/// Amplitudes below this are clamped in `grad_f1`.
pub fn amplitude_guard<T: Real>(imp: &ImpairmentParams<T>) -> T {
    lit::<T>(1e-12) * (imp.sigma2.sqrt() + T::one())
}

/// Wirtinger gradient of `f1(x) = Σ 2λ_m·A_m(x)`:
/// `Σ_m (λ_m/A_m)·conj(h_{d,m} + v_mᵀx)·v_m`.
pub fn grad_f1<T: Real>(
    real: &ChannelRealization<T>,
    x: &Array1<Cx<T>>,
    lambda: &Array1<T>,
    imp: &ImpairmentParams<T>,
) -> Result<F1Gradient<T>> {
    check_len("grad_f1 lambda", real.m(), lambda.len())?;
    let h = real.composite_channel(x)?;
    let guard = amplitude_guard(imp);
    let cascade = real.cascade();
    let mut grad = Array1::<Cx<T>>::zeros(real.n());
    let mut clamped = 0;
    for (m, (&hm, &l)) in h.iter().zip(lambda.iter()).enumerate() {
        if l == T::zero() {
            continue;
        }
        let mut a = hm.norm();
        if a < guard {
            a = guard;
            clamped += 1;
        }
        let w = hm.conj() * (l / a);
        for (g, v) in grad.iter_mut().zip(cascade.row(m).iter()) {
            *g += w * v;
        }
    }
    Ok(F1Gradient { grad, clamped })
}

/// Closed-form CCCP step: minimizer over `x` of
/// `Σ λ_m²(ρA_m² + σ²) + μ‖x − t‖² − 2·Re(gᵀ(x − x_t))` with `g = grad_f1(x_t)`.
///
/// Stationarity gives `(Hᴴ D H + μI)·x = conj(g) − Hᴴ D h_d + μ·t` with
/// `D = diag(ρλ_m²)`; the system is Hermitian positive definite for `μ > 0`.
pub fn cccp_x_update<T: Real>(
    real: &ChannelRealization<T>,
    x_t: &Array1<Cx<T>>,
    lambda: &Array1<T>,
    target: &Array1<Cx<T>>,
    mu: T,
    imp: &ImpairmentParams<T>,
) -> Result<Array1<Cx<T>>> {
    Ok(cccp_step(real, x_t, lambda, target, mu, imp)?.0)
}

fn cccp_step<T: Real>(
    real: &ChannelRealization<T>,
    x_t: &Array1<Cx<T>>,
    lambda: &Array1<T>,
    target: &Array1<Cx<T>>,
    mu: T,
    imp: &ImpairmentParams<T>,
) -> Result<(Array1<Cx<T>>, usize)> {
    check_len("cccp_x_update target", real.n(), target.len())?;
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(Error::Numerical(format!("penalty weight must be positive, got {mu}")));
    }
    if !is_finite_vec(x_t) || !is_finite_vec(target) || lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::Numerical("non-finite input to x-update".into()));
    }
    let F1Gradient { grad, clamped } = grad_f1(real, x_t, lambda, imp)?;
    let n = real.n();
    let rho = imp.rho();
    let cascade = real.cascade();
    let weights: Vec<T> = lambda.iter().map(|&l| rho * l * l).collect();

    let mut system = Array2::<Cx<T>>::zeros((n, n));
    let mut rhs = Array1::from_iter(
        grad.iter()
            .zip(target.iter())
            .map(|(g, t)| g.conj() + t * mu),
    );
    {
        let sys = system.as_slice_mut().expect("standard layout");
        let mut scaled = vec![Cx::new(T::zero(), T::zero()); n];
        for (m, &d) in weights.iter().enumerate() {
            if d == T::zero() {
                continue;
            }
            let row = cascade.row(m);
            let hd = real.h_d()[m];
            for (s, v) in scaled.iter_mut().zip(row.iter()) {
                *s = v.conj() * d;
            }
            for k in 0..n {
                let ck = scaled[k];
                rhs[k] -= ck * hd;
                // lower triangle only
                let dst = &mut sys[k * n..k * n + k + 1];
                for (entry, v) in dst.iter_mut().zip(row.iter()) {
                    *entry += ck * v;
                }
            }
        }
    }
    for k in 0..n {
        system[[k, k]] += Cx::new(mu, T::zero());
    }
    Ok((hermitian_pd_solve(&system, &rhs)?, clamped))
}

/// Per-element phase search for the feasible coefficient closest to a
/// given complex value.
///
/// A uniform grid of `grid` points is combined with a window of `grid/4`
/// points spanning `±π/8` around `arg z`; the best sample is refined with
/// `refine` golden-section iterations inside its neighbouring grid cells.
/// Ties go to the smallest phase. The grid's coefficients are tabulated once.
pub struct PhaseSearch<'a, T: Real> {
    params: &'a PhaseModelParams<T>,
    sin_phi: T,
    cos_phi: T,
    refine: usize,
    window: usize,
    spacing: T,
    table: Vec<(T, Cx<T>)>,
}

impl<'a, T: Real> PhaseSearch<'a, T> {
    pub fn new(params: &'a PhaseModelParams<T>, grid: usize, refine: usize) -> Self {
        let grid = grid.max(8);
        let spacing = T::TAU() / lit(grid as f64);
        let table = if params.is_constant_amplitude() {
            Vec::new()
        } else {
            (0..grid)
                .map(|k| {
                    let theta = wrap_phase(-T::PI() + spacing * lit(k as f64));
                    (theta, reflection_coefficient(theta, params))
                })
                .collect()
        };
        Self {
            params,
            sin_phi: params.phi.sin(),
            cos_phi: params.phi.cos(),
            refine,
            window: (grid / 4).max(8),
            spacing,
            table,
        }
    }

    pub fn with_config(params: &'a PhaseModelParams<T>, cfg: &SolverConfig) -> Self {
        Self::new(params, cfg.line_search_grid, cfg.line_search_refine)
    }

    /// `|z − α(θ)e^{jθ}|²`.
    pub fn cost(&self, z: Cx<T>, theta: T) -> T {
        let p = self.params;
        let (s, c) = theta.sin_cos();
        let base = ((s * self.cos_phi - c * self.sin_phi + T::one()) / lit(2.0))
            .max(T::zero())
            .min(T::one());
        let shaped = if p.gamma == T::zero() { T::one() } else { base.powf(p.gamma) };
        let amp = (T::one() - p.alpha_min) * shaped + p.alpha_min;
        (z - Cx::new(c * amp, s * amp)).norm_sqr()
    }

    pub fn best_phase(&self, z: Cx<T>) -> T {
        let params = self.params;
        let zero = Cx::new(T::zero(), T::zero());
        if params.is_constant_amplitude() {
            return if z == zero { -T::PI() } else { wrap_phase(z.arg()) };
        }
        if z == zero {
            return params.min_amplitude_phase();
        }

        let mut best = (T::infinity(), -T::PI());
        let offer = |best: &mut (T, T), theta: T, c: T| {
            if c < best.0 || (c == best.0 && theta < best.1) {
                *best = (c, theta);
            }
        };
        for &(theta, coeff) in &self.table {
            offer(&mut best, theta, (z - coeff).norm_sqr());
        }
        let half_width = T::FRAC_PI_8();
        let center = z.arg();
        for k in 0..=self.window {
            let offset = lit::<T>(2.0) * half_width * lit(k as f64) / lit(self.window as f64);
            let theta = wrap_phase(center - half_width + offset);
            offer(&mut best, theta, self.cost(z, theta));
        }

        // golden-section on the unwrapped bracket around the best sample
        let inv_phi = lit::<T>(0.618_033_988_749_894_8);
        let (mut a, mut b) = (best.1 - self.spacing, best.1 + self.spacing);
        let mut c = b - (b - a) * inv_phi;
        let mut d = a + (b - a) * inv_phi;
        let (mut fc, mut fd) = (self.cost(z, c), self.cost(z, d));
        for _ in 0..self.refine {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - (b - a) * inv_phi;
                fc = self.cost(z, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + (b - a) * inv_phi;
                fd = self.cost(z, d);
            }
        }
        let theta = wrap_phase((a + b) / lit(2.0));
        offer(&mut best, theta, self.cost(z, theta));
        best.1
    }
}

/// Phase minimizing `|z − α(θ)e^{jθ}|²` over `[-π, π)`; see [`PhaseSearch`].
pub fn project_phase<T: Real>(z: Cx<T>, params: &PhaseModelParams<T>, grid: usize, refine: usize) -> T {
    PhaseSearch::new(params, grid, refine).best_phase(z)
}

/// Per-element phase search for the feasible vector closest to `x`.
pub fn theta_line_search<T: Real>(x: &Array1<Cx<T>>, params: &PhaseModelParams<T>, cfg: &SolverConfig) -> Array1<T> {
    let search = PhaseSearch::with_config(params, cfg);
    x.mapv(|z| search.best_phase(z))
}

/// Phase search that keeps the previous phase of an element whenever it is
/// at least as close to `x_n` as the searched one.
fn refresh_phases<T: Real>(
    x: &Array1<Cx<T>>,
    previous: &Array1<T>,
    params: &PhaseModelParams<T>,
    cfg: &SolverConfig,
) -> Array1<T> {
    let search = PhaseSearch::with_config(params, cfg);
    let mut theta = x.mapv(|z| search.best_phase(z));
    for ((t, &old), &z) in theta.iter_mut().zip(previous.iter()).zip(x.iter()) {
        if search.cost(z, old) < search.cost(z, *t) {
            *t = old;
        }
    }
    theta
}

/// Feasible starting point for `strategy`.
pub fn initial_state<T: Real>(
    real: &ChannelRealization<T>,
    imp: &ImpairmentParams<T>,
    params: &PhaseModelParams<T>,
    cfg: &SolverConfig,
) -> Result<ReflectionState<T>> {
    let n = real.n();
    match cfg.init_strategy {
        InitStrategy::ZeroPhase => Ok(feasible_point(&vec![T::zero(); n], params)),
        InitStrategy::DirectAlign => {
            if real.m() == 0 {
                return Ok(feasible_point(&vec![T::zero(); n], params));
            }
            let hd_phase = real.h_d()[0].arg();
            let search = PhaseSearch::with_config(params, cfg);
            let theta: Vec<T> = real
                .cascade()
                .row(0)
                .iter()
                .map(|v| {
                    let target = unit_phasor(hd_phase - v.arg());
                    search.best_phase(target)
                })
                .collect();
            Ok(feasible_point(&theta, params))
        }
        InitStrategy::RandomPhase => {
            let mut rng = rng_from_seed(cfg.init_seed);
            let mut best: Option<(T, ReflectionState<T>)> = None;
            for _ in 0..cfg.init_restarts {
                let theta: Vec<T> = (0..n).map(|_| random_phase(&mut rng)).collect();
                let state = feasible_point(&theta, params);
                let q = q1_from_amplitudes(&amplitudes(real, &state.x)?, imp);
                if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
                    best = Some((q, state));
                }
            }
            Ok(best.expect("at least one restart").1)
        }
    }
}

pub(crate) fn random_phase<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    wrap_phase(lit(u))
}

/// Result of one penalty round at fixed `λ` and `μ`.
#[derive(Debug, Clone)]
pub struct InnerStep<T: Real> {
    /// Unconstrained iterate from the CCCP step.
    pub x: Array1<Cx<T>>,
    pub theta: Array1<T>,
    /// Feasible vector generated by `theta`.
    pub target: Array1<Cx<T>>,
    pub penalized: T,
    /// `max_n |x_n − target_n|`.
    pub residual: T,
    pub clamped: usize,
}

/// One CCCP x-update followed by the phase refresh.
#[allow(clippy::too_many_arguments)]
pub fn penalty_round<T: Real>(
    real: &ChannelRealization<T>,
    imp: &ImpairmentParams<T>,
    params: &PhaseModelParams<T>,
    cfg: &SolverConfig,
    lambda: &Array1<T>,
    mu: T,
    x: &Array1<Cx<T>>,
    theta: &Array1<T>,
) -> Result<InnerStep<T>> {
    let target = feasible_point(theta.as_slice().expect("contiguous"), params).x;
    let (x_next, clamped) = cccp_step(real, x, lambda, &target, mu, imp)?;
    let theta_next = refresh_phases(&x_next, theta, params, cfg);
    let target_next = feasible_point(theta_next.as_slice().expect("contiguous"), params).x;
    let residual = max_abs(&(&x_next - &target_next));
    let penalized = penalized_objective(real, &x_next, &target_next, lambda, mu, imp)?;
    Ok(InnerStep {
        x: x_next,
        theta: theta_next,
        target: target_next,
        penalized,
        residual,
        clamped,
    })
}

/// Starting penalty weight for a given `λ`.
pub fn initial_mu<T: Real>(lambda: &Array1<T>, grad_scale: T, imp: &ImpairmentParams<T>, cfg: &SolverConfig) -> T {
    let max_l2 = lambda.iter().fold(T::zero(), |acc, &l| acc.max(l * l));
    let floor = lit::<T>(1e-8) * (T::one() + grad_scale);
    lit::<T>(cfg.penalty_mu) * (imp.rho() * max_l2).max(floor)
}

/// Runs the full alternating scheme from the configured initial point.
pub fn solve<T: Real>(
    real: &ChannelRealization<T>,
    imp: &ImpairmentParams<T>,
    params: &PhaseModelParams<T>,
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    let init = initial_state(real, imp, params, cfg)?;
    solve_from(real, imp, params, cfg, init)
}

/// Same as [`solve`] but starting from a caller-supplied feasible state.
pub fn solve_from<T: Real>(
    real: &ChannelRealization<T>,
    imp: &ImpairmentParams<T>,
    params: &PhaseModelParams<T>,
    cfg: &SolverConfig,
    init: ReflectionState<T>,
) -> Result<SolveReport<T>> {
    imp.validate()?;
    params.validate()?;
    cfg.validate()?;
    check_len("solve initial state", real.n(), init.len())?;

    let growth: T = lit(cfg.penalty_growth);
    let inner_tol: T = lit(cfg.inner_tol);
    let outer_tol: T = lit(cfg.outer_tol);
    let feas_tol: T = lit(cfg.feasibility_tol);

    let mut state = init;
    let mut amps = amplitudes(real, &state.x)?;
    let mut q_cur = q1_from_amplitudes(&amps, imp);
    let mut report = SolveReport {
        final_state: state.clone(),
        objective_trace: vec![q_cur],
        se_trace: vec![se_from_q1(q_cur, imp)],
        lambda_final: update_lambda(&amps, imp),
        mu_trace: Vec::new(),
        outer_iters: 0,
        total_inner_iters: 0,
        termination: Termination::Converged,
        feasibility_residual: feasibility_residual(&state.x, params),
        clamped_terms: 0,
    };
    if real.n() == 0 {
        return Ok(report);
    }

    let mut termination = Termination::MaxIters;
    let mut retries = 0;
    let mut mu_scale = T::one();
    for _ in 0..cfg.max_outer_iters {
        report.outer_iters += 1;
        let lambda = update_lambda(&amps, imp);
        let grad_scale = max_abs(&grad_f1(real, &state.x, &lambda, imp)?.grad);
        let mut mu = initial_mu(&lambda, grad_scale, imp, cfg) * mu_scale;

        let mut x = state.x.clone();
        let mut theta = state.theta.clone();
        let mut q2_prev = transformed_from_amplitudes(&amps, &lambda, imp);
        for _ in 0..cfg.max_inner_iters {
            let step = penalty_round(real, imp, params, cfg, &lambda, mu, &x, &theta)?;
            report.total_inner_iters += 1;
            report.clamped_terms += step.clamped;
            let settled = (step.penalized - q2_prev).abs() <= inner_tol * (T::one() + step.penalized.abs());
            x = step.x;
            theta = step.theta;
            q2_prev = step.penalized;
            if step.residual <= feas_tol && settled {
                break;
            }
            mu *= growth;
        }
        report.mu_trace.push(mu);

        let candidate = feasible_point(theta.as_slice().expect("contiguous"), params);
        let cand_amps = amplitudes(real, &candidate.x)?;
        let q_new = q1_from_amplitudes(&cand_amps, imp);
        if !q_new.is_finite() {
            return Err(Error::Numerical("objective became non-finite".into()));
        }
        if q_new < q_cur {
            // keep the incumbent and take a shorter step from it
            if retries < cfg.penalty_retries {
                retries += 1;
                mu_scale *= lit(10.0);
                continue;
            }
            termination = Termination::Converged;
            break;
        }
        retries = 0;
        mu_scale = T::one();
        let gain = q_new - q_cur;
        state = candidate;
        amps = cand_amps;
        q_cur = q_new;
        report.objective_trace.push(q_cur);
        report.se_trace.push(se_from_q1(q_cur, imp));
        if gain <= outer_tol * q_cur.abs().max(T::min_positive_value()) {
            termination = Termination::Converged;
            break;
        }
    }

    report.termination = termination;
    report.lambda_final = update_lambda(&amps, imp);
    report.feasibility_residual = feasibility_residual(&state.x, params);
    report.final_state = state;
    Ok(report)
}
