//! Reference methods: projected gradient ascent on `q1` and the best of a
//! number of random feasible phase draws.

use ndarray::Array1;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{check_len, Error, Result};
use crate::hardware::{feasibility_residual, feasible_point, PhaseModelParams, ReflectionState};
use crate::linalg::frobenius_sq;
use crate::metrics::{amplitudes, q1_from_amplitudes, se_from_q1, ImpairmentParams};
use crate::optimizer::{initial_state, random_phase, theta_line_search, update_lambda, SolveReport, SolverConfig, Termination};
use crate::scalar::{lit, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    Fixed,
    /// Halve the step until `q1` does not decrease.
    Backtracking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PgaConfig {
    /// Initial step; `None` uses `1/(‖H‖_F²/σ² + 1)`.
    pub step_size: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
    pub step_rule: StepRule,
}

impl Default for PgaConfig {
    fn default() -> Self {
        Self {
            step_size: None,
            max_iters: 500,
            tol: 1e-6,
            step_rule: StepRule::Backtracking,
        }
    }
}

impl PgaConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.step_size {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::validation("pga.step_size", "must be finite and positive"));
            }
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::validation("pga.tol", "must be finite and positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("pga.max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Wirtinger derivative of `q1`:
/// `Σ_m c_m/(ρA_m² + σ²) − ρ·c_m·A_m²/(ρA_m² + σ²)²` with
/// `c_m = h*_{d,m}·v_m + v_m·v_mᴴ·x* = conj(h_{d,m} + v_mᵀx)·v_m`.
pub fn q1_gradient<T: Real>(
    real: &ChannelRealization<T>,
    x: &Array1<Cx<T>>,
    imp: &ImpairmentParams<T>,
) -> Result<Array1<Cx<T>>> {
    let h = real.composite_channel(x)?;
    let rho = imp.rho();
    let mut grad = Array1::<Cx<T>>::zeros(real.n());
    for (m, hm) in h.iter().enumerate() {
        let a2 = hm.norm_sqr();
        let den = rho * a2 + imp.sigma2;
        let coeff = T::one() / den - rho * a2 / (den * den);
        let w = hm.conj() * coeff;
        for (g, v) in grad.iter_mut().zip(real.cascade().row(m).iter()) {
            *g += w * v;
        }
    }
    Ok(grad)
}

/// Closest feasible point, element by element, using the same phase search
/// as the proposed method.
pub fn project<T: Real>(x: &Array1<Cx<T>>, params: &PhaseModelParams<T>, cfg: &SolverConfig) -> ReflectionState<T> {
    let theta = theta_line_search(x, params, cfg);
    feasible_point(theta.as_slice().expect("contiguous"), params)
}

/// Projected gradient ascent on `q1`. Initialization and projection settings
/// come from `shared`, so both methods start at the same point.
pub fn pga_solve<T: Real>(
    real: &ChannelRealization<T>,
    imp: &ImpairmentParams<T>,
    params: &PhaseModelParams<T>,
    cfg: &PgaConfig,
    shared: &SolverConfig,
) -> Result<SolveReport<T>> {
    imp.validate()?;
    params.validate()?;
    cfg.validate()?;
    shared.validate()?;

    let step0: T = match cfg.step_size {
        Some(s) => lit(s),
        None => T::one() / (frobenius_sq(real.cascade()) / imp.sigma2 + T::one()),
    };
    let min_step = step0 * lit(1e-12);
    let tol: T = lit(cfg.tol);

    let mut state = initial_state(real, imp, params, shared)?;
    let mut amps = amplitudes(real, &state.x)?;
    let mut q_cur = q1_from_amplitudes(&amps, imp);
    let mut objective_trace = vec![q_cur];
    let mut se_trace = vec![se_from_q1(q_cur, imp)];
    let mut iters = 0;
    let mut termination = Termination::MaxIters;

    if real.n() == 0 {
        termination = Termination::Converged;
    }
    while termination == Termination::MaxIters && iters < cfg.max_iters {
        iters += 1;
        let dir = q1_gradient(real, &state.x, imp)?.mapv(|g| g.conj());
        if dir.iter().all(|g| g.norm_sqr() == T::zero()) {
            termination = Termination::Converged;
            break;
        }
        let mut step = step0;
        let accepted = loop {
            let cand = project(&(&state.x + &dir.mapv(|g| g * step)), params, shared);
            let cand_amps = amplitudes(real, &cand.x)?;
            let q = q1_from_amplitudes(&cand_amps, imp);
            if !q.is_finite() {
                return Err(Error::Numerical("objective became non-finite".into()));
            }
            match cfg.step_rule {
                StepRule::Fixed => break Some((cand, cand_amps, q)),
                StepRule::Backtracking if q >= q_cur => break Some((cand, cand_amps, q)),
                StepRule::Backtracking => {
                    step /= lit(2.0);
                    if step < min_step {
                        break None;
                    }
                }
            }
        };
        let Some((cand, cand_amps, q_new)) = accepted else {
            termination = Termination::Converged;
            break;
        };
        let change = (q_new - q_cur).abs();
        state = cand;
        amps = cand_amps;
        q_cur = q_new;
        objective_trace.push(q_cur);
        se_trace.push(se_from_q1(q_cur, imp));
        if change <= tol * q_cur.abs().max(T::min_positive_value()) {
            termination = Termination::Converged;
        }
    }

    Ok(SolveReport {
        feasibility_residual: feasibility_residual(&state.x, params),
        lambda_final: update_lambda(&amps, imp),
        final_state: state,
        objective_trace,
        se_trace,
        mu_trace: Vec::new(),
        outer_iters: iters,
        total_inner_iters: 0,
        termination,
        clamped_terms: 0,
    })
}

/// Best of `restarts` uniformly random phase vectors. The objective trace is
/// the running best.
pub fn random_solve<T: Real, R: Rng + ?Sized>(
    real: &ChannelRealization<T>,
    imp: &ImpairmentParams<T>,
    params: &PhaseModelParams<T>,
    rng: &mut R,
    restarts: usize,
) -> Result<SolveReport<T>> {
    if restarts == 0 {
        return Err(Error::validation("random_restarts", "must be at least 1"));
    }
    imp.validate()?;
    let n = real.n();
    let mut best: Option<(T, ReflectionState<T>, Array1<T>)> = None;
    let mut objective_trace = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        let theta: Vec<T> = (0..n).map(|_| random_phase(rng)).collect();
        let state = feasible_point(&theta, params);
        check_len("random_solve state", n, state.len())?;
        let amps = amplitudes(real, &state.x)?;
        let q = q1_from_amplitudes(&amps, imp);
        if best.as_ref().is_none_or(|(bq, _, _)| q > *bq) {
            best = Some((q, state, amps));
        }
        objective_trace.push(best.as_ref().expect("set above").0);
    }
    let (_, state, amps) = best.expect("restarts >= 1");
    let se_trace = objective_trace.iter().map(|&q| se_from_q1(q, imp)).collect();
    Ok(SolveReport {
        feasibility_residual: feasibility_residual(&state.x, params),
        lambda_final: update_lambda(&amps, imp),
        final_state: state,
        objective_trace,
        se_trace,
        mu_trace: Vec::new(),
        outer_iters: 0,
        total_inner_iters: 0,
        termination: Termination::Converged,
        clamped_terms: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{rng_from_seed, ChannelParams};
    use ndarray::{array, Array2};
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn ideal_gradient_has_no_saturation_term() {
        let r: ChannelRealization<f64> = ChannelParams { m: 3, n: 4, seed: 5, ..Default::default() }.realize().unwrap();
        let x = feasible_point(&[0.2, -1.0, 2.5, 0.0], &PhaseModelParams::default()).x;
        let imp = ImpairmentParams::ideal(0.7);
        let g = q1_gradient(&r, &x, &imp).unwrap();
        let h = r.composite_channel(&x).unwrap();
        for n in 0..4 {
            let expected: Cx<f64> = (0..3).map(|m| h[m].conj() * r.cascade()[[m, n]] / 0.7).sum();
            assert!((g[n] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_vanishes_at_zero_channel() {
        let r = ChannelRealization::from_cascade(array![c(0.0, 0.0), c(0.0, 0.0)], Array2::from_elem((2, 3), c(1.0, -1.0))).unwrap();
        let g = q1_gradient(&r, &Array1::zeros(3), &ImpairmentParams::new(0.01, 0.01, 1.0).unwrap()).unwrap();
        assert!(g.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn unit_modulus_projection() {
        let cfg = SolverConfig::default();
        let s = project(&array![Cx::from_polar(3.0, FRAC_PI_4)], &PhaseModelParams::ideal(), &cfg);
        assert!((s.x[0] - Cx::from_polar(1.0, FRAC_PI_4)).norm() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent_on_feasible_points() {
        let p = PhaseModelParams::default();
        let cfg = SolverConfig::default();
        let f = feasible_point(&[-2.9, -1.0, 0.0, 0.4, 1.7, 3.0], &p);
        let s = project(&f.x, &p, &cfg);
        for (a, b) in s.x.iter().zip(f.x.iter()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn pga_stops_immediately_on_zero_gradient() {
        let r = ChannelRealization::from_cascade(array![c(0.0, 0.0)], Array2::zeros((1, 3))).unwrap();
        let imp = ImpairmentParams::ideal(1.0);
        let rep = pga_solve(&r, &imp, &PhaseModelParams::default(), &PgaConfig::default(), &SolverConfig::default()).unwrap();
        assert_eq!(rep.termination, Termination::Converged);
        assert!(rep.objective_trace.iter().all(|&q| q == rep.objective_trace[0]));
    }

    #[test]
    fn random_baseline_properties() {
        let r: ChannelRealization<f64> = ChannelParams { m: 4, n: 8, seed: 2, ..Default::default() }.realize().unwrap();
        let imp = ImpairmentParams::new(0.0025, 0.0025, 0.1).unwrap();
        let p = PhaseModelParams::default();
        let a = random_solve(&r, &imp, &p, &mut rng_from_seed(11), 1).unwrap();
        let b = random_solve(&r, &imp, &p, &mut rng_from_seed(11), 1).unwrap();
        assert_eq!(a.final_state, b.final_state);
        let many = random_solve(&r, &imp, &p, &mut rng_from_seed(11), 100).unwrap();
        assert!(many.final_q1() >= a.final_q1());
        assert!(many.objective_trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(random_solve(&r, &imp, &p, &mut rng_from_seed(1), 0).is_err());
    }

    #[test]
    fn random_baseline_without_elements_is_direct_link() {
        let r = ChannelRealization::from_cascade(array![c(1.0, 1.0)], Array2::zeros((1, 0))).unwrap();
        let imp = ImpairmentParams::ideal(0.5);
        let rep = random_solve(&r, &imp, &PhaseModelParams::default(), &mut rng_from_seed(0), 3).unwrap();
        assert!((rep.final_se() - (1.0f64 + 4.0).log2()).abs() < 1e-12);
    }
}
