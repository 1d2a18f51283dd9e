//! Practical RIS element model: the reflection amplitude depends on the
//! applied phase through `α(θ) = (1 − α_min)·((sin(θ − φ) + 1)/2)^γ + α_min`.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, unit_phasor, Cx, Real};

/// Circuit constants of the amplitude response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseModelParams<T> {
    pub alpha_min: T,
    /// Horizontal offset of the response, radians.
    pub phi: T,
    /// Steepness.
    pub gamma: T,
}

impl<T: Real> Default for PhaseModelParams<T> {
    fn default() -> Self {
        Self {
            alpha_min: lit(0.2),
            phi: lit(0.43 * std::f64::consts::PI),
            gamma: lit(1.6),
        }
    }
}

impl<T: Real> PhaseModelParams<T> {
    /// Constant unit amplitude.
    pub fn ideal() -> Self {
        Self {
            alpha_min: T::one(),
            phi: T::zero(),
            gamma: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min >= T::zero() && self.alpha_min <= T::one()) {
            return Err(Error::validation("phase_model.alpha_min", "must lie in [0, 1]"));
        }
        if !(self.phi >= T::zero()) || !self.phi.is_finite() {
            return Err(Error::validation("phase_model.phi", "must be finite and nonnegative"));
        }
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return Err(Error::validation("phase_model.gamma", "must be finite and nonnegative"));
        }
        Ok(())
    }

    /// True when the amplitude does not depend on the phase.
    pub fn is_constant_amplitude(&self) -> bool {
        self.alpha_min == T::one() || self.gamma == T::zero()
    }

    /// Phase at which the amplitude is smallest (`φ − π/2`, wrapped).
    pub fn min_amplitude_phase(&self) -> T {
        wrap_phase(self.phi - T::FRAC_PI_2())
    }
}

/// Wraps into `[-π, π)`.
pub fn wrap_phase<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let shifted = theta + T::PI();
    let mut r = shifted - two_pi * (shifted / two_pi).floor();
    if r >= two_pi {
        r -= two_pi;
    }
    if r < T::zero() {
        r = T::zero();
    }
    let out = r - T::PI();
    if out >= T::PI() {
        -T::PI()
    } else {
        out
    }
}

pub fn amplitude_response<T: Real>(theta: T, params: &PhaseModelParams<T>) -> T {
    let theta = wrap_phase(theta);
    let base = ((theta - params.phi).sin() + T::one()) / lit(2.0);
    let base = base.max(T::zero()).min(T::one());
    // 0^0 is taken as 1
    let shaped = if params.gamma == T::zero() {
        T::one()
    } else {
        base.powf(params.gamma)
    };
    (T::one() - params.alpha_min) * shaped + params.alpha_min
}

/// `α(θ)·e^{jθ}`.
pub fn reflection_coefficient<T: Real>(theta: T, params: &PhaseModelParams<T>) -> Cx<T> {
    unit_phasor(theta) * amplitude_response(theta, params)
}

/// The optimization variable together with the phases that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionState<T: Real> {
    pub theta: Array1<T>,
    pub x: Array1<Cx<T>>,
}

impl<T: Real> ReflectionState<T> {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub fn feasible_point<T: Real>(theta: &[T], params: &PhaseModelParams<T>) -> ReflectionState<T> {
    let theta: Array1<T> = theta.iter().map(|&t| wrap_phase(t)).collect();
    let x = theta.mapv(|t| reflection_coefficient(t, params));
    ReflectionState { theta, x }
}

/// `max_n |x_n − α(arg x_n)·e^{j·arg x_n}|`; zero for an empty vector.
///
/// `x_n = 0` has no phase; its residual is the smallest attainable amplitude.
pub fn feasibility_residual<T: Real>(x: &Array1<Cx<T>>, params: &PhaseModelParams<T>) -> T {
    x.iter()
        .map(|z| {
            if *z == Cx::new(T::zero(), T::zero()) {
                amplitude_response(params.min_amplitude_phase(), params)
            } else {
                (z - reflection_coefficient(z.arg(), params)).norm()
            }
        })
        .fold(T::zero(), T::max)
}

pub fn is_feasible<T: Real>(state: &ReflectionState<T>, params: &PhaseModelParams<T>, tol: T) -> bool {
    feasibility_residual(&state.x, params) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn practical() -> PhaseModelParams<f64> {
        PhaseModelParams::default()
    }

    #[test]
    fn amplitude_examples() {
        let p = PhaseModelParams {
            alpha_min: 0.0,
            phi: 0.0,
            gamma: 1.0,
        };
        assert!((amplitude_response(PI / 2.0, &p) - 1.0).abs() < 1e-15);

        let ideal = PhaseModelParams {
            alpha_min: 1.0,
            phi: 0.7,
            gamma: 3.0,
        };
        for t in [-3.0, -1.0, 0.0, 2.0, 3.1] {
            assert_eq!(amplitude_response(t, &ideal), 1.0);
        }

        // (1 - 0.2) * ((sin(-0.43π) + 1) / 2)^1.6 + 0.2, evaluated by hand
        let base: f64 = ((-0.43 * PI).sin() + 1.0) / 2.0;
        let expected: f64 = 0.8 * base.powf(1.6) + 0.2;
        assert!((expected - 0.20069).abs() < 1e-4);
        assert!((amplitude_response(0.0f64, &practical()) - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_gamma_at_sine_minimum_is_constant() {
        let p = PhaseModelParams {
            alpha_min: 0.3,
            phi: 1.0,
            gamma: 0.0,
        };
        assert_eq!(amplitude_response(1.0 - PI / 2.0, &p), 1.0);
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_phase(PI), -PI);
        assert_eq!(wrap_phase(-PI), -PI);
        assert!((wrap_phase(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
        assert!((wrap_phase(-0.25f64) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn feasible_point_examples() {
        let ideal = PhaseModelParams::<f64>::ideal();
        let s = feasible_point(&[0.0; 5], &ideal);
        assert!(s.x.iter().all(|z| (z - Cx::new(1.0, 0.0)).norm() < 1e-15));

        let p = practical();
        let s = feasible_point(&[p.phi - PI / 2.0; 4], &p);
        assert!(s.x.iter().all(|z| (z.norm() - p.alpha_min).abs() < 1e-12));
    }

    #[test]
    fn infeasible_points_detected() {
        let p = practical();
        let mut s = feasible_point(&[0.1, 1.0, -2.0], &p);
        assert!(is_feasible(&s, &p, 1e-9));
        s.x[1] = Cx::new(2.0, 0.0);
        assert!(!is_feasible(&s, &p, 1e-3));

        let mut s = feasible_point(&[0.1, 1.0, -2.0], &p);
        s.x[2] *= 1.1;
        assert!(!is_feasible(&s, &p, 1e-3));
    }

    #[test]
    fn validation() {
        assert!(practical().validate().is_ok());
        assert!(PhaseModelParams { alpha_min: 1.5, ..practical() }.validate().is_err());
        assert!(PhaseModelParams { phi: -0.1, ..practical() }.validate().is_err());
        assert!(PhaseModelParams { gamma: -1.0, ..practical() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn amplitude_range_and_period(
            theta in -20.0f64..20.0,
            alpha_min in 0.0f64..=1.0,
            phi in 0.0f64..7.0,
            gamma in 0.0f64..5.0,
        ) {
            let p = PhaseModelParams { alpha_min, phi, gamma };
            let a = amplitude_response(theta, &p);
            prop_assert!(a >= alpha_min - 1e-15 && a <= 1.0 + 1e-15);
            let b = amplitude_response(theta + 2.0 * PI, &p);
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn feasible_round_trip(thetas in proptest::collection::vec(-10.0f64..10.0, 1..32)) {
            let p = practical();
            let s = feasible_point(&thetas, &p);
            prop_assert!(is_feasible(&s, &p, 1e-9));
            for (&t, z) in s.theta.iter().zip(s.x.iter()) {
                prop_assert!((-PI..PI).contains(&t));
                prop_assert!((z - reflection_coefficient(t, &p)).norm() < 1e-12);
            }
        }
    }
}
