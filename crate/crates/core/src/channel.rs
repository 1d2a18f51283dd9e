//! Rician channel draws for the direct link, the BS→RIS link and the
//! RIS→user link, plus the cascade matrix `H = G·diag(h_r)`.
//!
//! Each link is `sqrt(ν·ω/(ω+1))·LOS + sqrt(ν/(ω+1))·NLOS`. NLOS entries are
//! i.i.d. `CN(0, 1)`. LOS parts are half-wavelength uniform-linear-array
//! steering vectors with angles drawn uniformly from `[-π/2, π/2]`; the BS→RIS
//! LOS matrix is the outer product of the BS and RIS steering vectors.
//!
//! Draw order for a realization is fixed: the four LOS angles (direct,
//! BS departure, RIS arrival, RIS departure), then NLOS `h_d`, `G` (row-major)
//! and `h_r`, each complex entry as (re, im).

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scalar::{lit, unit_phasor, Cx, Real};

/// Seeded generator used for every random draw in the crate. ChaCha8 gives
/// the same stream on every platform.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// BS antennas.
    pub m: usize,
    /// RIS elements.
    pub n: usize,
    pub rician_factor_direct: f64,
    pub rician_factor_bs_ris: f64,
    pub rician_factor_ris_user: f64,
    pub largescale_direct: f64,
    pub largescale_bs_ris: f64,
    pub largescale_ris_user: f64,
    pub seed: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            m: 10,
            n: 36,
            rician_factor_direct: 1.0,
            rician_factor_bs_ris: 1.0,
            rician_factor_ris_user: 1.0,
            largescale_direct: 1.0,
            largescale_bs_ris: 1.0,
            largescale_ris_user: 1.0,
            seed: 0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::validation("channel.m", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::validation("channel.n", "must be at least 1"));
        }
        for (name, v) in [
            ("channel.rician_factor_direct", self.rician_factor_direct),
            ("channel.rician_factor_bs_ris", self.rician_factor_bs_ris),
            ("channel.rician_factor_ris_user", self.rician_factor_ris_user),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "must be a finite nonnegative number"));
            }
        }
        for (name, v) in [
            ("channel.largescale_direct", self.largescale_direct),
            ("channel.largescale_bs_ris", self.largescale_bs_ris),
            ("channel.largescale_ris_user", self.largescale_ris_user),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "must be a finite positive number"));
            }
        }
        Ok(())
    }

    /// Draws a realization from a generator seeded with `self.seed`.
    pub fn realize<T: Real>(&self) -> Result<ChannelRealization<T>> {
        let mut rng = rng_from_seed(self.seed);
        generate_realization(self, &mut rng)
    }
}

/// One Monte Carlo channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T: Real> {
    h_d: Array1<Cx<T>>,
    g: Array2<Cx<T>>,
    h_r: Array1<Cx<T>>,
    cascade: Array2<Cx<T>>,
}

impl<T: Real> ChannelRealization<T> {
    /// Assembles a realization and its cascade matrix from the three links.
    pub fn from_links(h_d: Array1<Cx<T>>, g: Array2<Cx<T>>, h_r: Array1<Cx<T>>) -> Result<Self> {
        check_len("G rows vs h_d", h_d.len(), g.nrows())?;
        check_len("G cols vs h_r", g.ncols(), h_r.len())?;
        let mut cascade = g.clone();
        for (mut col, hr) in cascade.columns_mut().into_iter().zip(h_r.iter()) {
            col.mapv_inplace(|z| z * hr);
        }
        let out = Self {
            h_d,
            g,
            h_r,
            cascade,
        };
        if !out.is_finite() {
            return Err(Error::Parameter("channel entries must be finite".into()));
        }
        Ok(out)
    }

    /// Builds a realization directly from `h_d` and `H`; `G = H` and
    /// `h_r = 1`.
    pub fn from_cascade(h_d: Array1<Cx<T>>, cascade: Array2<Cx<T>>) -> Result<Self> {
        let n = cascade.ncols();
        Self::from_links(h_d, cascade, Array1::from_elem(n, Cx::new(T::one(), T::zero())))
    }

    pub fn m(&self) -> usize {
        self.h_d.len()
    }

    pub fn n(&self) -> usize {
        self.h_r.len()
    }

    pub fn h_d(&self) -> &Array1<Cx<T>> {
        &self.h_d
    }

    pub fn g(&self) -> &Array2<Cx<T>> {
        &self.g
    }

    pub fn h_r(&self) -> &Array1<Cx<T>> {
        &self.h_r
    }

    /// `H = G·diag(h_r)`; row `m` is `v_mᵀ`.
    pub fn cascade(&self) -> &Array2<Cx<T>> {
        &self.cascade
    }

    /// `h = h_d + H·x`.
    pub fn composite_channel(&self, x: &Array1<Cx<T>>) -> Result<Array1<Cx<T>>> {
        check_len("composite_channel x", self.n(), x.len())?;
        Ok(&self.h_d + &self.cascade.dot(x))
    }

    /// FNV-1a over the bit patterns of every entry, used to verify that
    /// matched-seed trials share a realization.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |v: T| {
            let bits = v.to_f64().unwrap_or(f64::NAN).to_bits();
            for b in bits.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for z in self.h_d.iter().chain(self.g.iter()).chain(self.h_r.iter()) {
            feed(z.re);
            feed(z.im);
        }
        h
    }

    fn is_finite(&self) -> bool {
        self.h_d
            .iter()
            .chain(self.g.iter())
            .chain(self.h_r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Half-wavelength ULA response: entry `k` is `exp(jπ·k·sin ψ)`.
pub fn ula_steering<T: Real>(len: usize, angle: T) -> Array1<Cx<T>> {
    let s = angle.sin();
    Array1::from_iter((0..len).map(|k| unit_phasor(T::PI() * lit::<T>(k as f64) * s)))
}

fn cn01<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Cx::new(lit(re * s), lit(im * s))
}

fn rician_weights<T: Real>(largescale: f64, factor: f64) -> (T, T) {
    if factor.is_infinite() {
        return (lit(largescale.sqrt()), T::zero());
    }
    let los = (largescale * factor / (factor + 1.0)).sqrt();
    let nlos = (largescale / (factor + 1.0)).sqrt();
    (lit(los), lit(nlos))
}

/// Draws one realization from `rng`.
pub fn generate_realization<T: Real, R: Rng + ?Sized>(
    params: &ChannelParams,
    rng: &mut R,
) -> Result<ChannelRealization<T>> {
    params.validate()?;
    let (m, n) = (params.m, params.n);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let angle = Uniform::new_inclusive(-half_pi, half_pi);
    let psi_d: T = lit(angle.sample(rng));
    let psi_bs: T = lit(angle.sample(rng));
    let psi_ris_in: T = lit(angle.sample(rng));
    let psi_ris_out: T = lit(angle.sample(rng));

    let los_d = ula_steering(m, psi_d);
    let a_bs = ula_steering(m, psi_bs);
    let a_ris_in = ula_steering(n, psi_ris_in);
    let los_r = ula_steering(n, psi_ris_out);

    let (wl, wn) = rician_weights::<T>(params.largescale_direct, params.rician_factor_direct);
    let h_d = Array1::from_iter(los_d.iter().map(|&l| l * wl + cn01::<T, R>(rng) * wn));

    let (wl, wn) = rician_weights::<T>(params.largescale_bs_ris, params.rician_factor_bs_ris);
    let mut g = Array2::<Cx<T>>::zeros((m, n));
    for i in 0..m {
        for k in 0..n {
            let los = a_bs[i] * a_ris_in[k].conj();
            g[[i, k]] = los * wl + cn01::<T, R>(rng) * wn;
        }
    }

    let (wl, wn) = rician_weights::<T>(params.largescale_ris_user, params.rician_factor_ris_user);
    let h_r = Array1::from_iter(los_r.iter().map(|&l| l * wl + cn01::<T, R>(rng) * wn));

    ChannelRealization::from_links(h_d, g, h_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use num_traits::Zero;

    fn params(omega: f64) -> ChannelParams {
        ChannelParams {
            m: 4,
            n: 6,
            rician_factor_direct: omega,
            rician_factor_bs_ris: omega,
            rician_factor_ris_user: omega,
            ..ChannelParams::default()
        }
    }

    #[test]
    fn rayleigh_second_moment_matches_gain() {
        let p = ChannelParams {
            largescale_direct: 2.5,
            ..params(0.0)
        };
        let mut rng = rng_from_seed(7);
        let draws = 10_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let r: ChannelRealization<f64> = generate_realization(&p, &mut rng).unwrap();
            acc += r.h_d()[0].norm_sqr();
        }
        let mean = acc / draws as f64;
        assert!((mean - 2.5).abs() < 0.05 * 2.5, "mean {mean}");
    }

    #[test]
    fn pure_los_has_unit_modulus() {
        let p = params(1e9);
        let r: ChannelRealization<f64> = p.realize().unwrap();
        for z in r.h_d().iter().chain(r.h_r().iter()).chain(r.g().iter()) {
            assert!((z.norm() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let p = ChannelParams {
            seed: 1234,
            ..params(1.0)
        };
        let a: ChannelRealization<f64> = p.realize().unwrap();
        let b: ChannelRealization<f64> = p.realize().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn cascade_columns_are_scaled_g_columns() {
        let r: ChannelRealization<f64> = params(1.0).realize().unwrap();
        for k in 0..r.n() {
            for i in 0..r.m() {
                assert_eq!(r.cascade()[[i, k]], r.g()[[i, k]] * r.h_r()[k]);
            }
        }
    }

    #[test]
    fn zero_reflection_returns_direct_channel() {
        let r: ChannelRealization<f64> = params(1.0).realize().unwrap();
        let h = r.composite_channel(&Array1::zeros(r.n())).unwrap();
        assert_eq!(&h, r.h_d());
    }

    #[test]
    fn hand_multiplication() {
        let r = ChannelRealization::from_cascade(
            array![Cx::zero(), Cx::zero()],
            array![[Cx::new(1.0, 0.0)], [Cx::new(0.0, 1.0)]],
        )
        .unwrap();
        let h = r.composite_channel(&array![Cx::new(0.0, 1.0)]).unwrap();
        assert_eq!(h, array![Cx::new(0.0, 1.0), Cx::new(-1.0, 0.0)]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let r: ChannelRealization<f64> = params(1.0).realize().unwrap();
        assert!(matches!(
            r.composite_channel(&Array1::zeros(3)),
            Err(Error::Dimension { .. })
        ));
        assert!(ChannelParams { m: 0, ..params(1.0) }.validate().is_err());
        assert!(ChannelParams {
            largescale_bs_ris: 0.0,
            ..params(1.0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn f32_draw_tracks_f64_draw() {
        let p = params(1.0);
        let a: ChannelRealization<f64> = p.realize().unwrap();
        let b: ChannelRealization<f32> = p.realize().unwrap();
        for (u, v) in a.cascade().iter().zip(b.cascade().iter()) {
            assert!((u.re - v.re as f64).abs() < 1e-5);
        }
    }
}
