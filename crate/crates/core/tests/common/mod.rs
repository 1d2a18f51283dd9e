#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use risbf::channel::ChannelRealization;
use risbf::hardware::{amplitude_response, PhaseModelParams};
use risbf::metrics::ImpairmentParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (scale / 2f64.sqrt())
}

pub fn cn_vec<R: Rng>(rng: &mut R, len: usize, scale: f64) -> Array1<Complex64> {
    (0..len).map(|_| cn(rng, scale)).collect()
}

pub fn cn_mat<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Array2<Complex64> {
    Array2::from_shape_fn((rows, cols), |_| cn(rng, scale))
}

/// Random links with per-instance scale spread over two decades.
pub fn random_realization<R: Rng>(rng: &mut R, m: usize, n: usize) -> ChannelRealization<f64> {
    let s = 10f64.powf(rng.gen_range(-0.5..0.5));
    ChannelRealization::from_links(cn_vec(rng, m, s), cn_mat(rng, m, n, 1.0), cn_vec(rng, n, s)).unwrap()
}

pub fn random_impairments<R: Rng>(rng: &mut R) -> ImpairmentParams<f64> {
    let rho_b = rng.gen_range(0.0..0.05);
    let rho_u = rng.gen_range(0.0..0.05);
    let sigma2 = 10f64.powf(rng.gen_range(-2.0..1.0));
    ImpairmentParams::new(rho_b, rho_u, sigma2).unwrap()
}

pub fn random_x<R: Rng>(rng: &mut R, n: usize) -> Array1<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn complex_inverse(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let mut aug = Array2::<Complex64>::zeros((n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            aug[[i, j]] = a[[i, j]];
        }
        aug[[i, n + i]] = Complex64::new(1.0, 0.0);
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| aug[[i, col]].norm().total_cmp(&aug[[j, col]].norm())).unwrap();
        for k in 0..2 * n {
            aug.swap([col, k], [piv, k]);
        }
        let p = aug[[col, col]];
        for k in 0..2 * n {
            aug[[col, k]] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = aug[[i, col]];
                for k in 0..2 * n {
                    let v = aug[[col, k]];
                    aug[[i, k]] -= f * v;
                }
            }
        }
    }
    Array2::from_shape_fn((n, n), |(i, j)| aug[[i, n + j]])
}

/// Solves a dense real system by Gaussian elimination with partial pivoting.
pub fn real_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

pub fn to_real(x: &Array1<Complex64>) -> Vec<f64> {
    x.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn from_real(v: &[f64]) -> Array1<Complex64> {
    v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Central-difference gradient over the real/imaginary parts.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, at: &[f64], step: f64) -> Vec<f64> {
    let mut p = at.to_vec();
    (0..at.len())
        .map(|i| {
            p[i] = at[i] + step;
            let up = f(&p);
            p[i] = at[i] - step;
            let down = f(&p);
            p[i] = at[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Fourth-order central differences.
pub fn fd_gradient5(f: impl Fn(&[f64]) -> f64, at: &[f64], step: f64) -> Vec<f64> {
    let mut p = at.to_vec();
    (0..at.len())
        .map(|i| {
            let mut eval = |k: f64| {
                p[i] = at[i] + k * step;
                let v = f(&p);
                p[i] = at[i];
                v
            };
            (eval(-2.0) - 8.0 * eval(-1.0) + 8.0 * eval(1.0) - eval(2.0)) / (12.0 * step)
        })
        .collect()
}

/// Real gradient implied by a Wirtinger derivative `g = ∂f/∂x` of a real `f`.
pub fn wirtinger_to_real(g: &Array1<Complex64>) -> Vec<f64> {
    g.iter().flat_map(|z| [2.0 * z.re, -2.0 * z.im]).collect()
}

pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn composite(real: &ChannelRealization<f64>, x: &Array1<Complex64>) -> Array1<Complex64> {
    let phi = Array2::from_diag(x);
    real.h_d() + &real.g().dot(&phi).dot(real.h_r())
}

pub fn dense_q1(h: &Array1<Complex64>, imp: &ImpairmentParams<f64>, with_rho_u: bool) -> f64 {
    let m = h.len();
    let mut mat = Array2::<Complex64>::zeros((m, m));
    for i in 0..m {
        mat[[i, i]] = Complex64::from(imp.rho() * h[i].norm_sqr() + imp.sigma2);
        if with_rho_u {
            for j in 0..m {
                mat[[i, j]] += h[i] * h[j].conj() * imp.rho_u;
            }
        }
    }
    let inv = complex_inverse(&mat);
    let hh: Array1<Complex64> = h.mapv(|z| z.conj());
    hh.dot(&inv.dot(h)).re
}

/// The convex CCCP subproblem as a function of the real coordinates, with
/// the linearization of `f1` taken from fourth-order finite differences.
pub fn cccp_subproblem(
    real: &ChannelRealization<f64>,
    x_t: &Array1<Complex64>,
    lambda: &Array1<f64>,
    target: &Array1<Complex64>,
    mu: f64,
    imp: &ImpairmentParams<f64>,
) -> impl Fn(&[f64]) -> f64 {
    let f1 = {
        let (real, lambda) = (real.clone(), lambda.clone());
        move |v: &[f64]| -> f64 {
            let h = composite(&real, &from_real(v));
            h.iter().zip(lambda.iter()).map(|(z, l)| 2.0 * l * z.norm()).sum()
        }
    };
    let slope = fd_gradient5(&f1, &to_real(x_t), 1e-3);
    cccp_subproblem_with_slope(real, x_t, lambda, target, mu, imp, slope)
}

/// Same subproblem with a given real gradient of `f1` at `x_t`. The
/// constant `f1(x_t)` is dropped.
pub fn cccp_subproblem_with_slope(
    real: &ChannelRealization<f64>,
    x_t: &Array1<Complex64>,
    lambda: &Array1<f64>,
    target: &Array1<Complex64>,
    mu: f64,
    imp: &ImpairmentParams<f64>,
    slope: Vec<f64>,
) -> impl Fn(&[f64]) -> f64 {
    let u_t = to_real(x_t);
    let (real, lambda, target, imp) = (real.clone(), lambda.clone(), target.clone(), *imp);
    move |v: &[f64]| {
        let x = from_real(v);
        let h = composite(&real, &x);
        let f2: f64 = h
            .iter()
            .zip(lambda.iter())
            .map(|(z, l)| l * l * (imp.rho() * z.norm_sqr() + imp.sigma2))
            .sum::<f64>()
            + mu * x.iter().zip(target.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        f2 - slope.iter().zip(v.iter().zip(u_t.iter())).map(|(s, (a, b))| s * (a - b)).sum::<f64>()
    }
}

/// Minimizes a real quadratic by probing its Hessian and gradient at the
/// origin and solving the normal equations.
pub fn quadratic_minimizer(f: &dyn Fn(&[f64]) -> f64, dim: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let zero = vec![0.0; dim];
    let f0 = f(&zero);
    let unit = |i: usize, j: Option<usize>| {
        let mut v = zero.clone();
        v[i] += 1.0;
        if let Some(j) = j {
            v[j] += 1.0;
        }
        v
    };
    let fi: Vec<f64> = (0..dim).map(|i| f(&unit(i, None))).collect();
    let mut q = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            q[i][j] = if i == j {
                let mut v = zero.clone();
                v[i] = 1.0;
                let up = f(&v);
                v[i] = -1.0;
                up + f(&v) - 2.0 * f0
            } else {
                f(&unit(i, Some(j))) - fi[i] - fi[j] + f0
            };
        }
    }
    let c: Vec<f64> = (0..dim).map(|i| fi[i] - f0 - 0.5 * q[i][i]).collect();
    let u = real_solve(q.clone(), c.iter().map(|v| -v).collect());
    (u, q, c)
}

pub fn grid_min(z: Complex64, params: &PhaseModelParams<f64>, points: usize) -> f64 {
    (0..points)
        .map(|k| {
            let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / points as f64;
            (z - Complex64::from_polar(amplitude_response(t, params), t)).norm_sqr()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn cost(z: Complex64, t: f64, params: &PhaseModelParams<f64>) -> f64 {
    (z - Complex64::from_polar(amplitude_response(t, params), t)).norm_sqr()
}

pub fn single_antenna_instance<R: Rng>(r: &mut R, n: usize) -> (ChannelRealization<f64>, f64) {
    let real = ChannelRealization::from_links(cn_vec(r, 1, 1.0), cn_mat(r, 1, n, 1.0), cn_vec(r, n, 1.0)).unwrap();
    let aligned = real.h_d()[0].norm() + real.cascade().row(0).iter().map(|v| v.norm()).sum::<f64>();
    (real, aligned)
}
