//! Spectral multipliers `alpha(Q)`, cluster projections, resolvent kernels,
//! and the localized / nonlocal split of the resolvent multiplier.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cplx::{powi, C64, I};
use crate::error::{LabError, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::region::validate_order;
use crate::residue::{poles, unit_root};
use crate::spectra::{Basis, ModelSpectrum};

type ScalarMap = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A scalar function `tau -> alpha(tau)` applied spectrally.
#[derive(Clone)]
pub struct Multiplier {
    pub label: String,
    f: ScalarMap,
    /// Cached `sup (1 + tau^m)|alpha(tau)|`.
    pub a_sup: Option<f64>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiplier({})", self.label)
    }
}

impl Multiplier {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Multiplier {
            label: label.into(),
            f: Arc::new(f),
            a_sup: None,
        }
    }

    pub fn eval(&self, tau: f64) -> C64 {
        (self.f)(tau)
    }

    pub fn constant(c: C64) -> Self {
        Multiplier::new(format!("const({c})"), move |_| c)
    }

    /// Indicator of the half-open window `[lo, hi)`.
    pub fn indicator(lo: f64, hi: f64) -> Self {
        Multiplier::new(format!("1[{lo},{hi})"), move |t| {
            if t >= lo && t < hi {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `m_z(tau) = 1/(tau^m - z^m)`.
    pub fn resolvent(z: C64, m: u32) -> Self {
        let zm = powi(z, m);
        Multiplier::new(format!("resolvent(z={z}, m={m})"), move |t| 1.0 / (t.powi(m as i32) - zm))
    }

    /// `tau^m - z^m`, the symbol of `P - z^m`.
    pub fn shifted_power(z: C64, m: u32) -> Self {
        let zm = powi(z, m);
        Multiplier::new(format!("power(z={z}, m={m})"), move |t| t.powi(m as i32) - zm)
    }

    /// `(1 + tau^m)^{-1}`, the extremal multiplier with `A = 1`.
    pub fn bessel(m: u32) -> Self {
        let mut out = Multiplier::new(format!("bessel(m={m})"), move |t| C64::new(1.0 / (1.0 + t.powi(m as i32)), 0.0));
        out.a_sup = Some(1.0);
        out
    }

    /// This multiplier with `[lo, hi)` removed.
    pub fn without_window(&self, lo: f64, hi: f64) -> Self {
        let f = self.f.clone();
        Multiplier::new(format!("{} off [{lo},{hi})", self.label), move |t| {
            if t >= lo && t < hi {
                C64::new(0.0, 0.0)
            } else {
                f(t)
            }
        })
    }

    /// This multiplier restricted to `[lo, hi)`.
    pub fn within_window(&self, lo: f64, hi: f64) -> Self {
        let f = self.f.clone();
        Multiplier::new(format!("{} on [{lo},{hi})", self.label), move |t| {
            if t >= lo && t < hi {
                f(t)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Pointwise conjugate: the symbol of the adjoint operator.
    pub fn conj(&self) -> Self {
        let f = self.f.clone();
        Multiplier::new(format!("conj({})", self.label), move |t| f(t).conj())
    }

    /// `sup (1 + tau^m)|alpha(tau)|` over the given sample points.
    pub fn measure_a_sup(&mut self, m: u32, taus: &[f64]) -> f64 {
        let v = taus
            .iter()
            .map(|&t| (1.0 + t.powi(m as i32)) * self.eval(t).norm())
            .fold(0.0, f64::max);
        self.a_sup = Some(v);
        v
    }
}

/// Grid values with the quadrature weights of the model they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub values: Vec<C64>,
    pub weights: Arc<Vec<f64>>,
}

impl GridFunction {
    pub fn new(values: Vec<C64>, weights: Arc<Vec<f64>>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(LabError::invalid(format!(
                "grid function has {} values but the grid has {} points",
                values.len(),
                weights.len()
            )));
        }
        Ok(GridFunction { values, weights })
    }

    pub fn zeros(weights: Arc<Vec<f64>>) -> Self {
        GridFunction {
            values: vec![C64::new(0.0, 0.0); weights.len()],
            weights,
        }
    }

    /// Delta-like function: `1/w` at one grid point, so it integrates to 1.
    pub fn point_mass(weights: Arc<Vec<f64>>, point: usize) -> Self {
        let mut out = Self::zeros(weights);
        out.values[point] = C64::new(1.0 / out.weights[point], 0.0);
        out
    }

    /// `L^p` norm with quadrature weights; `p = inf` gives the grid maximum.
    pub fn norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, &self.weights, p)
    }

    /// Random band-limited function: seeded complex Gaussian-ish coefficients
    /// on every retained mode.
    pub fn random_band_limited(model: &ModelSpectrum, seed: u64) -> Result<Self> {
        let basis = model.require_basis()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![C64::new(0.0, 0.0); basis.num_modes()];
        for e in &model.entries {
            coeffs[e.mode] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        Ok(GridFunction {
            values: basis.synthesize(&coeffs),
            weights: basis.weights().clone(),
        })
    }
}

pub(crate) fn lp_norm(values: &[C64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.norm().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// A multiplier frozen on the retained spectrum: one value per basis mode.
#[derive(Debug, Clone)]
pub struct SpectralOperator<'a> {
    pub basis: &'a Basis,
    pub values: Vec<C64>,
}

impl<'a> SpectralOperator<'a> {
    pub fn new(model: &'a ModelSpectrum, mult: &Multiplier) -> Result<Self> {
        let basis = model.require_basis()?;
        let mut values = vec![C64::new(0.0, 0.0); basis.num_modes()];
        for e in &model.entries {
            values[e.mode] = mult.eval(e.mu);
        }
        Ok(SpectralOperator { basis, values })
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let mut c = self.basis.analyze(f);
        c.iter_mut().zip(&self.values).for_each(|(ci, v)| *ci *= v);
        self.basis.synthesize(&c)
    }

    pub fn apply_adjoint(&self, f: &[C64]) -> Vec<C64> {
        let mut c = self.basis.analyze(f);
        c.iter_mut().zip(&self.values).for_each(|(ci, v)| *ci *= v.conj());
        self.basis.synthesize(&c)
    }
}

/// `alpha(Q) f = sum_j alpha(mu_j) <f, e_j> e_j` over retained modes.
pub fn apply_multiplier(model: &ModelSpectrum, mult: &Multiplier, f: &GridFunction) -> Result<GridFunction> {
    let op = SpectralOperator::new(model, mult)?;
    if f.values.len() != op.basis.num_points() {
        return Err(LabError::invalid("grid function does not live on this model's grid"));
    }
    Ok(GridFunction {
        values: op.apply(&f.values),
        weights: f.weights.clone(),
    })
}

/// `chi_k f`: projection onto eigenvalues in `[k-1, k)`.
pub fn cluster_projection(model: &ModelSpectrum, k: u32, f: &GridFunction) -> Result<GridFunction> {
    if k == 0 {
        return Err(LabError::invalid("cluster index k must be positive"));
    }
    apply_multiplier(model, &Multiplier::indicator(k as f64 - 1.0, k as f64), f)
}

/// `sigma(p) = n(1/2 - 1/p) - 1/2`, for `p >= 2(n+1)/(n-1)`.
pub fn sigma_exponent(p: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(LabError::invalid("dimension n must be >= 2"));
    }
    let nf = n as f64;
    let threshold = 2.0 * (nf + 1.0) / (nf - 1.0);
    if !(p >= threshold * (1.0 - 1e-15)) {
        return Err(LabError::invalid(format!("p = {p} is below the admissible threshold {threshold}")));
    }
    Ok(nf * (0.5 - 1.0 / p) - 0.5)
}

/// Discretized integral kernel `K(x_i, y_j)` (row-major) on a model grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub size: usize,
    pub values: Vec<C64>,
    pub weights: Arc<Vec<f64>>,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.size + j]
    }

    /// `(Kf)(x_i) = sum_j K(x_i, y_j) w_j f(y_j)`.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        (0..self.size)
            .into_par_iter()
            .map(|i| {
                let row = &self.values[i * self.size..(i + 1) * self.size];
                row.iter().zip(f).zip(self.weights.iter()).map(|((k, v), w)| k * v * *w).sum()
            })
            .collect()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.size {
            for j in i..self.size {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

const MAX_KERNEL_ENTRIES: usize = 16_000_000;

/// `K(x, y) = sum_j (mu_j^m - z^m)^{-1} e_j(x) conj(e_j(y))`, optionally
/// restricted to `mu_j in [lo, hi)`.
pub fn resolvent_kernel(model: &ModelSpectrum, z: C64, window: Option<(f64, f64)>) -> Result<KernelMatrix> {
    let basis = model.require_basis()?;
    let zm = powi(z, model.m);
    let entries = match window {
        Some((lo, hi)) => {
            model.check_window(lo, hi)?;
            model.window(lo, hi)
        }
        None => &model.entries[..],
    };
    check_collision(model, zm)?;
    let size = basis.num_points();
    if size.saturating_mul(size) > MAX_KERNEL_ENTRIES {
        return Err(LabError::invalid(format!("kernel on {size} grid points is too large to store")));
    }
    let columns: Vec<(C64, Vec<C64>)> = entries
        .iter()
        .map(|e| {
            let coef = 1.0 / (model.lambda(e) - zm);
            (coef, (0..size).map(|x| basis.eval(e.mode, x)).collect())
        })
        .collect();
    let values: Vec<C64> = (0..size)
        .into_par_iter()
        .flat_map_iter(|i| {
            let columns = &columns;
            (0..size).map(move |j| columns.iter().map(|(c, e)| c * e[i] * e[j].conj()).sum::<C64>())
        })
        .collect();
    Ok(KernelMatrix {
        size,
        values,
        weights: basis.weights().clone(),
    })
}

/// Rejects `z^m` within `1e-12` of a retained `lambda_j`.
pub(crate) fn check_collision(model: &ModelSpectrum, zm: C64) -> Result<()> {
    let distance = model
        .entries
        .iter()
        .map(|e| (model.lambda(e) - zm).norm())
        .fold(f64::INFINITY, f64::min);
    if distance < 1e-12 {
        return Err(LabError::SpectralCollision {
            distance,
            threshold: 1e-12,
        });
    }
    Ok(())
}

/// `max (1 + tau^m)|m_z(tau)|` over the sample set.
pub fn mz_bounded_region_bound(z_samples: &[C64], tau_grid: &[f64], m: u32) -> Result<f64> {
    validate_order(m)?;
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let zm = powi(z, m);
        for &t in tau_grid {
            let tm = t.powi(m as i32);
            let denom = (tm - zm).norm();
            if denom == 0.0 {
                return Err(LabError::SpectralCollision {
                    distance: 0.0,
                    threshold: 0.0,
                });
            }
            worst = worst.max((1.0 + tm) / denom);
        }
    }
    Ok(worst)
}

/// Smooth cutoffs `rho`, `psi`, `beta` built from the step
/// `s(x) = g(x)/(g(x) + g(1-x))`, `g(x) = e^{-1/x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpFunctions {
    pub epsilon: f64,
}

impl Default for BumpFunctions {
    fn default() -> Self {
        BumpFunctions { epsilon: 0.25 }
    }
}

impl BumpFunctions {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(LabError::invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
        }
        Ok(BumpFunctions { epsilon })
    }

    /// 0 for `x <= 0`, 1 for `x >= 1`, smooth in between.
    pub fn smooth_step(x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }

    /// 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
    pub fn psi(t: f64) -> f64 {
        Self::smooth_step(2.0 - t.abs())
    }

    /// `psi(t) - psi(2t)`, supported in `1/2 <= |t| <= 2`.
    pub fn beta(t: f64) -> f64 {
        Self::psi(t) - Self::psi(2.0 * t)
    }

    /// `1 - sum_{j >= 0} beta(2^{-j} t) = psi(2t)`.
    pub fn rho_tilde(t: f64) -> f64 {
        Self::psi(2.0 * t)
    }

    /// 1 on `[-eps/2, eps/2]`, 0 outside `[-eps, eps]`.
    pub fn rho(&self, t: f64) -> f64 {
        let e = self.epsilon;
        Self::smooth_step((e - t.abs()) / (0.5 * e))
    }
}

/// `(i/(m z^{m-1})) sum_{k<m/2} e^{2pi i k/m} int_{a<|t|<b} weight(t) e^{i|t| tau_k + i t tau} dt`,
/// folded onto `t > 0`.
fn half_wave_piece<W: Fn(f64) -> f64>(tau: f64, z: C64, m: u32, weight: W, a: f64, b: f64) -> Result<C64> {
    let ps = poles(z, m)?;
    if !(b > a) {
        return Ok(C64::new(0.0, 0.0));
    }
    let pref = I / (m as f64 * powi(z, m - 1));
    let mut total = C64::new(0.0, 0.0);
    for (k, &tk) in ps.upper().iter().enumerate() {
        let freq = tau.abs() + tk.re.abs() + 1.0;
        let pieces = (((b - a) * freq / std::f64::consts::PI).ceil() as usize).clamp(1, 4000);
        let breaks: Vec<f64> = (0..=pieces).map(|i| a + (b - a) * i as f64 / pieces as f64).collect();
        let r = integrate_with_breaks(
            |t| weight(t) * (I * t * tk).exp() * (2.0 * (t * tau).cos()),
            &breaks,
            QuadOptions::abs(1e-13),
        )?;
        total += unit_root(k as u32, m) * r.value;
    }
    Ok(pref * total)
}

fn require_large_z(z: C64) -> Result<()> {
    if !(z.norm() >= 1.0) {
        return Err(LabError::invalid(format!("localized pieces need |z| >= 1, got {}", z.norm())));
    }
    Ok(())
}

/// `m_z^loc(tau)`: the half-wave representation cut off by `rho`.
pub fn localized_multiplier(tau: f64, z: C64, m: u32, bumps: &BumpFunctions) -> Result<C64> {
    require_large_z(z)?;
    half_wave_piece(tau, z, m, |t| bumps.rho(t), 0.0, bumps.epsilon)
}

/// `r_z = m_z - m_z^loc`.
pub fn nonlocal_multiplier(tau: f64, z: C64, m: u32, bumps: &BumpFunctions) -> Result<C64> {
    let loc = localized_multiplier(tau, z, m, bumps)?;
    Ok(1.0 / (tau.powi(m as i32) - powi(z, m)) - loc)
}

/// `S_{z,j}(tau)`: the piece of `m_z^loc` with time weight `beta(2^{-j}|z|t) rho(t)`.
/// Identically zero when `2^{-j}|z| <= 1`, since then the support misses `|t| <= eps`.
pub fn dyadic_piece(tau: f64, z: C64, m: u32, j: u32, bumps: &BumpFunctions) -> Result<C64> {
    require_large_z(z)?;
    let scale = z.norm() / 2f64.powi(j as i32);
    let lo = 0.5 / scale;
    let hi = (2.0 / scale).min(bumps.epsilon);
    half_wave_piece(tau, z, m, |t| BumpFunctions::beta(scale * t) * bumps.rho(t), lo, hi)
}

/// `S~_z(tau)`: the piece with time weight `w(t) = rho~(|z|t) rho(t)`.
///
/// Evaluated as `m_z(tau) + D(tau)` with `D` the half-wave integral of
/// `w - 1`. That weight vanishes near `t = 0`, so `D` decays faster than any
/// power of `tau` and the `(1+tau)^{-m}` tail comes out of `m_z` in closed
/// form rather than from cancellation inside a quadrature.
pub fn tilde_piece(tau: f64, z: C64, m: u32, bumps: &BumpFunctions) -> Result<C64> {
    require_large_z(z)?;
    let s = z.norm();
    let plateau = (0.5 / s).min(0.5 * bumps.epsilon);
    let hi = (1.0 / s).min(bumps.epsilon);
    let ps = poles(z, m)?;
    let pref = I / (m as f64 * powi(z, m - 1));
    let mut corr = C64::new(0.0, 0.0);
    for (k, &tk) in ps.upper().iter().enumerate() {
        let freq = tau.abs() + tk.re.abs() + 1.0;
        let pieces = (((hi - plateau) * freq / std::f64::consts::PI).ceil() as usize).clamp(1, 4000);
        let breaks: Vec<f64> = (0..=pieces)
            .map(|i| plateau + (hi - plateau) * i as f64 / pieces as f64)
            .collect();
        let body = integrate_with_breaks(
            |t| (BumpFunctions::rho_tilde(s * t) * bumps.rho(t) - 1.0) * (I * t * tk).exp() * (2.0 * (t * tau).cos()),
            &breaks,
            QuadOptions {
                abs_tol: 1e-15,
                rel_tol: 0.0,
                max_panels: 200_000,
            },
        )?;
        // int_hi^inf e^{it tau_k} 2 cos(t tau) dt
        let tail = I * (I * hi * (tk + tau)).exp() / (tk + tau) + I * (I * hi * (tk - tau)).exp() / (tk - tau);
        corr += unit_root(k as u32, m) * (body.value - tail);
    }
    Ok(1.0 / (tau.powi(m as i32) - powi(z, m)) + pref * corr)
}

/// Number of dyadic pieces after which the partition of `m_z^loc` is complete.
pub fn dyadic_depth(z: C64, bumps: &BumpFunctions) -> u32 {
    (4.0 * z.norm() / bumps.epsilon).log2().ceil().max(0.0) as u32 + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the error of the tail approximation.
    pub tail_error: f64,
}

/// `|z|^{1-m} sum_{l >= 1} l^{m-1}/(1 + |l - a|)^{m+1}`: explicit sum to
/// `L`, then the midpoint-rule integral of the tail in closed form.
pub fn series_bound(m: u32, z_modulus: f64, a: f64) -> Result<SeriesValue> {
    validate_order(m)?;
    if !(z_modulus >= 1.0) || !(a >= 0.0 && a <= z_modulus) {
        return Err(LabError::invalid("series needs |z| >= 1 and 0 <= a <= |z|"));
    }
    let term = |l: f64| l.powi(m as i32 - 1) / (1.0 + (l - a).abs()).powi(m as i32 + 1);
    let last = (a.ceil() as u64) + 4000;
    let mut head = 0.0;
    // Sum small terms first.
    for l in (1..=last).rev() {
        head += term(l as f64);
    }
    // For l > L: u = 1 + l - a, l = u + c with c = a - 1, and
    // (u + c)^{m-1} u^{-m-1} = sum_i C(m-1, i) c^{m-1-i} u^{i-m-1}.
    let c = a - 1.0;
    let u0 = 1.0 + (last as f64 + 0.5) - a;
    let mut tail = 0.0;
    let mut binom = 1.0;
    for i in 0..m {
        let mi = m - 1;
        if i > 0 {
            binom *= (mi - i + 1) as f64 / i as f64;
        }
        tail += binom * c.powi((mi - i) as i32) * u0.powi(i as i32 - m as i32) / (m - i) as f64;
    }
    // Midpoint rule on convex decreasing terms: the summed error is at most
    // int f''/24 = |f'(L + 1/2)|/24, and the backward difference bounds |f'|.
    let tail_error = (term(last as f64) - term(last as f64 + 1.0)).abs() / 24.0;
    let scale = z_modulus.powi(1 - m as i32);
    Ok(SeriesValue {
        value: scale * (head + tail),
        tail_error: scale * tail_error,
    })
}

/// Supremum of [`series_bound`] over `|z|` in `z_moduli` and `a = frac |z|`.
pub fn series_bound_probe(m: u32, z_moduli: &[f64], a_fractions: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in z_moduli {
        for &frac in a_fractions {
            if !(0.0..=1.0).contains(&frac) {
                return Err(LabError::invalid("a must lie in [0, |z|]"));
            }
            worst = worst.max(series_bound(m, r, frac * r)?.value);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::{c, cis, rel_err};
    use crate::spectra::build_torus_model;
    use crate::symbol::Symbol;
    use std::f64::consts::PI;

    fn t2(cutoff: f64) -> ModelSpectrum {
        build_torus_model(2, 2, Symbol::Euclid, cutoff, None).unwrap()
    }

    #[test]
    fn bump_partition() {
        for i in 1..1000 {
            let t = -1.0 + 2.0 * i as f64 / 1000.0;
            let s: f64 = (0..80).map(|j| BumpFunctions::beta(t / 2f64.powi(j))).sum::<f64>() + BumpFunctions::rho_tilde(t);
            assert!((s - 1.0).abs() < 1e-10, "t={t}");
        }
        for t in [0.49, 2.01, -2.5, 0.1] {
            assert_eq!(BumpFunctions::beta(t), 0.0);
        }
        let b = BumpFunctions::default();
        assert_eq!(b.rho(0.12), 1.0);
        assert_eq!(b.rho(0.25), 0.0);
        assert!(BumpFunctions::new(0.5).is_err());
    }

    #[test]
    fn multiplier_application() {
        let model = t2(3.2);
        let f = GridFunction::random_band_limited(&model, 3).unwrap();
        let id = apply_multiplier(&model, &Multiplier::constant(C64::new(1.0, 0.0)), &f).unwrap();
        assert!(f.values.iter().zip(&id.values).all(|(a, b)| (a - b).norm() < 1e-12));

        let chi = Multiplier::indicator(1.0, 2.0);
        let once = apply_multiplier(&model, &chi, &f).unwrap();
        let twice = apply_multiplier(&model, &chi, &once).unwrap();
        assert!(once.values.iter().zip(&twice.values).all(|(a, b)| (a - b).norm() < 1e-12));

        let z = c(0.3, 1.1);
        let r = apply_multiplier(&model, &Multiplier::resolvent(z, 2), &f).unwrap();
        let back = apply_multiplier(&model, &Multiplier::shifted_power(z, 2), &r).unwrap();
        let diff: Vec<C64> = back.values.iter().zip(&f.values).map(|(a, b)| a - b).collect();
        assert!(lp_norm(&diff, &f.weights, 2.0) / f.norm(2.0) < 1e-10);
    }

    #[test]
    fn cluster_projections() {
        let model = t2(4.5);
        let f = GridFunction::random_band_limited(&model, 9).unwrap();
        let mut sum = vec![C64::new(0.0, 0.0); f.values.len()];
        for k in 1..=5 {
            let p = cluster_projection(&model, k, &f).unwrap();
            sum.iter_mut().zip(&p.values).for_each(|(s, v)| *s += v);
            let other = cluster_projection(&model, k % 5 + 1, &p).unwrap();
            assert!(other.norm(f64::INFINITY) < 1e-12);
        }
        assert!(sum.iter().zip(&f.values).all(|(a, b)| (a - b).norm() < 1e-11));

        // e^{i x_1} lies in the cluster [1, 2).
        let basis = model.basis().unwrap();
        let Basis::Torus(tb) = basis else { panic!() };
        let vals: Vec<C64> = (0..basis.num_points()).map(|i| cis(tb.point(i)[0])).collect();
        let g = GridFunction::new(vals, basis.weights().clone()).unwrap();
        let p2 = cluster_projection(&model, 2, &g).unwrap();
        assert!(p2.values.iter().zip(&g.values).all(|(a, b)| (a - b).norm() < 1e-12));
        assert!(cluster_projection(&model, 1, &g).unwrap().norm(f64::INFINITY) < 1e-12);
    }

    #[test]
    fn sigma_examples() {
        assert!((sigma_exponent(6.0, 3).unwrap() - 0.5).abs() < 1e-15);
        assert!((sigma_exponent(10.0, 5).unwrap() - 1.5).abs() < 1e-15);
        assert!(sigma_exponent(3.0, 3).is_err());
    }

    #[test]
    fn kernel_examples() {
        let model = t2(2.2);
        let k = resolvent_kernel(&model, c(0.0, 1.0), None).unwrap();
        let expect: f64 = model.entries.iter().map(|e| 1.0 / (e.mu * e.mu + 1.0)).sum::<f64>() / (4.0 * PI * PI);
        for i in [0, 5, 17] {
            assert!((k.get(i, i) - expect).norm() < 1e-12);
        }
        assert!(k.hermitian_defect() < 1e-12);
        let zero = resolvent_kernel(&model, c(0.0, 1.0), Some((0.5, 0.9))).unwrap();
        assert!(zero.values.iter().all(|v| v.norm() == 0.0));
        assert!(matches!(
            resolvent_kernel(&model, c(1.0, 0.0), None),
            Err(LabError::SpectralCollision { .. })
        ));
        assert!(matches!(
            resolvent_kernel(&model, c(0.0, 1.0), Some((0.5, 1.5))),
            Err(LabError::CutoffProximity { .. })
        ));
    }

    #[test]
    fn bounded_region_examples() {
        let taus: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.01).collect();
        let v = mz_bounded_region_bound(&[c(0.0, 1.0)], &taus, 2).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn localized_split() {
        let b = BumpFunctions::default();
        let z = 3.0 * cis(0.4 * PI);
        for tau in [0.0, 1.0, 2.9, 7.5] {
            let loc = localized_multiplier(tau, z, 2, &b).unwrap();
            let r = nonlocal_multiplier(tau, z, 2, &b).unwrap();
            let mz = 1.0 / (tau * tau - z * z);
            assert!((loc + r - mz).norm() < 1e-9);
        }
        // With the constant weight over a long time interval the integral
        // reproduces the resolvent.
        let z = c(0.4, 1.6);
        let tau = 1.3;
        let full = half_wave_piece(tau, z, 2, |_| 1.0, 0.0, 60.0).unwrap();
        assert!(rel_err(full, 1.0 / (tau * tau - z * z)) < 1e-9);
    }

    #[test]
    fn dyadic_vanishing_and_partition() {
        let b = BumpFunctions::default();
        let z = 10.0 * cis(0.3 * PI);
        for j in 0..=3 {
            // 2^{-j}|z| > 1 for j <= 3, but the support [2^{j-1}/|z|, ..] may still miss [0, eps].
            let _ = dyadic_piece(1.0, z, 2, j, &b).unwrap();
        }
        for j in 4..8 {
            assert_eq!(dyadic_piece(1.0, z, 2, j, &b).unwrap(), C64::new(0.0, 0.0));
        }
        for tau in [0.0, 4.0, 11.0] {
            let depth = dyadic_depth(z, &b);
            let sum: C64 = (0..=depth).map(|j| dyadic_piece(tau, z, 2, j, &b).unwrap()).sum::<C64>()
                + tilde_piece(tau, z, 2, &b).unwrap();
            let loc = localized_multiplier(tau, z, 2, &b).unwrap();
            assert!((sum - loc).norm() < 1e-8, "tau={tau}");
        }
    }

    #[test]
    fn tilde_piece_matches_direct_quadrature() {
        let b = BumpFunctions::default();
        for (m, r) in [(2u32, 2.0), (2, 15.0), (4, 3.0)] {
            let z = r * cis(PI / m as f64 * 0.8);
            let s = z.norm();
            for tau in [0.0, 0.7, 3.0, 12.0] {
                let direct = half_wave_piece(
                    tau,
                    z,
                    m,
                    |t| BumpFunctions::rho_tilde(s * t) * b.rho(t),
                    0.0,
                    (1.0 / s).min(b.epsilon),
                )
                .unwrap();
                let split = tilde_piece(tau, z, m, &b).unwrap();
                assert!((direct - split).norm() < 1e-11, "m={m} r={r} tau={tau}");
            }
        }
    }

    #[test]
    fn series_values() {
        let v = series_bound(2, 1.0, 0.0).unwrap();
        // zeta(2) - zeta(3)
        assert!((v.value - 0.442_877_163_688_632_1).abs() < 1e-9, "{}", v.value);
        assert!(v.tail_error < 1e-9);
        for r in [1.0, 10.0, 100.0] {
            let v = series_bound(2, r, 0.5).unwrap();
            assert!(v.value <= PI * PI / 6.0 / r);
        }
        let m4 = series_bound(4, 1000.0, 500.0).unwrap();
        assert!(m4.value.is_finite() && m4.value > 0.0);
    }
}
