//! Operator-norm probes: exact `L^2 -> L^2` and `L^1 -> L^inf` norms on the
//! grid, certified `L^p -> L^q` lower bounds by nonlinear power ascent,
//! Bernstein scaling, cluster removal, and saturation (blow-up) sequences.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cplx::{cis, powi, C64};
use crate::error::{LabError, Result};
use crate::multiplier::{check_collision, lp_norm, GridFunction, KernelMatrix, Multiplier, SpectralOperator};
use crate::region::validate_order;
use crate::spectra::{counting_function, saturation_density, Basis, ModelKind, ModelSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    ExactL2,
    ExactL1Linf,
    AscentLowerBound,
}

#[derive(Debug, Clone)]
pub struct NormProbeResult {
    pub value: f64,
    pub kind: NormKind,
    pub iterations: usize,
    /// False when the ascent hit its iteration cap before the tolerance.
    pub converged: bool,
    pub witness: Option<GridFunction>,
    /// Ratios of the accepted ascent iterates, in order.
    pub history: Vec<f64>,
}

/// `max_j 1/|lambda_j - z^m|`, the exact norm of the normal operator
/// `(P - z^m)^{-1}` on the retained spectrum.
pub fn l2_resolvent_norm(model: &ModelSpectrum, z: C64) -> Result<NormProbeResult> {
    let zm = powi(z, model.m);
    check_collision(model, zm)?;
    let (best, entry) = model
        .entries
        .iter()
        .map(|e| (1.0 / (model.lambda(e) - zm).norm(), e))
        .fold((0.0, None), |acc, (v, e)| if v > acc.0 { (v, Some(e)) } else { acc });
    let witness = match (model.basis(), entry) {
        (Some(basis), Some(e)) => Some(GridFunction {
            values: (0..basis.num_points()).map(|x| basis.eval(e.mode, x)).collect(),
            weights: basis.weights().clone(),
        }),
        _ => None,
    };
    Ok(NormProbeResult {
        value: best,
        kind: NormKind::ExactL2,
        iterations: 0,
        converged: true,
        witness,
        history: vec![best],
    })
}

/// `max |K(x_i, y_j)|`, the exact `L^1 -> L^inf` norm of the discretized
/// operator. The witness is the point mass at the maximizing column.
pub fn l1_linf_norm(kernel: &KernelMatrix) -> NormProbeResult {
    let mut best = 0.0;
    let mut col = 0;
    for (idx, v) in kernel.values.iter().enumerate() {
        let a = v.norm();
        if a > best {
            best = a;
            col = idx % kernel.size.max(1);
        }
    }
    let witness = (kernel.size > 0).then(|| GridFunction::point_mass(kernel.weights.clone(), col));
    NormProbeResult {
        value: best,
        kind: NormKind::ExactL1Linf,
        iterations: 0,
        converged: true,
        witness,
        history: vec![best],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub max_iter: usize,
    /// Stop when the relative gain of an iteration drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            max_iter: 300,
            tol: 1e-10,
            seed: 42,
        }
    }
}

/// `|v|^{r-1} v/|v|`, the duality map of `L^r` up to normalization.
fn duality_map(v: &[C64], r: f64) -> Vec<C64> {
    v.iter()
        .map(|x| {
            let a = x.norm();
            if a == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                x * a.powf(r - 2.0)
            }
        })
        .collect()
}

fn normalize(v: &mut [C64], w: &[f64], p: f64) -> bool {
    let nrm = lp_norm(v, w, p);
    if !(nrm > 0.0) || !nrm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= nrm);
    true
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Lower bound on `||alpha(Q)||_{L^p -> L^q}` by the nonlinear power method
/// `u <- J_{p'}(T* J_q(T u))`. Iterates that would decrease the ratio are
/// rejected, so the reported history is non-decreasing.
pub fn pq_lower_bound(model: &ModelSpectrum, mult: &Multiplier, p: f64, q: f64, opts: AscentOptions) -> Result<NormProbeResult> {
    if !(p > 1.0 && p <= 2.0 && q >= 2.0 && q.is_finite()) {
        return Err(LabError::invalid(format!("ascent needs 1 < p <= 2 <= q < inf, got p = {p}, q = {q}")));
    }
    let op = SpectralOperator::new(model, mult)?;
    let w = op.basis.weights().clone();
    let p_dual = p / (p - 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ratio = |u: &[C64]| -> (f64, Vec<C64>) {
        let v = op.apply(u);
        (lp_norm(&v, &w, q) / lp_norm(u, &w, p), v)
    };

    let mut u = random_vector(&mut rng, w.len());
    let mut attempts = 0;
    while !normalize(&mut u, &w, p) || lp_norm(&op.apply(&u), &w, q) == 0.0 {
        attempts += 1;
        if attempts > 8 {
            // The operator vanishes on every probe vector.
            return Ok(NormProbeResult {
                value: 0.0,
                kind: NormKind::AscentLowerBound,
                iterations: 0,
                converged: true,
                witness: Some(GridFunction { values: u, weights: w }),
                history: vec![0.0],
            });
        }
        u = random_vector(&mut rng, w.len());
    }
    let (mut best, mut v) = ratio(&u);
    let mut history = vec![best];
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let g = duality_map(&v, q);
        let s = op.apply_adjoint(&g);
        let mut next = duality_map(&s, p_dual);
        if !normalize(&mut next, &w, p) {
            next = random_vector(&mut ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9), w.len());
            normalize(&mut next, &w, p);
        }
        let (r, nv) = ratio(&next);
        if !(r >= best - 1e-12 * best.max(1.0)) {
            converged = true;
            break;
        }
        let gain = r - best;
        u = next;
        v = nv;
        best = best.max(r);
        history.push(best);
        if gain <= opts.tol * best {
            converged = true;
            break;
        }
    }
    let (value, _) = ratio(&u);
    Ok(NormProbeResult {
        value,
        kind: NormKind::AscentLowerBound,
        iterations,
        converged,
        witness: Some(GridFunction { values: u, weights: w }),
        history,
    })
}

/// Best of `restarts` independent ascents with seeds `seed, seed+1, ...`.
pub fn pq_lower_bound_restarts(
    model: &ModelSpectrum,
    mult: &Multiplier,
    p: f64,
    q: f64,
    opts: AscentOptions,
    restarts: usize,
) -> Result<NormProbeResult> {
    let runs: Vec<Result<NormProbeResult>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            pq_lower_bound(
                model,
                mult,
                p,
                q,
                AscentOptions {
                    seed: opts.seed.wrapping_add(i as u64),
                    ..opts
                },
            )
        })
        .collect();
    let mut best: Option<NormProbeResult> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinFit {
    pub alphas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    /// `n(1/q - 1/r)`.
    pub predicted: f64,
}

/// Ratio `||beta(Q/alpha) f||_r / ||f||_q` for the spectrally localized bump
/// `f = psi(Q/(2 alpha)) delta_0`, and its log-log slope in `alpha`.
pub fn bernstein_probe(
    model: &ModelSpectrum,
    beta: &(dyn Fn(f64) -> f64 + Sync),
    alpha_list: &[f64],
    q: f64,
    r: f64,
) -> Result<BernsteinFit> {
    if beta(0.0) != 0.0 {
        return Err(LabError::invalid("beta must vanish at 0"));
    }
    if !(q >= 1.0 && r >= 1.0) {
        return Err(LabError::invalid("exponents must be >= 1"));
    }
    let basis = model.require_basis()?;
    let w = basis.weights().clone();
    let delta = GridFunction::point_mass(w.clone(), 0);
    let coeffs = basis.analyze(&delta.values);
    let mut ratios = Vec::with_capacity(alpha_list.len());
    for &alpha in alpha_list {
        if !(alpha >= 1.0) {
            return Err(LabError::invalid("Bernstein probe needs alpha >= 1"));
        }
        model.check_window(0.0, 4.0 * alpha)?;
        let mut num = vec![C64::new(0.0, 0.0); coeffs.len()];
        let mut den = vec![C64::new(0.0, 0.0); coeffs.len()];
        for e in &model.entries {
            let s = e.mu / alpha;
            num[e.mode] = coeffs[e.mode] * beta(s);
            den[e.mode] = coeffs[e.mode] * crate::multiplier::BumpFunctions::psi(s / 2.0);
        }
        let top = lp_norm(&basis.synthesize(&num), &w, r);
        let bottom = lp_norm(&basis.synthesize(&den), &w, q);
        ratios.push(top / bottom);
    }
    let pts: Vec<(f64, f64)> = alpha_list.iter().zip(&ratios).map(|(a, v)| (a.ln(), v.ln())).collect();
    let slope = crate::spectra::least_squares_slope(&pts);
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    Ok(BernsteinFit {
        alphas: alpha_list.to_vec(),
        ratios,
        slope,
        predicted: model.n as f64 * (inv(q) - inv(r)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalRow {
    pub alpha: f64,
    pub beta: f64,
    /// Lower bound for `(I - chi_[alpha-1, alpha+1)) (P - z^m)^{-1}`.
    pub removed: f64,
    /// Lower bound for the full resolvent.
    pub full: f64,
}

/// Sobolev pair `p = 2n/(n+m)`, `q = 2n/(n-m)`; requires `n > m`.
pub fn sobolev_exponents(n: usize, m: u32) -> Result<(f64, f64)> {
    let (nf, mf) = (n as f64, m as f64);
    if n as u32 <= m {
        return Err(LabError::invalid(format!("Sobolev exponents need n > m (n = {n}, m = {m})")));
    }
    Ok((2.0 * nf / (nf + mf), 2.0 * nf / (nf - mf)))
}

/// For each `alpha`, ascent lower bounds at the Sobolev pair for the resolvent
/// at `z = alpha + i beta` with and without the window `[alpha-1, alpha+1)`.
/// `beta_of` maps `alpha` to `beta`.
pub fn cluster_removal_probe(
    model: &ModelSpectrum,
    beta_of: &(dyn Fn(f64) -> f64 + Sync),
    alpha_list: &[f64],
    opts: AscentOptions,
) -> Result<Vec<RemovalRow>> {
    let (p, q) = sobolev_exponents(model.n, model.m)?;
    alpha_list
        .par_iter()
        .map(|&alpha| {
            let beta = beta_of(alpha);
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(LabError::invalid(format!("need 0 < beta <= 1, got {beta}")));
            }
            model.check_window(alpha - 1.0, alpha + 1.0)?;
            let z = C64::new(alpha, beta);
            check_collision(model, powi(z, model.m))?;
            let full_op = Multiplier::resolvent(z, model.m);
            let removed_op = full_op.without_window(alpha - 1.0, alpha + 1.0);
            let removed = pq_lower_bound_restarts(model, &removed_op, p, q, opts, 3)?.value;
            let full = pq_lower_bound_restarts(model, &full_op, p, q, opts, 3)?.value;
            Ok(RemovalRow { alpha, beta, removed, full })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaRule {
    InvK,
    Const(f64),
}

impl BetaRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inv-k" => Ok(BetaRule::InvK),
            other => match other.strip_prefix("const:") {
                Some(v) => v
                    .parse()
                    .map(BetaRule::Const)
                    .map_err(|_| LabError::Parse(format!("bad beta rule constant '{v}'"))),
                None => Err(LabError::Parse(format!("unknown beta rule '{other}' (expected inv-k or const:c)"))),
            },
        }
    }

    pub fn beta(&self, k: usize) -> f64 {
        match self {
            BetaRule::InvK => 1.0 / k as f64,
            BetaRule::Const(c) => *c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationSequence {
    pub k: usize,
    pub alpha_k: f64,
    pub beta_k: f64,
    /// `alpha_k + i beta_k`.
    pub z_lower: C64,
    /// `e^{2pi i/m}(alpha_k - i beta_k)`.
    pub z_upper: C64,
    pub l_lower: f64,
    pub l_upper: f64,
    pub density_k: f64,
}

/// Window diagonal `sup_x sum_{mu_j in window} weight_j |e_j(x)|^2`, from the grid
/// for dense bases, else the volume average `sum multiplicity_j weight_j / Vol`
/// (exact for exponentials on the torus and for zonal models).
fn window_diagonal(model: &ModelSpectrum, lo: f64, hi: f64, weight: impl Fn(f64) -> f64 + Sync) -> f64 {
    let entries = model.window(lo, hi);
    match model.basis() {
        Some(basis @ Basis::Dense(_)) => (0..basis.num_points())
            .into_par_iter()
            .map(|x| entries.iter().map(|e| weight(e.mu) * basis.eval(e.mode, x).norm_sqr()).sum::<f64>())
            .reduce(|| 0.0, f64::max),
        _ => entries.iter().map(|e| e.multiplicity as f64 * weight(e.mu)).sum::<f64>() / model.volume,
    }
}

/// Lower-bound quantity
/// `alpha^{-(n-m)} |Im(-conj(z)^m)| sup_x sum_{[alpha-beta, alpha+beta)} |e_j(x)|^2/|mu_j^m - z^m|^2`.
fn saturation_quantity(model: &ModelSpectrum, alpha: f64, beta: f64, z: C64) -> f64 {
    let m = model.m;
    let zm = powi(z, m);
    let lead = powi(z.conj(), m).im.abs();
    let diag = window_diagonal(model, alpha - beta, alpha + beta, |mu| 1.0 / (mu.powi(m as i32) - zm).norm_sqr());
    alpha.powi(m as i32 - model.n as i32) * lead * diag
}

/// Cluster centre used as `alpha_k`: the Zoll centre `c_k`, or `k` itself.
fn sequence_center(model: &ModelSpectrum, k: usize) -> f64 {
    match &model.kind {
        ModelKind::Zoll(p) => p.center(k),
        _ => k as f64,
    }
}

/// Saturation sequences along both boundary rays of the sector.
pub fn blowup_sequence(model: &ModelSpectrum, k_range: (usize, usize), rule: BetaRule) -> Result<Vec<SaturationSequence>> {
    validate_order(model.m)?;
    let (k0, k1) = k_range;
    if k0 == 0 || k1 < k0 {
        return Err(LabError::invalid("k range must be a:b with 1 <= a <= b"));
    }
    let m = model.m;
    (k0..=k1)
        .into_par_iter()
        .map(|k| {
            let alpha = sequence_center(model, k);
            let beta = rule.beta(k);
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(LabError::invalid(format!("beta_k must lie in (0, 1], got {beta}")));
            }
            model.check_window(alpha - 1.0, alpha + 1.0)?;
            let z_lower = C64::new(alpha, beta);
            let z_upper = cis(2.0 * PI / m as f64) * C64::new(alpha, -beta);
            Ok(SaturationSequence {
                k,
                alpha_k: alpha,
                beta_k: beta,
                z_lower,
                z_upper,
                l_lower: saturation_quantity(model, alpha, beta, z_lower),
                l_upper: saturation_quantity(model, alpha, beta, z_upper),
                density_k: saturation_density(model, alpha, beta)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarRow {
    pub alpha: f64,
    pub beta: f64,
    /// `Im z^m / ((m/2) beta alpha^{m-1})`; at least 1 when the first inequality holds.
    pub imaginary_ratio: f64,
    /// `|z^m - (alpha+i)^m| / alpha^{m-1}`.
    pub shift_ratio: f64,
    /// `min_{k in 2..=10} |tau^m - z^m| / ((k-1)(alpha+k)^{m-1})` at `tau = alpha + k - 1/2`.
    pub gap_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarReport {
    pub rows: Vec<ScalarRow>,
    pub worst_imaginary_ratio: f64,
    pub worst_shift_ratio: f64,
    pub worst_gap_ratio: f64,
    /// Smallest sampled `alpha` beyond which every row satisfies the first
    /// inequality.
    pub alpha_threshold: f64,
}

/// Evaluates the three scalar inequalities behind the cluster-removal bound
/// at `z = alpha + i beta`.
pub fn scalar_region_inequalities(z_grid: &[C64], m: u32) -> Result<ScalarReport> {
    validate_order(m)?;
    let mf = m as f64;
    let rows: Vec<ScalarRow> = z_grid
        .iter()
        .map(|&z| {
            let (alpha, beta) = (z.re, z.im);
            let zm = powi(z, m);
            let lead = alpha.powi(m as i32 - 1);
            let gap_ratio = (2..=10)
                .map(|k| {
                    let tau = alpha + k as f64 - 0.5;
                    (tau.powi(m as i32) - zm).norm() / ((k as f64 - 1.0) * (alpha + k as f64).powi(m as i32 - 1))
                })
                .fold(f64::INFINITY, f64::min);
            ScalarRow {
                alpha,
                beta,
                imaginary_ratio: zm.im / (0.5 * mf * beta * lead),
                shift_ratio: (zm - powi(C64::new(alpha, 1.0), m)).norm() / lead,
                gap_ratio,
            }
        })
        .collect();
    let worst_imaginary_ratio = rows.iter().map(|r| r.imaginary_ratio).fold(f64::INFINITY, f64::min);
    let worst_shift_ratio = rows.iter().map(|r| r.shift_ratio).fold(0.0, f64::max);
    let worst_gap_ratio = rows.iter().map(|r| r.gap_ratio).fold(f64::INFINITY, f64::min);
    let failing = rows
        .iter()
        .filter(|r| r.imaginary_ratio < 1.0)
        .map(|r| r.alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    let alpha_threshold = rows
        .iter()
        .map(|r| r.alpha)
        .filter(|a| *a > failing)
        .fold(f64::INFINITY, f64::min);
    Ok(ScalarReport {
        rows,
        worst_imaginary_ratio,
        worst_shift_ratio,
        worst_gap_ratio,
        alpha_threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformityRow {
    pub radius: f64,
    /// `sup_arc |z|^{m-1} ||(P - z^m)^{-1}||_{2 -> 2}` over the arc of radius `radius` in the region.
    pub scaled_norm: f64,
}

/// Scaled `L^2` resolvent norms on arcs `|z| = r` inside the region with
/// boundary distance `delta`.
pub fn region_uniformity(model: &ModelSpectrum, delta: f64, radii: &[f64], samples: usize) -> Result<Vec<UniformityRow>> {
    let m = model.m;
    let opening = 2.0 * PI / m as f64;
    radii
        .iter()
        .map(|&r| {
            if !(r > delta) {
                return Err(LabError::invalid("arc radius must exceed delta"));
            }
            // Im z >= delta and the mirror condition on the upper ray.
            let lo = (delta / r).asin();
            let hi = opening - lo;
            if hi <= lo {
                return Err(LabError::invalid("arc misses the region"));
            }
            let mut sup: f64 = 0.0;
            for i in 0..samples {
                let th = lo + (hi - lo) * i as f64 / (samples.max(2) - 1) as f64;
                let z = r * cis(th);
                sup = sup.max(l2_resolvent_norm(model, z)?.value);
            }
            Ok(UniformityRow {
                radius: r,
                scaled_norm: r.powi(m as i32 - 1) * sup,
            })
        })
        .collect()
}

/// `max ||alpha(Q) f||_q / ||f||_p` over seeded random band-limited `f`, for
/// the multiplier `(1 + tau^m)^{-1}` at the Sobolev pair.
pub fn sobolev_multiplier_ratio(model: &ModelSpectrum, trials: usize, seed: u64) -> Result<f64> {
    let (p, q) = sobolev_exponents(model.n, model.m)?;
    let op = SpectralOperator::new(model, &Multiplier::bessel(model.m))?;
    let w = op.basis.weights().clone();
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let f = GridFunction::random_band_limited(model, seed.wrapping_add(t as u64))?;
        let out = op.apply(&f.values);
        worst = worst.max(lp_norm(&out, &w, q) / f.norm(p));
    }
    Ok(worst)
}

/// Total multiplicity in `[lo, hi)`.
pub fn window_count(model: &ModelSpectrum, lo: f64, hi: f64) -> u64 {
    counting_function(model, hi) - counting_function(model, lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::c;
    use crate::multiplier::{resolvent_kernel, BumpFunctions};
    use crate::spectra::{build_torus_model, build_zoll_model, ZollParams};
    use crate::symbol::Symbol;

    fn toy(values: [f64; 3]) -> ModelSpectrum {
        let cols = (0..3)
            .map(|j| (0..3).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        ModelSpectrum::from_dense(3, 2, &values, cols, vec![1.0; 3]).unwrap()
    }

    #[test]
    fn l2_examples() {
        let model = ModelSpectrum::from_eigenvalues(3, 2, &[(1.0, 1), (2.0, 1)], 1.0).unwrap();
        let z = crate::region::inverse_map(c(1.0, 1.0), 2).unwrap();
        assert!((l2_resolvent_norm(&model, z).unwrap().value - 1.0).abs() < 1e-12);
        let z = crate::region::inverse_map(c(2.5, 1e-9), 2).unwrap();
        assert!((l2_resolvent_norm(&model, z).unwrap().value - 1.0 / 1.5).abs() < 1e-8);
        let z1 = crate::region::inverse_map(c(1.2, 0.1), 2).unwrap();
        let z2 = crate::region::inverse_map(c(1.2, 0.5), 2).unwrap();
        assert!(l2_resolvent_norm(&model, z1).unwrap().value > l2_resolvent_norm(&model, z2).unwrap().value);
    }

    #[test]
    fn l1_linf_examples() {
        let model = build_torus_model(2, 2, Symbol::Euclid, 2.2, None).unwrap();
        let k = resolvent_kernel(&model, c(0.0, 1.0), None).unwrap();
        let r = l1_linf_norm(&k);
        assert!((r.value - k.get(0, 0).norm()).abs() < 1e-14);
        let zero = resolvent_kernel(&model, c(0.0, 1.0), Some((0.5, 0.9))).unwrap();
        assert_eq!(l1_linf_norm(&zero).value, 0.0);
    }

    #[test]
    fn ascent_matches_l2_when_p_equals_q() {
        let model = toy([1.0, 0.6, 0.3]);
        let z = c(0.2, 0.5);
        let mult = Multiplier::resolvent(z, 2);
        let a = pq_lower_bound(&model, &mult, 2.0, 2.0, AscentOptions::default()).unwrap();
        let exact = l2_resolvent_norm(&model, z).unwrap().value;
        assert!((a.value - exact).abs() < 1e-6 * exact);
        assert!(a.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn rank_one_closed_form() {
        let model = build_torus_model(2, 2, Symbol::Euclid, 2.2, None).unwrap();
        // Multiplier supported on |k| = sqrt(2): four modes. Use a single mode by
        // restricting to mu = 0 instead.
        let mult = Multiplier::indicator(0.0, 0.5);
        let (p, q) = (1.5, 4.0);
        let r = pq_lower_bound_restarts(&model, &mult, p, q, AscentOptions::default(), 3).unwrap();
        let n = 2.0;
        let norm_r = |r: f64| (2.0 * PI).powf(n / r) * (2.0 * PI).powf(-n / 2.0);
        let expect = norm_r(q) * norm_r(p / (p - 1.0));
        assert!((r.value - expect).abs() < 1e-8 * expect, "{} vs {}", r.value, expect);
    }

    #[test]
    fn bernstein_slopes() {
        let model = build_torus_model(2, 2, Symbol::Euclid, 34.0, None).unwrap();
        let alphas = [2.0, 3.0, 4.5, 6.0, 8.0];
        let fit = bernstein_probe(&model, &BumpFunctions::beta, &alphas, 1.0, f64::INFINITY).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.15, "{}", fit.slope);
        let fit = bernstein_probe(&model, &BumpFunctions::beta, &alphas, 2.0, 2.0).unwrap();
        assert!(fit.slope.abs() < 0.15, "{}", fit.slope);
        assert!(bernstein_probe(&model, &|_| 1.0, &alphas, 1.0, 2.0).is_err());
    }

    #[test]
    fn blowup_branches_agree() {
        let model = build_zoll_model(ZollParams::new(3, 2, 80)).unwrap();
        let seq = blowup_sequence(&model, (5, 60), BetaRule::InvK).unwrap();
        for s in &seq {
            assert!((s.l_lower - s.l_upper).abs() < 1e-9 * s.l_lower);
            assert!((s.density_k - s.k as f64).abs() < 1e-9);
            assert!((s.z_lower.im - s.beta_k).abs() < 1e-15);
            let rot = s.z_upper * cis(-PI);
            assert!((rot.re - s.alpha_k).abs() < 1e-12 && (-rot.im - s.beta_k).abs() < 1e-12);
        }
        let l5 = seq[0].l_lower;
        assert!(seq.iter().all(|s| s.l_lower / l5 >= s.k as f64 / 10.0));
    }

    #[test]
    fn scalar_examples() {
        let rep = scalar_region_inequalities(&[c(10.0, 0.5), c(10.0, 1.0)], 2).unwrap();
        assert!((rep.rows[0].imaginary_ratio - 2.0).abs() < 1e-12);
        let rep4 = scalar_region_inequalities(&[c(10.0, 1.0)], 4).unwrap();
        // Im z^4 = 3960 against 2 * 1 * 1000.
        assert!((rep4.rows[0].imaginary_ratio - 3960.0 / 2000.0).abs() < 1e-12);
        assert!(rep.worst_imaginary_ratio >= 1.0);
    }

    #[test]
    fn beta_rules() {
        assert_eq!(BetaRule::parse("inv-k").unwrap(), BetaRule::InvK);
        assert_eq!(BetaRule::parse("const:0.5").unwrap(), BetaRule::Const(0.5));
        assert!(BetaRule::parse("nope").is_err());
    }
}
