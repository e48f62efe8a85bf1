//! Cosphere convexity and oscillatory integrals over level sets of a
//! degree-one homogeneous symbol, for `n = 2, 3`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cplx::{C64, I};
use crate::error::{LabError, Result};
use crate::multiplier::BumpFunctions;
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::spectra::least_squares_slope;
use crate::sphere::SphereRule;
use crate::symbol::{norm2, random_unit, Symbol};

/// A validated symbol together with its dimension.
#[derive(Debug, Clone)]
pub struct ConvexSymbol {
    pub n: usize,
    pub symbol: Symbol,
}

impl ConvexSymbol {
    /// Checks positivity, homogeneity and the Euler relation on random samples.
    pub fn new(n: usize, symbol: Symbol) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(LabError::invalid(format!("oscillatory integrals are implemented for n = 2, 3 (got {n})")));
        }
        if let Symbol::Ellipse(axes) = &symbol {
            if axes.len() != n {
                return Err(LabError::invalid("ellipse axis count must equal n"));
            }
        }
        symbol.check_homogeneous(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0xe01e);
        for _ in 0..100 {
            let xi: Vec<f64> = random_unit(&mut rng, n).iter().map(|x| x * rng.gen_range(0.1..10.0)).collect();
            let a = symbol.value(&xi);
            let g = symbol.gradient(&xi);
            let euler: f64 = g.iter().zip(&xi).map(|(g, x)| g * x).sum();
            if (euler - a).abs() >= 1e-7 * a {
                return Err(LabError::invalid(format!("symbol {} violates the Euler relation", symbol.label())));
            }
        }
        Ok(ConvexSymbol { n, symbol })
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        self.symbol.value(xi)
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        self.symbol.gradient(xi)
    }

    pub fn hessian(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        self.symbol.hessian(xi)
    }

    /// Radial projection of a unit vector onto `{a = 1}`.
    pub fn project(&self, omega: &[f64]) -> Vec<f64> {
        let a = self.value(omega);
        omega.iter().map(|x| x / a).collect()
    }

    /// Largest `|xi|` on `{a = 1}`.
    pub fn max_radius(&self) -> f64 {
        1.0 / self.symbol.min_on_sphere(self.n)
    }
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .expect("non-empty");
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    d
}

/// Gaussian curvature of `{a = 1}` at `xi` from the bordered Hessian.
pub fn gaussian_curvature(sym: &ConvexSymbol, xi: &[f64]) -> Result<f64> {
    if xi.len() != sym.n {
        return Err(LabError::invalid("point dimension does not match the symbol"));
    }
    let a = sym.value(xi);
    if (a - 1.0).abs() > 1e-8 {
        return Err(LabError::invalid(format!("point is not on the unit level set (a = {a})")));
    }
    let g = sym.gradient(xi);
    let gn = norm2(&g);
    if gn < 1e-10 {
        return Err(LabError::invalid("degenerate gradient on the level set"));
    }
    let h = sym.hessian(xi);
    let n = sym.n;
    let mut b = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        b[i][..n].copy_from_slice(&h[i]);
        b[i][n] = g[i];
        b[n][i] = g[i];
    }
    Ok(-det(b) / gn.powi(n as i32 + 1))
}

/// Deterministic sample of unit directions: uniform angles on the circle, a
/// Fibonacci lattice plus the coordinate axes on the sphere.
pub fn direction_sample(n: usize, count: usize) -> Vec<Vec<f64>> {
    if n == 2 {
        return (0..count)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
    }
    let mut out = Vec::with_capacity(count + 6);
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; 3];
            e[i] = s;
            out.push(e);
        }
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    for j in 0..count {
        let z = 1.0 - (2.0 * j as f64 + 1.0) / count as f64;
        let r = (1.0 - z * z).sqrt();
        let ph = golden * j as f64;
        out.push(vec![r * ph.cos(), r * ph.sin(), z]);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityVerdict {
    pub min_curvature: f64,
    pub argmin: Vec<f64>,
    pub strictly_convex: bool,
}

pub const CONVEXITY_TOL: f64 = 1e-6;

pub fn strict_convexity_check(sym: &ConvexSymbol, samples: usize) -> Result<ConvexityVerdict> {
    let mut best = ConvexityVerdict {
        min_curvature: f64::INFINITY,
        argmin: Vec::new(),
        strictly_convex: false,
    };
    for omega in direction_sample(sym.n, samples.max(1)) {
        let xi = sym.project(&omega);
        let k = gaussian_curvature(sym, &xi)?;
        if k < best.min_curvature {
            best.min_curvature = k;
            best.argmin = xi;
        }
    }
    best.strictly_convex = best.min_curvature > CONVEXITY_TOL;
    Ok(best)
}

/// `(min, max)` of `|grad a|` on the unit level set.
pub fn gradient_bounds(sym: &ConvexSymbol, samples: usize) -> (f64, f64) {
    direction_sample(sym.n, samples.max(1))
        .iter()
        .map(|w| norm2(&sym.gradient(w)))
        .fold((f64::INFINITY, 0.0), |(lo, hi), g| (lo.min(g), hi.max(g)))
}

/// Points of `{a = 1}` with surface-measure weights, obtained by radially
/// projecting a sphere rule: `dS = |grad a(w)| a(w)^{-n} dw`.
#[derive(Debug, Clone)]
pub struct SurfaceQuadrature {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Unit outward normals.
    pub normals: Vec<Vec<f64>>,
    /// Underlying directions and their sphere weights.
    pub directions: Vec<Vec<f64>>,
    pub direction_weights: Vec<f64>,
}

impl SurfaceQuadrature {
    pub fn new(sym: &ConvexSymbol, level: usize) -> Result<Self> {
        let rule = SphereRule::new(sym.n, level)?;
        let mut points = Vec::with_capacity(rule.points.len());
        let mut weights = Vec::with_capacity(rule.points.len());
        let mut normals = Vec::with_capacity(rule.points.len());
        for (omega, dw) in rule.points.iter().zip(&rule.weights) {
            let a = sym.value(omega);
            let g = sym.gradient(omega);
            let gn = norm2(&g);
            points.push(omega.iter().map(|x| x / a).collect());
            weights.push(dw * gn * a.powi(-(sym.n as i32)));
            normals.push(g.iter().map(|x| x / gn).collect());
        }
        Ok(SurfaceQuadrature {
            n: sym.n,
            points,
            weights,
            normals,
            directions: rule.points,
            direction_weights: rule.weights,
        })
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `(2 pi)^{-n} sum_i w_i e^{i x . xi_i}`.
    pub fn fourier(&self, x: &[f64]) -> C64 {
        // Fixed chunks keep the summation order independent of scheduling.
        let partial: Vec<C64> = self
            .points
            .par_chunks(4096)
            .zip(self.weights.par_chunks(4096))
            .map(|(ps, ws)| {
                ps.iter()
                    .zip(ws)
                    .map(|(p, w)| {
                        let ph: f64 = p.iter().zip(x).map(|(a, b)| a * b).sum();
                        let (s, c) = ph.sin_cos();
                        C64::new(w * c, w * s)
                    })
                    .sum()
            })
            .collect();
        let s: C64 = partial.iter().sum();
        s / (2.0 * PI).powi(self.n as i32)
    }
}

/// Rule size resolving `e^{i k . xi}` on the level set for `|k| <= bandwidth`.
fn level_for(n: usize, bandwidth: f64) -> usize {
    if n == 2 {
        (1.5 * bandwidth).ceil() as usize + 64
    } else {
        (0.75 * bandwidth).ceil() as usize + 24
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FtValue {
    pub value: C64,
    pub error: f64,
}

/// Fourier transform of the surface measure of `{a = 1}`, with the error
/// estimated against a rule of twice the size.
pub fn surface_measure_ft(sym: &ConvexSymbol, x: &[f64], refinement: usize) -> Result<FtValue> {
    if x.len() != sym.n {
        return Err(LabError::invalid("x dimension does not match the symbol"));
    }
    let r = norm2(x);
    if !(r <= 1e3) {
        return Err(LabError::invalid("|x| must be at most 1e3"));
    }
    let level = level_for(sym.n, r * sym.max_radius()) * refinement.max(1);
    let coarse = SurfaceQuadrature::new(sym, level)?.fourier(x);
    let fine = SurfaceQuadrature::new(sym, 2 * level)?.fourier(x);
    let error = (fine - coarse).norm();
    if error > 1e-6 * fine.norm().max(1.0) {
        return Err(LabError::QuadratureNonConvergence {
            achieved: error,
            requested: 1e-6 * fine.norm().max(1.0),
        });
    }
    Ok(FtValue { value: fine, error })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub expected: f64,
    pub radii: Vec<f64>,
    pub peaks: Vec<f64>,
    pub strictly_convex: bool,
    /// Decay noticeably slower than the curved rate.
    pub flagged: bool,
}

pub const DECAY_TOL: f64 = 0.15;

/// Fits the envelope of `|FT|` along `direction` at `count` log-spaced radii
/// in `[r_min, r_max]`. Each peak is the maximum over one oscillation period.
pub fn decay_exponent_fit(sym: &ConvexSymbol, direction: &[f64], r_min: f64, r_max: f64, count: usize) -> Result<DecayFit> {
    if direction.len() != sym.n || norm2(direction) == 0.0 {
        return Err(LabError::invalid("direction must be a non-zero vector of dimension n"));
    }
    if !(r_min > 0.0 && r_max > r_min) || count < 2 {
        return Err(LabError::invalid("need 0 < r_min < r_max and at least two radii"));
    }
    let dn = norm2(direction);
    let dir: Vec<f64> = direction.iter().map(|x| x / dn).collect();
    let verdict = strict_convexity_check(sym, 400)?;

    let probe = SurfaceQuadrature::new(sym, 256)?;
    let (lo, hi) = probe.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let s: f64 = p.iter().zip(&dir).map(|(a, b)| a * b).sum();
        (lo.min(s), hi.max(s))
    });
    let period = 2.0 * PI / (hi - lo);
    let top = r_max + period;
    if top > 1e3 {
        return Err(LabError::invalid("fit radii exceed |x| <= 1e3"));
    }
    let quad = SurfaceQuadrature::new(sym, level_for(sym.n, top * sym.max_radius()))?;

    let ratio = (r_max / r_min).ln();
    let radii: Vec<f64> = (0..count)
        .map(|i| r_min * (ratio * i as f64 / (count - 1) as f64).exp())
        .collect();
    let peaks: Vec<f64> = radii
        .iter()
        .map(|&r| {
            (0..24)
                .map(|j| {
                    let t = r + period * j as f64 / 24.0;
                    let x: Vec<f64> = dir.iter().map(|d| d * t).collect();
                    quad.fourier(&x).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let pts: Vec<(f64, f64)> = radii.iter().zip(&peaks).map(|(r, p)| (r.ln(), p.ln())).collect();
    let exponent = least_squares_slope(&pts);
    let expected = -((sym.n - 1) as f64) / 2.0;
    Ok(DecayFit {
        exponent,
        expected,
        radii,
        peaks,
        strictly_convex: verdict.strictly_convex,
        flagged: exponent > expected + DECAY_TOL,
    })
}

/// Number of points on the sampled level set (`n = 2`) whose normal is
/// parallel to `direction` (either orientation).
pub fn normal_alignment_count(sym: &ConvexSymbol, direction: &[f64], samples: usize) -> Result<usize> {
    if sym.n != 2 || direction.len() != 2 {
        return Err(LabError::invalid("normal alignment count is implemented for n = 2"));
    }
    let dn = norm2(direction);
    let d = [direction[0] / dn, direction[1] / dn];
    let cross = |th: f64| {
        let g = sym.gradient(&[th.cos(), th.sin()]);
        let gn = norm2(&g);
        (g[0] * d[1] - g[1] * d[0]) / gn
    };
    let h = 2.0 * PI / samples as f64;
    let mut count = 0;
    for j in 0..samples {
        let (mut a, mut b) = (h * j as f64, h * (j + 1) as f64);
        let (fa, fb) = (cross(a), cross(b));
        if fa == 0.0 {
            count += 1;
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let mut fa = fa;
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            let fm = cross(mid);
            if fm * fa > 0.0 {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        let th = 0.5 * (a + b);
        let g = sym.gradient(&[th.cos(), th.sin()]);
        let gn = norm2(&g);
        let dot = ((g[0] * d[0] + g[1] * d[1]) / gn).abs().min(1.0);
        if dot.acos() < 1e-3 {
            count += 1;
        }
    }
    Ok(count)
}

/// Volume of `{a <= 1}` via the coarea formula, `(1/n) int_Sigma dS / |grad a|`.
pub fn coarea_volume(sym: &ConvexSymbol, level: usize) -> Result<f64> {
    let q = SurfaceQuadrature::new(sym, level)?;
    let s: f64 = q
        .points
        .iter()
        .zip(&q.weights)
        .map(|(p, w)| w / norm2(&sym.gradient(p)))
        .sum();
    Ok(s / sym.n as f64)
}

/// Area of `{a <= 1}` for `n = 2` by iterated Cartesian quadrature: the
/// chord length in `xi_2` at each `xi_1`, endpoints located by bisection.
pub fn direct_area(sym: &ConvexSymbol) -> Result<f64> {
    if sym.n != 2 {
        return Err(LabError::invalid("direct area is implemented for n = 2"));
    }
    let a = |x: f64, y: f64| sym.value(&[x, y]);
    // Minimizer of the convex function y -> a(x, y), by golden section.
    let argmin = |x: f64, span: f64| {
        let (mut lo, mut hi) = (-span, span);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if a(x, m1) < a(x, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    };
    let span = 4.0 * sym.max_radius();
    let y1 = argmin(1.0, span);
    let half_width = 1.0 / a(1.0, y1);
    let root = |x: f64, inside: f64, outside: f64| {
        let (mut i, mut o) = (inside, outside);
        for _ in 0..200 {
            let m = 0.5 * (i + o);
            if a(x, m) <= 1.0 {
                i = m;
            } else {
                o = m;
            }
        }
        0.5 * (i + o)
    };
    let chord = |x: f64| {
        let c = argmin(x, span);
        if a(x, c) >= 1.0 {
            return 0.0;
        }
        root(x, c, c + span) - root(x, c, c - span)
    };
    let r = integrate_with_breaks(
        |th: f64| {
            let x = half_width * th.sin();
            C64::new(chord(x) * half_width * th.cos(), 0.0)
        },
        &[-PI / 2.0, 0.0, PI / 2.0],
        QuadOptions {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_panels: 20_000,
        },
    )?;
    Ok(r.value.re)
}

/// A weight `h(xi)` satisfying derivative bounds `|d^k h| <= H_k |xi|^{-k}`.
#[derive(Clone)]
pub struct MihlinWeight {
    pub label: String,
    f: Option<Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
}

impl std::fmt::Debug for MihlinWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MihlinWeight({})", self.label)
    }
}

impl MihlinWeight {
    pub fn one() -> Self {
        MihlinWeight {
            label: "1".into(),
            f: None,
        }
    }

    pub fn new(label: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        MihlinWeight {
            label: label.into(),
            f: Some(Arc::new(f)),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        match &self.f {
            None => 1.0,
            Some(f) => f(xi),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.f.is_none()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MihlinBounds {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
}

/// Estimates `sup |xi|^k |d^k h|` for `k <= 2` by central differences on 200
/// random points with `|xi|` log-uniform in `[1e-2, 1e2]`.
pub fn validate_mihlin(h: &MihlinWeight, n: usize) -> Result<MihlinBounds> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1417);
    let mut b = MihlinBounds { h0: 0.0, h1: 0.0, h2: 0.0 };
    for _ in 0..200 {
        let r = 10f64.powf(rng.gen_range(-2.0..2.0));
        let xi: Vec<f64> = random_unit(&mut rng, n).iter().map(|x| x * r).collect();
        let step = 1e-4 * r;
        let at = |di: usize, si: f64, dj: usize, sj: f64| {
            let mut p = xi.clone();
            p[di] += si * step;
            p[dj] += sj * step;
            h.eval(&p)
        };
        b.h0 = b.h0.max(h.eval(&xi).abs());
        for i in 0..n {
            let d1 = (at(i, 1.0, i, 0.0) - at(i, -1.0, i, 0.0)) / (2.0 * step);
            b.h1 = b.h1.max(r * d1.abs());
            for j in 0..n {
                let d2 = (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0))
                    / (4.0 * step * step);
                b.h2 = b.h2.max(r * r * d2.abs());
            }
        }
    }
    if !(b.h0.is_finite() && b.h1.is_finite() && b.h2.is_finite()) {
        return Err(LabError::invalid(format!("weight {} fails the derivative bounds", h.label)));
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolventIntegral {
    pub value: C64,
    /// Change when the radial cutoff is doubled.
    pub tail_error: f64,
    pub cutoff: f64,
    pub angular_points: usize,
}

/// `int h(xi) e^{i x.xi} / (a(xi) - w) dxi`, written by the coarea formula as
/// `int_0^inf E^{n-1} J(E) / (E - w) dE` with
/// `J(E) = int_S h(E w/a) e^{i E x.w/a} a^{-n} dw`, truncated smoothly on
/// `[R, 2R]`. The integrand near `E = Re w` is folded into even and odd parts
/// around `Re w`, leaving a bounded integrand plus an arctangent.
pub fn weighted_resolvent_integral(
    sym: &ConvexSymbol,
    h: &MihlinWeight,
    x: &[f64],
    w: C64,
    refinement: usize,
) -> Result<ResolventIntegral> {
    if x.len() != sym.n {
        return Err(LabError::invalid("x dimension does not match the symbol"));
    }
    let xn = norm2(x);
    if xn == 0.0 {
        return Err(LabError::invalid("x must be non-zero"));
    }
    if !(w.re.is_finite() && w.im.is_finite()) || (w.im == 0.0 && w.re >= 0.0) {
        return Err(LabError::invalid("w must lie off [0, inf)"));
    }
    let r_min = 1.0 / {
        // largest a on the unit sphere
        direction_sample(sym.n, 2000).iter().map(|d| sym.value(d)).fold(0.0, f64::max)
    };
    let mut cutoff = 60.0 / (xn * r_min) + 4.0 * w.norm();
    let mut prev = coarea_integral(sym, h, x, w, cutoff, refinement)?;
    for _ in 0..4 {
        cutoff *= 2.0;
        let next = coarea_integral(sym, h, x, w, cutoff, refinement)?;
        let diff = (next.0 - prev.0).norm();
        if diff < 1e-5 * next.0.norm() {
            return Ok(ResolventIntegral {
                value: next.0,
                tail_error: diff,
                cutoff,
                angular_points: next.1,
            });
        }
        prev = next;
    }
    Err(LabError::QuadratureNonConvergence {
        achieved: f64::NAN,
        requested: 1e-5,
    })
}

fn coarea_integral(
    sym: &ConvexSymbol,
    h: &MihlinWeight,
    x: &[f64],
    w: C64,
    cutoff: f64,
    refinement: usize,
) -> Result<(C64, usize)> {
    let n = sym.n;
    let xn = norm2(x);
    let band = 2.0 * cutoff * xn * sym.max_radius();
    let rule = SphereRule::new(n, level_for(n, band) * refinement.max(1))?;
    // per direction: phase rate, weight, scaled direction
    let nodes: Vec<(f64, f64, Vec<f64>)> = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(om, dw)| {
            let a = sym.value(om);
            let dir: Vec<f64> = om.iter().map(|v| v / a).collect();
            let rate: f64 = dir.iter().zip(x).map(|(p, q)| p * q).sum();
            (rate, dw * a.powi(-(n as i32)), dir)
        })
        .collect();
    let constant = h.is_constant();
    let g = |e: f64| -> C64 {
        if e <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let chi = 1.0 - BumpFunctions::smooth_step(e / cutoff - 1.0);
        if chi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let mut s = C64::new(0.0, 0.0);
        let mut buf = vec![0.0; n];
        for (rate, wt, dir) in &nodes {
            let hv = if constant {
                1.0
            } else {
                for (b, d) in buf.iter_mut().zip(dir) {
                    *b = e * d;
                }
                h.eval(&buf)
            };
            let (sn, cs) = (e * rate).sin_cos();
            s += C64::new(cs, sn) * (wt * hv);
        }
        s * (e.powi(n as i32 - 1) * chi)
    };
    let top = 2.0 * cutoff;
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_panels: 400_000,
    };
    // Roughly one break per few oscillations of the phase.
    let pieces = ((top * xn * sym.max_radius() / (4.0 * PI)).ceil() as usize).clamp(8, 4000);
    let spread = |a: f64, b: f64| -> Vec<f64> {
        let k = ((pieces as f64 * (b - a) / top).ceil() as usize).max(1);
        (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
    };

    if w.re <= 0.0 {
        let r = integrate_with_breaks(|e| g(e) / (e - w), &spread(0.0, top), opts)?;
        return Ok((r.value, rule.points.len()));
    }
    let (w1, w2) = (w.re, w.im);
    let d = 0.5 * w1;
    let left = integrate_with_breaks(|e| g(e) / (e - w), &spread(0.0, w1 - d), opts)?;
    let right = integrate_with_breaks(|e| g(e) / (e - w), &spread(w1 + d, top), opts)?;
    let g0 = g(w1);
    let mut breaks = vec![0.0];
    let mut b = w2.abs();
    while b < d {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(d);
    let fold = integrate_with_breaks(
        |u| {
            let (fp, fm) = (g(w1 + u), g(w1 - u));
            ((fp - fm) * u + I * w2 * (fp + fm - g0 * 2.0)) / (u * u + w2 * w2)
        },
        &breaks,
        opts,
    )?;
    let value = left.value + right.value + fold.value + I * g0 * (2.0 * (d / w2).atan());
    Ok((value, rule.points.len()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub x_norm: f64,
    pub w: C64,
    pub abs_value: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRatio {
    pub ratio: f64,
    pub rows: Vec<BoundRow>,
}

/// `max |I(x; w)| / (|x|^{1-n} + (|w|/|x|)^{(n-1)/2})` over the probes.
pub fn bound_ratio(sym: &ConvexSymbol, h: &MihlinWeight, probes: &[(Vec<f64>, C64)], refinement: usize) -> Result<BoundRatio> {
    let rows: Vec<BoundRow> = probes
        .par_iter()
        .map(|(x, w)| {
            let v = weighted_resolvent_integral(sym, h, x, *w, refinement)?;
            let xn = norm2(x);
            let e = (sym.n - 1) as f64;
            let bound = xn.powf(-e) + (w.norm() / xn).powf(e / 2.0);
            Ok(BoundRow {
                x_norm: xn,
                w: *w,
                abs_value: v.value.norm(),
                bound,
                ratio: v.value.norm() / bound,
            })
        })
        .collect::<Result<_>>()?;
    let ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(BoundRatio { ratio, rows })
}

/// Default probe set for `n = 2`: five radii times ten values of `w`.
pub fn default_probes() -> Vec<(Vec<f64>, C64)> {
    let mut out = Vec::new();
    for (i, r) in [0.5, 1.0, 2.0, 5.0, 10.0].into_iter().enumerate() {
        let th = 0.3 + 0.7 * i as f64;
        let x = vec![r * th.cos(), r * th.sin()];
        for modulus in [1.0, 4.0] {
            for angle in [0.2, 1.0, PI / 2.0, 2.5, PI] {
                out.push((x.clone(), C64::from_polar(modulus, angle)));
            }
        }
    }
    out
}

/// Log-log slope of `|I(t dir; w)|` over the given radii.
pub fn resolvent_integral_decay(sym: &ConvexSymbol, h: &MihlinWeight, w: C64, direction: &[f64], radii: &[f64]) -> Result<f64> {
    let dn = norm2(direction);
    let pts: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&t| {
            let x: Vec<f64> = direction.iter().map(|d| d * t / dn).collect();
            let v = weighted_resolvent_integral(sym, h, &x, w, 1)?;
            Ok((t.ln(), v.value.norm().ln()))
        })
        .collect::<Result<_>>()?;
    Ok(least_squares_slope(&pts))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HeavisideCheck {
    pub alpha: f64,
    pub t: f64,
    pub numeric: f64,
    pub exact: f64,
}

/// `(1/2 pi) int e^{-i tau t} / (alpha - i tau) d tau` by quadrature of its
/// even part with a smooth cutoff, against `sgn(alpha) H(alpha t) e^{-alpha t}`.
pub fn heaviside_identity(alpha: f64, t: f64) -> Result<HeavisideCheck> {
    if alpha == 0.0 || t == 0.0 {
        return Err(LabError::invalid("alpha and t must be non-zero"));
    }
    let cutoff = 400.0 / t.abs();
    let top = 2.0 * cutoff;
    let k = ((top * t.abs() / (8.0 * PI)).ceil() as usize).max(8);
    let breaks: Vec<f64> = (0..=k).map(|i| top * i as f64 / k as f64).collect();
    let r = integrate_with_breaks(
        |tau| {
            let chi = 1.0 - BumpFunctions::smooth_step(tau / cutoff - 1.0);
            let (s, c) = (tau * t).sin_cos();
            C64::new(chi * (alpha * c + tau * s) / (alpha * alpha + tau * tau), 0.0)
        },
        &breaks,
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_panels: 100_000,
        },
    )?;
    let numeric = r.value.re / PI;
    let exact = if alpha * t > 0.0 { alpha.signum() * (-alpha * t).exp() } else { 0.0 };
    Ok(HeavisideCheck { alpha, t, numeric, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bessel_j0;

    fn circle() -> ConvexSymbol {
        ConvexSymbol::new(2, Symbol::Euclid).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let c = circle();
        assert!((gaussian_curvature(&c, &[0.6, 0.8]).unwrap() - 1.0).abs() < 1e-12);
        let s = ConvexSymbol::new(3, Symbol::Euclid).unwrap();
        assert!((gaussian_curvature(&s, &[0.0, 0.6, 0.8]).unwrap() - 1.0).abs() < 1e-12);
        let l4 = ConvexSymbol::new(2, Symbol::Lp4).unwrap();
        assert!(gaussian_curvature(&l4, &[1.0, 0.0]).unwrap().abs() < 1e-12);
        assert!(!strict_convexity_check(&l4, 1000).unwrap().strictly_convex);
        let e = ConvexSymbol::new(2, Symbol::Ellipse(vec![1.0, 0.5])).unwrap();
        let v = strict_convexity_check(&e, 1000).unwrap();
        assert!(v.strictly_convex);
        // sqrt(x^2 + 4 y^2): semi-axes 1, 1/2, min curvature b/a^2 = 1/2
        assert!((v.min_curvature - 0.5).abs() < 1e-9);
        assert!(gaussian_curvature(&c, &[2.0, 0.0]).is_err());
    }

    #[test]
    fn circle_transform_matches_bessel() {
        let c = circle();
        for r in [0.0, 1.0, 7.3, 25.0, 50.0] {
            let v = surface_measure_ft(&c, &[r * 0.6, r * 0.8], 1).unwrap().value;
            assert!((v.re - bessel_j0(r) / (2.0 * PI)).abs() < 1e-6, "r={r}");
            assert!(v.im.abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_transform_is_sinc() {
        let s = ConvexSymbol::new(3, Symbol::Euclid).unwrap();
        for r in [0.5, 3.0, 20.0] {
            let v = surface_measure_ft(&s, &[0.0, 0.0, r], 1).unwrap().value;
            let exact = 4.0 * PI * r.sin() / r / (2.0 * PI).powi(3);
            assert!((v.re - exact).abs() < 1e-6, "r={r}");
        }
        let v0 = surface_measure_ft(&s, &[0.0; 3], 1).unwrap().value;
        assert!((v0.re - 4.0 * PI / (2.0 * PI).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn level_set_measure_converges() {
        let e = ConvexSymbol::new(2, Symbol::Ellipse(vec![1.0, 0.5])).unwrap();
        let a = SurfaceQuadrature::new(&e, 16).unwrap().total_measure();
        let b = SurfaceQuadrature::new(&e, 32).unwrap().total_measure();
        let c = SurfaceQuadrature::new(&e, 128).unwrap().total_measure();
        // Trapezoid on a periodic analytic integrand: far better than Richardson ratio 3.
        assert!((a - b).abs() >= 3.0 * (b - c).abs());
        // Ellipse perimeter with semi-axes 1, 0.5.
        assert!((c - 4.844_224_110_273_838).abs() < 1e-10);
    }

    #[test]
    fn coarea_matches_direct_area() {
        for sym in [Symbol::Euclid, Symbol::Ellipse(vec![1.0, 0.5])] {
            let s = ConvexSymbol::new(2, sym).unwrap();
            let c = coarea_volume(&s, 256).unwrap();
            let d = direct_area(&s).unwrap();
            assert!(((c - d) / d).abs() < 1e-6, "{c} vs {d}");
        }
    }

    #[test]
    fn two_normals_per_direction() {
        let e = ConvexSymbol::new(2, Symbol::Ellipse(vec![1.0, 0.4])).unwrap();
        for d in [[1.0, 0.0], [0.3, -0.7], [0.0, 1.0]] {
            assert_eq!(normal_alignment_count(&e, &d, 4000).unwrap(), 2);
        }
    }

    #[test]
    fn heaviside_values() {
        for alpha in [0.5, -0.5, 2.0, -2.0] {
            for t in [-1.0, 0.5, 2.0] {
                let h = heaviside_identity(alpha, t).unwrap();
                assert!((h.numeric - h.exact).abs() < 1e-6, "{h:?}");
            }
        }
    }

    #[test]
    fn mihlin_bounds_of_constant() {
        let b = validate_mihlin(&MihlinWeight::one(), 2).unwrap();
        assert_eq!((b.h0, b.h1, b.h2), (1.0, 0.0, 0.0));
        let r = MihlinWeight::new("r2/(1+r2)", |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            r2 / (1.0 + r2)
        });
        let b = validate_mihlin(&r, 2).unwrap();
        assert!(b.h1 < 1.0 && b.h2 < 4.0);
    }

    #[test]
    fn resolvent_integral_rejects_positive_axis() {
        let c = circle();
        assert!(weighted_resolvent_integral(&c, &MihlinWeight::one(), &[1.0, 0.0], C64::new(2.0, 0.0), 1).is_err());
        assert!(weighted_resolvent_integral(&c, &MihlinWeight::one(), &[0.0, 0.0], C64::new(-1.0, 0.0), 1).is_err());
    }

    #[test]
    fn resolvent_integral_scaling() {
        let c = circle();
        let h = MihlinWeight::one();
        let x = [1.2, -0.7];
        let w = C64::from_polar(3.0, 1.1);
        let lhs = weighted_resolvent_integral(&c, &h, &x, w, 1).unwrap().value;
        let xs = [x[0] * 3.0, x[1] * 3.0];
        let rhs = weighted_resolvent_integral(&c, &h, &xs, w / 3.0, 1).unwrap().value * 3.0;
        assert!((lhs - rhs).norm() < 1e-6 * lhs.norm(), "{lhs} vs {rhs}");
    }
}
