//! Gauss–Legendre rules and a globally adaptive integrator for complex-valued
//! integrands on finite intervals.
//!
//! Each panel is integrated with a 15-point Gauss rule on its two halves; the
//! difference against the same rule on the whole panel is the local error
//! estimate. The panel with the largest estimate is bisected until the summed
//! estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::OnceLock;

use crate::cplx::C64;
use crate::error::{LabError, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Apply the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> C64>(&self, mut f: F, a: f64, b: f64) -> C64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * x);
        }
        acc * half
    }

    /// Real-valued variant of [`GaussLegendre::integrate`].
    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

static TOL_SCALE: AtomicU64 = AtomicU64::new(0x3ff0_0000_0000_0000); // 1.0

/// Multiplies every quadrature tolerance in the process.
pub fn set_tolerance_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(LabError::invalid("tolerance scale must be positive"));
    }
    TOL_SCALE.store(scale.to_bits(), AtomicOrdering::Relaxed);
    Ok(())
}

pub fn tolerance_scale() -> f64 {
    f64::from_bits(TOL_SCALE.load(AtomicOrdering::Relaxed))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_panels: 20_000,
        }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol: 0.0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    left: C64,
    right: C64,
    err: f64,
}

impl Panel {
    fn value(&self) -> C64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64, whole: C64, evals: &mut usize) -> Panel {
    let rule = panel_rule();
    let mid = 0.5 * (a + b);
    let left = rule.integrate(&mut *f, a, mid);
    let right = rule.integrate(&mut *f, mid, b);
    *evals += 2 * rule.nodes.len();
    let err = (left + right - whole).norm();
    Panel {
        a,
        b,
        left,
        right,
        err,
    }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> C64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Adaptive integration over `[breaks[0], breaks[last]]` with the given
/// initial subdivision. Breaks must be non-decreasing; empty pieces are
/// skipped.
pub fn integrate_with_breaks<F: FnMut(f64) -> C64>(
    mut f: F,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Err(LabError::invalid("integration needs at least two break points"));
    }
    let scale = tolerance_scale();
    let opts = QuadOptions {
        abs_tol: opts.abs_tol * scale,
        rel_tol: opts.rel_tol * scale,
        ..opts
    };
    let rule = panel_rule();
    let mut evals = 0usize;
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) {
            return Err(LabError::invalid("integration bounds must be finite"));
        }
        if b < a {
            return Err(LabError::invalid("integration breaks must be non-decreasing"));
        }
        if b == a {
            continue;
        }
        let whole = rule.integrate(&mut f, a, b);
        evals += rule.nodes.len();
        heap.push(make_panel(&mut f, a, b, whole, &mut evals));
    }
    if heap.is_empty() {
        return Ok(QuadResult {
            value: C64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
            evaluations: 0,
        });
    }

    loop {
        let (total, err) = heap
            .iter()
            .fold((C64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value(), e + p.err));
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= tol {
            return Ok(QuadResult {
                value: total,
                error: err,
                panels: heap.len(),
                evaluations: evals,
            });
        }
        if heap.len() >= opts.max_panels {
            return Err(LabError::QuadratureNonConvergence {
                achieved: err,
                requested: tol,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be bisected in floating point.
            return Err(LabError::QuadratureNonConvergence {
                achieved: err,
                requested: tol,
            });
        }
        heap.push(make_panel(&mut f, worst.a, mid, worst.left, &mut evals));
        heap.push(make_panel(&mut f, mid, worst.b, worst.right, &mut evals));
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(|x| C64::new(f(x), 0.0), a, b, opts)?;
    Ok((r.value.re, r.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 15, 40] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            for deg in 0..(2 * n) {
                let got = rule.integrate_real(|x| x.powi(deg as i32), -1.0, 1.0);
                let expect = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - expect).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // Lorentzian of width 1e-3: integral over [-1, 1] is 2 atan(1000).
        let eps = 1e-3;
        let (v, _) = integrate_real(|x| eps / (x * x + eps * eps), -1.0, 1.0, QuadOptions::abs(1e-12)).unwrap();
        assert!((v - 2.0 * (1.0 / eps).atan()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_oscillatory() {
        // int_0^{50} cos(x) dx = sin 50
        let r = integrate(|x| C64::new(x.cos(), x.sin()), 0.0, 50.0, QuadOptions::abs(1e-12)).unwrap();
        assert!((r.value.re - 50f64.sin()).abs() < 1e-11);
        assert!((r.value.im - (1.0 - 50f64.cos())).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_panels: 4,
        };
        let err = integrate(|x| C64::new((1.0 / x).sin(), 0.0), 1e-6, 1.0, opts).unwrap_err();
        assert!(matches!(err, LabError::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn empty_pieces_are_skipped() {
        let r = integrate_with_breaks(|_| C64::new(1.0, 0.0), &[0.0, 0.0, 1.0, 1.0, 3.0], QuadOptions::default()).unwrap();
        assert!((r.value.re - 3.0).abs() < 1e-14);
    }
}
