//! Positive, degree-one homogeneous symbols `a(xi)` with gradients and
//! Hessians. They serve both as the principal symbol of the torus models and
//! as the cosphere-defining function of the oscillatory-integral module.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Symbol {
    /// `|xi|`.
    Euclid,
    /// `(sum xi_i^4)^{1/4}`. Homogeneous, but its unit level set is flat at
    /// the axes.
    Lp4,
    /// `sqrt(sum (xi_i/s_i)^2)`: the unit level set is the ellipsoid with
    /// semi-axes `s_i`.
    Ellipse(Vec<f64>),
    /// `factor * inner(xi)`.
    Scaled(f64, Box<Symbol>),
    /// Arbitrary evaluator; derivatives by central differences.
    Custom { label: String, f: ScalarFn },
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.label())
    }
}

impl Symbol {
    pub fn custom(label: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Symbol::Custom {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn ellipse(axes: &[f64]) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|s| !(*s > 0.0)) {
            return Err(LabError::invalid("ellipse semi-axes must be positive"));
        }
        Ok(Symbol::Ellipse(axes.to_vec()))
    }

    pub fn scaled(factor: f64, inner: Symbol) -> Self {
        Symbol::Scaled(factor, Box::new(inner))
    }

    pub fn label(&self) -> String {
        match self {
            Symbol::Euclid => "euclid".into(),
            Symbol::Lp4 => "lp4".into(),
            Symbol::Ellipse(ax) => {
                let parts: Vec<String> = ax.iter().map(|a| a.to_string()).collect();
                format!("ellipse:{}", parts.join(","))
            }
            Symbol::Scaled(c, inner) => format!("{}*{}", c, inner.label()),
            Symbol::Custom { label, .. } => label.clone(),
        }
    }

    /// Parse the CLI spelling: `euclid`, `lp4`, `ellipse:a,b[,c]`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "euclid" => Ok(Symbol::Euclid),
            "lp4" => Ok(Symbol::Lp4),
            _ if s.starts_with("ellipse:") => {
                let axes = s["ellipse:".len()..]
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| LabError::Parse(format!("bad ellipse axis '{t}'"))))
                    .collect::<Result<Vec<_>>>()?;
                Symbol::ellipse(&axes)
            }
            _ => Err(LabError::Parse(format!("unknown symbol '{s}' (expected euclid, lp4, ellipse:a,b)"))),
        }
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        match self {
            Symbol::Euclid => norm2(xi),
            Symbol::Lp4 => xi.iter().map(|x| x.powi(4)).sum::<f64>().powf(0.25),
            Symbol::Ellipse(ax) => xi
                .iter()
                .zip(ax.iter().cycle())
                .map(|(x, s)| (x / s).powi(2))
                .sum::<f64>()
                .sqrt(),
            Symbol::Scaled(c, inner) => c * inner.value(xi),
            Symbol::Custom { f, .. } => f(xi),
        }
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        match self {
            Symbol::Euclid => {
                let r = norm2(xi);
                xi.iter().map(|x| x / r).collect()
            }
            Symbol::Lp4 => {
                let a3 = self.value(xi).powi(3);
                xi.iter().map(|x| x.powi(3) / a3).collect()
            }
            Symbol::Ellipse(ax) => {
                let a = self.value(xi);
                xi.iter().zip(ax.iter().cycle()).map(|(x, s)| x / (s * s * a)).collect()
            }
            Symbol::Scaled(c, inner) => inner.gradient(xi).into_iter().map(|g| c * g).collect(),
            Symbol::Custom { .. } => self.fd_gradient(xi),
        }
    }

    pub fn hessian(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let n = xi.len();
        match self {
            Symbol::Euclid => {
                let r = norm2(xi);
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let d = if i == j { 1.0 } else { 0.0 };
                                (d - xi[i] * xi[j] / (r * r)) / r
                            })
                            .collect()
                    })
                    .collect()
            }
            Symbol::Lp4 => {
                let a = self.value(xi);
                let a3 = a.powi(3);
                let a7 = a.powi(7);
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let d = if i == j { 3.0 * xi[i] * xi[i] / a3 } else { 0.0 };
                                d - 3.0 * xi[i].powi(3) * xi[j].powi(3) / a7
                            })
                            .collect()
                    })
                    .collect()
            }
            Symbol::Ellipse(ax) => {
                let a = self.value(xi);
                let s2: Vec<f64> = (0..n).map(|i| ax[i % ax.len()].powi(2)).collect();
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let d = if i == j { 1.0 / (s2[i] * a) } else { 0.0 };
                                d - xi[i] * xi[j] / (s2[i] * s2[j] * a.powi(3))
                            })
                            .collect()
                    })
                    .collect()
            }
            Symbol::Scaled(c, inner) => inner
                .hessian(xi)
                .into_iter()
                .map(|row| row.into_iter().map(|h| c * h).collect())
                .collect(),
            Symbol::Custom { .. } => self.fd_hessian(xi),
        }
    }

    fn fd_gradient(&self, xi: &[f64]) -> Vec<f64> {
        let h = 1e-5 * norm2(xi).max(1e-300);
        let mut p = xi.to_vec();
        (0..xi.len())
            .map(|i| {
                p[i] = xi[i] + h;
                let fp = self.value(&p);
                p[i] = xi[i] - h;
                let fm = self.value(&p);
                p[i] = xi[i];
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    fn fd_hessian(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let n = xi.len();
        let h = 1e-4 * norm2(xi).max(1e-300);
        let mut p = xi.to_vec();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut eval = |di: f64, dj: f64| {
                    p[i] += di;
                    p[j] += dj;
                    let v = self.value(&p);
                    p.copy_from_slice(xi);
                    v
                };
                out[i][j] = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h);
            }
        }
        out
    }

    /// `min |xi|=1 a(xi)` estimated on a deterministic sample, used to bound
    /// lattice enumeration.
    pub fn min_on_sphere(&self, n: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut best = f64::INFINITY;
        // Coordinate axes and diagonals first: extremes of the built-in symbols.
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            best = best.min(self.value(&e));
        }
        let diag = vec![1.0 / (n as f64).sqrt(); n];
        best = best.min(self.value(&diag));
        for _ in 0..4000 {
            let v = random_unit(&mut rng, n);
            best = best.min(self.value(&v));
        }
        best
    }

    /// Positivity and degree-one homogeneity on 100 random `(s, xi)` pairs:
    /// `|a(s xi) - s a(xi)| < 1e-9 s a(xi)`.
    pub fn check_homogeneous(&self, n: usize) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..100 {
            let xi = random_unit(&mut rng, n);
            let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
            let xi: Vec<f64> = xi.iter().map(|x| x * rng.gen_range(0.5..2.0)).collect();
            let a = self.value(&xi);
            if !(a > 0.0) || !a.is_finite() {
                return Err(LabError::invalid(format!("symbol {} is not positive at {:?}", self.label(), xi)));
            }
            let scaled: Vec<f64> = xi.iter().map(|x| x * scale).collect();
            let lhs = self.value(&scaled);
            if (lhs - scale * a).abs() >= 1e-9 * scale * a {
                return Err(LabError::invalid(format!(
                    "symbol {} is not positively homogeneous of degree one",
                    self.label()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm2(&v);
        if r > 1e-3 && r <= 1.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let xi = [0.7, -0.4, 1.3];
        for sym in [Symbol::Euclid, Symbol::Lp4, Symbol::Ellipse(vec![1.0, 0.5, 2.0]), Symbol::scaled(2.0, Symbol::Lp4)] {
            let g = sym.gradient(&xi);
            let gfd = sym.fd_gradient(&xi);
            assert!(close(&g, &gfd, 1e-8), "{sym:?}");
            let h = sym.hessian(&xi);
            let hfd = sym.fd_hessian(&xi);
            for (r, rfd) in h.iter().zip(&hfd) {
                assert!(close(r, rfd, 1e-5), "{sym:?}");
            }
        }
    }

    #[test]
    fn euler_relation() {
        let xi = [0.3, 2.0];
        for sym in [Symbol::Euclid, Symbol::Lp4, Symbol::Ellipse(vec![1.0, 0.5])] {
            let g = sym.gradient(&xi);
            let dot: f64 = g.iter().zip(&xi).map(|(a, b)| a * b).sum();
            assert!((dot - sym.value(&xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneity_check_rejects_quadratic() {
        assert!(Symbol::Euclid.check_homogeneous(3).is_ok());
        assert!(Symbol::Lp4.check_homogeneous(2).is_ok());
        let quad = Symbol::custom("quadratic", |x: &[f64]| x.iter().map(|v| v * v).sum());
        assert!(quad.check_homogeneous(2).is_err());
    }

    #[test]
    fn parse_symbols() {
        assert_eq!(Symbol::parse("euclid").unwrap().label(), "euclid");
        assert_eq!(Symbol::parse("ellipse:1,0.5").unwrap().value(&[0.0, 1.0]), 2.0);
        assert!(Symbol::parse("file-free-form").is_err());
        assert!(Symbol::parse("ellipse:1,-1").is_err());
    }

    #[test]
    fn min_on_sphere_values() {
        assert!((Symbol::Euclid.min_on_sphere(3) - 1.0).abs() < 1e-12);
        // lp4 is smallest along the diagonal: (n * n^{-2})^{1/4}
        let m = Symbol::Lp4.min_on_sphere(2);
        assert!((m - 2f64.powf(-0.25)).abs() < 1e-9);
    }
}
