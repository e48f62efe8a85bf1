//! Product quadrature on the unit sphere `S^{n-1}` in `R^n` for `n = 2, 3`.

use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;

#[derive(Debug, Clone)]
pub struct SphereRule {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// `level` is the number of angles on the circle (`n = 2`), or the
    /// number of Gauss nodes in `cos(theta)` with `2 * level` azimuths
    /// (`n = 3`).
    pub fn new(n: usize, level: usize) -> Result<Self> {
        if level < 2 {
            return Err(LabError::invalid("sphere rule needs level >= 2"));
        }
        match n {
            2 => {
                let h = 2.0 * PI / level as f64;
                let points = (0..level)
                    .map(|j| {
                        let th = h * j as f64;
                        vec![th.cos(), th.sin()]
                    })
                    .collect();
                Ok(SphereRule {
                    n,
                    points,
                    weights: vec![h; level],
                })
            }
            3 => {
                let gl = GaussLegendre::new(level);
                let nphi = 2 * level;
                let h = 2.0 * PI / nphi as f64;
                let mut points = Vec::with_capacity(level * nphi);
                let mut weights = Vec::with_capacity(level * nphi);
                for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                    let s = (1.0 - t * t).max(0.0).sqrt();
                    for j in 0..nphi {
                        let ph = h * j as f64;
                        points.push(vec![s * ph.cos(), s * ph.sin(), *t]);
                        weights.push(w * h);
                    }
                }
                Ok(SphereRule { n, points, weights })
            }
            _ => Err(LabError::invalid(format!("sphere quadrature is implemented for n = 2, 3 only (got {n})"))),
        }
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}
