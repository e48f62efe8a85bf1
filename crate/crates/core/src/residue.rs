//! Residue-calculus identities for the resolvent multiplier
//! `m_z(tau) = 1/(tau^m - z^m)`: its Fourier transform, the half-wave
//! representation of the resolvent, and the partial-fraction coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{arg_2pi, cis, powi, C64, I};
use crate::error::{LabError, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::region::validate_order;

/// The `m` simple poles `tau_k = z e^{2pi i k/m}` of `tau -> 1/(tau^m - z^m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub taus: Vec<C64>,
    /// Poles `k < upper_count` lie in the upper half plane.
    pub upper_count: usize,
}

impl PoleSet {
    pub fn upper(&self) -> &[C64] {
        &self.taus[..self.upper_count]
    }

    pub fn lower(&self) -> &[C64] {
        &self.taus[self.upper_count..]
    }
}

fn require_open_sector(z: C64, m: u32) -> Result<()> {
    validate_order(m)?;
    let arg = arg_2pi(z);
    if z == C64::new(0.0, 0.0) || !(arg > 0.0 && arg < 2.0 * PI / m as f64) {
        return Err(LabError::OutsideSector(crate::cplx::format_complex(z)));
    }
    Ok(())
}

/// All poles with their half-plane split. Rejects `z` outside the open sector
/// (a pole would land on the real axis).
pub fn poles(z: C64, m: u32) -> Result<PoleSet> {
    require_open_sector(z, m)?;
    let taus = (0..m).map(|k| z * unit_root(k, m)).collect();
    Ok(PoleSet {
        taus,
        upper_count: (m / 2) as usize,
    })
}

/// `e^{2pi i k/m}`.
#[inline]
pub fn unit_root(k: u32, m: u32) -> C64 {
    cis(2.0 * PI * k as f64 / m as f64)
}

/// Closed form of `int e^{-it tau}/(tau^m - z^m) dtau`:
/// `(2pi i/(m z^{m-1})) sum_{k<m/2} e^{2pi i k/m + i|t| tau_k}`.
pub fn fourier_transform_mz(t: f64, z: C64, m: u32) -> Result<C64> {
    let ps = poles(z, m)?;
    let pref = 2.0 * PI * I / (m as f64 * powi(z, m - 1));
    let sum: C64 = ps
        .upper()
        .iter()
        .enumerate()
        .map(|(k, tau)| unit_root(k as u32, m) * (I * t.abs() * tau).exp())
        .sum();
    Ok(pref * sum)
}

/// Envelope `(2pi/(m|z|^{m-1})) sum_{k<m/2} e^{-|t| Im tau_k}` of the transform.
pub fn fourier_transform_bound(t: f64, z: C64, m: u32) -> Result<f64> {
    let ps = poles(z, m)?;
    let pref = 2.0 * PI / (m as f64 * z.norm().powi(m as i32 - 1));
    Ok(pref * ps.upper().iter().map(|tau| (-t.abs() * tau.im).exp()).sum::<f64>())
}

/// Both sides of the half-wave resolvent formula at a single `tau`:
/// `1/(tau^m - z^m)` and `(i/(m z^{m-1})) sum_k e^{2pi i k/m} int e^{i|t|tau_k + it tau} dt`,
/// the time integral evaluated in closed form `i/(tau_k + tau) + i/(tau_k - tau)`.
pub fn resolvent_multiplier_identity(tau: f64, z: C64, m: u32) -> Result<(C64, C64)> {
    if !(tau >= 0.0) {
        return Err(LabError::invalid(format!("tau must be >= 0, got {tau}")));
    }
    let ps = poles(z, m)?;
    let lhs = 1.0 / (powi(C64::new(tau, 0.0), m) - powi(z, m));
    Ok((lhs, half_wave_multiplier(tau, &ps, z, m)))
}

pub(crate) fn half_wave_multiplier(tau: f64, ps: &PoleSet, z: C64, m: u32) -> C64 {
    let pref = I / (m as f64 * powi(z, m - 1));
    let sum: C64 = ps
        .upper()
        .iter()
        .enumerate()
        .map(|(k, &tk)| unit_root(k as u32, m) * (I / (tk + tau) + I / (tk - tau)))
        .sum();
    pref * sum
}

/// Coefficients `A_k` of `1/(y^m - z^m) = z^{1-m} sum_k A_k/(y - z e^{2pi i k/m})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialFractionCoeffs {
    pub m: u32,
    pub a: Vec<C64>,
}

impl PartialFractionCoeffs {
    /// Right-hand side of the decomposition at `y`.
    pub fn evaluate(&self, y: C64, z: C64) -> C64 {
        let m = self.m;
        let sum: C64 = self
            .a
            .iter()
            .enumerate()
            .map(|(k, ak)| ak / (y - z * unit_root(k as u32, m)))
            .sum();
        sum / powi(z, m - 1)
    }
}

/// `A_k = prod_{l != k} (e^{2pi i k/m} - e^{2pi i l/m})^{-1}`, by the literal product.
pub fn partial_fractions(m: u32) -> Result<PartialFractionCoeffs> {
    validate_order(m)?;
    if m > 64 {
        return Err(LabError::invalid(format!("partial fractions limited to m <= 64, got {m}")));
    }
    let a = (0..m)
        .map(|k| {
            let ek = unit_root(k, m);
            let prod: C64 = (0..m).filter(|&l| l != k).map(|l| ek - unit_root(l, m)).product();
            1.0 / prod
        })
        .collect();
    Ok(PartialFractionCoeffs { m, a })
}

/// `sum_{k<m/2} e^{2pi i k/m} tau_k^{l-1}`. Vanishes for even `l` in `[2, m-2]`.
pub fn upper_power_sum(z: C64, m: u32, l: u32) -> Result<C64> {
    let ps = poles(z, m)?;
    Ok(ps
        .upper()
        .iter()
        .enumerate()
        .map(|(k, &tk)| unit_root(k as u32, m) * powi(tk, l.saturating_sub(1)))
        .sum())
}

/// `(2/(tau^m m z^{m-1})) sum_{k<m/2} e^{2pi i k/m} tau_k^{m-1}`; equals `1/tau^m`.
pub fn boundary_term_constant(tau: f64, z: C64, m: u32) -> Result<C64> {
    let s = upper_power_sum(z, m, m)?;
    Ok(2.0 * s / (tau.powi(m as i32) * m as f64 * powi(z, m - 1)))
}

/// Quadrature value of the defining integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: C64,
    pub error: f64,
}

/// Independent check of [`fourier_transform_mz`]: adaptive quadrature of
/// `int e^{-it tau}/(tau^m - z^m) dtau` on `[-R, R]` plus a tail term.
///
/// The integrand is even in `tau`, so the integral is folded onto
/// `2 int_0^inf cos(t tau) f(tau) dtau`. The tail beyond `R` is integrated
/// after `tau = R/s` when `t R` is small, and otherwise summed from its
/// integration-by-parts expansion using the Laurent series of `f` at infinity.
pub fn fourier_transform_oracle(t: f64, z: C64, m: u32) -> Result<OracleValue> {
    require_open_sector(z, m)?;
    let w = powi(z, m);
    let f = move |tau: f64| 1.0 / (powi(C64::new(tau, 0.0), m) - w);
    let zr = z.norm();
    let ta = t.abs();
    let r_base = 20.0 * zr + 20.0;
    let r = if ta > 0.0 { r_base.max(200.0 / ta).min(1e8) } else { r_base };

    let mut breaks = vec![0.0, 0.5 * zr, zr, 1.5 * zr, 2.0 * zr];
    let mut b = 4.0 * zr;
    while b < r {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(r);
    breaks.retain(|&x| x <= r);
    breaks.dedup();

    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_panels: 200_000,
    };
    let body = integrate_with_breaks(|tau| 2.0 * (t * tau).cos() * f(tau), &breaks, opts)?;

    let (tail, tail_err) = if ta * r >= 150.0 {
        ibp_tail(t, r, w, m)
    } else {
        let sub = integrate_with_breaks(
            |s| {
                if s == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let tau = r / s;
                2.0 * (t * tau).cos() * r * powi(C64::new(s, 0.0), m - 2) / (powi(C64::new(r, 0.0), m) - w * powi(C64::new(s, 0.0), m))
            },
            &[0.0, 1e-6, 1e-3, 0.1, 1.0],
            opts,
        )?;
        (sub.value, sub.error)
    };
    Ok(OracleValue {
        value: body.value + tail,
        error: body.error + tail_err,
    })
}

/// `2 int_R^inf cos(t tau) f(tau) dtau` by repeated integration by parts.
fn ibp_tail(t: f64, r: f64, w: C64, m: u32) -> (C64, f64) {
    // f(tau) = sum_{j>=1} w^{j-1} tau^{-mj}; derivatives termwise.
    let deriv = |order: u32| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut wj = C64::new(1.0, 0.0);
        for j in 1..60u32 {
            let p = (m * j) as f64;
            // d^order tau^{-p} = (-1)^order p (p+1) ... (p+order-1) tau^{-p-order}
            let mut coef = 1.0;
            for q in 0..order {
                coef *= -(p + q as f64);
            }
            let term = wj * coef * r.powf(-p - order as f64);
            acc += term;
            if term.norm() < 1e-30 * acc.norm() {
                break;
            }
            wj *= w;
        }
        acc
    };
    let mut total = C64::new(0.0, 0.0);
    let mut last = 0.0;
    for sigma in [t, -t] {
        let is = I * sigma;
        let phase = (I * sigma * r).exp();
        let mut part = C64::new(0.0, 0.0);
        let mut denom = is;
        for j in 0..6u32 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let term = -phase * sign * deriv(j) / denom;
            part += term;
            last = term.norm();
            denom *= is;
        }
        // cos = (e^{i t tau} + e^{-i t tau})/2, and the fold contributes a factor 2.
        total += part;
    }
    (total, 2.0 * last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::{c, rel_err};

    #[test]
    fn pole_examples() {
        let ps = poles(I, 2).unwrap();
        assert!(rel_err(ps.taus[0], I) < 1e-15 && rel_err(ps.taus[1], -I) < 1e-15);
        assert_eq!(ps.upper_count, 1);

        let ps = poles(cis(PI / 8.0), 4).unwrap();
        let args: Vec<f64> = ps.taus.iter().map(|t| arg_2pi(*t)).collect();
        for (a, e) in args.iter().zip([1.0, 5.0, 9.0, 13.0]) {
            assert!((a - e * PI / 8.0).abs() < 1e-14);
        }
        assert!(ps.upper().iter().all(|t| t.im > 0.0));
        assert!(ps.lower().iter().all(|t| t.im < 0.0));
        assert!(poles(c(1.0, 0.0), 2).is_err());
        assert!(poles(c(0.0, 1.0), 4).is_err());
    }

    #[test]
    fn transform_spot_values() {
        let v = fourier_transform_mz(1.0, I, 2).unwrap();
        assert!(rel_err(v, c(PI * (-1f64).exp(), 0.0)) < 1e-14);
        let v = fourier_transform_mz(0.0, cis(PI / 4.0), 4).unwrap();
        assert!(rel_err(v, c(PI / 2f64.sqrt(), 0.0)) < 1e-14);
        let far = fourier_transform_mz(200.0, 1.3 * cis(0.4), 4).unwrap();
        assert!(far.norm() < 1e-30);
        assert!(fourier_transform_mz(1.0, c(-1.0, -1.0), 2).is_err());
    }

    #[test]
    fn transform_respects_envelope() {
        for &t in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let z = 1.7 * cis(0.3);
            let v = fourier_transform_mz(t, z, 6).unwrap();
            assert!(v.norm() <= fourier_transform_bound(t, z, 6).unwrap() * (1.0 + 1e-14));
        }
    }

    #[test]
    fn oracle_agrees_on_spot_values() {
        let o = fourier_transform_oracle(1.0, I, 2).unwrap();
        assert!(rel_err(o.value, c(PI * (-1f64).exp(), 0.0)) < 1e-7, "{:?}", o);
        let o = fourier_transform_oracle(0.0, cis(PI / 4.0), 4).unwrap();
        assert!(rel_err(o.value, c(PI / 2f64.sqrt(), 0.0)) < 1e-7, "{:?}", o);
    }

    #[test]
    fn resolvent_identity_examples() {
        let (l, r) = resolvent_multiplier_identity(0.0, I, 2).unwrap();
        assert!(rel_err(l, c(1.0, 0.0)) < 1e-15 && rel_err(r, c(1.0, 0.0)) < 1e-14);
        let (l, r) = resolvent_multiplier_identity(1.0, I, 2).unwrap();
        assert!(rel_err(l, c(0.5, 0.0)) < 1e-15 && rel_err(r, c(0.5, 0.0)) < 1e-14);
        let (l, r) = resolvent_multiplier_identity(2.5, 1.3 * cis(PI / 8.0), 4).unwrap();
        assert!(rel_err(r, l) < 1e-10);
        assert!(resolvent_multiplier_identity(-1.0, I, 2).is_err());
    }

    #[test]
    fn partial_fraction_examples() {
        let a = partial_fractions(2).unwrap().a;
        assert!(rel_err(a[0], c(0.5, 0.0)) < 1e-15 && rel_err(a[1], c(-0.5, 0.0)) < 1e-15);
        let a = partial_fractions(4).unwrap().a;
        for (ak, e) in a.iter().zip([c(0.25, 0.0), c(0.0, 0.25), c(-0.25, 0.0), c(0.0, -0.25)]) {
            assert!((ak - e).norm() < 1e-15);
        }
        let pf = partial_fractions(4).unwrap();
        let (y, z) = (c(2.0, 1.0), 1.1 * cis(PI / 8.0));
        let lhs = 1.0 / (powi(y, 4) - powi(z, 4));
        assert!(rel_err(pf.evaluate(y, z), lhs) < 1e-12);
        assert!(partial_fractions(66).is_err());
        assert!(partial_fractions(3).is_err());
    }

    #[test]
    fn coefficients_sum_to_zero_and_match_closed_form() {
        for m in (2..=64).step_by(2) {
            let pf = partial_fractions(m).unwrap();
            let s: C64 = pf.a.iter().sum();
            assert!(s.norm() < 1e-12, "m={m}");
            for (k, ak) in pf.a.iter().enumerate() {
                assert!((ak - unit_root(k as u32, m) / m as f64).norm() < 1e-12, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn vanishing_power_sums_and_boundary_constant() {
        let z = 1.7 * cis(0.21);
        for m in [4u32, 6, 8] {
            for l in (2..=m - 2).step_by(2) {
                let s = upper_power_sum(z, m, l).unwrap();
                assert!(s.norm() < 1e-12 * z.norm().powi(l as i32 - 1), "m={m} l={l}");
            }
        }
        for m in [2u32, 4, 6] {
            let tau = 2.3;
            let b = boundary_term_constant(tau, z, m).unwrap();
            assert!(rel_err(b, c(tau.powi(-(m as i32)), 0.0)) < 1e-12);
        }
    }
}
