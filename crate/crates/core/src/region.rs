//! Geometry of the sector `Xi = {0 < arg z < 2pi/m}`, its `delta`-interior
//! `Xi_delta`, and the conformal map `z -> z^m` onto `C \ [0, inf)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cplx::{arg_2pi, cis, powi, C64};
use crate::error::{LabError, Result};

/// Operator order `m` (even, >= 2) and boundary distance `delta` (>= 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorParams {
    pub m: u32,
    pub delta: f64,
}

impl SectorParams {
    pub fn new(m: u32, delta: f64) -> Result<Self> {
        validate_order(m)?;
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(LabError::invalid(format!("delta must be a finite non-negative real, got {delta}")));
        }
        Ok(SectorParams { m, delta })
    }

    /// Same as [`SectorParams::new`] but additionally requires `delta > 0`.
    pub fn region(m: u32, delta: f64) -> Result<Self> {
        let p = Self::new(m, delta)?;
        if delta <= 0.0 {
            return Err(LabError::invalid("region operations require delta > 0"));
        }
        Ok(p)
    }

    /// Opening angle `2pi/m` of the sector.
    pub fn opening(&self) -> f64 {
        2.0 * PI / self.m as f64
    }
}

pub(crate) fn validate_order(m: u32) -> Result<()> {
    if m < 2 || m % 2 != 0 {
        return Err(LabError::invalid(format!("operator order m must be even and >= 2, got {m}")));
    }
    Ok(())
}

/// A spectral parameter `z` with its cached image `zeta = z^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: C64,
    pub sector: SectorParams,
    pub zeta: C64,
}

impl SpectralPoint {
    pub fn new(z: C64, sector: SectorParams) -> Self {
        SpectralPoint {
            z,
            sector,
            zeta: map_to_zeta(z, sector.m),
        }
    }

    pub fn in_region(&self) -> bool {
        xi_membership(self.z, self.sector)
    }
}

/// `-Im(z e^{-2pi i/m})`, the distance to the upper boundary ray.
fn upper_ray_distance(z: C64, m: u32) -> f64 {
    -(z * cis(-2.0 * PI / m as f64)).im
}

/// Membership in `Xi_delta`. With `delta = 0` this is membership in the
/// closed sector `arg z in [0, 2pi/m]`; boundary points with distance exactly
/// `delta` are members.
pub fn xi_membership(z: C64, params: SectorParams) -> bool {
    if z == C64::new(0.0, 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return false;
    }
    let opening = params.opening();
    let arg = arg_2pi(z);
    let d = params.delta;
    if d == 0.0 {
        let lower = z.im >= 0.0;
        let upper = upper_ray_distance(z, params.m) >= 0.0 || (arg - opening).abs() < 1e-15;
        return arg <= opening + 1e-15 && lower && upper;
    }
    arg > 0.0 && arg < opening && z.im >= d && upper_ray_distance(z, params.m) >= d
}

/// Distance from `z` to the two boundary rays of `Xi`.
pub fn dist_to_sector_boundary(z: C64, m: u32) -> Result<f64> {
    validate_order(m)?;
    let closed = SectorParams { m, delta: 0.0 };
    if z != C64::new(0.0, 0.0) && !xi_membership(z, closed) {
        return Err(LabError::OutsideSector(crate::cplx::format_complex(z)));
    }
    Ok(z.im.min(upper_ray_distance(z, m)).max(0.0))
}

/// `f_m(z) = z^m`.
pub fn map_to_zeta(z: C64, m: u32) -> C64 {
    powi(z, m)
}

/// The unique `z in Xi` with `z^m = zeta`, for `zeta` off `[0, inf)`.
pub fn inverse_map(zeta: C64, m: u32) -> Result<C64> {
    validate_order(m)?;
    if zeta.im == 0.0 && zeta.re >= 0.0 {
        return Err(LabError::OutsideSector(format!(
            "zeta = {} lies on [0, inf), the boundary of the image",
            crate::cplx::format_complex(zeta)
        )));
    }
    let arg = arg_2pi(zeta);
    let r = zeta.norm().powf(1.0 / m as f64);
    Ok(r * cis(arg / m as f64))
}

/// One sample of the mapped lower boundary `{Im z = delta}` of `Xi_delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub re_zeta: f64,
    pub im_zeta: f64,
    /// `Im zeta / (m delta (Re zeta)^{(m-1)/m})`; tends to 1 along the curve.
    pub ratio: f64,
}

/// Point on the mapped boundary curve at parameter `t` (`z = t + i delta`).
pub fn profile_at(t: f64, params: SectorParams) -> ProfilePoint {
    let zeta = powi(C64::new(t, params.delta), params.m);
    let m = params.m as f64;
    let ratio = zeta.im / (m * params.delta * zeta.re.powf((m - 1.0) / m));
    ProfilePoint {
        t,
        re_zeta: zeta.re,
        im_zeta: zeta.im,
        ratio,
    }
}

/// Samples of the image of `{Im z = delta}` at the requested values of
/// `Re zeta`, with the parabolic-asymptote ratio.
pub fn parabolic_boundary_profile(alpha_list: &[f64], params: SectorParams) -> Result<Vec<ProfilePoint>> {
    let params = SectorParams::region(params.m, params.delta)?;
    let delta = params.delta;
    let re_at = |t: f64| powi(C64::new(t, delta), params.m).re;
    // Left end of the lower boundary edge of Xi_delta (its corner for m >= 4).
    let theta = params.opening();
    let t_min = if params.m == 2 {
        0.0
    } else {
        delta * (1.0 + theta.cos()) / theta.sin()
    };
    alpha_list
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(LabError::invalid(format!("profile abscissae must be positive, got {alpha}")));
            }
            let mut hi = alpha.powf(1.0 / params.m as f64) + params.m as f64 * delta + 1.0;
            while re_at(hi) <= alpha {
                hi *= 2.0;
            }
            let mut lo = t_min;
            if re_at(lo) >= alpha {
                return Ok(profile_at(lo, params));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if re_at(mid) < alpha {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(profile_at(0.5 * (lo + hi), params))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::{c, rel_err, I};

    fn p(m: u32, d: f64) -> SectorParams {
        SectorParams::new(m, d).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(xi_membership(I, p(2, 0.1)));
        assert!(!xi_membership(c(1.0, 0.0), p(2, 0.1)));
        assert!(xi_membership(cis(PI / 4.0), p(4, 0.1)));
        assert!(!xi_membership(C64::new(0.0, 0.0), p(4, 0.0)));
        // Boundary point with distance exactly delta counts.
        assert!(xi_membership(c(3.0, 0.5), p(2, 0.5)));
    }

    #[test]
    fn closed_sector_with_zero_delta() {
        assert!(xi_membership(c(2.0, 0.0), p(4, 0.0)));
        assert!(xi_membership(c(0.0, 2.0), p(4, 0.0)));
        assert!(!xi_membership(c(-0.1, 2.0), p(4, 0.0)));
        assert!(xi_membership(c(-1.0, 0.0), p(2, 0.0)));
        assert!(!xi_membership(c(-1.0, -0.1), p(2, 0.0)));
    }

    #[test]
    fn distance_examples() {
        assert!((dist_to_sector_boundary(c(3.0, 4.0), 2).unwrap() - 4.0).abs() < 1e-15);
        assert!((dist_to_sector_boundary(c(1.0, 1.0), 4).unwrap() - 1.0).abs() < 1e-15);
        let d = dist_to_sector_boundary(2.0 * cis(PI / 4.0), 4).unwrap();
        assert!((d - 2.0 * (PI / 4.0).sin()).abs() < 1e-14);
        assert!(dist_to_sector_boundary(c(-1.0, 1.0), 4).is_err());
    }

    #[test]
    fn map_examples() {
        assert!(rel_err(map_to_zeta(I, 2), c(-1.0, 0.0)) < 1e-15);
        assert!(rel_err(inverse_map(c(-1.0, 0.0), 2).unwrap(), I) < 1e-15);
        assert!(rel_err(map_to_zeta(cis(PI / 4.0), 4), c(-1.0, 0.0)) < 1e-15);
        assert!(rel_err(inverse_map(c(-1.0, 0.0), 4).unwrap(), cis(PI / 4.0)) < 1e-15);
        assert!(inverse_map(c(2.0, 0.0), 4).is_err());
        assert!(inverse_map(c(0.0, 0.0), 2).is_err());
    }

    #[test]
    fn profile_examples() {
        let pt = profile_at(10.0, p(2, 1.0));
        assert!((pt.re_zeta - 99.0).abs() < 1e-12 && (pt.im_zeta - 20.0).abs() < 1e-12);
        assert!((pt.ratio - 20.0 / (2.0 * 99f64.sqrt())).abs() < 1e-12);
        assert!((pt.ratio - 1.00504).abs() < 1e-5);
        let pt = profile_at(10.0, p(4, 1.0));
        assert!((pt.re_zeta - 9401.0).abs() < 1e-9 && (pt.im_zeta - 3960.0).abs() < 1e-9);

        let pts = parabolic_boundary_profile(&[99.0, 9401.0], p(2, 1.0)).unwrap();
        assert!((pts[0].t - 10.0).abs() < 1e-10);
        let pts = parabolic_boundary_profile(&[9401.0], p(4, 1.0)).unwrap();
        assert!((pts[0].t - 10.0).abs() < 1e-10);
        assert!(parabolic_boundary_profile(&[0.0], p(2, 1.0)).is_err());
        assert!(parabolic_boundary_profile(&[1.0], p(2, 0.0)).is_err());
    }

    #[test]
    fn rejects_odd_order() {
        assert!(SectorParams::new(3, 0.1).is_err());
        assert!(SectorParams::new(0, 0.1).is_err());
        assert!(SectorParams::new(2, -0.1).is_err());
    }
}
