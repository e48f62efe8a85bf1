//! Reference values computed independently of the code they check.

use std::f64::consts::PI;

/// Bessel `J_0`: power series for `|x| <= 12`, Hankel asymptotic expansion
/// (truncated at its smallest term) beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 12.0 {
        let q = -(x * x) / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k as f64 * k as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        return sum;
    }
    // |a_k| = prod_{j=1..k} (2j-1)^2 / (k! 8^k); odd terms carry an extra sign.
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let kk = k as f64;
            a *= (2.0 * kk - 1.0).powi(2) / (kk * 8.0 * x);
        }
        if a > last {
            break;
        }
        last = a;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q -= sign * a;
        }
    }
    let chi = x - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `zeta(2) - zeta(3) = sum_{l >= 1} l/(1+l)^3`.
pub const SERIES_M2_A0: f64 = 0.442_877_163_688_632_1;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(2.404_825_557_695_773) - 0.0).abs() < 1e-13);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-12);
        assert!((bessel_j0(20.0) - 0.167_024_664_340_583_1).abs() < 1e-10);
        assert!((bessel_j0(50.0) - 0.055_812_327_669_251_86).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_at_switch() {
        let a = bessel_j0(12.0);
        let b = bessel_j0(12.000_000_1);
        assert!((a - b).abs() < 1e-7);
    }
}
