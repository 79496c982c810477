//! Complex Gamma function (Lanczos, g = 7) and log-domain moduli.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type ComplexScalar = Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite Gamma argument {z}")));
    }
    if z.re <= 0.5 {
        let nearest = z.re.round();
        let tol = 64.0 * f64::EPSILON * z.norm().max(1.0);
        if nearest <= 0.0 && (z.re - nearest).abs() < tol && z.im.abs() < tol {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
    }
    Ok(())
}

/// Lanczos series for Re z >= 1/2; returns (t, A(z)) with t = z + g - 1/2.
fn lanczos_parts(z: Complex64) -> (Complex64, Complex64) {
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (zm + i as f64);
    }
    (zm + LANCZOS_G + 0.5, acc)
}

/// Γ(z) for complex z; reflection is used for Re z < 1/2.
pub fn complex_gamma(z: ComplexScalar) -> Result<ComplexScalar> {
    check_pole(z)?;
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return PI / (s * gamma_unchecked(1.0 - z));
    }
    let (t, a) = lanczos_parts(z);
    let lnv = LN_SQRT_2PI + (z - 0.5) * t.ln() - t;
    lnv.exp() * a
}

/// Principal-branch-free log Gamma: only the real part is meaningful
/// across reflections, which is all the moduli need.
fn ln_abs_gamma_unchecked(z: Complex64) -> f64 {
    if z.re < 0.5 {
        // ln|Γ(z)| = ln π - ln|sin πz| - ln|Γ(1-z)|
        return PI.ln() - ln_abs_sin_pi(z) - ln_abs_gamma_unchecked(1.0 - z);
    }
    let (t, a) = lanczos_parts(z);
    let lnv = LN_SQRT_2PI + (z - 0.5) * t.ln() - t;
    lnv.re + a.norm().ln()
}

/// ln|sin(πz)| without overflow for large |Im z|.
fn ln_abs_sin_pi(z: Complex64) -> f64 {
    let sx = (PI * z.re).sin();
    let u = PI * z.im.abs();
    if u < 1.0 {
        0.5 * (sx * sx + u.sinh().powi(2)).ln()
    } else {
        // sinh u = e^u (1 - e^{-2u}) / 2
        let ln_sinh = u - std::f64::consts::LN_2 + (-(-2.0 * u).exp()).ln_1p();
        let ratio = sx / u.sinh().max(f64::MIN_POSITIVE);
        ln_sinh + 0.5 * (ratio * ratio).ln_1p()
    }
}

/// ln|Γ(z)|.
pub fn ln_abs_gamma(z: ComplexScalar) -> Result<f64> {
    check_pole(z)?;
    Ok(ln_abs_gamma_unchecked(z))
}

/// |Γ(z)|², accumulated in the log domain.
pub fn abs_gamma_sq(z: ComplexScalar) -> Result<f64> {
    Ok((2.0 * ln_abs_gamma(z)?).exp())
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma_real needs x > 0, got {x}")));
    }
    ln_abs_gamma(Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn frozen_values() {
        let g1 = complex_gamma(c(1.0, 0.0)).unwrap();
        assert_relative_eq!(g1.re, 1.0, epsilon = 1e-14);
        assert!(g1.im.abs() < 1e-14);
        let gh = complex_gamma(c(0.5, 0.0)).unwrap();
        assert_relative_eq!(gh.re, 1.772_453_850_905_516, max_relative = 1e-13);
        // |Γ(1+iy)|² = πy / sinh(πy)
        let exact1 = (PI / PI.sinh()).sqrt();
        assert_relative_eq!(complex_gamma(c(1.0, 1.0)).unwrap().norm(), exact1, max_relative = 1e-12);
        assert_relative_eq!(exact1, 0.521_564_05, epsilon = 1e-8);
        assert_relative_eq!(abs_gamma_sq(c(2.0, 0.0)).unwrap(), 1.0, max_relative = 1e-13);
        let exact2 = 2.0 * PI / (2.0 * PI).sinh();
        assert_relative_eq!(abs_gamma_sq(c(1.0, 2.0)).unwrap(), exact2, max_relative = 1e-12);
        assert_relative_eq!(exact2, 0.023_467_06, epsilon = 1e-8);
    }

    #[test]
    fn poles_rejected() {
        for n in 0..6 {
            assert!(matches!(complex_gamma(c(-(n as f64), 0.0)), Err(Error::Pole { .. })));
            assert!(matches!(abs_gamma_sq(c(-(n as f64), 0.0)), Err(Error::Pole { .. })));
        }
        assert!(complex_gamma(c(-3.0, 1e-3)).is_ok());
    }

    #[test]
    fn large_imaginary_part_is_finite() {
        let v = abs_gamma_sq(c(0.914_214, 5.0)).unwrap();
        let w = complex_gamma(c(0.914_214, 5.0)).unwrap().norm_sqr();
        assert!(v > 0.0 && v.is_finite());
        assert_relative_eq!(v, w, max_relative = 1e-10);
        let far = abs_gamma_sq(c(-0.9, 60.0)).unwrap();
        assert!(far > 0.0 && far.is_finite());
    }

    #[test]
    fn negative_half_integers() {
        // Γ(-1/2) = -2√π
        let g = complex_gamma(c(-0.5, 0.0)).unwrap();
        assert_relative_eq!(g.re, -2.0 * PI.sqrt(), max_relative = 1e-13);
    }
}
