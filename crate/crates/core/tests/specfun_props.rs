use acqudit_core::specfun::{abs_gamma_sq, complex_gamma, ln_abs_gamma};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn away_from_poles(re: f64, im: f64) -> bool {
    im.abs() > 1e-3 || re > 0.0 || (re - re.round()).abs() > 1e-3
}

proptest! {
    #[test]
    fn recurrence(re in -20.0f64..19.0, im in -20.0f64..20.0) {
        prop_assume!(away_from_poles(re, im) && away_from_poles(re + 1.0, im));
        let z = Complex64::new(re, im);
        let g1 = complex_gamma(z + 1.0).unwrap();
        let g = complex_gamma(z).unwrap();
        prop_assert!((g1 - z * g).norm() / g1.norm() < 1e-10);
    }

    #[test]
    fn conjugation(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        prop_assume!(away_from_poles(re, im));
        let z = Complex64::new(re, im);
        let g = complex_gamma(z).unwrap();
        let gc = complex_gamma(z.conj()).unwrap();
        prop_assert!((gc - g.conj()).norm() <= 1e-12 * g.norm());
    }

    #[test]
    fn log_modulus_matches_direct(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        prop_assume!(away_from_poles(re, im));
        let z = Complex64::new(re, im);
        let direct = complex_gamma(z).unwrap().norm_sqr();
        let viaexp = abs_gamma_sq(z).unwrap();
        prop_assert!((viaexp / direct - 1.0).abs() < 1e-9);
    }

    #[test]
    fn modulus_identity_on_line(y in 0.05f64..12.0) {
        let exact = PI * y / (PI * y).sinh();
        let got = abs_gamma_sq(Complex64::new(1.0, y)).unwrap();
        prop_assert!((got - exact).abs() / exact < 1e-10);
    }
}

#[test]
fn modulus_identity_listed_points() {
    for y in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let exact = PI * y / (PI * y).sinh();
        let got = abs_gamma_sq(Complex64::new(1.0, y)).unwrap();
        assert!((got - exact).abs() / exact < 1e-10, "y = {y}");
    }
}

#[test]
fn log_domain_survives_large_imaginary_parts() {
    // |Γ(x+iy)| ~ e^{-π|y|/2}: the log form stays finite where the product underflows
    let l = ln_abs_gamma(Complex64::new(0.5, 500.0)).unwrap();
    assert!(l.is_finite() && l < -700.0);
}
