//! Complex gamma function.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FringeError, Result};

const LANCZOS_G: f64 = 671.0 / 128.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

#[allow(clippy::excessive_precision)]
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `ln Gamma(z)` for `Re z >= 1/2`, any branch.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let tmp = z + LANCZOS_G;
    let lead = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    lead + (ser * SQRT_2PI / z).ln()
}

/// `ln sin(pi z)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(libm::sin(PI * z.re), 0.0).ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), |e^{2 i pi z}| < 1
    let i = Complex64::i();
    let w = (2.0 * PI * i * z).exp();
    -i * PI * z + ((w - 1.0) / (2.0 * i)).ln()
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == libm::floor(z.re)
}

/// `ln Gamma(z)` on some branch; `exp` of it is `Gamma(z)`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(FringeError::Pole(z.re));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        Ok(Complex64::new(libm::log(PI), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_complex(z)?.exp())
}

/// `|Gamma(m - 1 - 2 pi k i / d)| / Gamma(m - 1)`: relative size of the
/// `k`-th Fourier coefficient of the mean oscillation.
pub fn fourier_ratio(m: u32, k: i64, d: f64) -> Result<f64> {
    let z = Complex64::new(m as f64 - 1.0, -2.0 * PI * k as f64 / d);
    let ln = ln_gamma_complex(z)?.re - libm::lgamma(m as f64 - 1.0);
    Ok(libm::exp(ln))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn integers_and_half() {
        let g = |x: f64| complex_gamma(Complex64::new(x, 0.0)).unwrap();
        assert!(rel(g(1.0), Complex64::new(1.0, 0.0)) < 1e-14);
        assert!(rel(g(5.0), Complex64::new(24.0, 0.0)) < 1e-14);
        assert!(rel(g(0.5), Complex64::new(PI.sqrt(), 0.0)) < 1e-14);
        assert!(rel(g(-0.5), Complex64::new(-2.0 * PI.sqrt(), 0.0)) < 1e-14);
    }

    #[test]
    fn poles_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(complex_gamma(Complex64::new(x, 0.0)), Err(FringeError::Pole(x)));
        }
        assert!(complex_gamma(Complex64::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn recurrence_and_conjugation() {
        for &(x, y) in &[(0.3, 2.0), (-0.7, 15.0), (3.5, -40.0), (12.0, 150.0)] {
            let z = Complex64::new(x, y);
            let a = complex_gamma(z + 1.0).unwrap();
            let b = z * complex_gamma(z).unwrap();
            assert!(rel(a, b) < 1e-12, "{z}");
            let c = complex_gamma(z.conj()).unwrap();
            assert!(rel(c, complex_gamma(z).unwrap().conj()) < 1e-13);
        }
    }

    #[test]
    fn imaginary_axis_modulus() {
        // |Gamma(iy)|^2 = pi / (y sinh(pi y))
        for y in [0.5, 3.0, 9.064720283654388] {
            let g = complex_gamma(Complex64::new(0.0, y)).unwrap().norm();
            let want = (PI / (y * libm::sinh(PI * y))).sqrt();
            assert!((g - want).abs() / want < 1e-12, "{y}");
        }
    }
}
