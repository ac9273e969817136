use num_complex::Complex64;

use super::{finite, SeriesControl, SpecialFnError};

const POLE_TOL: f64 = 1e-12;
const SMALL_TERMS_TO_STOP: usize = 3;

/// Compensated (Kahan) accumulator for complex sums.
#[derive(Default)]
struct KahanSum {
    sum: Complex64,
    carry: Complex64,
}

impl KahanSum {
    fn add(&mut self, x: Complex64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

fn check_b(b: Complex64) -> Result<(), SpecialFnError> {
    if b.re <= 0.5 && b.im.abs() <= POLE_TOL && (b.re - b.re.round()).abs() <= POLE_TOL {
        return Err(SpecialFnError::Pole(b));
    }
    Ok(())
}

/// Plain Maclaurin series of `1F1(a; b; z)` without any argument
/// transformation.
pub fn kummer_1f1_series(
    a: Complex64,
    b: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64, SpecialFnError> {
    ctl.validate()?;
    check_b(b)?;

    let mut acc = KahanSum::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut max_term = 1.0_f64;
    let mut small_run = 0;
    acc.add(term);

    for k in 0..ctl.max_terms {
        let kf = k as f64;
        term = term * (a + kf) / (b + kf) * z / (kf + 1.0);
        acc.add(term);
        let size = term.norm();
        if !size.is_finite() {
            return Err(SpecialFnError::Overflow);
        }
        max_term = max_term.max(size);
        if size < ctl.abs_tol * (1.0 + acc.sum.norm()) {
            small_run += 1;
            if small_run == SMALL_TERMS_TO_STOP {
                let result = acc.sum;
                if max_term * f64::EPSILON > ctl.rel_tol * result.norm() {
                    return Err(SpecialFnError::Cancellation {
                        max_term,
                        result: result.norm(),
                    });
                }
                return finite(result);
            }
        } else {
            small_run = 0;
        }
    }
    Err(SpecialFnError::NoConvergence { terms: ctl.max_terms })
}

/// Kummer's confluent hypergeometric function `1F1(a; b; z)`.
///
/// For `Re z < 0` the Kummer transformation
/// `1F1(a; b; z) = e^z 1F1(b - a; b; -z)` is applied first so the series
/// runs on a non-alternating argument.
pub fn kummer_1f1(
    a: Complex64,
    b: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64, SpecialFnError> {
    ctl.validate()?;
    check_b(b)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z.re < 0.0 {
        let inner = kummer_1f1_series(b - a, b, -z, ctl)?;
        finite(z.exp() * inner)
    } else {
        kummer_1f1_series(a, b, z, ctl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_argument_is_one() {
        let ctl = SeriesControl::default();
        let v = kummer_1f1(c(3.0, -2.0), c(0.7, 1.0), c(0.0, 0.0), &ctl).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn closed_form_identity() {
        // 1F1(1; 2; z) = (e^z - 1) / z
        let ctl = SeriesControl::default();
        let v = kummer_1f1(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), &ctl).unwrap();
        assert!((v.re - 1.718_281_828_459_045).abs() < 1e-14);
        let z = c(-3.0, 2.0);
        let v = kummer_1f1(c(1.0, 0.0), c(2.0, 0.0), z, &ctl).unwrap();
        let expected = (z.exp() - 1.0) / z;
        assert!((v - expected).norm() < 1e-14);
    }

    #[test]
    fn complex_parameters_match_reference() {
        // 40-digit reference.
        let ctl = SeriesControl::default();
        let v = kummer_1f1(c(0.5, 1.0), c(0.5, 0.0), c(0.3, 0.2), &ctl).unwrap();
        let expected = c(0.714_453_121_907_650_2, 0.829_904_918_417_737_6);
        assert!((v - expected).norm() < 1e-14 * expected.norm(), "{v}");
    }

    #[test]
    fn terminating_series() {
        // 1F1(-2; 1/2; x) = 1 - 4x + 4x^2/3
        let ctl = SeriesControl::default();
        let x = 1.7;
        let v = kummer_1f1(c(-2.0, 0.0), c(0.5, 0.0), c(x, 0.0), &ctl).unwrap();
        assert!((v.re - (1.0 - 4.0 * x + 4.0 * x * x / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn bad_b_and_exhausted_terms() {
        let ctl = SeriesControl::default();
        assert!(matches!(
            kummer_1f1(c(1.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0), &ctl),
            Err(SpecialFnError::Pole(_))
        ));
        let tight = SeriesControl {
            max_terms: 5,
            ..SeriesControl::default()
        };
        assert!(matches!(
            kummer_1f1(c(0.5, 0.0), c(1.5, 0.0), c(10.0, 0.0), &tight),
            Err(SpecialFnError::NoConvergence { terms: 5 })
        ));
    }

    #[test]
    fn cancellation_is_surfaced() {
        // e^{-40} from the raw alternating series loses every digit.
        let ctl = SeriesControl::default();
        let r = kummer_1f1_series(c(1.0, 0.0), c(1.0, 0.0), c(-40.0, 0.0), &ctl);
        assert!(matches!(r, Err(SpecialFnError::Cancellation { .. })));
        let ok = kummer_1f1(c(1.0, 0.0), c(1.0, 0.0), c(-40.0, 0.0), &ctl).unwrap();
        assert!((ok.re - (-40.0f64).exp()).abs() < 1e-30);
    }

    fn cplx(bound: f64) -> impl Strategy<Value = Complex64> {
        (-bound..bound, -bound..bound).prop_map(|(r, i)| Complex64::new(r, i))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn kummer_transformation_consistent(a in cplx(3.5), z in cplx(3.5), br in 0.5f64..4.0, bi in -2.0f64..2.0) {
            let ctl = SeriesControl::default();
            let b = Complex64::new(br, bi);
            // Raw series on both sides so the transformation is exercised, not assumed.
            let lhs = kummer_1f1_series(a, b, z, &ctl);
            let rhs = kummer_1f1_series(b - a, b, -z, &ctl).map(|v| z.exp() * v);
            if let (Ok(lhs), Ok(rhs)) = (lhs, rhs) {
                prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()), "{} vs {}", lhs, rhs);
            }
            let public = kummer_1f1(a, b, z, &ctl).unwrap();
            let mirrored = kummer_1f1(b - a, b, -z, &ctl).unwrap() * z.exp();
            prop_assert!((public - mirrored).norm() <= 1e-9 * (1.0 + public.norm()));
        }

        #[test]
        fn contiguous_relation(a in cplx(4.0), z in cplx(4.0), br in 0.5f64..4.0, bi in -2.0f64..2.0) {
            let ctl = SeriesControl::default();
            let b = Complex64::new(br, bi);
            let lo = kummer_1f1(a - 1.0, b, z, &ctl).unwrap();
            let mid = kummer_1f1(a, b, z, &ctl).unwrap();
            let hi = kummer_1f1(a + 1.0, b, z, &ctl).unwrap();
            let t1 = (b - a) * lo;
            let t2 = (2.0 * a - b + z) * mid;
            let t3 = a * hi;
            let scale = t1.norm() + t2.norm() + t3.norm();
            prop_assert!((t1 + t2 - t3).norm() <= 1e-8 * scale.max(1e-300));
        }
    }
}
