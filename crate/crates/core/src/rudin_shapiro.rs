//! Digit functionals `S^(l)`, `S` and the Rudin-Shapiro function `R`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};
use crate::poly::Poly;

/// `S^(l)(f)` for `l = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrelationVector {
    pub n: usize,
    pub values: Vec<Fq>,
}

/// `S^(l)(f) = sum_{i=l}^{n} f_i f_{i-l}` with `f` read as a vector of
/// length `n + 1`. Empty (zero) once `l > n`.
pub fn s_ell(f: &Poly, ell: usize, n: usize, field: &FieldCtx) -> Result<Fq> {
    f.check_bound(n)?;
    let mut acc = Fq::ZERO;
    for i in ell..=n {
        let (a, b) = (f.coeff(i), f.coeff(i - ell));
        if !a.is_zero() && !b.is_zero() {
            acc = field.add(acc, field.mul(a, b));
        }
    }
    Ok(acc)
}

/// `S(f) = S^(1)(f)`; padding does not change it.
pub fn s_one(f: &Poly, field: &FieldCtx) -> Fq {
    let c = f.coeffs();
    let mut acc = Fq::ZERO;
    for i in 1..c.len() {
        acc = field.add(acc, field.mul(c[i], c[i - 1]));
    }
    acc
}

/// `R(f) = sum_{i=1}^{n-1} f_i f_{i-1}` for monic `f` of degree `n >= 2`.
pub fn rudin_shapiro(f: &Poly, field: &FieldCtx) -> Result<Fq> {
    let n = f.degree().ok_or(Error::ZeroPolynomial)?;
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if n < 2 {
        return Err(Error::DegreeTooSmall { degree: n, min: 2 });
    }
    let c = f.coeffs();
    let mut acc = Fq::ZERO;
    for i in 1..n {
        acc = field.add(acc, field.mul(c[i], c[i - 1]));
    }
    Ok(acc)
}

/// Reads `S^(l)(a)` off the product `a* a` (reversal with bound `n`): the
/// coefficient of `t^{n-l}`. Also checks that `a* a` is palindromic around
/// `t^n`; a failure there is reported as `None`.
pub fn star_product_coefficients(a: &Poly, n: usize, field: &FieldCtx) -> Result<Option<CorrelationVector>> {
    let prod = a.reverse(n)?.mul(a, field);
    for ell in 0..=n {
        if prod.coeff(n + ell) != prod.coeff(n - ell) {
            return Ok(None);
        }
    }
    Ok(Some(CorrelationVector { n, values: (0..=n).map(|ell| prod.coeff(n - ell)).collect() }))
}

/// `S^(l)(a)` for `l = 0..=n` straight from the definition.
pub fn correlation_vector(a: &Poly, n: usize, field: &FieldCtx) -> Result<CorrelationVector> {
    let values = (0..=n).map(|ell| s_ell(a, ell, n, field)).collect::<Result<_>>()?;
    Ok(CorrelationVector { n, values })
}

/// The displayed expansion `sum_l S^(l)(a) (t^{n+l} + t^{n-l})` with the
/// `l = 0` term taken once rather than twice, which is what `a* a` actually
/// equals.
pub fn star_product_from_correlations(cv: &CorrelationVector, field: &FieldCtx) -> Poly {
    let n = cv.n;
    let mut coeffs = vec![Fq::ZERO; 2 * n + 1];
    coeffs[n] = cv.values[0];
    for ell in 1..=n {
        coeffs[n + ell] = field.add(coeffs[n + ell], cv.values[ell]);
        coeffs[n - ell] = field.add(coeffs[n - ell], cv.values[ell]);
    }
    Poly::from_coeffs(coeffs)
}

/// Same expansion with the `l = 0` term doubled, as literally displayed.
pub fn star_product_literal_display(cv: &CorrelationVector, field: &FieldCtx) -> Poly {
    let mut p = star_product_from_correlations(cv, field);
    let extra = Poly::monomial(cv.values[0], cv.n);
    p = p.add(&extra, field);
    p
}
