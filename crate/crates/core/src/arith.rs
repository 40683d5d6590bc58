//! Arithmetic functions on `F_q[t]`: monic divisors, `tau`, Mobius, von
//! Mangoldt, and the count of solutions to `a* a = f`.
//!
//! Everything is trial division against enumerated monic polynomials.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::par;
use crate::poly::{PolyKind, PolySetSpec, Poly};

/// All monic divisors of `f`, ordered by degree then scan index.
pub fn divisors_monic(f: &Poly, field: &FieldCtx) -> Result<Vec<Poly>> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    let mut out = Vec::new();
    for d in 0..=deg {
        let set = PolySetSpec::monic(d);
        for idx in 0..set.scan_size(field.q()) as u64 {
            let m = set.nth(field, idx);
            if m.divides(f, field)? {
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// Monic irreducible factors with multiplicities, smallest degree first.
/// Non-monic input is normalised first.
pub fn factorize(f: &Poly, field: &FieldCtx) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rest = f.monic(field);
    let mut out = Vec::new();
    let mut d = 1;
    while 2 * d <= rest.degree().unwrap_or(0) {
        let set = PolySetSpec::monic(d);
        for idx in 0..set.scan_size(field.q()) as u64 {
            let m = set.nth(field, idx);
            let mut mult = 0;
            loop {
                let (quot, rem) = rest.divmod(&m, field)?;
                if !rem.is_zero() {
                    break;
                }
                rest = quot;
                mult += 1;
            }
            if mult > 0 {
                out.push((m, mult));
            }
        }
        d += 1;
    }
    if rest.degree().is_some_and(|d| d >= 1) {
        match out.iter_mut().find(|(p, _)| *p == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    Ok(out)
}

/// Number of monic divisors.
pub fn tau(f: &Poly, field: &FieldCtx) -> Result<u64> {
    Ok(factorize(f, field)?.iter().map(|(_, e)| *e as u64 + 1).product())
}

pub fn mobius(f: &Poly, field: &FieldCtx) -> Result<i8> {
    let fac = factorize(f, field)?;
    if fac.iter().any(|(_, e)| *e > 1) {
        return Ok(0);
    }
    Ok(if fac.len() % 2 == 0 { 1 } else { -1 })
}

pub fn von_mangoldt(f: &Poly, field: &FieldCtx) -> Result<u32> {
    let fac = factorize(f, field)?;
    Ok(match fac.as_slice() {
        [(p, _)] => p.degree().unwrap() as u32,
        _ => 0,
    })
}

/// Integer Mobius function, for the prime polynomial count.
pub fn mobius_int(mut n: u64) -> i64 {
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 { 1 } else { -1 }
}

/// `#P(n) = (1/n) sum_{d | n} mu(d) q^{n/d}`.
pub fn prime_poly_count(q: u64, n: u32) -> u64 {
    let mut acc: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            acc += mobius_int(d as u64) as i128 * (q as i128).pow(n / d);
        }
    }
    (acc / n as i128) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArithReport {
    pub statistic: String,
    pub q: u32,
    pub n: usize,
    pub observed: u128,
    pub bound: u128,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ArithReport {
    fn new(statistic: &str, q: u32, n: usize, observed: u128, bound: u128) -> Self {
        ArithReport { statistic: statistic.into(), q, n, observed, bound, pass: observed <= bound, detail: None }
    }
}

fn tau_over_monic(field: &FieldCtx, n: usize, cap: u64) -> Result<Vec<u64>> {
    let set = PolySetSpec::monic(n);
    let size = set.check_cap(field.q(), cap)?;
    let parts = par::map_chunks(size, |r| {
        r.map(|i| tau(&set.nth(field, i), field)).collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(size as usize);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// `tau(f) <= 2^n` over `M(n)`; observed is the maximum. The
/// `|f|^{(2+eps)/log deg f}` branch has no explicit constant, so its value is
/// only reported.
pub fn check_tau_bound(field: &FieldCtx, n: usize, epsilon: f64, cap: u64) -> Result<ArithReport> {
    let taus = tau_over_monic(field, n, cap)?;
    let max = taus.into_iter().max().unwrap_or(0);
    let mut rep = ArithReport::new("tau_max", field.q(), n, max as u128, 1u128 << n);
    if n >= 2 {
        let exponent = (2.0 + epsilon) / (n as f64).ln();
        let value = (field.q() as f64).powf(n as f64 * exponent);
        rep.detail = Some(format!("eps={epsilon}: |f|^((2+eps)/log deg f) = {value:.6e} (not asserted)"));
    }
    Ok(rep)
}

/// `sum_{f in M(n)} tau(f)^2 <= 4 n^3 q^n`.
pub fn check_tau_second_moment(field: &FieldCtx, n: usize, cap: u64) -> Result<ArithReport> {
    let taus = tau_over_monic(field, n, cap)?;
    let sum: u128 = taus.iter().map(|&t| (t as u128) * (t as u128)).sum();
    let bound = 4 * (n as u128).pow(3) * (field.q() as u128).pow(n as u32);
    Ok(ArithReport::new("tau_second_moment", field.q(), n, sum, bound))
}

/// Fibres of `a -> a* a` over `G(n)` (degree exactly `n`, reversal bound `n`).
pub fn reversal_fibres(field: &FieldCtx, n: usize, cap: u64) -> Result<HashMap<Poly, Vec<Poly>>> {
    let set = PolySetSpec::new(n, PolyKind::DegreeExactAll);
    let size = set.check_cap(field.q(), cap)?;
    let mut fibres: HashMap<Poly, Vec<Poly>> = HashMap::new();
    for idx in 0..size {
        let a = set.nth(field, idx);
        let prod = a.reverse(n)?.mul(&a, field);
        fibres.entry(prod).or_default().push(a);
    }
    Ok(fibres)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NfReport {
    pub q: u32,
    pub n: usize,
    pub f: String,
    /// Raw count over `G(n)`.
    pub observed: u64,
    /// Count with `a` and `-a` identified (`(ua)*(ua) = u^2 a* a`).
    pub up_to_sign: u64,
    /// `2^n`.
    pub bound: u64,
    /// `min 2 tau(b)` over solutions `b`; absent when there are none.
    pub tau_bound: Option<u64>,
    pub pass: bool,
}

fn nf_report(field: &FieldCtx, n: usize, f: &Poly, sols: &[Poly]) -> Result<NfReport> {
    let observed = sols.len() as u64;
    let mut classes: Vec<Poly> = sols.iter().map(|a| a.monic(field)).collect();
    classes.sort();
    classes.dedup();
    let mut tau_bound = None;
    for b in sols {
        let t = 2 * tau(b, field)?;
        tau_bound = Some(tau_bound.map_or(t, |x: u64| x.min(t)));
    }
    let bound = 1u64 << n;
    let pass = observed <= bound && tau_bound.is_none_or(|t| observed <= t);
    Ok(NfReport { q: field.q(), n, f: f.to_text(field), observed, up_to_sign: classes.len() as u64, bound, tau_bound, pass })
}

/// `N(f)`: number of `a` of degree exactly `n` with `a* a = f`.
pub fn count_reversal_solutions(f: &Poly, n: usize, field: &FieldCtx, cap: u64) -> Result<NfReport> {
    if let Some(d) = f.degree() {
        if d > 2 * n {
            return Err(Error::DegreeBoundViolation { degree: d, bound: 2 * n });
        }
    }
    let set = PolySetSpec::new(n, PolyKind::DegreeExactAll);
    let size = set.check_cap(field.q(), cap)?;
    let mut sols = Vec::new();
    for idx in 0..size {
        let a = set.nth(field, idx);
        if a.reverse(n)?.mul(&a, field) == *f {
            sols.push(a);
        }
    }
    nf_report(field, n, f, &sols)
}

/// `N(f)` for every `f` in the image of `a -> a* a`, sorted by `f`. Every
/// other `f` has `N(f) = 0`.
pub fn scan_reversal_counts(field: &FieldCtx, n: usize, cap: u64) -> Result<Vec<NfReport>> {
    let fibres = reversal_fibres(field, n, cap)?;
    let mut keys: Vec<&Poly> = fibres.keys().collect();
    keys.sort();
    keys.into_iter().map(|f| nf_report(field, n, f, &fibres[f])).collect()
}
