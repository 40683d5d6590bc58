//! Univariate polynomials over `F_q` and the enumerated sets `G(n)`, `M(n)`,
//! `P(n)` and the space of polynomials of degree at most `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};

/// Default enumeration cap.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// Dense polynomial, `coeffs[i]` is the coefficient of `t^i`.
///
/// Canonical: no trailing zeros, so the zero polynomial has no coefficients
/// and no degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fq::ONE] }
    }

    pub fn constant(c: Fq) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c t^d`.
    pub fn monomial(c: Fq, d: usize) -> Self {
        let mut coeffs = vec![Fq::ZERO; d + 1];
        coeffs[d] = c;
        Self::from_coeffs(coeffs)
    }

    /// Builds from coefficients (constant term first), dropping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, zero past the degree.
    #[inline]
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    /// Coefficients `0..=n`, zero padded.
    pub fn padded(&self, n: usize) -> Result<Vec<Fq>> {
        self.check_bound(n)?;
        let mut v = self.coeffs.clone();
        v.resize(n + 1, Fq::ZERO);
        Ok(v)
    }

    /// `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Fq> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Fq::ONE)
    }

    pub(crate) fn check_bound(&self, n: usize) -> Result<()> {
        match self.degree() {
            Some(d) if d > n => Err(Error::DegreeBoundViolation { degree: d, bound: n }),
            _ => Ok(()),
        }
    }

    /// `deg f`, standing for the norm `|f| = q^deg f`.
    pub fn norm_exponent(&self) -> Result<usize> {
        self.degree().ok_or(Error::ZeroPolynomialNorm)
    }

    pub fn add(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, f: &FieldCtx) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fq, f: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&x| f.mul(c, x)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// `(quotient, remainder)` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Poly, f: &FieldCtx) -> Result<(Poly, Poly)> {
        let db = divisor.degree().ok_or(Error::DivisionByZeroPoly)?;
        let lead_inv = f.inv(divisor.coeffs[db])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fq::ZERO; rem.len() - db];
        for top in (db..rem.len()).rev() {
            let c = f.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - db;
            quot[shift] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = f.sub(rem[shift + j], f.mul(c, d));
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, f: &FieldCtx) -> Result<Poly> {
        Ok(self.divmod(divisor, f)?.1)
    }

    /// Whether `self` divides `other`; `self` must be nonzero.
    pub fn divides(&self, other: &Poly, f: &FieldCtx) -> Result<bool> {
        Ok(other.rem(self, f)?.is_zero())
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self, f: &FieldCtx) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) if l == Fq::ONE => self.clone(),
            Some(l) => self.scale(f.inv(l).expect("leading coefficient is nonzero"), f),
        }
    }

    /// Monic gcd, with `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `t^n a(1/t)`: coefficient `i` of the result is `a_{n-i}`.
    pub fn reverse(&self, n: usize) -> Result<Poly> {
        self.check_bound(n)?;
        Ok(Poly::from_coeffs((0..=n).map(|i| self.coeff(n - i)).collect()))
    }

    /// `c0,c1,...,cn` with each coefficient in the field's element format.
    /// The zero polynomial is `0`.
    pub fn to_text(&self, f: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs.iter().map(|&c| f.format_element(c)).collect::<Vec<_>>().join(",")
    }

    pub fn parse(s: &str, f: &FieldCtx) -> Result<Poly> {
        let coeffs = s.split(',').map(|c| f.parse_element(c)).collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }

    /// Human-readable form such as `t^3+2t+1`; for logs only.
    pub fn pretty<'a>(&'a self, f: &'a FieldCtx) -> Pretty<'a> {
        Pretty { poly: self, field: f }
    }
}

pub struct Pretty<'a> {
    poly: &'a Poly,
    field: &'a FieldCtx,
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, &c) in self.poly.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(out, "+")?;
            }
            first = false;
            let cs = self.field.format_element(c);
            let cs = if self.field.is_prime_field() { cs } else { format!("({cs})") };
            match (i, c == Fq::ONE) {
                (0, _) => write!(out, "{cs}")?,
                (1, true) => write!(out, "t")?,
                (1, false) => write!(out, "{cs}t")?,
                (_, true) => write!(out, "t^{i}")?,
                (_, false) => write!(out, "{cs}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Which polynomials of a given degree parameter `n` to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolyKind {
    /// `G(n)`: degree exactly `n`, any nonzero leading coefficient.
    DegreeExactAll,
    /// `M(n)`.
    Monic,
    /// `P(n)`.
    MonicIrreducible,
    /// Vector space of degree `<= n`, dimension `n + 1`.
    DegreeAtMost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolySetSpec {
    pub n: usize,
    pub kind: PolyKind,
}

fn qpow(q: u32, n: usize) -> u128 {
    (q as u128).saturating_pow(n as u32)
}

impl PolySetSpec {
    pub fn new(n: usize, kind: PolyKind) -> Self {
        PolySetSpec { n, kind }
    }

    pub fn monic(n: usize) -> Self {
        Self::new(n, PolyKind::Monic)
    }

    /// Number of candidates the enumeration walks. For `MonicIrreducible` this
    /// is `q^n`, the size of the monic set that gets filtered.
    pub fn scan_size(&self, q: u32) -> u128 {
        match self.kind {
            PolyKind::DegreeExactAll => (q as u128 - 1) * qpow(q, self.n),
            PolyKind::Monic | PolyKind::MonicIrreducible => qpow(q, self.n),
            PolyKind::DegreeAtMost => qpow(q, self.n + 1),
        }
    }

    pub fn check_cap(&self, q: u32, cap: u64) -> Result<u64> {
        let size = self.scan_size(q);
        if size > cap as u128 {
            return Err(Error::EnumerationCapExceeded { size, cap });
        }
        Ok(size as u64)
    }

    /// The `idx`-th candidate in scan order (constant term varies fastest).
    /// For `MonicIrreducible` this is the `idx`-th monic polynomial, which
    /// the caller still has to filter.
    pub fn nth(&self, f: &FieldCtx, idx: u64) -> Poly {
        let q = f.q() as u64;
        let mut x = idx;
        let mut digits = |count: usize| -> Vec<Fq> {
            (0..count)
                .map(|_| {
                    let d = Fq::from_code_unchecked((x % q) as u32);
                    x /= q;
                    d
                })
                .collect()
        };
        match self.kind {
            PolyKind::Monic | PolyKind::MonicIrreducible => {
                let mut c = digits(self.n);
                c.push(Fq::ONE);
                Poly { coeffs: c }
            }
            PolyKind::DegreeExactAll => {
                let mut c = digits(self.n);
                c.push(Fq::from_code_unchecked((x + 1) as u32));
                Poly { coeffs: c }
            }
            PolyKind::DegreeAtMost => Poly::from_coeffs(digits(self.n + 1)),
        }
    }

    /// Whole set in scan order.
    pub fn enumerate(&self, f: &FieldCtx, cap: u64) -> Result<Vec<Poly>> {
        let size = self.check_cap(f.q(), cap)?;
        let mut out = Vec::new();
        for idx in 0..size {
            let p = self.nth(f, idx);
            if self.kind == PolyKind::MonicIrreducible && !is_irreducible(&p, f)? {
                continue;
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Index of a monic polynomial of degree `n` within `M(n)` scan order.
pub fn monic_index(p: &Poly, q: u32) -> u64 {
    let n = p.degree().expect("nonzero");
    let mut idx = 0u64;
    for i in (0..n).rev() {
        idx = idx * q as u64 + p.coeffs[i].code() as u64;
    }
    idx
}

/// Irreducibility by trial division: no monic divisor of degree in
/// `1..=deg/2`.
pub fn is_irreducible(p: &Poly, f: &FieldCtx) -> Result<bool> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        Some(d) => return Err(Error::DegreeTooSmall { degree: d, min: 1 }),
        None => return Err(Error::ZeroPolynomial),
    };
    let p = p.monic(f);
    for d in 1..=deg / 2 {
        let set = PolySetSpec::monic(d);
        for idx in 0..set.scan_size(f.q()) as u64 {
            if set.nth(f, idx).divides(&p, f)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
