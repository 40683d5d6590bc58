//! Arithmetic in `F_q = F_{p^e}` for odd primes `p`.
//!
//! An element is a residue vector `(c_0, .., c_{e-1})` in the power basis of
//! the defining modulus. [`Fq`] stores that vector packed as the base-`p`
//! integer `c_0 + c_1 p + .. + c_{e-1} p^{e-1}`, so `0` and `1` have codes
//! `0` and `1` in every field and enumeration by code is the canonical order
//! (lowest residue varies fastest).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `q`; every experiment here is exhaustive.
pub const MAX_Q: u64 = 1 << 20;

const MAX_E: usize = 12;

/// A field element, packed residue vector. Only meaningful together with the
/// [`FieldCtx`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fq(u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Callers guarantee `code < q`.
    #[inline]
    pub(crate) fn from_code_unchecked(code: u32) -> Fq {
        Fq(code)
    }
}

/// Description of `F_{p^e}`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    e: usize,
    /// Monic irreducible of degree `e`, constant term first, leading 1 included.
    /// Empty for prime fields.
    modulus: Vec<u32>,
    q: u32,
    /// `Tr(t^j)` for `j < e`; the trace is `F_p`-linear.
    basis_trace: Vec<u32>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic `m` over `F_p`; both constant term first.
fn prime_poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let dm = m.len() - 1;
    let p64 = p as u64;
    while r.len() > dm {
        let c = r.pop().unwrap() % p64;
        if c == 0 {
            continue;
        }
        let shift = r.len() - dm;
        for j in 0..dm {
            r[shift + j] = (r[shift + j] + c * (p64 - m[j] as u64)) % p64;
        }
    }
    r.into_iter().map(|x| (x % p64) as u32).collect()
}

/// Irreducibility of a monic polynomial over `F_p` by trial division against
/// every monic polynomial of degree `1..=deg/2`.
fn prime_poly_is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                div.push((x % p as u64) as u32);
                x /= p as u64;
            }
            div.push(1);
            if prime_poly_rem(m, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldCtx {
    /// `F_p` when `e == 1`, otherwise `F_{p^e}` with the first monic
    /// irreducible of degree `e` in enumeration order as modulus.
    pub fn new(p: u32, e: usize) -> Result<Self> {
        Self::check_size(p, e)?;
        if e == 1 {
            return Self::build(p, 1, Vec::new());
        }
        let count = (p as u64).pow(e as u32);
        for idx in 0..count {
            let mut m = Vec::with_capacity(e + 1);
            let mut x = idx;
            for _ in 0..e {
                m.push((x % p as u64) as u32);
                x /= p as u64;
            }
            m.push(1);
            if prime_poly_is_irreducible(&m, p) {
                return Self::build(p, e, m);
            }
        }
        Err(Error::InvalidField(format!("no irreducible of degree {e} over F_{p}")))
    }

    /// Explicit modulus, constant term first, including the leading 1.
    pub fn with_modulus(p: u32, e: usize, modulus: Vec<u32>) -> Result<Self> {
        Self::check_size(p, e)?;
        if e == 1 && modulus.is_empty() {
            return Self::build(p, 1, Vec::new());
        }
        if modulus.len() != e + 1 {
            return Err(Error::InvalidField(format!(
                "modulus must have {} residues, got {}",
                e + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus residue out of range".into()));
        }
        if modulus[e] != 1 {
            return Err(Error::InvalidField("modulus is not monic".into()));
        }
        if !prime_poly_is_irreducible(&modulus, p) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        if e == 1 {
            // A linear modulus changes nothing.
            return Self::build(p, 1, Vec::new());
        }
        Self::build(p, e, modulus)
    }

    fn check_size(p: u32, e: usize) -> Result<()> {
        if p == 2 {
            return Err(Error::InvalidField("characteristic 2 is not supported".into()));
        }
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
        if q > MAX_Q as u128 || e > MAX_E {
            return Err(Error::InvalidField(format!("q = {p}^{e} exceeds {MAX_Q}")));
        }
        Ok(())
    }

    fn build(p: u32, e: usize, modulus: Vec<u32>) -> Result<Self> {
        let q = p.pow(e as u32);
        let mut ctx = FieldCtx { p, e, modulus, q, basis_trace: Vec::new() };
        ctx.basis_trace = (0..e)
            .map(|j| {
                let mut res = [0u32; MAX_E];
                res[j] = 1;
                ctx.trace_by_frobenius(ctx.pack(&res[..e]))
            })
            .collect();
        Ok(ctx)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> usize {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    fn pack(&self, res: &[u32]) -> Fq {
        let mut code = 0u32;
        for &c in res.iter().rev() {
            code = code * self.p + c;
        }
        Fq(code)
    }

    fn unpack(&self, x: Fq, out: &mut [u32; MAX_E]) {
        let mut c = x.0;
        for slot in out.iter_mut().take(self.e) {
            *slot = c % self.p;
            c /= self.p;
        }
    }

    /// Element from its residue vector (lowest basis power first).
    pub fn from_residues(&self, res: &[u32]) -> Result<Fq> {
        if res.len() > self.e || res.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!("{res:?} is not an element of F_{}", self.q)));
        }
        Ok(self.pack(res))
    }

    pub fn residues(&self, x: Fq) -> Vec<u32> {
        let mut buf = [0u32; MAX_E];
        self.unpack(x, &mut buf);
        buf[..self.e].to_vec()
    }

    /// Element with the given code; codes run over `0..q`.
    pub fn from_code(&self, code: u32) -> Result<Fq> {
        if code >= self.q {
            return Err(Error::Parse(format!("code {code} out of range for F_{}", self.q)));
        }
        Ok(Fq(code))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, x: Fq, y: Fq) -> Fq {
        if self.e == 1 {
            let s = x.0 + y.0;
            return Fq(if s >= self.p { s - self.p } else { s });
        }
        let (mut a, mut b) = ([0u32; MAX_E], [0u32; MAX_E]);
        self.unpack(x, &mut a);
        self.unpack(y, &mut b);
        for i in 0..self.e {
            a[i] = (a[i] + b[i]) % self.p;
        }
        self.pack(&a[..self.e])
    }

    #[inline]
    pub fn neg(&self, x: Fq) -> Fq {
        if self.e == 1 {
            return Fq(if x.0 == 0 { 0 } else { self.p - x.0 });
        }
        let mut a = [0u32; MAX_E];
        self.unpack(x, &mut a);
        for c in a.iter_mut().take(self.e) {
            *c = (self.p - *c) % self.p;
        }
        self.pack(&a[..self.e])
    }

    #[inline]
    pub fn sub(&self, x: Fq, y: Fq) -> Fq {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Fq, y: Fq) -> Fq {
        if self.e == 1 {
            return Fq(((x.0 as u64 * y.0 as u64) % self.p as u64) as u32);
        }
        let (mut a, mut b) = ([0u32; MAX_E], [0u32; MAX_E]);
        self.unpack(x, &mut a);
        self.unpack(y, &mut b);
        let p = self.p as u64;
        let e = self.e;
        let mut prod = [0u64; 2 * MAX_E];
        for i in 0..e {
            if a[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a[i] as u64 * b[j] as u64) % p;
            }
        }
        for top in (e..2 * e - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            let shift = top - e;
            for j in 0..e {
                prod[shift + j] = (prod[shift + j] + c * (p - self.modulus[j] as u64)) % p;
            }
        }
        let mut res = [0u32; MAX_E];
        for i in 0..e {
            res[i] = prod[i] as u32;
        }
        self.pack(&res[..e])
    }

    pub fn pow(&self, x: Fq, mut exp: u64) -> Fq {
        let mut base = x;
        let mut acc = Fq::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: Fq) -> Result<Fq> {
        if x.is_zero() {
            return Err(Error::ZeroInversion);
        }
        Ok(self.pow(x, self.q as u64 - 2))
    }

    /// `1/2`, which exists because `p` is odd.
    pub fn half(&self) -> Fq {
        self.from_int((self.p as i64 + 1) / 2)
    }

    /// Absolute trace to `F_p`, as a residue in `[0, p)`.
    #[inline]
    pub fn trace(&self, x: Fq) -> u32 {
        if self.e == 1 {
            return x.0;
        }
        let mut a = [0u32; MAX_E];
        self.unpack(x, &mut a);
        let mut t = 0u64;
        for j in 0..self.e {
            t += a[j] as u64 * self.basis_trace[j] as u64;
        }
        (t % self.p as u64) as u32
    }

    /// `sum_{i<e} x^{p^i}`, evaluated literally.
    pub fn trace_by_frobenius(&self, x: Fq) -> u32 {
        let mut acc = Fq::ZERO;
        let mut y = x;
        for _ in 0..self.e {
            acc = self.add(acc, y);
            y = self.pow(y, self.p as u64);
        }
        let res = self.residues(acc);
        debug_assert!(res[1..].iter().all(|&c| c == 0), "trace left the prime field");
        res[0]
    }

    /// All `q` elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q).map(Fq)
    }

    /// Residues joined by `+` in basis order, e.g. `2+2` for `2+2t` in `F_9`.
    pub fn format_element(&self, x: Fq) -> String {
        if self.e == 1 {
            return x.0.to_string();
        }
        self.residues(x).iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+")
    }

    pub fn parse_element(&self, s: &str) -> Result<Fq> {
        let res = s
            .trim()
            .split('+')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad residue {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        self.from_residues(&res)
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.e)
        }
    }
}
