//! Additive characters of `F_q` and exhaustive exponential sums.
//!
//! Every sum of `psi(F(x))` over a finite set is computed by counting how
//! many `x` land on each trace value `c` in `F_p` and then summing
//! `count_c * zeta_p^c`. The counts are exact integers, so the complex result
//! does not depend on enumeration order or worker count.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};
use crate::par;
use crate::poly::{PolyKind, PolySetSpec, Poly};
use crate::quad_forms::SymMatrix;
use crate::rudin_shapiro::{rudin_shapiro, s_one};

pub type ComplexVal = Complex64;

/// Absolute slack when comparing a magnitude to a bound.
pub const BOUND_TOLERANCE: f64 = 1e-6;

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// `psi_beta(x) = exp(2 pi i Tr(beta x) / p)`; `beta = 0` is trivial.
#[derive(Clone, Debug)]
pub struct CharSpec<'a> {
    field: &'a FieldCtx,
    beta: Fq,
    roots: Vec<Complex64>,
}

impl<'a> CharSpec<'a> {
    pub fn new(field: &'a FieldCtx, beta: Fq) -> Self {
        let p = field.p();
        let roots = (0..p).map(|c| Complex64::from_polar(1.0, TAU * c as f64 / p as f64)).collect();
        CharSpec { field, beta, roots }
    }

    pub fn field(&self) -> &'a FieldCtx {
        self.field
    }

    pub fn beta(&self) -> Fq {
        self.beta
    }

    pub fn is_trivial(&self) -> bool {
        self.beta.is_zero()
    }

    pub fn require_nontrivial(&self) -> Result<()> {
        if self.is_trivial() {
            return Err(Error::TrivialCharacter);
        }
        Ok(())
    }

    /// `Tr(beta x)` in `[0, p)`.
    #[inline]
    pub fn phase(&self, x: Fq) -> u32 {
        self.field.trace(self.field.mul(self.beta, x))
    }

    #[inline]
    pub fn eval(&self, x: Fq) -> Complex64 {
        self.roots[self.phase(x) as usize]
    }

    /// `sum_c counts[c] zeta_p^c`.
    pub fn from_phase_counts(&self, counts: &[u64]) -> Complex64 {
        counts.iter().zip(&self.roots).map(|(&n, &z)| z * n as f64).collect::<CompensatedSum>().value()
    }
}

fn digits_into(idx: u64, q: u64, out: &mut [Fq]) {
    let mut x = idx;
    for slot in out.iter_mut() {
        *slot = Fq::from_code_unchecked((x % q) as u32);
        x /= q;
    }
}

fn space_size(q: u32, m: usize, cap: u64) -> Result<u64> {
    let size = (q as u128).saturating_pow(m as u32);
    if size > cap as u128 {
        return Err(Error::EnumerationCapExceeded { size, cap });
    }
    Ok(size as u64)
}

fn dot(l: &[Fq], x: &[Fq], field: &FieldCtx) -> Fq {
    l.iter().zip(x).fold(Fq::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
}

/// `sum_{x in F_q^m} psi(x^T M x + L . x)` by enumeration.
pub fn quad_form_char_sum(m: &SymMatrix, linear: &[Fq], chi: &CharSpec, cap: u64) -> Result<ComplexVal> {
    chi.require_nontrivial()?;
    let field = chi.field();
    let dim = m.dim();
    if linear.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: linear.len() });
    }
    let size = space_size(field.q(), dim, cap)?;
    let p = field.p() as usize;
    let parts = par::map_chunks(size, |r| {
        let mut counts = vec![0u64; p];
        let mut x = vec![Fq::ZERO; dim];
        for idx in r {
            digits_into(idx, field.q() as u64, &mut x);
            let v = field.add(m.quadratic(&x, field), dot(linear, &x, field));
            counts[chi.phase(v) as usize] += 1;
        }
        counts
    });
    Ok(chi.from_phase_counts(&par::merge_counts(parts, p)))
}

/// `{re, im, magnitude, bound, pass}` for one Gauss-type bound check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSumReport {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CharSumReport {
    pub fn new(value: ComplexVal, bound: f64) -> Self {
        let magnitude = value.norm();
        CharSumReport { re: value.re, im: value.im, magnitude, bound, pass: magnitude <= bound + BOUND_TOLERANCE }
    }
}

/// `q^{m - r/2}` for a form of rank `r` in `m` variables.
pub fn gauss_bound(q: u32, m: usize, rank: usize) -> f64 {
    (q as f64).powf(m as f64 - rank as f64 / 2.0)
}

/// `|sum psi(Q + L)| <= q^{m - rank/2}`.
pub fn check_gauss_bound(m: &SymMatrix, linear: &[Fq], chi: &CharSpec, cap: u64) -> Result<CharSumReport> {
    let value = quad_form_char_sum(m, linear, chi, cap)?;
    let field = chi.field();
    Ok(CharSumReport::new(value, gauss_bound(field.q(), m.dim(), m.rank(field))))
}

/// Outcome of checking one form against every linear part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussScan {
    pub dim: usize,
    pub rank: usize,
    pub bound: f64,
    pub cases: u64,
    pub failures: u64,
    pub max_magnitude: f64,
}

/// Checks the Gauss bound for `M` with every `L in F_q^m` (the zero one
/// included). Cost is `q^{2m}` form evaluations.
pub fn gauss_scan_all_linear(m: &SymMatrix, chi: &CharSpec, cap: u64) -> Result<GaussScan> {
    chi.require_nontrivial()?;
    let field = chi.field();
    let dim = m.dim();
    let size = space_size(field.q(), dim, cap)?;
    if (size as u128).pow(2) > cap as u128 {
        return Err(Error::EnumerationCapExceeded { size: (size as u128).pow(2), cap });
    }
    let q = field.q() as u64;
    let p = field.p() as usize;
    let points: Vec<Vec<Fq>> = (0..size)
        .map(|i| {
            let mut x = vec![Fq::ZERO; dim];
            digits_into(i, q, &mut x);
            x
        })
        .collect();
    let quad: Vec<Fq> = points.iter().map(|x| m.quadratic(x, field)).collect();
    let rank = m.rank(field);
    let bound = gauss_bound(field.q(), dim, rank);
    let parts = par::map_chunks(size, |r| {
        let mut failures = 0u64;
        let mut max_mag = 0f64;
        let mut l = vec![Fq::ZERO; dim];
        for li in r {
            digits_into(li, q, &mut l);
            let mut counts = vec![0u64; p];
            for (x, &qx) in points.iter().zip(&quad) {
                counts[chi.phase(field.add(qx, dot(&l, x, field))) as usize] += 1;
            }
            let mag = chi.from_phase_counts(&counts).norm();
            max_mag = max_mag.max(mag);
            if mag > bound + BOUND_TOLERANCE {
                failures += 1;
            }
        }
        (failures, max_mag)
    });
    let (failures, max_magnitude) = parts.into_iter().fold((0, 0f64), |(f, m), (pf, pm)| (f + pf, m.max(pm)));
    Ok(GaussScan { dim, rank, bound, cases: size, failures, max_magnitude })
}

/// Right-hand side of the squaring step:
/// `sum_h psi(Q(h) + L(h)) * sum_x psi(2 B(h, x))`.
pub fn squared_sum_by_differencing(m: &SymMatrix, linear: &[Fq], chi: &CharSpec, cap: u64) -> Result<ComplexVal> {
    chi.require_nontrivial()?;
    let field = chi.field();
    let dim = m.dim();
    let size = space_size(field.q(), dim, cap)?;
    let q = field.q() as u64;
    let two = field.from_int(2);
    let mut total = CompensatedSum::default();
    let mut h = vec![Fq::ZERO; dim];
    let mut x = vec![Fq::ZERO; dim];
    for hi in 0..size {
        digits_into(hi, q, &mut h);
        let outer = chi.eval(field.add(m.quadratic(&h, field), dot(linear, &h, field)));
        let mut counts = vec![0u64; field.p() as usize];
        for xi in 0..size {
            digits_into(xi, q, &mut x);
            counts[chi.phase(field.mul(two, m.bilinear(&h, &x, field))) as usize] += 1;
        }
        total.add(outer * chi.from_phase_counts(&counts));
    }
    Ok(total.value())
}

/// Linear part `h -> -(a h)_{n-1}` that turns `S(a h)` into `R(a h)` for
/// monic `a h` of degree `n`; coordinates are `h_0..=h_{n-k}`.
pub fn lin_red_linear_part(a: &Poly, n: usize, field: &FieldCtx) -> Result<Vec<Fq>> {
    let k = a.degree().ok_or(Error::ZeroPolynomial)?;
    if k > n {
        return Err(Error::DegreeBoundViolation { degree: k, bound: n });
    }
    Ok((0..=n - k).map(|j| if n > j { field.neg(a.coeff(n - 1 - j)) } else { Fq::ZERO }).collect())
}

/// Digit functional applied to products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Weight {
    R,
    S,
}

fn weight_of(w: Weight, f: &Poly, field: &FieldCtx) -> Result<Fq> {
    match w {
        Weight::R => rudin_shapiro(f, field),
        Weight::S => Ok(s_one(f, field)),
    }
}

fn check_weight_set(spec: &PolySetSpec, w: Weight) -> Result<()> {
    if w == Weight::R && !matches!(spec.kind, PolyKind::Monic | PolyKind::MonicIrreducible) {
        return Err(Error::NotMonic);
    }
    Ok(())
}

/// `sum_{h in set} psi(W(g h))`.
pub fn rs_char_sum_over_set(spec: &PolySetSpec, weight: Weight, g: &Poly, chi: &CharSpec, cap: u64) -> Result<ComplexVal> {
    chi.require_nontrivial()?;
    check_weight_set(spec, weight)?;
    let field = chi.field();
    Ok(chi.from_phase_counts(&phase_counts(spec, field, cap, |h| {
        Ok(chi.phase(weight_of(weight, &g.mul(h, field), field)?))
    })?))
}

/// `sum_{h in set} psi(W(h g1)) * conj(psi(W(h g2)))`.
pub fn rs_pair_char_sum(
    spec: &PolySetSpec,
    weight: Weight,
    g1: &Poly,
    g2: &Poly,
    chi: &CharSpec,
    cap: u64,
) -> Result<ComplexVal> {
    chi.require_nontrivial()?;
    check_weight_set(spec, weight)?;
    let field = chi.field();
    Ok(chi.from_phase_counts(&phase_counts(spec, field, cap, |h| {
        let d = field.sub(weight_of(weight, &h.mul(g1, field), field)?, weight_of(weight, &h.mul(g2, field), field)?);
        Ok(chi.phase(d))
    })?))
}

fn phase_counts<F>(spec: &PolySetSpec, field: &FieldCtx, cap: u64, phase: F) -> Result<Vec<u64>>
where
    F: Fn(&Poly) -> Result<u32> + Sync + Send,
{
    let size = spec.check_cap(field.q(), cap)?;
    let p = field.p() as usize;
    let parts = par::map_chunks(size, |r| {
        let mut counts = vec![0u64; p];
        for idx in r {
            let h = spec.nth(field, idx);
            if spec.kind == PolyKind::MonicIrreducible && !crate::poly::is_irreducible(&h, field)? {
                continue;
            }
            counts[phase(&h)? as usize] += 1;
        }
        Ok(counts)
    });
    let mut out = vec![0u64; p];
    for part in parts {
        for (o, c) in out.iter_mut().zip(part?) {
            *o += c;
        }
    }
    Ok(out)
}
