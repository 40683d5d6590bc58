//! Symmetric bilinear and quadratic forms on coefficient spaces.
//!
//! The base form `B` satisfies `B(x, x) = S(x)`. Composing it with
//! multiplication by a fixed `a` gives the form of `h -> S(a h)` on the
//! space of `h` with `deg h <= n - k`, of dimension `n - k + 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};
use crate::par;
use crate::poly::{PolySetSpec, Poly};
use crate::rudin_shapiro::s_ell;

/// Symmetric `dim x dim` matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<Fq>,
}

impl SymMatrix {
    pub fn new(dim: usize, entries: Vec<Fq>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        for i in 0..dim {
            for j in 0..i {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(SymMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Fq) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    pub fn zero(dim: usize) -> Self {
        SymMatrix { dim, entries: vec![Fq::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Fq::ONE;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.entries[i * self.dim + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.is_zero())
    }

    pub fn sub(&self, other: &SymMatrix, field: &FieldCtx) -> Result<SymMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| field.sub(a, b)).collect();
        Ok(SymMatrix { dim: self.dim, entries })
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[Fq], y: &[Fq], field: &FieldCtx) -> Fq {
        let mut acc = Fq::ZERO;
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            let mut row = Fq::ZERO;
            for j in 0..self.dim {
                row = field.add(row, field.mul(self.get(i, j), y[j]));
            }
            acc = field.add(acc, field.mul(x[i], row));
        }
        acc
    }

    /// `x^T M x`.
    pub fn quadratic(&self, x: &[Fq], field: &FieldCtx) -> Fq {
        self.bilinear(x, x, field)
    }

    /// Drops the last row and column: the quadratic part of the form after
    /// fixing the last coordinate.
    pub fn without_last(&self) -> SymMatrix {
        let d = self.dim.saturating_sub(1);
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            entries.extend_from_slice(&self.entries[i * self.dim..i * self.dim + d]);
        }
        SymMatrix { dim: d, entries }
    }

    pub fn rank(&self, field: &FieldCtx) -> usize {
        let rows = (0..self.dim).map(|i| self.entries[i * self.dim..(i + 1) * self.dim].to_vec()).collect();
        matrix_rank(rows, field)
    }

    pub fn kernel_dim(&self, field: &FieldCtx) -> usize {
        self.dim - self.rank(field)
    }
}

/// Rank of an arbitrary rectangular matrix by Gaussian elimination.
pub fn matrix_rank(mut rows: Vec<Vec<Fq>>, field: &FieldCtx) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv(rows[rank][col]).expect("pivot is nonzero");
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = field.mul(rows[r][col], inv);
            for c in col..ncols {
                let sub = field.mul(factor, rows[rank][c]);
                rows[r][c] = field.sub(rows[r][c], sub);
            }
        }
        rank += 1;
    }
    rank
}

/// `B(t^i, t^j) = 1/2` if `|i - j| = 1`, else `0`, for `0 <= i, j < m`.
pub fn base_bilinear_matrix(m: usize, field: &FieldCtx) -> SymMatrix {
    let half = field.half();
    SymMatrix::from_fn(m, |i, j| if i.abs_diff(j) == 1 { half } else { Fq::ZERO }).expect("symmetric")
}

fn check_monic_degree(a: &Poly, n: usize) -> Result<usize> {
    let k = a.degree().ok_or(Error::ZeroPolynomial)?;
    if !a.is_monic() {
        return Err(Error::NotMonic);
    }
    if k >= n {
        return Err(Error::DegreeBoundViolation { degree: k, bound: n.saturating_sub(1) });
    }
    Ok(k)
}

/// Matrix of `h -> S(a h)` on `deg h <= n - k`, as `A^T B A` where `A` is
/// multiplication by `a` into the `deg <= n` space.
pub fn qa_matrix(a: &Poly, n: usize, field: &FieldCtx) -> Result<SymMatrix> {
    let k = check_monic_degree(a, n)?;
    let m = n - k + 1;
    let base = base_bilinear_matrix(n + 1, field);
    // mult[r][j] = a_{r - j}: column j is the coefficient vector of a t^j.
    let mult = |r: usize, j: usize| if r >= j { a.coeff(r - j) } else { Fq::ZERO };
    // base * mult, (n+1) x m
    let mut bm = vec![Fq::ZERO; (n + 1) * m];
    for r in 0..=n {
        for j in 0..m {
            let mut acc = Fq::ZERO;
            for s in 0..=n {
                acc = field.add(acc, field.mul(base.get(r, s), mult(s, j)));
            }
            bm[r * m + j] = acc;
        }
    }
    SymMatrix::from_fn(m, |i, j| {
        let mut acc = Fq::ZERO;
        for r in 0..=n {
            acc = field.add(acc, field.mul(mult(r, i), bm[r * m + j]));
        }
        acc
    })
}

/// Same matrix from `B_a(t^i, t^j) = (S^(|i-j-1|)(a) + S^(|j-i-1|)(a)) / 2`.
pub fn qa_matrix_entrywise(a: &Poly, n: usize, field: &FieldCtx) -> Result<SymMatrix> {
    let k = check_monic_degree(a, n)?;
    let corr: Vec<Fq> = (0..=n + 1).map(|l| s_ell(a, l, k, field)).collect::<Result<_>>()?;
    let half = field.half();
    let s = |x: isize| corr[x.unsigned_abs()];
    SymMatrix::from_fn(n - k + 1, |i, j| {
        let (i, j) = (i as isize, j as isize);
        field.mul(half, field.add(s(i - j - 1), s(j - i - 1)))
    })
}

/// Matrix of `h -> S(a h) - S(b h)` on `deg h <= n - k`, entrywise.
pub fn bab_matrix(a: &Poly, b: &Poly, n: usize, field: &FieldCtx) -> Result<SymMatrix> {
    let k = check_monic_degree(a, n)?;
    let kb = check_monic_degree(b, n)?;
    if kb != k {
        return Err(Error::DegreeBoundViolation { degree: kb, bound: k });
    }
    if 2 * k >= n {
        return Err(Error::DegreeBoundViolation { degree: 2 * k, bound: n - 1 });
    }
    let ca: Vec<Fq> = (0..=n + 1).map(|l| s_ell(a, l, k, field)).collect::<Result<_>>()?;
    let cb: Vec<Fq> = (0..=n + 1).map(|l| s_ell(b, l, k, field)).collect::<Result<_>>()?;
    let half = field.half();
    SymMatrix::from_fn(n - k + 1, |i, j| {
        let (x, y) = ((i as isize - j as isize - 1).unsigned_abs(), (j as isize - i as isize - 1).unsigned_abs());
        let sa = field.add(ca[x], ca[y]);
        let sb = field.add(cb[x], cb[y]);
        field.mul(half, field.sub(sa, sb))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FormKind {
    Qa,
    Bab,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub form: FormKind,
    pub a: String,
    pub b: Option<String>,
    pub rank: usize,
    pub kernel_dim: usize,
    /// `n - k - 1` for `Qa`, `n - 2k - 1` for `Bab`.
    pub bound: usize,
    /// Rank of the quadratic part once the top coefficient of `h` is fixed to 1.
    pub monic_rank: usize,
    pub pass: bool,
}

impl RankReport {
    pub fn monic_drop(&self) -> usize {
        self.rank - self.monic_rank.min(self.rank)
    }
}

fn report(field: &FieldCtx, n: usize, k: usize, form: FormKind, a: &Poly, b: Option<&Poly>, m: &SymMatrix, bound: usize) -> RankReport {
    let rank = m.rank(field);
    RankReport {
        q: field.q(),
        n,
        k,
        form,
        a: a.to_text(field),
        b: b.map(|b| b.to_text(field)),
        rank,
        kernel_dim: m.dim() - rank,
        bound,
        monic_rank: m.without_last().rank(field),
        pass: rank >= bound,
    }
}

/// Rank of `Q_a` for every `k` with `2k < n` and every monic `a` of degree `k`.
pub fn verify_rank_lemma_qa(field: &FieldCtx, n: usize, cap: u64) -> Result<Vec<RankReport>> {
    let mut out = Vec::new();
    for k in (0..n).filter(|&k| 2 * k < n) {
        let set = PolySetSpec::monic(k);
        let size = set.check_cap(field.q(), cap)?;
        let parts = par::map_chunks(size, |r| {
            r.map(|i| {
                let a = set.nth(field, i);
                let m = qa_matrix(&a, n, field)?;
                Ok(report(field, n, k, FormKind::Qa, &a, None, &m, n - k - 1))
            })
            .collect::<Result<Vec<_>>>()
        });
        for part in parts {
            out.extend(part?);
        }
    }
    Ok(out)
}

/// Monic `b` of degree `k` sharing `a* a` with `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarClass {
    pub a: String,
    pub members: Vec<String>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BabScan {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    /// One report per ordered pair with `a* a != b* b`.
    pub reports: Vec<RankReport>,
    /// For each `a`, the excluded `b` (always including `a` itself).
    pub classes: Vec<StarClass>,
}

/// Rank of `B_{a,b}` over ordered pairs of monic `a, b` of degree `k`.
pub fn verify_rank_lemma_bab(field: &FieldCtx, n: usize, k: usize, cap: u64) -> Result<BabScan> {
    if 2 * k >= n {
        return Err(Error::DegreeBoundViolation { degree: 2 * k, bound: n.saturating_sub(1) });
    }
    let set = PolySetSpec::monic(k);
    let size = set.check_cap(field.q(), cap)?;
    if (size as u128) * (size as u128) > cap as u128 {
        return Err(Error::EnumerationCapExceeded { size: (size as u128).pow(2), cap });
    }
    let polys: Vec<Poly> = (0..size).map(|i| set.nth(field, i)).collect();
    let stars: Vec<Poly> = polys.iter().map(|a| a.reverse(k).map(|r| r.mul(a, field))).collect::<Result<_>>()?;
    let parts = par::map_chunks(size, |r| {
        let mut reports = Vec::new();
        let mut classes = Vec::new();
        for i in r {
            let a = &polys[i as usize];
            let mut members = Vec::new();
            for (j, b) in polys.iter().enumerate() {
                if stars[i as usize] == stars[j] {
                    members.push(b.to_text(field));
                    continue;
                }
                let m = bab_matrix(a, b, n, field)?;
                reports.push(report(field, n, k, FormKind::Bab, a, Some(b), &m, n - 2 * k - 1));
            }
            classes.push(StarClass { a: a.to_text(field), size: members.len(), members });
        }
        Ok((reports, classes))
    });
    let mut scan = BabScan { q: field.q(), n, k, reports: Vec::new(), classes: Vec::new() };
    for part in parts {
        let (r, c): (Vec<RankReport>, Vec<StarClass>) = part?;
        scan.reports.extend(r);
        scan.classes.extend(c);
    }
    Ok(scan)
}
