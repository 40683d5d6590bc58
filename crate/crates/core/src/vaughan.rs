//! Vaughan's identity over `F_q[t]`.
//!
//! For `deg f = n > v`,
//!
//! ```text
//! Lambda(f) = sum_{a | f, deg a <= u} mu(a) deg(f/a)
//!           - sum_{ab | f, deg a <= u, deg b <= v} mu(a) Lambda(b)
//!           + sum_{ab | f, deg a > u, deg b > v} mu(a) Lambda(b)
//! ```
//!
//! and summing against a weight `Psi` over `M(n)` gives `S1 - S2 + S3`. All
//! sums run over monic polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::arith::{mobius, von_mangoldt};
use crate::char_sums::{CharSpec, CompensatedSum, ComplexVal};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::par;
use crate::poly::{monic_index, PolySetSpec, Poly};
use crate::rudin_shapiro::rudin_shapiro;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VaughanParams {
    pub n: usize,
    pub u: usize,
    pub v: usize,
}

impl VaughanParams {
    pub fn new(n: usize, u: usize, v: usize) -> Result<Self> {
        if u < 1 || v < 1 || u > n || v > n || u + v >= n {
            return Err(Error::InvalidCutoffs { n, u, v });
        }
        Ok(VaughanParams { n, u, v })
    }

    /// Every admissible `(u, v)` for `n`, in lexicographic order.
    pub fn all_for(n: usize) -> Vec<VaughanParams> {
        let mut out = Vec::new();
        for u in 1..n {
            for v in 1..n {
                if let Ok(p) = Self::new(n, u, v) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// `u = round(3n/14)`, `v = round(10n/14)` (halves round up), then `v` and
/// after it `u` are lowered until `u + v < n`, keeping both at least 1.
pub fn default_uv(n: usize) -> Result<(usize, usize)> {
    let mut u = ((3 * n + 7) / 14).max(1);
    let mut v = ((10 * n + 7) / 14).max(1);
    while u + v >= n {
        if v > 1 {
            v -= 1;
        } else if u > 1 {
            u -= 1;
        } else {
            return Err(Error::InvalidDegree(n));
        }
    }
    Ok((u, v))
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct C {
        re: f64,
        im: f64,
    }
    C { re: z.re, im: z.im }.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VaughanReport {
    pub q: u32,
    pub n: usize,
    pub u: usize,
    pub v: usize,
    #[serde(serialize_with = "ser_complex")]
    pub lhs: ComplexVal,
    #[serde(serialize_with = "ser_complex")]
    pub s1: ComplexVal,
    #[serde(serialize_with = "ser_complex")]
    pub s2: ComplexVal,
    #[serde(serialize_with = "ser_complex")]
    pub s3: ComplexVal,
    pub residual: f64,
    pub sigma1: Option<f64>,
    pub sigma1_bound: Option<f64>,
    pub sigma2: Option<f64>,
    pub sigma2_bound: Option<f64>,
}

impl VaughanReport {
    pub fn identity_holds(&self) -> bool {
        self.residual < 1e-9 * (1.0 + self.lhs.norm())
    }
}

/// Monic polynomials of degree `0..=n` with their Mobius and von Mangoldt
/// values, indexed by degree and scan index.
pub struct MonicTables {
    q: u32,
    pub polys: Vec<Vec<Poly>>,
    pub mu: Vec<Vec<i8>>,
    pub lambda: Vec<Vec<u32>>,
}

impl MonicTables {
    pub fn new(field: &FieldCtx, n: usize, cap: u64) -> Result<Self> {
        let mut polys = Vec::with_capacity(n + 1);
        let mut mu = Vec::with_capacity(n + 1);
        let mut lambda = Vec::with_capacity(n + 1);
        for d in 0..=n {
            let set = PolySetSpec::monic(d);
            let size = set.check_cap(field.q(), cap)?;
            let ps: Vec<Poly> = (0..size).map(|i| set.nth(field, i)).collect();
            let parts = par::map_chunks(size, |r| {
                r.map(|i| {
                    let p = &ps[i as usize];
                    Ok((mobius(p, field)?, von_mangoldt(p, field)?))
                })
                .collect::<Result<Vec<_>>>()
            });
            let mut m = Vec::with_capacity(size as usize);
            let mut l = Vec::with_capacity(size as usize);
            for part in parts {
                for (a, b) in part? {
                    m.push(a);
                    l.push(b);
                }
            }
            polys.push(ps);
            mu.push(m);
            lambda.push(l);
        }
        Ok(MonicTables { q: field.q(), polys, mu, lambda })
    }

    pub fn n(&self) -> usize {
        self.polys.len() - 1
    }

    fn index(&self, p: &Poly) -> usize {
        monic_index(p, self.q) as usize
    }
}

/// Weight values on `M(n)`, indexed by scan order.
pub struct WeightTable(Vec<Complex64>);

impl WeightTable {
    pub fn from_fn(field: &FieldCtx, n: usize, cap: u64, psi: impl Fn(&Poly) -> Complex64) -> Result<Self> {
        let set = PolySetSpec::monic(n);
        let size = set.check_cap(field.q(), cap)?;
        Ok(WeightTable((0..size).map(|i| psi(&set.nth(field, i))).collect()))
    }

    pub fn constant(field: &FieldCtx, n: usize, cap: u64, value: Complex64) -> Result<Self> {
        Self::from_fn(field, n, cap, |_| value)
    }

    /// `psi(R(f))`, with `psi(0)` below degree 2.
    pub fn rudin_shapiro(chi: &CharSpec, n: usize, cap: u64) -> Result<Self> {
        let field = chi.field();
        Self::from_fn(field, n, cap, |f| match rudin_shapiro(f, field) {
            Ok(r) => chi.eval(r),
            Err(_) => chi.eval(crate::field::Fq::ZERO),
        })
    }

    /// Independent uniform draws in the closed unit disc.
    pub fn random(field: &FieldCtx, n: usize, cap: u64, seed: u64) -> Result<Self> {
        let size = PolySetSpec::monic(n).check_cap(field.q(), cap)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(WeightTable(
            (0..size)
                .map(|_| {
                    let r: f64 = rng.random::<f64>().sqrt();
                    let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    Complex64::from_polar(r, theta)
                })
                .collect(),
        ))
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Complex64 {
        self.0[idx]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }
}

fn check_tables(tables: &MonicTables, weight: &WeightTable, params: &VaughanParams) -> Result<()> {
    if tables.n() < params.n {
        return Err(Error::DegreeBoundViolation { degree: params.n, bound: tables.n() });
    }
    let expected = tables.polys[params.n].len();
    if weight.0.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: weight.0.len() });
    }
    Ok(())
}

/// `sum_{deg c = n - deg z} Psi(z c)` for monic `z`.
fn type_one_inner(tables: &MonicTables, weight: &WeightTable, z: &Poly, n: usize, field: &FieldCtx) -> Complex64 {
    let dz = z.degree().expect("monic");
    tables.polys[n - dz].iter().map(|c| weight.get(tables.index(&z.mul(c, field)))).collect::<CompensatedSum>().value()
}

pub fn lambda_sum(tables: &MonicTables, weight: &WeightTable, n: usize) -> Complex64 {
    tables.lambda[n].iter().zip(weight.values()).map(|(&l, &w)| w * l as f64).collect::<CompensatedSum>().value()
}

pub fn s1(tables: &MonicTables, weight: &WeightTable, params: &VaughanParams, field: &FieldCtx) -> Complex64 {
    let n = params.n;
    let mut acc = CompensatedSum::default();
    for da in 0..=params.u {
        for (a, &mu) in tables.polys[da].iter().zip(&tables.mu[da]) {
            if mu == 0 {
                continue;
            }
            // deg b = n - deg a for every b in the inner sum.
            let inner = type_one_inner(tables, weight, a, n, field);
            acc.add(inner * (mu as f64 * (n - da) as f64));
        }
    }
    acc.value()
}

/// `S2` with the coefficient `sum_{ab = z} mu(a) Lambda(b)` gathered per
/// product `z` first.
pub fn s2(tables: &MonicTables, weight: &WeightTable, params: &VaughanParams, field: &FieldCtx) -> Complex64 {
    let n = params.n;
    let mut coeff: BTreeMap<Poly, i64> = BTreeMap::new();
    for da in 0..=params.u {
        for db in 0..=params.v.min(n - da) {
            for (a, &mu) in tables.polys[da].iter().zip(&tables.mu[da]) {
                if mu == 0 {
                    continue;
                }
                for (b, &lam) in tables.polys[db].iter().zip(&tables.lambda[db]) {
                    if lam == 0 {
                        continue;
                    }
                    *coeff.entry(a.mul(b, field)).or_default() += mu as i64 * lam as i64;
                }
            }
        }
    }
    coeff
        .iter()
        .filter(|(_, &w)| w != 0)
        .map(|(z, &w)| type_one_inner(tables, weight, z, n, field) * w as f64)
        .collect::<CompensatedSum>()
        .value()
}

/// `S2` as a literal triple sum.
pub fn s2_naive(tables: &MonicTables, weight: &WeightTable, params: &VaughanParams, field: &FieldCtx) -> Complex64 {
    triple_sum(tables, weight, params.n, field, |da, db| da <= params.u && db <= params.v)
}

/// `S3` as a literal triple sum over `deg a > u`, `deg b > v`.
pub fn s3(tables: &MonicTables, weight: &WeightTable, params: &VaughanParams, field: &FieldCtx) -> Complex64 {
    triple_sum(tables, weight, params.n, field, |da, db| da > params.u && db > params.v)
}

fn triple_sum(
    tables: &MonicTables,
    weight: &WeightTable,
    n: usize,
    field: &FieldCtx,
    region: impl Fn(usize, usize) -> bool,
) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for da in 0..=n {
        for db in 0..=n - da {
            if !region(da, db) {
                continue;
            }
            let dc = n - da - db;
            for (a, &mu) in tables.polys[da].iter().zip(&tables.mu[da]) {
                if mu == 0 {
                    continue;
                }
                for (b, &lam) in tables.polys[db].iter().zip(&tables.lambda[db]) {
                    if lam == 0 {
                        continue;
                    }
                    let ab = a.mul(b, field);
                    let coef = mu as f64 * lam as f64;
                    for c in &tables.polys[dc] {
                        acc.add(weight.get(tables.index(&ab.mul(c, field))) * coef);
                    }
                }
            }
        }
    }
    acc.value()
}

/// Computes every component and the residual `|lhs - (S1 - S2 + S3)|`.
pub fn vaughan_decompose(
    field: &FieldCtx,
    tables: &MonicTables,
    params: &VaughanParams,
    weight: &WeightTable,
) -> Result<VaughanReport> {
    check_tables(tables, weight, params)?;
    let lhs = lambda_sum(tables, weight, params.n);
    let s1 = s1(tables, weight, params, field);
    let s2 = s2(tables, weight, params, field);
    let s3 = s3(tables, weight, params, field);
    let residual = (lhs - (s1 - s2 + s3)).norm();
    Ok(VaughanReport {
        q: field.q(),
        n: params.n,
        u: params.u,
        v: params.v,
        lhs,
        s1,
        s2,
        s3,
        residual,
        sigma1: None,
        sigma1_bound: None,
        sigma2: None,
        sigma2_bound: None,
    })
}

/// Monic triples `(a, b, c)` with `deg abc = n`, sorted by which of the
/// `S2` and `S3` index regions they fall in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub total: u64,
    pub s2_only: u64,
    pub s3_only: u64,
    pub both: u64,
    pub neither: u64,
}

pub fn triple_region_counts(tables: &MonicTables, params: &VaughanParams) -> RegionCounts {
    let n = params.n;
    let mut rc = RegionCounts::default();
    for da in 0..=n {
        for db in 0..=n - da {
            let dc = n - da - db;
            let in2 = da <= params.u && db <= params.v;
            let in3 = da > params.u && db > params.v;
            for _a in &tables.polys[da] {
                for _b in &tables.polys[db] {
                    for _c in &tables.polys[dc] {
                        rc.total += 1;
                        match (in2, in3) {
                            (true, true) => rc.both += 1,
                            (true, false) => rc.s2_only += 1,
                            (false, true) => rc.s3_only += 1,
                            (false, false) => rc.neither += 1,
                        }
                    }
                }
            }
        }
    }
    rc
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaReport {
    pub q: u32,
    pub n: usize,
    pub u: usize,
    pub v: usize,
    pub which: String,
    pub value: f64,
    /// Bound expression without its implied constant; reported only.
    pub bound: f64,
    pub ratio: f64,
    /// For `Sigma2`: the maximising `i` and `g1`.
    pub argmax_i: Option<usize>,
    pub argmax_g1: Option<String>,
}

/// `R(g h)` phases for every monic `g` of degree `dg` and `h` of degree `dh`.
fn phase_table(field: &FieldCtx, chi: &CharSpec, dg: usize, dh: usize, cap: u64) -> Result<Vec<Vec<u32>>> {
    let gs = PolySetSpec::monic(dg);
    let hs = PolySetSpec::monic(dh);
    let ng = gs.check_cap(field.q(), cap)?;
    let nh = hs.check_cap(field.q(), cap)?;
    let parts = par::map_chunks(ng, |r| {
        r.map(|gi| {
            let g = gs.nth(field, gi);
            (0..nh).map(|hi| Ok(chi.phase(rudin_shapiro(&g.mul(&hs.nth(field, hi), field), field)?))).collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(ng as usize);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

fn sum_from_phases(chi: &CharSpec, phases: impl Iterator<Item = u32>) -> Complex64 {
    let mut counts = vec![0u64; chi.field().p() as usize];
    for ph in phases {
        counts[ph as usize] += 1;
    }
    chi.from_phase_counts(&counts)
}

/// `Sigma1 = sum_{deg g <= u+v} |sum_{deg h = n - deg g} psi(R(g h))|`.
pub fn sigma1(field: &FieldCtx, params: &VaughanParams, chi: &CharSpec, cap: u64) -> Result<SigmaReport> {
    chi.require_nontrivial()?;
    let n = params.n;
    let mut total = CompensatedSum::default();
    for dg in 0..=params.u + params.v {
        let table = phase_table(field, chi, dg, n - dg, cap)?;
        for row in &table {
            total.add(Complex64::new(sum_from_phases(chi, row.iter().copied()).norm(), 0.0));
        }
    }
    let value = total.value().re;
    let bound = (field.q() as f64).powf((n + params.u + params.v + 2) as f64 / 2.0);
    Ok(SigmaReport { q: field.q(), n, u: params.u, v: params.v, which: "sigma1".into(), value, bound, ratio: value / bound, argmax_i: None, argmax_g1: None })
}

/// `Sigma2 = max_{v <= i <= n-u} max_{g1} sum_{g2} |sum_h psi(R(h g1)) conj psi(R(h g2))|`
/// with `deg g1 = deg g2 = n - i`, `deg h = i`.
pub fn sigma2(field: &FieldCtx, params: &VaughanParams, chi: &CharSpec, cap: u64) -> Result<SigmaReport> {
    chi.require_nontrivial()?;
    let n = params.n;
    let p = field.p();
    let mut best: Option<(f64, usize, u64)> = None;
    for i in params.v..=n - params.u {
        let table = phase_table(field, chi, n - i, i, cap)?;
        let pairs = (table.len() as u128).pow(2) * table.first().map_or(0, |r| r.len()) as u128;
        if pairs > cap as u128 {
            return Err(Error::EnumerationCapExceeded { size: pairs, cap });
        }
        let rows = par::map_chunks(table.len() as u64, |r| {
            r.map(|g1| {
                let row1 = &table[g1 as usize];
                table
                    .iter()
                    .map(|row2| sum_from_phases(chi, row1.iter().zip(row2).map(|(&x, &y)| (x + p - y) % p)).norm())
                    .map(|m| Complex64::new(m, 0.0))
                    .collect::<CompensatedSum>()
                    .value()
                    .re
            })
            .collect::<Vec<f64>>()
        });
        for (g1, val) in rows.into_iter().flatten().enumerate() {
            if best.is_none_or(|(b, _, _)| val > b) {
                best = Some((val, i, g1 as u64));
            }
        }
    }
    let (value, i, g1) = best.expect("v <= n - u since u + v < n");
    let q = field.q() as f64;
    let nf = n as f64;
    let bound = q.powf(15.0 * nf / 14.0 - params.u as f64) + q.powf(1.5 * nf - params.v as f64 + 1.0);
    let g1_text = PolySetSpec::monic(n - i).nth(field, g1).to_text(field);
    Ok(SigmaReport {
        q: field.q(),
        n,
        u: params.u,
        v: params.v,
        which: "sigma2".into(),
        value,
        bound,
        ratio: value / bound,
        argmax_i: Some(i),
        argmax_g1: Some(g1_text),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fq;
    use crate::poly::DEFAULT_CAP;

    fn f3() -> FieldCtx {
        FieldCtx::new(3, 1).unwrap()
    }

    #[test]
    fn uv_choice() {
        assert_eq!(default_uv(14).unwrap(), (3, 10));
        assert_eq!(default_uv(28).unwrap(), (6, 20));
        assert_eq!(default_uv(5).unwrap(), (1, 3));
        assert_eq!(default_uv(3).unwrap(), (1, 1));
        assert_eq!(default_uv(2), Err(Error::InvalidDegree(2)));
        for n in 3..60 {
            let (u, v) = default_uv(n).unwrap();
            assert!(VaughanParams::new(n, u, v).is_ok());
        }
    }

    #[test]
    fn params_validation() {
        assert!(VaughanParams::new(5, 2, 2).is_ok());
        assert!(VaughanParams::new(5, 2, 3).is_err());
        assert!(VaughanParams::new(5, 0, 2).is_err());
        assert_eq!(VaughanParams::all_for(4).len(), 3);
    }

    #[test]
    fn constant_weight_gives_q_to_the_n() {
        let f = f3();
        let tables = MonicTables::new(&f, 5, DEFAULT_CAP).unwrap();
        let w = WeightTable::constant(&f, 5, DEFAULT_CAP, Complex64::new(1.0, 0.0)).unwrap();
        let params = VaughanParams::new(5, 2, 2).unwrap();
        let rep = vaughan_decompose(&f, &tables, &params, &w).unwrap();
        assert!((rep.lhs - Complex64::new(243.0, 0.0)).norm() < 1e-9);
        assert!(((rep.s1 - rep.s2 + rep.s3) - Complex64::new(243.0, 0.0)).norm() < 1e-9);
        assert!(rep.identity_holds());
    }

    #[test]
    fn zero_weight_gives_zero() {
        let f = f3();
        let tables = MonicTables::new(&f, 4, DEFAULT_CAP).unwrap();
        let w = WeightTable::constant(&f, 4, DEFAULT_CAP, Complex64::new(0.0, 0.0)).unwrap();
        let rep = vaughan_decompose(&f, &tables, &VaughanParams::new(4, 1, 1).unwrap(), &w).unwrap();
        for z in [rep.lhs, rep.s1, rep.s2, rep.s3] {
            assert_eq!(z.norm(), 0.0);
        }
    }

    #[test]
    fn s2_aggregation_matches_triple_loop() {
        let f = f3();
        let tables = MonicTables::new(&f, 5, DEFAULT_CAP).unwrap();
        let w = WeightTable::random(&f, 5, DEFAULT_CAP, 7).unwrap();
        for params in VaughanParams::all_for(5) {
            let a = s2(&tables, &w, &params, &f);
            let b = s2_naive(&tables, &w, &params, &f);
            assert!((a - b).norm() < 1e-9, "{params:?}");
        }
    }

    #[test]
    fn rudin_shapiro_weight_identity() {
        let f = f3();
        let chi = CharSpec::new(&f, Fq::ONE);
        let tables = MonicTables::new(&f, 4, DEFAULT_CAP).unwrap();
        let w = WeightTable::rudin_shapiro(&chi, 4, DEFAULT_CAP).unwrap();
        let rep = vaughan_decompose(&f, &tables, &VaughanParams::new(4, 1, 1).unwrap(), &w).unwrap();
        assert!(rep.residual < 1e-9);
    }

    #[test]
    fn regions_are_disjoint() {
        let f = f3();
        let tables = MonicTables::new(&f, 5, DEFAULT_CAP).unwrap();
        for params in VaughanParams::all_for(5) {
            let rc = triple_region_counts(&tables, &params);
            assert_eq!(rc.both, 0);
            assert_eq!(rc.total, rc.s2_only + rc.s3_only + rc.neither);
            // 21 degree triples summing to 5, each with 3^5 polynomial triples.
            assert_eq!(rc.total, 21 * 243);
        }
    }

    #[test]
    fn random_weights_are_bounded_and_seeded() {
        let f = f3();
        let a = WeightTable::random(&f, 3, DEFAULT_CAP, 1).unwrap();
        let b = WeightTable::random(&f, 3, DEFAULT_CAP, 1).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().iter().all(|z| z.norm() <= 1.0));
    }

    #[test]
    fn sigma_basics() {
        let f = f3();
        let chi = CharSpec::new(&f, Fq::ONE);
        let params = VaughanParams::new(5, 1, 2).unwrap();
        let s2 = sigma2(&f, &params, &chi, DEFAULT_CAP).unwrap();
        let i = s2.argmax_i.unwrap();
        assert!((2..=4).contains(&i));
        assert!(s2.value >= 9.0 - 1e-9);
        let trivial = CharSpec::new(&f, Fq::ZERO);
        assert_eq!(sigma1(&f, &params, &trivial, DEFAULT_CAP), Err(Error::TrivialCharacter));
        let small = sigma1(&f, &VaughanParams::new(5, 1, 1).unwrap(), &chi, DEFAULT_CAP).unwrap();
        let large = sigma1(&f, &VaughanParams::new(5, 2, 2).unwrap(), &chi, DEFAULT_CAP).unwrap();
        assert!(large.value >= small.value);
    }
}
