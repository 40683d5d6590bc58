//! Distribution of `R` over `P(n)` and the verification matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{check_tau_bound, check_tau_second_moment, scan_reversal_counts};
use crate::char_sums::{gauss_scan_all_linear, CharSpec};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq};
use crate::par;
use crate::poly::{is_irreducible, PolyKind, PolySetSpec, DEFAULT_CAP};
use crate::quad_forms::{qa_matrix, verify_rank_lemma_bab, verify_rank_lemma_qa};
use crate::rudin_shapiro::{correlation_vector, rudin_shapiro, s_one, star_product_coefficients};
use crate::vaughan::{default_uv, sigma1, sigma2, vaughan_decompose, MonicTables, VaughanParams, WeightTable};

/// Number of seeded random weights per Vaughan cell.
pub const RANDOM_WEIGHTS: u64 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistTable {
    pub q: u32,
    pub n: usize,
    /// `#{f in P(n) : R(f) = gamma}` keyed by the canonical element string.
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
    /// `total / q` as an exact rational.
    pub expected: String,
    pub max_abs_dev: f64,
    pub pnt_lower: f64,
    pub pnt_upper: f64,
    pub partition_ok: bool,
    pub pnt_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DistTable {
    pub fn expected_ratio(&self) -> Ratio<i128> {
        Ratio::new(self.total as i128, self.q as i128)
    }

    pub fn invariants_hold(&self) -> bool {
        self.partition_ok && self.pnt_ok
    }

    /// Rows `gamma,count,expected,deviation` with exact rationals.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let expected = self.expected_ratio();
        let csv_err = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["gamma", "count", "expected", "deviation"]).map_err(csv_err)?;
        for (gamma, &count) in &self.counts {
            let dev = Ratio::from_integer(count as i128) - expected;
            w.write_record([gamma.as_str(), &count.to_string(), &expected.to_string(), &dev.to_string()]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Counts read back from [`DistTable::to_csv`] output.
    pub fn counts_from_csv(text: &str) -> Result<BTreeMap<String, u64>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["gamma", "count", "expected", "deviation"] {
            return Err(Error::Parse(format!("unexpected header {headers:?}")));
        }
        let mut out = BTreeMap::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let count = rec[1].parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?;
            out.insert(rec[0].to_string(), count);
        }
        Ok(out)
    }
}

/// `q^n / n - 2 q^{n/2} / n <= total <= q^n / n`, checked in integers.
pub fn pnt_bracket_holds(q: u32, n: usize, total: u64) -> bool {
    let qn = (q as u128).pow(n as u32);
    let nt = n as u128 * total as u128;
    if nt > qn {
        return false;
    }
    // q^n - n total <= 2 q^{n/2}  <=>  (q^n - n total)^2 <= 4 q^n
    let gap = qn - nt;
    gap.checked_mul(gap).is_some_and(|g2| g2 <= 4 * qn)
}

/// Tallies `R(f)` over `P(n)`.
pub fn distribution(field: &FieldCtx, n: usize, cap: u64) -> Result<DistTable> {
    if n < 2 {
        return Err(Error::DegreeTooSmall { degree: n, min: 2 });
    }
    let set = PolySetSpec::new(n, PolyKind::MonicIrreducible);
    let size = set.check_cap(field.q(), cap)?;
    let q = field.q() as usize;
    let parts = par::map_chunks(size, |r| {
        let mut counts = vec![0u64; q];
        for i in r {
            let f = set.nth(field, i);
            if is_irreducible(&f, field)? {
                counts[rudin_shapiro(&f, field)?.code() as usize] += 1;
            }
        }
        Ok(counts)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let tally = par::merge_counts(parts, q);

    let mut counts = BTreeMap::new();
    for (x, &c) in field.elements().zip(&tally) {
        counts.insert(field.format_element(x), c);
    }
    let total: u64 = tally.iter().sum();
    let expected = Ratio::new(total as i128, q as i128);
    let max_abs_dev = tally
        .iter()
        .map(|&c| {
            let d = Ratio::from_integer(c as i128) - expected;
            (*d.numer() as f64 / *d.denom() as f64).abs()
        })
        .fold(0.0, f64::max);
    let qf = field.q() as f64;
    let nf = n as f64;
    let pnt_upper = qf.powi(n as i32) / nf;
    let pnt_lower = pnt_upper - 2.0 * qf.powf(nf / 2.0) / nf;
    let partition_ok = total == crate::arith::prime_poly_count(field.q() as u64, n as u32);
    Ok(DistTable {
        q: field.q(),
        n,
        counts,
        total,
        expected: expected.to_string(),
        max_abs_dev,
        pnt_lower,
        pnt_upper,
        partition_ok,
        pnt_ok: pnt_bracket_holds(field.q(), n, total),
        note: (n == 2).then(|| "n = 2 is covered by the Weil bound; no specific bound is asserted".to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub n: usize,
    pub total: u64,
    pub expected: String,
    pub max_abs_dev: f64,
    /// `max_abs_dev / expected`.
    pub relative: f64,
    pub invariants_ok: bool,
}

pub fn deviation_trend(field: &FieldCtx, n_min: usize, n_max: usize, cap: u64) -> Result<Vec<TrendRow>> {
    (n_min.max(2)..=n_max)
        .map(|n| {
            let t = distribution(field, n, cap)?;
            let expected = t.expected_ratio();
            let e = *expected.numer() as f64 / *expected.denom() as f64;
            Ok(TrendRow {
                n,
                total: t.total,
                expected: t.expected.clone(),
                max_abs_dev: t.max_abs_dev,
                relative: if e > 0.0 { t.max_abs_dev / e } else { 0.0 },
                invariants_ok: t.invariants_hold(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    Star,
    LinRed,
    Tau,
    TauMoment,
    Gauss,
    RankQa,
    RankBab,
    Vaughan,
    Distribution,
    Nf,
    All,
}

impl Lemma {
    pub const EACH: [Lemma; 10] = [
        Lemma::Star,
        Lemma::LinRed,
        Lemma::Tau,
        Lemma::TauMoment,
        Lemma::Gauss,
        Lemma::RankQa,
        Lemma::RankBab,
        Lemma::Vaughan,
        Lemma::Distribution,
        Lemma::Nf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Star => "star",
            Lemma::LinRed => "lin-red",
            Lemma::Tau => "tau",
            Lemma::TauMoment => "tau-moment",
            Lemma::Gauss => "gauss",
            Lemma::RankQa => "rank-qa",
            Lemma::RankBab => "rank-bab",
            Lemma::Vaughan => "vaughan",
            Lemma::Distribution => "distribution",
            Lemma::Nf => "nf",
            Lemma::All => "all",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::EACH
            .into_iter()
            .chain([Lemma::All])
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown lemma selector {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: u32,
    pub e: usize,
    pub modulus: Option<Vec<u32>>,
    pub n_min: usize,
    pub n_max: usize,
    pub lemma: Lemma,
    pub format: OutputFormat,
    /// Worker threads; `None` leaves the pool at its default size.
    pub jobs: Option<usize>,
    pub cap: u64,
    pub seed: u64,
    pub epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 3,
            e: 1,
            modulus: None,
            n_min: 1,
            n_max: 6,
            lemma: Lemma::All,
            format: OutputFormat::Json,
            jobs: None,
            cap: DEFAULT_CAP,
            seed: 0,
            epsilon: 0.5,
        }
    }
}

impl RunConfig {
    pub fn field(&self) -> Result<FieldCtx> {
        match &self.modulus {
            Some(m) => FieldCtx::with_modulus(self.p, self.e, m.clone()),
            None => FieldCtx::new(self.p, self.e),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::Parse("cap must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Parse("jobs must be positive".into()));
        }
        if self.n_min > self.n_max {
            return Err(Error::Parse(format!("empty degree range {}..={}", self.n_min, self.n_max)));
        }
        self.field().map(|_| ())
    }
}

/// One verified instance, identified by `(lemma, check, n, params)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub lemma: Lemma,
    pub check: String,
    pub q: u32,
    pub n: usize,
    pub params: String,
    pub cases: u64,
    pub failures: u64,
    pub pass: bool,
    pub detail: Option<String>,
}

impl Cell {
    fn new(lemma: Lemma, check: &str, q: u32, n: usize, params: String) -> Self {
        Cell { lemma, check: check.into(), q, n, params, cases: 0, failures: 0, pass: true, detail: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.pass = false;
            if self.detail.is_none() {
                self.detail = Some(what());
            }
        }
    }

    fn key(&self) -> (Lemma, &str, usize, &str) {
        (self.lemma, &self.check, self.n, &self.params)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub p: u32,
    pub e: usize,
    pub q: u32,
    pub modulus: String,
    pub n_min: usize,
    pub n_max: usize,
    pub lemma: Lemma,
    pub seed: u64,
    pub cells: Vec<Cell>,
    pub failed_cells: usize,
    pub pass: bool,
}

/// Runs the selected checks over `n_min..=n_max`. `Err` means the run could
/// not be carried out (bad field, cap exceeded); mathematical failures are
/// recorded in the cells.
pub fn verify_all(config: &RunConfig) -> Result<VerifyReport> {
    config.validate()?;
    let field = config.field()?;
    let selected: Vec<Lemma> = if config.lemma == Lemma::All { Lemma::EACH.to_vec() } else { vec![config.lemma] };
    let mut cells = Vec::new();
    for lemma in selected {
        match lemma {
            Lemma::Star => cells.extend(verify_star(&field, config)?),
            Lemma::LinRed => cells.extend(verify_lin_red(&field, config)?),
            Lemma::Tau => cells.extend(verify_tau(&field, config)?),
            Lemma::TauMoment => cells.extend(verify_tau_moment(&field, config)?),
            Lemma::Gauss => cells.extend(verify_gauss(&field, config)?),
            Lemma::RankQa => cells.extend(verify_rank_qa(&field, config)?),
            Lemma::RankBab => cells.extend(verify_rank_bab(&field, config)?),
            Lemma::Vaughan => cells.extend(verify_vaughan(&field, config)?),
            Lemma::Distribution => cells.extend(verify_distribution(&field, config)?),
            Lemma::Nf => cells.extend(verify_nf(&field, config)?),
            Lemma::All => unreachable!(),
        }
    }
    cells.sort_by(|a, b| a.key().cmp(&b.key()));
    let failed_cells = cells.iter().filter(|c| !c.pass).count();
    let modulus = field.modulus().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    Ok(VerifyReport {
        p: field.p(),
        e: field.e(),
        q: field.q(),
        modulus,
        n_min: config.n_min,
        n_max: config.n_max,
        lemma: config.lemma,
        seed: config.seed,
        failed_cells,
        pass: failed_cells == 0,
        cells,
    })
}

fn range(config: &RunConfig, min: usize) -> std::ops::RangeInclusive<usize> {
    config.n_min.max(min)..=config.n_max
}

/// Coefficient of `t^{n-l}` in `a* a` against `S^(l)(a)`, every `deg a <= n`.
fn verify_star(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for n in range(config, 0) {
        let set = PolySetSpec::new(n, PolyKind::DegreeAtMost);
        let size = set.check_cap(field.q(), config.cap)?;
        let mut cell = Cell::new(Lemma::Star, "coefficients", field.q(), n, String::new());
        for i in 0..size {
            let a = set.nth(field, i);
            let ok = star_product_coefficients(&a, n, field)? == Some(correlation_vector(&a, n, field)?);
            cell.record(ok, || format!("a={}", a.to_text(field)));
        }
        out.push(cell);
    }
    Ok(out)
}

/// `R(f) = S(f) - f_{n-1}` over `M(n)`.
fn verify_lin_red(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for n in range(config, 2) {
        let set = PolySetSpec::monic(n);
        let size = set.check_cap(field.q(), config.cap)?;
        let mut cell = Cell::new(Lemma::LinRed, "identity", field.q(), n, String::new());
        for i in 0..size {
            let f = set.nth(field, i);
            let ok = rudin_shapiro(&f, field)? == field.sub(s_one(&f, field), f.coeff(n - 1));
            cell.record(ok, || format!("f={}", f.to_text(field)));
        }
        out.push(cell);
    }
    Ok(out)
}

fn verify_tau(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    range(config, 1)
        .map(|n| {
            let rep = check_tau_bound(field, n, config.epsilon, config.cap)?;
            let mut cell = Cell::new(Lemma::Tau, "max", field.q(), n, String::new());
            cell.record(rep.pass, || format!("max tau {} > {}", rep.observed, rep.bound));
            if cell.pass {
                cell.detail = Some(format!("max tau {} <= {}", rep.observed, rep.bound));
            }
            Ok(cell)
        })
        .collect()
}

fn verify_tau_moment(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    range(config, 1)
        .map(|n| {
            let rep = check_tau_second_moment(field, n, config.cap)?;
            let mut cell = Cell::new(Lemma::TauMoment, "second-moment", field.q(), n, String::new());
            cell.record(rep.pass, String::new);
            cell.detail = Some(format!("{} vs {}", rep.observed, rep.bound));
            Ok(cell)
        })
        .collect()
}

/// Every `Q_a` (monic `a`, `2k < n`) against every linear part.
fn verify_gauss(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    let chi = CharSpec::new(field, Fq::ONE);
    let mut out = Vec::new();
    for n in range(config, 1) {
        for k in (0..n).filter(|&k| 2 * k < n) {
            let set = PolySetSpec::monic(k);
            let size = set.check_cap(field.q(), config.cap)?;
            let mut cell = Cell::new(Lemma::Gauss, "bound", field.q(), n, format!("k={k}"));
            let mut worst = 0f64;
            for i in 0..size {
                let a = set.nth(field, i);
                let scan = gauss_scan_all_linear(&qa_matrix(&a, n, field)?, &chi, config.cap)?;
                worst = worst.max(scan.max_magnitude / scan.bound);
                cell.cases += scan.cases;
                if scan.failures > 0 {
                    cell.failures += scan.failures;
                    cell.pass = false;
                    cell.detail.get_or_insert_with(|| format!("a={}", a.to_text(field)));
                }
            }
            if cell.pass {
                cell.detail = Some(format!("max |sum| / bound = {worst:.6}"));
            }
            out.push(cell);
        }
    }
    Ok(out)
}

fn verify_rank_qa(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for n in range(config, 1) {
        let reports = verify_rank_lemma_qa(field, n, config.cap)?;
        for k in (0..n).filter(|&k| 2 * k < n) {
            let params = format!("k={k}");
            let mut rank = Cell::new(Lemma::RankQa, "rank", field.q(), n, params.clone());
            let mut kernel = Cell::new(Lemma::RankQa, "kernel-dim", field.q(), n, params.clone());
            let mut drop = Cell::new(Lemma::RankQa, "monic-drop", field.q(), n, params);
            for r in reports.iter().filter(|r| r.k == k) {
                rank.record(r.pass, || format!("a={} rank {} < {}", r.a, r.rank, r.bound));
                kernel.record(r.kernel_dim <= 2, || format!("a={} kernel dim {}", r.a, r.kernel_dim));
                drop.record(r.monic_drop() <= 1, || format!("a={} rank {} monic rank {}", r.a, r.rank, r.monic_rank));
            }
            out.extend([rank, kernel, drop]);
        }
    }
    Ok(out)
}

fn verify_rank_bab(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for n in range(config, 1) {
        for k in (0..n).filter(|&k| 2 * k < n) {
            let scan = verify_rank_lemma_bab(field, n, k, config.cap)?;
            let mut cell = Cell::new(Lemma::RankBab, "rank", field.q(), n, format!("k={k}"));
            for r in &scan.reports {
                cell.record(r.pass, || format!("a={} b={} rank {} < {}", r.a, r.b.as_deref().unwrap_or(""), r.rank, r.bound));
            }
            out.push(cell);
        }
    }
    Ok(out)
}

/// Identity residuals for `Psi = 1`, `0`, `psi(R)` and seeded random weights.
fn verify_vaughan(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    let chi = CharSpec::new(field, Fq::ONE);
    let mut out = Vec::new();
    for n in range(config, 3) {
        let tables = MonicTables::new(field, n, config.cap)?;
        let mut weights = vec![
            ("one", WeightTable::constant(field, n, config.cap, Complex64::new(1.0, 0.0))?),
            ("zero", WeightTable::constant(field, n, config.cap, Complex64::new(0.0, 0.0))?),
            ("psi-r", WeightTable::rudin_shapiro(&chi, n, config.cap)?),
        ];
        for i in 0..RANDOM_WEIGHTS {
            weights.push(("random", WeightTable::random(field, n, config.cap, config.seed.wrapping_add(i))?));
        }
        let qn = (field.q() as f64).powi(n as i32);
        for params in VaughanParams::all_for(n) {
            let mut cell = Cell::new(Lemma::Vaughan, "identity", field.q(), n, format!("u={},v={}", params.u, params.v));
            let mut worst = 0f64;
            for (name, w) in &weights {
                let rep = vaughan_decompose(field, &tables, &params, w)?;
                worst = worst.max(rep.residual / (1.0 + rep.lhs.norm()));
                cell.record(rep.identity_holds(), || format!("{name}: residual {:e}", rep.residual));
                if *name == "one" {
                    let total = rep.s1 - rep.s2 + rep.s3;
                    cell.record((total - Complex64::new(qn, 0.0)).norm() < 1e-9 * (1.0 + qn), || format!("one: S1-S2+S3 = {total}"));
                }
            }
            if cell.pass {
                cell.detail = Some(format!("max relative residual {worst:.3e}"));
            }
            out.push(cell);
        }
        if let Ok((u, v)) = default_uv(n) {
            let params = VaughanParams::new(n, u, v)?;
            for rep in [sigma1(field, &params, &chi, config.cap)?, sigma2(field, &params, &chi, config.cap)?] {
                let mut cell = Cell::new(Lemma::Vaughan, &rep.which, field.q(), n, format!("u={u},v={v}"));
                cell.cases = 1;
                cell.detail = Some(format!("value {:.6} bound {:.6} ratio {:.6} (reported only)", rep.value, rep.bound, rep.ratio));
                out.push(cell);
            }
        }
    }
    Ok(out)
}

fn verify_distribution(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    range(config, 2)
        .map(|n| {
            let t = distribution(field, n, config.cap)?;
            let mut cell = Cell::new(Lemma::Distribution, "invariants", field.q(), n, String::new());
            cell.record(t.partition_ok, || format!("sum of counts {} differs from #P(n)", t.total));
            cell.record(t.pnt_ok, || format!("total {} outside [{}, {}]", t.total, t.pnt_lower, t.pnt_upper));
            Ok(cell)
        })
        .collect()
}

/// `N(f) <= 2^n` and `N(f) <= 2 tau(b)` for every `f` of degree `2n`.
fn verify_nf(field: &FieldCtx, config: &RunConfig) -> Result<Vec<Cell>> {
    range(config, 1)
        .map(|n| {
            let mut cell = Cell::new(Lemma::Nf, "count", field.q(), n, String::new());
            let mut max = 0;
            for r in scan_reversal_counts(field, n, config.cap)? {
                max = max.max(r.observed);
                cell.record(r.pass, || format!("f={} N={}", r.f, r.observed));
            }
            if cell.pass {
                cell.detail = Some(format!("max N(f) = {max}"));
            }
            Ok(cell)
        })
        .collect()
}
