//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.
//!
//! Quantities are recomputed with plain integer arithmetic mod p in this
//! file wherever that is cheap, and the library has to agree with them.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rsff_core::arith::{count_reversal_solutions, prime_poly_count, scan_reversal_counts, tau};
use rsff_core::char_sums::{gauss_scan_all_linear, CharSpec};
use rsff_core::experiments::{distribution, pnt_bracket_holds, verify_all, Lemma, RunConfig};
use rsff_core::quad_forms::{bab_matrix, qa_matrix, SymMatrix};
use rsff_core::rudin_shapiro::{rudin_shapiro, s_ell, star_product_coefficients};
use rsff_core::vaughan::{lambda_sum, s2_naive, vaughan_decompose, MonicTables, VaughanParams, WeightTable};
use rsff_core::{FieldCtx, Fq, Poly, DEFAULT_CAP};

// ---- integer oracle, coefficient vectors constant term first ----

fn monic_vecs(p: u32, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (p as usize).pow(d as u32);
    for mut i in 0..total {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push((i % p as usize) as u32);
            i /= p as usize;
        }
        v.push(1);
        out.push(v);
    }
    out
}

fn vecs_len(p: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for mut i in 0..(p as usize).pow(len as u32) {
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push((i % p as usize) as u32);
            i /= p as usize;
        }
        out.push(v);
    }
    out
}

fn conv(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Does monic `g` divide `f`?
fn divides(g: &[u32], f: &[u32], p: u32) -> bool {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    if r.len() < g.len() {
        return trim(r).is_empty();
    }
    for i in (dg..r.len()).rev() {
        let c = r[i];
        if c != 0 {
            for j in 0..=dg {
                r[i - dg + j] = (r[i - dg + j] + p * p - c * g[j] % p) % p;
            }
        }
    }
    r[..dg].iter().all(|&x| x == 0)
}

/// `sum_i f_i f_{i-1}` over the whole vector.
fn s_oracle(f: &[u32], p: u32) -> u32 {
    (1..f.len()).map(|i| f[i] * f[i - 1]).sum::<u32>() % p
}

fn to_poly(field: &FieldCtx, v: &[u32]) -> Poly {
    Poly::from_coeffs(v.iter().map(|&c| field.from_int(c as i64)).collect())
}

fn from_fq(x: Fq) -> u32 {
    x.code()
}

fn rank_mod_p(mut rows: Vec<Vec<u32>>, p: u32) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|&x| x * rows[rank][col] % p == 1).unwrap();
        for c in 0..ncols {
            rows[rank][c] = rows[rank][c] * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..ncols {
                    rows[r][c] = (rows[r][c] + p * p - f * rows[rank][c]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Gram matrix of `h -> S(a h)` on `deg h <= n - k` by polarisation.
fn qa_oracle(a: &[u32], n: usize, p: u32) -> Vec<Vec<u32>> {
    let m = n - (a.len() - 1) + 1;
    let q = |h: &[u32]| s_oracle(&conv(a, h, p), p);
    let e = |i: usize| (0..m).map(|j| (j == i) as u32).collect::<Vec<_>>();
    let half = p.div_ceil(2);
    let mut g = vec![vec![0u32; m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut s = e(i);
            s[j] = (s[j] + 1) % p;
            let b = (q(&s) + 2 * p - q(&e(i)) - q(&e(j))) % p;
            g[i][j] = b * half % p;
        }
    }
    g
}

fn matrix_as_ints(m: &SymMatrix) -> Vec<Vec<u32>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| from_fq(m.get(i, j))).collect()).collect()
}

fn without_last(g: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let m = g.len() - 1;
    g[..m].iter().map(|r| r[..m].to_vec()).collect()
}

// ---- harness ----

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome { pass, summary: summary.into() }
}

fn field(p: u32) -> FieldCtx {
    FieldCtx::new(p, 1).unwrap()
}

fn c1_star_coefficients() -> Outcome {
    let mut cases = 0u64;
    let mut failures = Vec::new();
    for p in [3, 5] {
        let f = field(p);
        for n in 0..=5 {
            for a in vecs_len(p, n + 1) {
                cases += 1;
                let rev: Vec<u32> = a.iter().rev().copied().collect();
                let prod = conv(&rev, &a, p);
                let ap = to_poly(&f, &a);
                let lib = star_product_coefficients(&ap, n, &f).unwrap();
                let ok = (0..=n).all(|l| {
                    let s = from_fq(s_ell(&ap, l, n, &f).unwrap());
                    prod[n - l] == s && prod[n + l] == s
                }) && lib.is_some_and(|cv| cv.values.iter().enumerate().all(|(l, &v)| from_fq(v) == prod[n - l]));
                if !ok {
                    failures.push(format!("q={p} n={n} a={a:?}"));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{cases} polynomials, {} failures {:?}", failures.len(), failures.first()))
}

fn c2_lin_red() -> Outcome {
    let f = field(3);
    let mut cases = 0;
    let mut failures = 0;
    for n in 2..=6 {
        for v in monic_vecs(3, n) {
            cases += 1;
            let expected = (s_oracle(&v, 3) + 3 - v[n - 1]) % 3;
            if from_fq(rudin_shapiro(&to_poly(&f, &v), &f).unwrap()) != expected {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{cases} monic polynomials of degree 2..6, {failures} failures"))
}

fn c3_gauss() -> Outcome {
    let p = 3u32;
    let f = field(p);
    let chi = CharSpec::new(&f, Fq::ONE);
    let zeta: Vec<Complex64> = (0..p).map(|c| Complex64::from_polar(1.0, std::f64::consts::TAU * c as f64 / p as f64)).collect();
    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut disagreements = 0u64;
    let mut worst = 0f64;
    for n in 1..=6 {
        for k in (0..n).filter(|&k| 2 * k < n) {
            for a in monic_vecs(p, k) {
                let m = n - k + 1;
                let g = qa_oracle(&a, n, p);
                let lib = qa_matrix(&to_poly(&f, &a), n, &f).unwrap();
                if matrix_as_ints(&lib) != g {
                    disagreements += 1;
                }
                let rank = rank_mod_p(g, p);
                let bound = (p as f64).powf(m as f64 - rank as f64 / 2.0);
                let hs = vecs_len(p, m);
                let qs: Vec<u32> = hs.iter().map(|h| s_oracle(&conv(&a, h, p), p)).collect();
                for l in hs.iter().skip(1) {
                    let mut counts = [0u64; 5];
                    for (h, &qh) in hs.iter().zip(&qs) {
                        let lin: u32 = l.iter().zip(h).map(|(x, y)| x * y).sum();
                        counts[((qh + lin) % p) as usize] += 1;
                    }
                    let sum: Complex64 = (0..p as usize).map(|c| zeta[c] * counts[c] as f64).sum();
                    cases += 1;
                    worst = worst.max(sum.norm() / bound);
                    if sum.norm() > bound + 1e-6 {
                        failures += 1;
                    }
                }
                let scan = gauss_scan_all_linear(&lib, &chi, DEFAULT_CAP).unwrap();
                if scan.failures != 0 || scan.rank != rank {
                    disagreements += 1;
                }
            }
        }
    }
    outcome(
        failures == 0 && disagreements == 0,
        format!("{cases} (form, linear part) pairs, {failures} failures, {disagreements} library disagreements, max |sum|/bound {worst:.4}"),
    )
}

fn c4_rank() -> Vec<(String, Outcome)> {
    let mut rank_fail = Vec::new();
    let mut kernel_fail = Vec::new();
    let mut drop_fail = Vec::new();
    let mut disagreements = 0;
    let mut forms = 0;
    for p in [3u32, 5] {
        let f = field(p);
        for n in 1..=8 {
            for k in (0..n).filter(|&k| 2 * k < n) {
                for a in monic_vecs(p, k) {
                    forms += 1;
                    let g = qa_oracle(&a, n, p);
                    let lib = qa_matrix(&to_poly(&f, &a), n, &f).unwrap();
                    if matrix_as_ints(&lib) != g {
                        disagreements += 1;
                    }
                    let rank = rank_mod_p(g.clone(), p);
                    let kernel = g.len() - rank;
                    let monic_rank = rank_mod_p(without_last(&g), p);
                    if rank != lib.rank(&f) {
                        disagreements += 1;
                    }
                    let tag = || format!("q={p} n={n} a={a:?}");
                    if rank + k + 1 < n {
                        rank_fail.push(format!("{} rank {rank}", tag()));
                    }
                    if kernel > 2 {
                        kernel_fail.push(format!("{} kernel {kernel}", tag()));
                    }
                    if rank > monic_rank + 1 {
                        drop_fail.push(format!("{} rank {rank} monic {monic_rank}", tag()));
                    }
                }
            }
        }
    }
    let line = |fails: &Vec<String>, what: &str| {
        outcome(
            fails.is_empty() && disagreements == 0,
            format!("{forms} forms, {} violations of {what}, {disagreements} library disagreements; first: {:?}", fails.len(), fails.first()),
        )
    };
    let mut out = vec![
        ("rank of Q_a >= n-k-1".to_string(), line(&rank_fail, "the rank bound")),
        ("kernel of Q_a has dim <= 2".to_string(), line(&kernel_fail, "the kernel bound")),
        ("monic slice drops rank by <= 1".to_string(), line(&drop_fail, "the monic-slice bound")),
    ];

    let p = 3u32;
    let f = field(p);
    let mut pairs = 0;
    let mut bab_fail = Vec::new();
    for n in 1..=7 {
        for k in (0..n).filter(|&k| 2 * k < n) {
            let polys = monic_vecs(p, k);
            let stars: Vec<Vec<u32>> = polys.iter().map(|a| conv(&a.iter().rev().copied().collect::<Vec<_>>(), a, p)).collect();
            for (i, a) in polys.iter().enumerate() {
                let ga = qa_oracle(a, n, p);
                for (j, b) in polys.iter().enumerate() {
                    if stars[i] == stars[j] {
                        continue;
                    }
                    pairs += 1;
                    let gb = qa_oracle(b, n, p);
                    let diff: Vec<Vec<u32>> =
                        ga.iter().zip(&gb).map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| (x + p - y) % p).collect()).collect();
                    let lib = bab_matrix(&to_poly(&f, a), &to_poly(&f, b), n, &f).unwrap();
                    if matrix_as_ints(&lib) != diff {
                        bab_fail.push(format!("library matrix differs n={n} a={a:?} b={b:?}"));
                    }
                    let rank = rank_mod_p(diff, p);
                    if rank + 2 * k + 1 < n {
                        bab_fail.push(format!("n={n} a={a:?} b={b:?} rank {rank}"));
                    }
                }
            }
        }
    }
    out.push((
        "rank of B_ab >= n-2k-1 when a*a != b*b".to_string(),
        outcome(bab_fail.is_empty(), format!("{pairs} pairs, {} failures; first: {:?}", bab_fail.len(), bab_fail.first())),
    ));
    out
}

fn c5_vaughan() -> Outcome {
    let f = field(3);
    let chi = CharSpec::new(&f, Fq::ONE);
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut worst = 0f64;
    for n in 4..=6 {
        let tables = MonicTables::new(&f, n, DEFAULT_CAP).unwrap();
        let qn = 3f64.powi(n as i32);
        let one = WeightTable::constant(&f, n, DEFAULT_CAP, Complex64::new(1.0, 0.0)).unwrap();
        let mut weights = vec![("one".to_string(), one), ("psi-r".to_string(), WeightTable::rudin_shapiro(&chi, n, DEFAULT_CAP).unwrap())];
        for seed in 0..20 {
            weights.push((format!("random-{seed}"), WeightTable::random(&f, n, DEFAULT_CAP, seed).unwrap()));
        }
        // Independent: sum of Lambda over M(n) is q^n.
        if (lambda_sum(&tables, &weights[0].1, n) - Complex64::new(qn, 0.0)).norm() > 1e-9 {
            failures.push(format!("n={n}: sum of Lambda differs from q^n"));
        }
        for params in VaughanParams::all_for(n) {
            for (name, w) in &weights {
                runs += 1;
                let rep = vaughan_decompose(&f, &tables, &params, w).unwrap();
                worst = worst.max(rep.residual / (1.0 + rep.lhs.norm()));
                if !rep.identity_holds() {
                    failures.push(format!("n={n} {params:?} {name}: residual {:e}", rep.residual));
                }
                if name == "one" && ((rep.s1 - rep.s2 + rep.s3) - Complex64::new(qn, 0.0)).norm() >= 1e-9 * (1.0 + qn) {
                    failures.push(format!("n={n} {params:?}: S1-S2+S3 != q^n"));
                }
                if name == "random-0" && (s2_naive(&tables, w, &params, &f) - rep.s2).norm() > 1e-9 * (1.0 + rep.s2.norm()) {
                    failures.push(format!("n={n} {params:?}: aggregated S2 differs from triple sum"));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{runs} decompositions, max relative residual {worst:.2e}, failures {failures:?}"))
}

fn c6_tau() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [3u32, 5] {
        let f = field(p);
        let top = if p == 3 { 6 } else { 5 };
        let divisors: Vec<Vec<Vec<u32>>> = (0..=top).map(|d| monic_vecs(p, d)).collect();
        for n in 0..=top {
            let mut second = 0u128;
            for v in monic_vecs(p, n) {
                let t = (0..=n).map(|d| divisors[d].iter().filter(|g| divides(g, &v, p)).count() as u64).sum::<u64>();
                checked += 1;
                if t != tau(&to_poly(&f, &v), &f).unwrap() {
                    failures.push(format!("q={p} {v:?}: library tau differs"));
                }
                if n <= 5 && t > 1 << n {
                    failures.push(format!("q={p} {v:?}: tau {t} > 2^{n}"));
                }
                second += (t as u128).pow(2);
            }
            let moment_range = if p == 3 { 1..=6 } else { 1..=4 };
            if moment_range.contains(&n) {
                let bound = 4 * (n as u128).pow(3) * (p as u128).pow(n as u32);
                if second > bound {
                    failures.push(format!("q={p} n={n}: second moment {second} > {bound}"));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} monic polynomials, failures {failures:?}"))
}

fn golden(n: usize) -> serde_json::Value {
    let text = match n {
        2 => include_str!("golden/dist_q3_n2.json"),
        3 => include_str!("golden/dist_q3_n3.json"),
        4 => include_str!("golden/dist_q3_n4.json"),
        5 => include_str!("golden/dist_q3_n5.json"),
        6 => include_str!("golden/dist_q3_n6.json"),
        7 => include_str!("golden/dist_q3_n7.json"),
        _ => unreachable!(),
    };
    serde_json::from_str(text).unwrap()
}

/// `#P(n) = (1/n) sum_{d | n} mu(d) q^{n/d}`.
fn prime_count_oracle(q: i128, n: u32) -> i128 {
    let mu = |mut d: u32| {
        let mut sign = 1;
        let mut x = 2;
        while x * x <= d {
            if d % x == 0 {
                d /= x;
                if d % x == 0 {
                    return 0;
                }
                sign = -sign;
            }
            x += 1;
        }
        if d > 1 {
            sign = -sign;
        }
        sign
    };
    (1..=n).filter(|d| n % d == 0).map(|d| mu(d) as i128 * q.pow(n / d)).sum::<i128>() / n as i128
}

fn c7_distribution() -> Outcome {
    let f = field(3);
    let mut failures = Vec::new();
    for n in 2..=7 {
        let t = distribution(&f, n, DEFAULT_CAP).unwrap();
        let g = golden(n);
        let gold: BTreeMap<String, u64> = g["counts"].as_object().unwrap().iter().map(|(k, v)| (k.clone(), v.as_u64().unwrap())).collect();
        if t.counts != gold || t.total != g["total"].as_u64().unwrap() {
            failures.push(format!("n={n}: counts {:?} vs golden {gold:?}", t.counts));
        }
        let expected_total = prime_count_oracle(3, n as u32);
        if t.counts.values().sum::<u64>() as i128 != expected_total || t.total != prime_poly_count(3, n as u32) {
            failures.push(format!("n={n}: total {} vs {expected_total}", t.total));
        }
        if !pnt_bracket_holds(3, n, t.total) || !t.pnt_ok {
            failures.push(format!("n={n}: outside the prime polynomial bracket"));
        }
    }
    let two = distribution(&f, 2, DEFAULT_CAP).unwrap();
    let want: BTreeMap<String, u64> = [("0", 1), ("1", 1), ("2", 1)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    if two.counts != want {
        failures.push(format!("n=2 table {:?}", two.counts));
    }
    outcome(failures.is_empty(), format!("n=2..7 against golden tables, failures {failures:?}"))
}

fn c8_reversal_counts() -> Outcome {
    let p = 3u32;
    let f = field(p);
    let mut failures = Vec::new();
    let mut max_n = BTreeMap::new();
    for n in 1..=2usize {
        let mut fibres: HashMap<Vec<u32>, u64> = HashMap::new();
        for a in vecs_len(p, n + 1) {
            if a[n] == 0 {
                continue;
            }
            let rev: Vec<u32> = a.iter().rev().copied().collect();
            let prod = trim(conv(&rev, &a, p));
            *fibres.entry(prod).or_default() += 1;
        }
        let bound = 1u64 << (n + 1);
        let worst = fibres.values().copied().max().unwrap_or(0);
        max_n.insert(n, worst);
        if worst > bound {
            failures.push(format!("n={n}: N(f) = {worst} > {bound}"));
        }
        let lib: HashMap<Vec<u32>, u64> = scan_reversal_counts(&f, n, DEFAULT_CAP)
            .unwrap()
            .into_iter()
            .map(|r| (trim(Poly::parse(&r.f, &f).unwrap().coeffs().iter().map(|&c| from_fq(c)).collect()), r.observed))
            .collect();
        if lib != fibres {
            failures.push(format!("n={n}: library counts differ"));
        }
    }
    let nt = count_reversal_solutions(&to_poly(&f, &[0, 1]), 1, &f, DEFAULT_CAP).unwrap().observed;
    if nt != 2 {
        failures.push(format!("N(t) = {nt} at n=1"));
    }
    outcome(failures.is_empty(), format!("max N(f) by n {max_n:?}, N(t) = {nt}, failures {failures:?}"))
}

fn c9_determinism() -> Outcome {
    let config = RunConfig { lemma: Lemma::All, ..RunConfig::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| serde_json::to_string_pretty(&verify_all(&config).unwrap()).unwrap())
    };
    let one = run(1);
    let eight = run(8);
    let again = run(8);
    outcome(one == eight && eight == again, format!("{} bytes, 1 vs 8 threads identical: {}", one.len(), one == eight))
}

fn main() {
    type Check = (&'static str, &'static str, Option<Duration>, fn() -> Outcome);
    let checks: [Check; 8] = [
        ("1", "star product coefficients equal S^(l)", Some(Duration::from_secs(10)), c1_star_coefficients),
        ("2", "R(f) = S(f) - f_{n-1}", None, c2_lin_red),
        ("3", "Gauss bound for every Q_a", Some(Duration::from_secs(300)), c3_gauss),
        ("5", "Vaughan decomposition residuals", None, c5_vaughan),
        ("6", "divisor function bounds", None, c6_tau),
        ("7", "distribution tables", Some(Duration::from_secs(120)), c7_distribution),
        ("8", "N(f) scan", None, c8_reversal_counts),
        ("9", "determinism across thread counts", None, c9_determinism),
    ];
    let mut lines: Vec<(String, bool, String)> = Vec::new();
    for (id, name, limit, check) in checks {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let timing = match limit {
            Some(l) => format!("{:.2}s of {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        lines.push((format!("criterion {id} [{name}]"), o.pass && in_time, format!("{} ({timing})", o.summary)));
        if id == "3" {
            let start = Instant::now();
            let parts = c4_rank();
            let t = start.elapsed().as_secs_f64();
            let pass = parts.iter().all(|(_, o)| o.pass);
            let detail = parts
                .iter()
                .map(|(n, o)| format!("\n    {} {n}: {}", if o.pass { "ok  " } else { "FAIL" }, o.summary))
                .collect::<String>();
            lines.push(("criterion 4 [rank lemmas]".into(), pass, format!("({t:.2}s){detail}")));
        }
    }
    let mut all = true;
    println!();
    for (name, pass, detail) in &lines {
        all &= pass;
        println!("{} {name}: {detail}", if *pass { "PASS" } else { "FAIL" });
    }
    let failed = lines.iter().filter(|l| !l.1).count();
    println!("\n{} of {} criteria passed", lines.len() - failed, lines.len());
    if !all {
        std::process::exit(1);
    }
}
