//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines show up in plain
//! `cargo test` output. Exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::laws::{self, Lab};
use common::{hk_plus1, hk_plus1_lambda, q, Geo, Q};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rank1lab::engine::{build_tower, LevelSet, Tower};
use rank1lab::presets::{preset, PresetId};
use rank1lab::properties::{
    level_returns, non_wde_recursion, ratio_set_probe, wde_witness_search, witness_pair, Verdict,
    WdeMode,
};
use rank1lab::spectral::{
    aana_sum, eigenvalue_scan, factor_map_build, gap_lemma_check, HeightSequence, Theta,
    DEFAULT_GAP_CAP,
};

const SEED: u64 = 0x5eed_2026;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2}s of {}s", e.as_secs_f64(), limit.as_secs()))
}

// 1 ---------------------------------------------------------------------------

fn heights() -> Outcome {
    let t0 = Instant::now();
    let expect = vec![1usize, 5, 21, 85, 341, 1365, 5461];
    let tower = build_tower(&preset(PresetId::HkPlus1).unwrap(), 6).unwrap();
    let rec: Vec<usize> = rank1lab::presets::heights_u64(&PresetId::HkPlus1, 6)
        .unwrap()
        .into_iter()
        .map(|h| h as usize)
        .collect();
    let geo = Geo::build(Q::one(), 6, hk_plus1()).heights();
    let (fast, time) = within(t0, Duration::from_secs(1));
    let ok = tower.heights() == expect && rec == expect && geo == expect && fast;
    outcome(ok, format!("HK(+1) heights {:?} (built, recursion, interval model agree); {time}", tower.heights()))
}

// 2 ---------------------------------------------------------------------------

fn return_bound() -> Outcome {
    // The runtime limit covers the engine; the interval oracle is timed apart.
    let t0 = Instant::now();
    let hk = build_tower(&preset(PresetId::HkPlus1).unwrap(), 9).unwrap();
    let mut hk_ok = true;
    for n in 0..=8 {
        for r in level_returns(&hk, n).unwrap() {
            hk_ok &= r.image_ratio == q("1/2") && r.unresolved_ratio.is_zero();
        }
    }
    let lambda = q("1/2");
    let lt = build_tower(&preset(PresetId::HkPlus1Lambda(lambda.clone())).unwrap(), 9).unwrap();
    let per_stage: Vec<_> = (0..=8).map(|n| level_returns(&lt, n).unwrap()).collect();
    let (fast, time) = within(t0, Duration::from_secs(10));

    let t1 = Instant::now();
    let geo = Geo::build(Q::one(), 9, hk_plus1_lambda(lambda.clone()));
    let bound = Q::one() / (Q::one() + &lambda);
    let mut oracle_ok = true;
    let mut ineq_ok = true;
    let mut min_img = Q::one();
    let mut min_src = Q::one();
    for (n, rs) in per_stage.iter().enumerate() {
        let (mut e_img, mut e_src) = (Q::one(), Q::one());
        let (mut o_img, mut o_src) = (Q::one(), Q::one());
        let h = lt.height(n).unwrap() as i64;
        for r in rs {
            let l = geo.level(n, r.level);
            let (pairs, lost) = geo.image(&l, h, n + 1);
            let target = [l.clone()];
            let img = common::overlap(&common::images(&pairs), &target) / l.len();
            let src = common::returning_source(&pairs, &target) / l.len();
            oracle_ok &= lost.is_zero() && r.unresolved_ratio.is_zero();
            e_img = e_img.min(r.image_ratio.clone());
            e_src = e_src.min(r.source_ratio.clone());
            o_img = o_img.min(img);
            o_src = o_src.min(src);
        }
        oracle_ok &= e_img == o_img && e_src == o_src && e_img == q("1/3");
        ineq_ok &= e_src >= bound;
        min_img = min_img.min(e_img);
        min_src = min_src.min(e_src);
    }
    let oracle_time = t1.elapsed();
    let ok = hk_ok && oracle_ok && ineq_ok && fast;
    outcome(
        ok,
        format!(
            "hk_plus1: every level of C_n, n<=8, returns 1/2 exactly; hk_plus1_lambda(1/2): \
             min mu(T^h L ∩ L)/mu(L) = {min_img} (interval oracle agrees), \
             min mu(L ∩ T^-h L)/mu(L) = {min_src} >= 1/(1+λ) = {bound}; \
             note: the image-side ratio {min_img} is below 1/(1+λ), the bound holds for the returning mass; \
             engine {time}; oracle cross-check {oracle_time:.2?} (untimed)"
        ),
    )
}

// 3 ---------------------------------------------------------------------------

fn non_wde() -> Outcome {
    let t0 = Instant::now();
    let t = build_tower(&preset(PresetId::HkPlus1).unwrap(), 7).unwrap();
    let (a, b) = witness_pair(&t).unwrap();
    let n = t.height(4).unwrap() as i64;
    let r = wde_witness_search(&t, &a, &b, n, WdeMode::Stabilized).unwrap();
    let (fast, time) = within(t0, Duration::from_secs(60));
    let ok = r.verdict == Verdict::NoneUpToN
        && r.unresolved_measure.is_zero()
        && r.inconclusive_shifts.is_empty()
        && n == 341
        && fast;
    outcome(
        ok,
        format!(
            "A = {a}, B = {b}, |i| <= {n}: verdict {}, unresolved {}; {time}",
            r.verdict.as_str(),
            r.unresolved_measure
        ),
    )
}

// 4 ---------------------------------------------------------------------------

fn index_sets() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for id in [PresetId::HkPlus1, PresetId::HkPlus1Lambda(q("1/2"))] {
        let t = build_tower(&preset(id.clone()).unwrap(), 5).unwrap();
        let (a, b) = witness_pair(&t).unwrap();
        let r = non_wde_recursion(&t, &a, &b, 5).unwrap();
        let first_four_empty = r.stages.iter().take(4).all(|s| s.intersection.is_empty());
        let inclusions = r
            .stages
            .iter()
            .skip(1)
            .take(4)
            .all(|s| s.inclusion_aa.as_ref().unwrap().holds && s.inclusion_ab.as_ref().unwrap().holds);
        ok &= first_four_empty && inclusions && r.all_empty;
        notes.push(format!(
            "{}: I_n empty n<=5 {}, inclusion n<=4 {}, I_1(A,B) = {:?} (nonempty, though I_1 = ∅)",
            id.name(),
            r.all_empty,
            inclusions,
            r.i1_ab
        ));
    }
    outcome(ok, notes.join("; "))
}

// 5 ---------------------------------------------------------------------------

/// Whether `n = ±Π p^e` over the given primes.
fn smooth(n: &BigInt, primes: &[u32]) -> bool {
    let mut m = n.abs();
    for &p in primes {
        let p = BigInt::from(p);
        while !m.is_zero() && m.is_multiple_of(&p) {
            m /= &p;
        }
    }
    m.is_one()
}

fn observed(t: &Tower, k_max: usize, range: i64) -> BTreeSet<BigRational> {
    let mut vals = BTreeSet::new();
    for k in 0..=k_max {
        let full = t.full(k).unwrap();
        let max_stage = (k + 2).min(t.depth());
        for i in -range..=range {
            for p in t.rn_derivative(&full, i, max_stage).unwrap().parts {
                vals.insert(p.omega.value);
            }
        }
    }
    vals
}

fn cocycle_law() -> Outcome {
    let lam = build_tower(&preset(PresetId::HkPlus1Lambda(q("1/2"))).unwrap(), 8).unwrap();
    let range = lam.height(3).unwrap() as i64;
    let v1 = observed(&lam, 6, range);
    let ok1 = v1.iter().all(|v| smooth(v.numer(), &[2]) && smooth(v.denom(), &[2]));

    let t3 = build_tower(&preset(PresetId::TypeIii1(q("1/2"), q("1/3"))).unwrap(), 8).unwrap();
    let v2 = observed(&t3, 6, range);
    let ok2 = v2.iter().all(|v| smooth(v.numer(), &[2, 3]) && smooth(v.denom(), &[2, 3]));
    let mixed = v2
        .iter()
        .any(|v| !smooth(v.numer(), &[2]) || !smooth(v.denom(), &[2]));
    outcome(
        ok1 && ok2 && mixed,
        format!(
            "hk_plus1_lambda(1/2): {} distinct values, all powers of 2; type_iii1(1/2,1/3): {} distinct values, all 2^a 3^b; |i| <= {range}, all levels of C_k, k <= 6",
            v1.len(),
            v2.len()
        ),
    )
}

// 6 ---------------------------------------------------------------------------

fn ratio_hit() -> Outcome {
    let lambda = q("1/2");
    let t = build_tower(&preset(PresetId::HkPlus1Lambda(lambda.clone())).unwrap(), 7).unwrap();
    let mut ok = true;
    let mut found = Vec::new();
    for k in 0..=6 {
        let h = t.height(k).unwrap();
        let lvl = h / 2;
        let a = LevelSet::level(k, lvl);
        let r = ratio_set_probe(&t, &a, &lambda, &q("1/100"), h as i64, k + 1).unwrap();
        let left = LevelSet::level(k + 1, lvl);
        let hit = r
            .hits
            .iter()
            .find(|x| x.n == h as i64 && x.levels == left && x.omega.value == lambda);
        ok &= hit.is_some();
        if hit.is_some() {
            found.push(h);
        }
    }
    outcome(ok, format!("ω = 1/2 exactly on the left sublevel at n = h_k for h_k in {found:?}"))
}

// 7 ---------------------------------------------------------------------------

fn spectral() -> Outcome {
    let t0 = Instant::now();
    let kak = HeightSequence::new((1..=50u32).map(|i| BigUint::from(2u32).pow(i)).collect()).unwrap();
    let half: Theta = "1/2".parse().unwrap();
    let phi_k = aana_sum(&kak, &half, 50).unwrap().partial_sum;

    let hk = HeightSequence::new((0..30u32).map(|k| BigUint::from(4u32).pow(k)).collect()).unwrap();
    let quarter: Theta = "1/4".parse().unwrap();
    let prof = aana_sum(&hk, &quarter, 30).unwrap().tail_profile;
    let hk_ok = prof[1..].iter().all(|&x| x.abs() < 1e-12);

    let hk1 = HeightSequence::new(
        rank1lab::presets::height_sequence(&PresetId::HkPlus1, 29).unwrap(),
    )
    .unwrap();
    let scan = eigenvalue_scan(&hk1, 1 << 16, 30, 0.1).unwrap();
    let min = scan.grid_minimum.partial_sum;
    let (fast, time) = within(t0, Duration::from_secs(30));
    let ok = phi_k.abs() < 1e-12 && hk_ok && min > 0.1 && scan.candidates.is_empty() && fast;
    outcome(
        ok,
        format!(
            "Kakutani Φ_50(1/2) = {phi_k:e}; Hajian-Kakutani Φ(1/4) terms beyond the first all 0 = {hk_ok} (first {:.3}); \
             HK(+1) heights 1,5,21,... N=30: grid 2^16 minimum {min:.6} at θ = {} (> 0.1, evidence only); {time}",
            prof[0],
            scan.grid_minimum.theta.exact()
        ),
    )
}

// 8 ---------------------------------------------------------------------------

fn brute_gap(q: &[u128], l: usize, m: usize) -> u128 {
    let mut sums: BTreeSet<u128> = BTreeSet::from([0]);
    for j in (l - 1)..m {
        let cap = if j + 1 < q.len() { q[j + 1] / q[j] } else { 1 };
        let mut next = BTreeSet::new();
        for s in &sums {
            for a in 0..=cap {
                next.insert(s + a * q[j]);
            }
        }
        sums = next;
    }
    let v: Vec<u128> = sums.into_iter().collect();
    v.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
}

fn gap_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut ok = true;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let len = rng.gen_range(1..=8);
        let mut q: Vec<u128> = vec![rng.gen_range(1..=10)];
        while q.len() < len {
            let last = *q.last().unwrap();
            q.push(rng.gen_range(2 * last..=4 * last));
        }
        let l = rng.gen_range(1..=len);
        let m = rng.gen_range(l..=len);
        let seq = HeightSequence::new(q.iter().map(|&v| BigUint::from(v)).collect()).unwrap();
        let r = gap_lemma_check(&seq, l, m, DEFAULT_GAP_CAP).unwrap();
        let brute = brute_gap(&q, l, m);
        ok &= r.max_gap == brute && r.holds && brute <= q[l - 1];
        worst = worst.max(brute as f64 / q[l - 1] as f64);
    }
    outcome(ok, format!("200 sequences, max gap equals brute force and is <= q_L (largest gap/q_L = {worst:.3})"))
}

// 9 ---------------------------------------------------------------------------

fn factor_map() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut ok = true;
    let mut stages = 0;
    for case in 0..20 {
        let len = rng.gen_range(3..=9);
        let mut q: Vec<u64> = vec![1];
        while q.len() < len {
            let last = *q.last().unwrap();
            q.push(rng.gen_range(2 * last..=3 * last + 2));
        }
        let theta = if case % 5 == 0 {
            Theta::GoldenConjugate
        } else {
            let d = rng.gen_range(2u64..100_000);
            Theta::rational(BigRational::new(rng.gen_range(1..d).into(), d.into()))
        };
        let seq = HeightSequence::from_u64(&q).unwrap();
        let r = factor_map_build(&seq, &theta, len - 1).unwrap();
        for s in &r.stages {
            // independent float evaluation of d(S^{q_k} y, y)
            let f = (theta.to_f64() * q[s.stage] as f64).fract();
            let bound = 2.0 * (std::f64::consts::PI * f).sin().abs();
            ok &= s.delta_sup <= s.bound + 1e-12 && (bound - s.bound).abs() < 1e-6;
            stages += 1;
        }
        ok &= r.equivariance_residual == 0.0;
    }
    outcome(ok, format!("20 random (q, θ), {stages} stages: delta_sup <= d(S^q_k y, y) + 1e-12, equivariance residual 0"))
}

// 10 --------------------------------------------------------------------------

fn property_suites() -> Outcome {
    let t0 = Instant::now();
    let labs = laws::labs(5);
    let suites: [(&str, fn(&mut ChaCha8Rng, &Lab) -> laws::Law); 4] = [
        ("refinement", laws::refinement_conservation),
        ("chain rule", laws::chain_rule),
        ("cyclic laws", laws::cyclic_laws),
        ("shift/cyclic", laws::shift_cyclic_agreement),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, (name, law)) in suites.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (100 + k as u64));
        let mut live = 0;
        let mut failure = None;
        for case in 0..1000 {
            match law(&mut rng, &labs[case % labs.len()]) {
                Ok(true) => live += 1,
                Ok(false) => {}
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        ok &= failure.is_none() && live >= 500;
        notes.push(match failure {
            None => format!("{name} 1000 ({live} non-vacuous)"),
            Some(e) => format!("{name} FAILED: {e}"),
        });
    }
    let (fast, time) = within(t0, Duration::from_secs(120));
    outcome(ok && fast, format!("{} across {} presets; {time}", notes.join(", "), labs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("heights", heights),
        ("return bound", return_bound),
        ("non-WDE at depth", non_wde),
        ("index-set recursion", index_sets),
        ("cocycle law", cocycle_law),
        ("ratio-set hit", ratio_hit),
        ("spectral scanner", spectral),
        ("gap lemma", gap_lemma),
        ("factor map", factor_map),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
