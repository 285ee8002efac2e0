//! Acceptance suite A1–A11. Runs as a plain binary so every line is printed.
//! Pass `--strict` to exit nonzero when any criterion fails.

use std::time::{Duration, Instant};

use extk_core::combinatorics::{
    catalan, defect_pairing_histogram, defect_permutation_table, enumerate_nc_pairings, enumerate_noncrossing,
    narayana, verify_lift_formula, EnumerationCaps, LevelFunction, LiftCaps,
};
use extk_core::extendibility::{
    comparison_table, estimate_mean_width, mean_and_se, run_threshold_sweep, variance_decay_check, MeanWidthMode,
};
use extk_core::moments::{gue_modified_moment, gue_word_moment, gue_word_normalized_limit, wishart_modified_moment, Balance, MomentCaps};
use extk_core::rmt::{operator_norm, pad_with_identity, sample_gue, sample_modified, symmetrize, tensor_sum, ModifiedEnsemble, SeedScheme};
use num_bigint::BigUint;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

type Criterion = fn() -> Outcome;

fn a1() -> Outcome {
    let caps = LiftCaps::default();
    let mut cases = 0;
    let mut bad = 0;
    for p in 1..=5 {
        for k in 1..=3 {
            let v = verify_lift_formula(p, k, &caps).expect("within caps");
            cases += v.cases;
            bad += v.counterexamples.len();
        }
    }
    outcome(bad == 0, format!("{cases} cases, {bad} counterexamples"))
}

fn a2() -> Outcome {
    let caps = EnumerationCaps {
        partitions: 12,
        permutations: 8,
        pairings: 16,
    };
    let mut failures = Vec::new();
    for p in 1..=8usize {
        let cat = catalan(p as u64);
        let nc = enumerate_noncrossing(p, &caps).unwrap();
        if BigUint::from(nc.len()) != cat {
            failures.push(format!("|NC({p})|"));
        }
        let pairings = enumerate_nc_pairings(2 * p, &caps).unwrap();
        if BigUint::from(pairings.len()) != cat {
            failures.push(format!("|NC2({})|", 2 * p));
        }
        for m in 1..=p {
            let blocks = nc.iter().filter(|x| x.block_count() == m).count();
            if BigUint::from(blocks) != narayana(p as u64, m as u64).unwrap() {
                failures.push(format!("Narayana row p={p} m={m}"));
            }
        }
    }
    let genus = defect_pairing_histogram(2, None, &caps).unwrap();
    if genus != vec![BigUint::from(2u32), BigUint::from(1u32)] {
        failures.push(format!("P(4, .) = {genus:?}"));
    }
    for p in 1..=7usize {
        let table = defect_permutation_table(p, None, &caps).unwrap();
        let s0: BigUint = table[0].iter().sum();
        if s0 != catalan(p as u64) {
            failures.push(format!("S({p},0) = {s0}"));
        }
    }
    let detail = if failures.is_empty() {
        "NC, NC2, Narayana rows for p<=8; P(4,0)=2, P(4,1)=1; S(p,0)=Cat_p for p<=7".to_string()
    } else {
        format!("mismatches: {}", failures.join(", "))
    };
    outcome(failures.is_empty(), detail)
}

fn a3() -> Outcome {
    let caps = MomentCaps::default();
    let d = 6usize;
    let reps = 500u64;
    let mut all = true;
    let mut parts = Vec::new();
    for (idx, (p, k)) in [(1usize, 2usize), (2, 2), (1, 3)].into_iter().enumerate() {
        for wishart in [false, true] {
            let (exact, ensemble, order) = if wishart {
                let poly = wishart_modified_moment(p, k, &caps).unwrap();
                (poly.evaluate_f64(&[d as f64, (d * d) as f64]).unwrap(), ModifiedEnsemble::WishartMod, p as u32)
            } else {
                let poly = gue_modified_moment(p, k, Balance::Balanced, &caps).unwrap();
                (poly.evaluate_f64(&[d as f64]).unwrap(), ModifiedEnsemble::GueMod, 2 * p as u32)
            };
            let scheme = SeedScheme::new(0xa3).child((idx * 2 + wishart as usize) as u64);
            let values: Vec<f64> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let x = sample_modified(ensemble, d, d, k, d * d, &mut scheme.stream(r)).unwrap();
                    x.trace_power(order).unwrap()
                })
                .collect();
            let (mean, se) = mean_and_se(&values);
            let z = (mean - exact) / se;
            all &= z.abs() <= 4.0;
            parts.push(format!("{}(p={p},k={k}) z={z:+.2}", if wishart { "W" } else { "G" }));
        }
    }
    outcome(all, parts.join(" "))
}

fn normalized_moments(ensemble: ModifiedEnsemble, d: usize, k: usize, reps: u64, seed: u64) -> Vec<f64> {
    let scheme = SeedScheme::new(seed);
    let scale = match ensemble {
        ModifiedEnsemble::WishartMod => (d * d) as f64,
        _ => d as f64,
    };
    let dim = (d as f64).powi(k as i32 + 1);
    let per_rep: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let x = sample_modified(ensemble, d, d, k, d * d, &mut scheme.stream(r)).unwrap();
            let traces = x.trace_powers(4).unwrap();
            (1..=4).map(|p| traces[p] / scale.powi(p as i32) / dim).collect()
        })
        .collect();
    (0..4).map(|i| per_rep.iter().map(|v| v[i]).sum::<f64>() / reps as f64).collect()
}

fn a4() -> Outcome {
    let mp = [2.0, 6.0, 22.0, 90.0];
    let w = normalized_moments(ModifiedEnsemble::WishartMod, 12, 2, 100, 0xa4);
    let w_ok = w.iter().zip(mp).all(|(m, t)| ((m - t) / t).abs() <= 0.10);
    let sc = [0.0, 2.0, 0.0, 8.0];
    let g = normalized_moments(ModifiedEnsemble::GueMod, 10, 2, 100, 0xa4 + 1);
    // Odd moments vanish in the limit; they are held to 10% of σ^p instead.
    let sigma = 2f64.sqrt();
    let g_ok = g.iter().zip(sc).enumerate().all(|(i, (m, t))| {
        if t == 0.0 {
            m.abs() <= 0.10 * sigma.powi(i as i32 + 1)
        } else {
            ((m - t) / t).abs() <= 0.10
        }
    });
    outcome(
        w_ok && g_ok,
        format!(
            "MP(2) moments {:.3} {:.3} {:.3} {:.3}; SC(2) moments {:.3} {:.3} {:.3} {:.3}",
            w[0], w[1], w[2], w[3], g[0], g[1], g[2], g[3]
        ),
    )
}

fn a5() -> Outcome {
    let r12 = estimate_mean_width(MeanWidthMode::Plain { d: 12 }, 2, 50, 0xa5).unwrap();
    let r16 = estimate_mean_width(MeanWidthMode::Plain { d: 16 }, 2, 50, 0xa5 + 1).unwrap();
    let in12 = (0.85..=1.02).contains(&r12.ratio);
    let in16 = (0.90..=1.02).contains(&r16.ratio);
    let se = (r12.ratio_se.powi(2) + r16.ratio_se.powi(2)).sqrt();
    let monotone = r16.ratio + se >= r12.ratio;
    outcome(
        in12 && in16 && monotone,
        format!(
            "ratio d=12 {:.4}±{:.4}, d=16 {:.4}±{:.4}",
            r12.ratio, r12.ratio_se, r16.ratio, r16.ratio_se
        ),
    )
}

fn a6() -> Outcome {
    let grid = [0.05, 0.125, 0.5, 1.0];
    let r = run_threshold_sweep(8, 2, &grid, 200, 0xa6).unwrap();
    let first = r.points[0].detection_rate;
    let last = r.points[3].detection_rate;
    let rates: Vec<String> = r.points.iter().map(|p| format!("{:.3}", p.detection_rate)).collect();
    outcome(
        first >= 0.9 && last <= 0.1 && r.nonincreasing_within_ci,
        format!("rates {} over c = 0.05, 0.125, 0.5, 1.0", rates.join(" ")),
    )
}

fn a7() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, k) in [(2usize, 2usize), (2, 3), (3, 2)] {
        let scheme = SeedScheme::new(0xa7).child((d * 10 + k) as u64);
        for r in 0..20 {
            let m = sample_gue(d * d, &mut scheme.stream(r)).unwrap().with_factor_dims(vec![d, d]).unwrap();
            let sym = operator_norm(&symmetrize(&pad_with_identity(&m, k).unwrap()).unwrap()).unwrap();
            let avg = operator_norm(&tensor_sum(&m, k).unwrap()).unwrap() / k as f64;
            worst = worst.max((sym - avg).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |difference| {worst:.2e} over 60 operators"))
}

fn a8() -> Outcome {
    let t = comparison_table().unwrap();
    let ok = t.width_vs_ppt_k == 11
        && t.threshold_vs_realignment_k == 5
        && t.threshold_vs_ppt_k == 18
        && t.paper_table_value_for_ppt == 17
        && t.ppt_threshold_discrepancy;
    outcome(
        ok,
        format!(
            "width vs PPT {}, threshold vs realignment {}, threshold vs PPT {} (printed value {} flagged)",
            t.width_vs_ppt_k, t.threshold_vs_realignment_k, t.threshold_vs_ppt_k, t.paper_table_value_for_ppt
        ),
    )
}

fn a9() -> Outcome {
    let r = variance_decay_check(&[6, 12], 2, 2, 1.0, 300, 0xa9).unwrap();
    let ratio = r.ratios[0].ratio;
    outcome(
        (2.0..=8.0).contains(&ratio),
        format!(
            "var(d=6) {:.4e}, var(d=12) {:.4e}, ratio {:.2} (target {})",
            r.points[0].variance, r.points[1].variance, ratio, r.ratios[0].target
        ),
    )
}

fn a10() -> Outcome {
    let r = estimate_mean_width(MeanWidthMode::PptExtension { d: 10 }, 2, 50, 0xa10).unwrap();
    outcome(
        (0.85..=1.05).contains(&r.ratio),
        format!("E||sum^Γ|| / 2d = {:.4}±{:.4}", r.ratio, r.ratio_se),
    )
}

fn a11() -> Outcome {
    let caps = MomentCaps::default();
    let (d, k, reps) = (12usize, 2usize, 100u64);
    let alternating = LevelFunction::new(vec![1, 2, 1, 2], k).unwrap();
    let grouped = LevelFunction::new(vec![1, 1, 2, 2], k).unwrap();
    let lim_alt = gue_word_normalized_limit(&alternating, &caps).unwrap();
    let lim_grp = gue_word_normalized_limit(&grouped, &caps).unwrap();
    let norm = (d as f64).powi(4 + k as i32 + 1);
    let scheme = SeedScheme::new(0xa11);
    let samples: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let x = sample_modified(ModifiedEnsemble::GueMod, d, d, k, 1, &mut scheme.stream(r)).unwrap();
            let alt = x.word_trace(&[0, 1, 0, 1]).unwrap().re / norm;
            let grp = x.word_trace(&[0, 0, 1, 1]).unwrap().re / norm;
            (alt, grp)
        })
        .collect();
    let alt: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let grp: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (alt_mean, alt_se) = mean_and_se(&alt);
    let (grp_mean, grp_se) = mean_and_se(&grp);
    let alt_exact = gue_word_moment(&alternating, &caps).unwrap().evaluate_f64(&[d as f64]).unwrap() / norm;
    let ok = lim_alt == BigUint::from(0u32)
        && lim_grp == BigUint::from(1u32)
        && alt_mean.abs() <= 3.0 * alt_se
        && (grp_mean - 1.0).abs() <= 0.10;
    outcome(
        ok,
        format!(
            "limits (1,2,1,2)={lim_alt}, (1,1,2,2)={lim_grp}; MC (1,2,1,2) {alt_mean:.4}±{alt_se:.4} \
             (exact finite-d mean {alt_exact:.4}), (1,1,2,2) {grp_mean:.4}±{grp_se:.4}"
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion, Duration); 11] = [
        ("A1", a1, Duration::from_secs(5)),
        ("A2", a2, Duration::from_secs(30)),
        ("A3", a3, Duration::from_secs(120)),
        ("A4", a4, Duration::from_secs(180)),
        ("A5", a5, Duration::from_secs(300)),
        ("A6", a6, Duration::from_secs(120)),
        ("A7", a7, Duration::from_secs(10)),
        ("A8", a8, Duration::from_secs(1)),
        ("A9", a9, Duration::from_secs(180)),
        ("A10", a10, Duration::from_secs(120)),
        ("A11", a11, Duration::from_secs(120)),
    ];
    let args: Vec<String> = std::env::args().skip(1).collect();
    let strict = args.iter().any(|a| a == "--strict");
    let only: Vec<&String> = args.iter().filter(|a| a.starts_with('A')).collect();
    let mut failed = 0;
    for (name, run, budget) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o.as_str() == name) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = result.passed && in_time;
        if !passed {
            failed += 1;
        }
        println!(
            "{name} {} | {} | {:.1}s (limit {}s{})",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        // Failures are reported above; `--strict` also turns them into a failing exit status.
        if strict {
            std::process::exit(1);
        }
    }
}
