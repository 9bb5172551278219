//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unisig_core::analytic::{gap_margin, witness_products, witness_step_log_ratio, zeta, zeta_ratio};
use unisig_core::certify::{
    certify_gap_margin_on_2_3, certify_slope_positive, check_r_gt_3, classify_connectivity, find_eta_star,
    threshold_equation_residual, Connectivity, CRITICAL_WITNESSES, ETA_STAR_REFERENCE, GAP_GRID_POINTS, GAP_MARGIN,
    LEADING_WITNESS_SAMPLES, SLOPE_GRID_POINTS, SLOPE_MARGIN,
};
use unisig_core::density::greedy_approximate;
use unisig_core::gaps::{gap_for_m, verify_gap_empty};
use unisig_core::primes::{ratio_exceptions, rosser_ratio_bound, DEFAULT_SIEVE_LIMIT};
use unisig_core::sigma::{factorize, unitary_sigma, unitary_sigma_oracle};
use unisig_core::{build_prime_table, PrimeTable};

const ZETA_TOL: f64 = 1e-12;

// 1
const ETA_TOL: f64 = 1e-7;
const ETA_MATCH: f64 = 1e-6;
const ETA_TIME: Duration = Duration::from_secs(2);
// 2
const EQUATION_RESIDUAL: f64 = 1e-9;
// 3
const BRACKET_MARGIN: f64 = 1e-3;
// 5
const SLOPE_TIME: Duration = Duration::from_secs(10);
// 7
const RATIO_MAX_J: usize = 3099;
const ROSSER_SAMPLES: [u64; 4] = [3100, 10_000, 100_000, 1_000_000];
// 8
const ORACLE_MAX_N: u64 = 10_000;
const ORACLE_EXPONENTS: [f64; 6] = [-3.0, -2.0, -1.5, -1.0, 0.0, 1.0];
const ORACLE_REL: f64 = 1e-12;
// 9
const COPRIME_PAIRS: usize = 10_000;
const PRODUCT_BOUND: u64 = 1_000_000;
const MULTIPLICATIVE_REL: f64 = 1e-12;
const MULTIPLICATIVE_EXPONENTS: [f64; 5] = [-3.0, -1.5, -1.0, 0.5, 1.0];
// 10
const ZETA_ABS: f64 = 1e-12;
const ZETA_RATIO_ABS: f64 = 1e-11;
// 11
const GREEDY_EXPONENTS: [f64; 3] = [1.2, 1.5, 1.9];
const GREEDY_TARGETS: usize = 100;
const GREEDY_PRIMES: usize = 300;
const GREEDY_RESIDUAL: f64 = 1e-8;
const GREEDY_TIME: Duration = Duration::from_secs(5);
// 12
const GAP_CASES: [(f64, usize); 3] = [(3.0, 1), (2.5, 2), (2.0, 2)];
const GAP_LIMIT: usize = 1_000_000;
const GAP_TIME: Duration = Duration::from_secs(30);
// 13
const STALL_R: f64 = 3.0;
const STALL_TARGET: f64 = 1.095;
const STALL_LO: f64 = 1.067;
const STALL_SLACK: f64 = 1e-6;
const STALL_PRIMES: usize = 500;
// 14
const CONNECTED_R: [f64; 5] = [0.5, 1.0, 1.5, 1.9, 1.97];
const DISCONNECTED_R: [f64; 6] = [1.98, 2.0, 2.5, 3.0, 3.5, 10.0];
// 15
const MONOTONE_EXPONENTS: [f64; 5] = [1.01, 1.5, 2.0, 2.5, 3.0];
const MONOTONE_MAX_M: usize = 3099;
const MONOTONE_TIME: Duration = Duration::from_secs(60);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn c1_eta_star(t: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let e = find_eta_star(ETA_TOL, t).expect("eta star");
    let elapsed = start.elapsed();
    let diff = (e.value - ETA_STAR_REFERENCE).abs();
    outcome(
        diff < ETA_MATCH && elapsed < ETA_TIME,
        format!("eta* = {:.10}, |diff| = {diff:.2e}, {elapsed:.2?}", e.value),
    )
}

fn c2_equation(t: &PrimeTable) -> Outcome {
    let e = find_eta_star(ETA_TOL, t).expect("eta star");
    let res = threshold_equation_residual(e.value).expect("residual");
    outcome(
        res < EQUATION_RESIDUAL,
        format!("residual {res:.2e} at {:.12}", e.value),
    )
}

fn c3_bracket(t: &PrimeTable) -> Outcome {
    let lo = gap_margin(2, 1.5, ZETA_TOL, t).expect("V_2(1.5)");
    let hi = gap_margin(2, 2.0, ZETA_TOL, t).expect("V_2(2)");
    outcome(
        lo.hi() < -BRACKET_MARGIN && hi.lo() > BRACKET_MARGIN,
        format!("V_2(1.5) = {:.6}, V_2(2) = {:.6}", lo.estimate, hi.estimate),
    )
}

fn c4_margins_at_two(t: &PrimeTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in CRITICAL_WITNESSES {
        let v = gap_margin(m, 2.0, ZETA_TOL, t).expect("V_m(2)");
        let want_positive = m == 2;
        ok &= if want_positive {
            v.is_certainly_positive()
        } else {
            v.is_certainly_negative()
        };
        parts.push(format!("V_{m}={:.4}", v.estimate));
    }
    outcome(ok, parts.join(" "))
}

fn c5_slope_certificates(t: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for m in CRITICAL_WITNESSES {
        let c = certify_slope_positive(m, t).expect("J certificate");
        ok &= c.verdict && c.grid_points == SLOPE_GRID_POINTS && c.margin == SLOPE_MARGIN;
        ok &= c.min_observed - c.max_error_bound > SLOPE_MARGIN;
        worst = worst.min(c.min_observed);
    }
    let elapsed = start.elapsed();
    outcome(
        ok && elapsed < SLOPE_TIME,
        format!("smallest grid minimum {worst:.6} > 1/400, {elapsed:.2?}"),
    )
}

fn c6_gap_certificate(t: &PrimeTable) -> Outcome {
    let c = certify_gap_margin_on_2_3(ZETA_TOL, t).expect("V_2 certificate");
    outcome(
        c.verdict && c.grid_points == GAP_GRID_POINTS && c.min_observed - c.max_error_bound > GAP_MARGIN,
        format!("grid minimum {:.10} at r = {}", c.min_observed, c.argmin),
    )
}

fn c7_prime_ratios(t: &PrimeTable) -> Outcome {
    let found = ratio_exceptions(t, RATIO_MAX_J).expect("exceptions");
    let expected: std::collections::BTreeSet<usize> = CRITICAL_WITNESSES.into_iter().collect();
    let cube_root_two = 2f64.cbrt();
    let bounds: Vec<f64> = ROSSER_SAMPLES
        .iter()
        .map(|&j| rosser_ratio_bound(j).expect("bound"))
        .collect();
    outcome(
        found == expected && bounds.iter().all(|&b| b < cube_root_two),
        format!("exceptions {found:?}, bounds {bounds:.6?}"),
    )
}

fn c8_oracle(t: &PrimeTable) -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=ORACLE_MAX_N {
        let f = factorize(n, t).expect("factorize");
        for &e in &ORACLE_EXPONENTS {
            let a = unitary_sigma(e, &f);
            let b = unitary_sigma_oracle(e, n, t).expect("oracle");
            worst = worst.max(rel_diff(a, b));
        }
    }
    outcome(worst < ORACLE_REL, format!("max relative difference {worst:.2e}"))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn c9_multiplicative(t: &PrimeTable) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    while pairs < COPRIME_PAIRS {
        let m = rng.gen_range(1..=1000u64);
        let n = rng.gen_range(1..=PRODUCT_BOUND / m);
        if gcd(m, n) != 1 {
            continue;
        }
        pairs += 1;
        let (fm, fn_, fmn) = (
            factorize(m, t).unwrap(),
            factorize(n, t).unwrap(),
            factorize(m * n, t).unwrap(),
        );
        for &e in &MULTIPLICATIVE_EXPONENTS {
            let prod = unitary_sigma(e, &fm) * unitary_sigma(e, &fn_);
            worst = worst.max(rel_diff(unitary_sigma(e, &fmn), prod));
        }
    }
    outcome(
        worst < MULTIPLICATIVE_REL,
        format!("{pairs} pairs, max relative difference {worst:.2e}"),
    )
}

fn c10_zeta() -> Outcome {
    let pi = std::f64::consts::PI;
    let z2 = zeta(2.0, ZETA_TOL).unwrap().estimate;
    let z4 = zeta(4.0, ZETA_TOL).unwrap().estimate;
    let d2 = (z2 - pi * pi / 6.0).abs();
    let d4 = (z4 - pi.powi(4) / 90.0).abs();
    let dr = (z2 / z4 - 15.0 / (pi * pi)).abs();
    outcome(
        d2 < ZETA_ABS && d4 < ZETA_ABS && dr < ZETA_RATIO_ABS,
        format!("errors {d2:.1e}, {d4:.1e}, {dr:.1e}"),
    )
}

fn c11_greedy_density(t: &PrimeTable) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for &r in &GREEDY_EXPONENTS {
        let sup = zeta_ratio(r, ZETA_TOL).unwrap();
        let mut misses = 0;
        let mut worst = 0.0f64;
        for _ in 0..GREEDY_TARGETS {
            let x = loop {
                let x = rng.gen_range(1.0..sup.lo());
                if x > 1.0 {
                    break x;
                }
            };
            let tr = greedy_approximate(r, x, GREEDY_PRIMES, GREEDY_RESIDUAL, ZETA_TOL, t).unwrap();
            if tr.residual.is_nan() || tr.residual >= GREEDY_RESIDUAL {
                misses += 1;
            }
            worst = worst.max(tr.residual);
        }
        ok &= misses == 0;
        parts.push(format!(
            "r={r}: {misses}/{GREEDY_TARGETS} above 1e-8 (worst {worst:.1e})"
        ));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && elapsed < GREEDY_TIME,
        format!("{}; {elapsed:.2?}", parts.join(", ")),
    )
}

fn c12_gap_emptiness(t: &PrimeTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (r, m) in GAP_CASES {
        let start = Instant::now();
        let gap = gap_for_m(r, m, ZETA_TOL, t).unwrap().expect("gap exists");
        let check = verify_gap_empty(r, &gap, GAP_LIMIT, t).unwrap();
        let elapsed = start.elapsed();
        ok &= check.empty && elapsed < GAP_TIME;
        parts.push(format!(
            "(r={r}, m={m}) ({:.6}, {:.6}): {} inside of {}, {elapsed:.2?}",
            gap.lo, gap.hi, check.inside, check.checked
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c13_stall(t: &PrimeTable) -> Outcome {
    let tr = greedy_approximate(STALL_R, STALL_TARGET, STALL_PRIMES, 0.0, ZETA_TOL, t).unwrap();
    let floor = (STALL_TARGET / STALL_LO).ln() - STALL_SLACK;
    outcome(
        tr.residual > floor,
        format!(
            "residual {:.6} > {floor:.6} after {} steps",
            tr.residual,
            tr.steps.len()
        ),
    )
}

fn c14_classifier(t: &PrimeTable) -> Outcome {
    let mut wrong = Vec::new();
    for (rs, want) in [
        (&CONNECTED_R[..], Connectivity::Connected),
        (&DISCONNECTED_R[..], Connectivity::Disconnected),
    ] {
        for &r in rs {
            let c = classify_connectivity(-r, ZETA_TOL, t).unwrap();
            if c.verdict != want {
                wrong.push(format!("r={r}: {}", c.verdict));
            }
        }
    }
    outcome(
        wrong.is_empty(),
        if wrong.is_empty() {
            "all 11 verdicts match".to_string()
        } else {
            wrong.join(", ")
        },
    )
}

fn c15_monotone(t: &PrimeTable) -> Outcome {
    let start = Instant::now();
    let ms: Vec<usize> = [5, 7, 8].into_iter().chain(10..=MONOTONE_MAX_M).collect();
    let mut violations = Vec::new();
    for &r in &MONOTONE_EXPONENTS {
        let f = witness_products(MONOTONE_MAX_M + 1, r, t).unwrap();
        for &m in &ms {
            let direct = f[m] > f[m - 1];
            let step = witness_step_log_ratio(m, r, t).unwrap() > 0.0;
            if !(direct && step) {
                violations.push((r, m));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations.is_empty() && elapsed < MONOTONE_TIME,
        format!(
            "{} (r, m) pairs, violations {violations:?}, {elapsed:.2?}",
            ms.len() * MONOTONE_EXPONENTS.len()
        ),
    )
}

fn c16_leading_witness() -> Outcome {
    let failing: Vec<f64> = LEADING_WITNESS_SAMPLES
        .iter()
        .copied()
        .filter(|&r| !check_r_gt_3(r, ZETA_TOL).unwrap())
        .collect();
    outcome(
        failing.is_empty(),
        format!("F(1, r) > ratio at {LEADING_WITNESS_SAMPLES:?}; failing {failing:?}"),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let table = build_prime_table(DEFAULT_SIEVE_LIMIT).expect("prime table");
    let t = &table;
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("eta* reproduction", Box::new(|| c1_eta_star(t))),
        ("threshold equation residual", Box::new(|| c2_equation(t))),
        ("bracket signs of V_2", Box::new(|| c3_bracket(t))),
        ("witness margins at r = 2", Box::new(|| c4_margins_at_two(t))),
        ("J_m grid certificates", Box::new(|| c5_slope_certificates(t))),
        ("V_2 grid certificate on [2, 3]", Box::new(|| c6_gap_certificate(t))),
        ("consecutive prime ratios", Box::new(|| c7_prime_ratios(t))),
        ("product formula vs divisor sum", Box::new(|| c8_oracle(t))),
        ("multiplicativity on coprime pairs", Box::new(|| c9_multiplicative(t))),
        ("zeta spot checks", Box::new(c10_zeta)),
        ("greedy density", Box::new(|| c11_greedy_density(t))),
        ("gap emptiness", Box::new(|| c12_gap_emptiness(t))),
        ("greedy stall in a gap", Box::new(|| c13_stall(t))),
        ("classifier table", Box::new(|| c14_classifier(t))),
        ("F monotone in m", Box::new(|| c15_monotone(t))),
        ("r > 3 closing inequality", Box::new(c16_leading_witness)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    println!(
        "acceptance: {} passed, {} failed {failed:?}",
        criteria.len() - failed.len(),
        failed.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
