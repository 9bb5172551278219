//! Human-readable renderings; numbers rounded to 7 significant digits.

use std::fmt::Write;

use unisig_core::certify::{CertificationReport, CertifiedFunction, Classification, GridCertificate};
use unisig_core::gaps::{ComponentReport, InfEkEstimate};
use unisig_core::output::{format_sig, TEXT_DIGITS};
use unisig_core::FactoredInteger;

use crate::commands::{EnumerateSummary, EtaStarOutput, GapsOutput, GreedyOutput, SigmaOutput};

fn f(x: f64) -> String {
    format_sig(x, TEXT_DIGITS)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn sigma(o: &SigmaOutput) -> String {
    format!(
        "sigma*_{}({}) = {}\nfactorization: {}\nunitary divisors: {}",
        f(o.t),
        o.n,
        f(o.value),
        o.factorization,
        o.unitary_divisor_count
    )
}

pub fn eta_star(o: &EtaStarOutput) -> String {
    let r = &o.result;
    format!(
        "eta* = {}\nbracket: [{}, {}] after {} iterations\nthreshold equation residual: {:.3e}",
        format_sig(r.value, 14),
        format_sig(r.bracket[0], 14),
        format_sig(r.bracket[1], 14),
        r.iterations,
        r.equation_residual
    )
}

pub fn classification(c: &Classification) -> String {
    let mut s = format!("t = {}: {} ({:?})", f(c.t), c.verdict, c.rule);
    if let Some(ineq) = &c.inequalities {
        for (m, status) in ineq {
            let _ = write!(s, "\n  witness {m}: {status:?}");
        }
    }
    if let Some(m) = &c.leading_margin {
        let _ = write!(
            s,
            "\n  scaled leading margin: {} ± {:.1e}",
            f(m.estimate),
            m.error_bound
        );
    }
    s
}

fn grid_line(c: &GridCertificate) -> String {
    let name = match (c.function_id, c.m) {
        (CertifiedFunction::SlopeSurrogate, Some(m)) => format!("J_{m}"),
        (CertifiedFunction::SlopeSurrogate, None) => "J".to_string(),
        (CertifiedFunction::GapMargin, _) => "V_2".to_string(),
    };
    format!(
        "  {name} on [{}, {}], {} points: min {} at r = {} vs margin {} ({})",
        f(c.interval[0]),
        f(c.interval[1]),
        c.grid_points,
        f(c.min_observed),
        f(c.argmin),
        f(c.margin),
        pass(c.verdict)
    )
}

pub fn certification(r: &CertificationReport) -> String {
    let mut s = String::from("grid certificates:\n");
    for c in &r.slope_certificates {
        let _ = writeln!(s, "{}", grid_line(c));
    }
    let _ = writeln!(s, "{}", grid_line(&r.gap_certificate));
    let heads = r.head_derivative_checks.iter().all(|c| c.passed);
    let slopes = r.slope_derivative_checks.iter().all(|c| c.passed);
    let _ = writeln!(
        s,
        "derivative bounds: head >= -1 {}, J' > -7 {}",
        pass(heads),
        pass(slopes)
    );
    let _ = writeln!(
        s,
        "prime ratios: exceptions {:?} up to j = {} ({})",
        r.prime_ratios.exceptions,
        r.prime_ratios.max_j,
        pass(r.prime_ratios.passed)
    );
    let lead = r.leading_witness.iter().all(|c| c.passed);
    let _ = writeln!(s, "r > 3 leading witness: {}", pass(lead));
    let _ = writeln!(
        s,
        "eta* = {} (residual {:.1e})",
        format_sig(r.eta_star.value, 14),
        r.eta_star.equation_residual
    );
    if r.all_passed {
        s.push_str("all checks passed");
    } else {
        let _ = write!(s, "FAILED: {}", r.failures.join("; "));
    }
    s
}

/// Factorization, elided in the middle past 12 prime powers.
fn short_factorization(n: &FactoredInteger) -> String {
    let f = n.factors();
    if f.len() <= 12 {
        return n.to_string();
    }
    let part = |s: &[(u64, u32)]| {
        s.iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join(" * ")
    };
    format!(
        "{} * ... * {} ({} prime powers)",
        part(&f[..8]),
        part(&f[f.len() - 2..]),
        f.len()
    )
}

pub fn greedy(o: &GreedyOutput) -> String {
    let mut s = format!(
        "target {} at r = {}\nresult: {}\nachieved: {}\nlog residual: {:.3e} after {} steps ({})",
        f(o.target),
        f(o.r),
        short_factorization(&o.result),
        format_sig(o.achieved, 14),
        o.residual,
        o.steps_taken,
        if o.converged { "converged" } else { "not converged" }
    );
    if let Some(st) = &o.stall {
        let _ = write!(
            s,
            "\ntarget lies in the witness-{} gap ({}, {}); residual floor {:.6e}, stalled: {}",
            st.gap.witness_m,
            f(st.gap.lo),
            f(st.gap.hi),
            st.residual_floor,
            st.stalled
        );
    }
    s
}

pub fn gaps(o: &GapsOutput) -> String {
    if o.gaps.is_empty() {
        return format!("no gaps with witness m <= {} at r = {}", o.max_m, f(o.r));
    }
    let mut s = format!("gaps at r = {}:", f(o.r));
    for (i, g) in o.gaps.iter().enumerate() {
        let _ = write!(s, "\n  m = {}: ({}, {})", g.witness_m, f(g.lo), f(g.hi));
        if let Some(c) = o.checks.as_ref().map(|c| &c[i]) {
            let _ = write!(
                s,
                " {} to n = {} ({} values inside)",
                if c.empty { "empty" } else { "NOT empty" },
                c.limit,
                c.inside
            );
        }
    }
    s
}

pub fn enumerate_summary(o: &EnumerateSummary) -> String {
    format!(
        "{} distinct values for n <= {} at r = {} written to {}",
        o.count,
        o.limit,
        f(o.r),
        o.path
    )
}

pub fn components(c: &ComponentReport) -> String {
    let mut s = format!(
        "estimated components: {} (heuristic; r = {}, n <= {}, resolution {})\nraw clusters: {}, bridged by greedy values: {}",
        c.estimated_components,
        f(c.r),
        c.enumeration_limit,
        f(c.resolution),
        c.raw_cluster_count,
        c.bridged_breaks
    );
    for cl in c.clusters.iter().take(20) {
        let _ = write!(s, "\n  [{}, {}] ({} values)", f(cl.min), f(cl.max), cl.count);
    }
    if c.clusters.len() > 20 {
        let _ = write!(s, "\n  ... {} more", c.clusters.len() - 20);
    }
    s
}

pub fn inf_ek(e: &InfEkEstimate) -> String {
    let mut s = format!(
        "estimated inf E*_{} = {} (heuristic), bracket [{}, {}]",
        e.k,
        f(e.estimate),
        f(e.bracket[0]),
        f(e.bracket[1])
    );
    if let Some(w) = &e.warning {
        let _ = write!(s, "\nwarning: {w}");
    }
    s
}
