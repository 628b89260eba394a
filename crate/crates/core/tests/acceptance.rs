//! Runs the ten acceptance criteria and prints one line per criterion.
//! Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use tfp_core::cogs::{alpha0, alpha1};
use tfp_core::verify::{run_check, CheckId, CheckSummary, VerifyOptions};

struct Criterion {
    number: usize,
    title: &'static str,
    checks: &'static [CheckId],
    max_n: Option<usize>,
    budget: Option<Duration>,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { number: 1, title: "cycle counts 2^n + 2(-1)^n for 3 <= n <= 14", checks: &[CheckId::Cycles], max_n: Some(14), budget: Some(Duration::from_secs(10)) },
    Criterion { number: 2, title: "many-colorings bound on the n <= 9 catalog", checks: &[CheckId::Manycolor], max_n: Some(9), budget: Some(Duration::from_secs(600)) },
    Criterion { number: 3, title: "colorability and (<=5)-cycle extensions", checks: &[CheckId::Extension], max_n: Some(9), budget: None },
    Criterion { number: 4, title: "Clebsch parameters, homomorphisms and distance-3 colorings", checks: &[CheckId::Clebsch], max_n: Some(9), budget: Some(Duration::from_secs(300)) },
    Criterion { number: 5, title: "gadget equivalences on 200 seeded request graphs", checks: &[CheckId::Gadgets], max_n: Some(12), budget: None },
    Criterion { number: 6, title: "clone formula 2^(s N) for N <= 3", checks: &[CheckId::Clones], max_n: None, budget: None },
    Criterion { number: 7, title: "obstruction cogs and the alpha bounds", checks: &[CheckId::Cogs], max_n: None, budget: None },
    Criterion { number: 8, title: "rearrangements and Kempe involution", checks: &[CheckId::Rearrange], max_n: None, budget: None },
    Criterion { number: 9, title: "decomposition laminarity, maximality, poor shape, caught bound", checks: &[CheckId::Decomposition], max_n: Some(9), budget: None },
    Criterion { number: 10, title: "planar_code and JSON fixtures re-emit byte for byte", checks: &[CheckId::Formats], max_n: None, budget: None },
];

fn main() {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let opts = VerifyOptions { max_n: c.max_n, ..Default::default() };
        let summaries: Vec<CheckSummary> = c.checks.iter().map(|&id| run_check(id, &opts)).collect();
        let elapsed = start.elapsed();
        let mut ok = summaries.iter().all(CheckSummary::passed);
        let mut notes = Vec::new();
        if c.number == 7 && alpha1() / 9 != alpha0() {
            ok = false;
            notes.push("alpha0 != alpha1 / 9".to_string());
        }
        if let Some(b) = c.budget {
            if elapsed > b {
                ok = false;
                notes.push(format!("over budget {b:?}"));
            }
        }
        let instances: usize = summaries.iter().map(|s| s.instances).sum();
        let checks: u64 = summaries.iter().map(|s| s.checks).sum();
        let violations: Vec<&String> = summaries.iter().flat_map(|s| &s.violations).collect();
        println!(
            "criterion {:>2} {}: {} ({instances} instances, {checks} checks, {} violations, {:.2?}){}",
            c.number,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            violations.len(),
            elapsed,
            if notes.is_empty() { String::new() } else { format!(" [{}]", notes.join("; ")) }
        );
        for v in violations.iter().take(5) {
            println!("    {v}");
        }
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
