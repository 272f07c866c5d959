use varcomp_core::gr::*;

fn main() {
    let scenario = GrScenario::default();
    let start = std::time::Instant::now();
    let results = run_scenario(&scenario).unwrap();
    for r in &results {
        if let Some(reason) = &r.skipped {
            println!("SKIP {:<28} {}", r.name, reason);
        } else {
            println!(
                "{} {:<28} residual {:>12.3e}  tol {:>8.0e}  pts {:>3}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name, r.residual, r.tolerance, r.points
            );
        }
    }
    println!("total: {:?}", start.elapsed());
}
