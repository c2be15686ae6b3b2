//! Acceptance matrix: one PASS/FAIL line per criterion.

use spinor_workbench::checks::{acceptance, seed_from_env};

fn main() {
    let seed = seed_from_env();
    let scenarios = acceptance(seed);
    let mut failed = Vec::new();
    for (i, s) in scenarios.iter().enumerate() {
        let verdict = if s.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {} [{}] {} ({} ms, limit {} ms)",
            i + 1,
            s.id,
            s.title,
            s.elapsed.as_millis(),
            s.limit.as_millis()
        );
        for c in s.failures() {
            println!("    {}: expected {}, got {}", c.claim, c.expected, c.got);
        }
        if !s.passed() {
            failed.push(i + 1);
        }
    }
    println!("seed {seed}");
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria pass", scenarios.len());
}
