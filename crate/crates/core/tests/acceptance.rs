//! The acceptance suite: one line per criterion, then a single verdict.
//! Runs without the test harness so the lines are always printed.

use frontlab::harness::acceptance::run_all;

fn main() {
    let report = run_all(20_241_018);
    for line in report.lines() {
        println!("{line}");
    }
    let failed: Vec<u8> = report.criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", report.criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
