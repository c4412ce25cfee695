//! End-to-end verification suite; prints one line per criterion.

use biphoton::selftest::run_all;

#[test]
fn acceptance() {
    let results = run_all();
    let mut all_pass = true;
    for r in &results {
        println!(
            "{} {:<28} {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_pass &= r.pass;
    }
    assert!(all_pass, "one or more acceptance criteria failed");
}
