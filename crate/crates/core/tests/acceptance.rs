//! Acceptance criteria, one test each. They run one at a time so the
//! wall-clock budgets measure a single criterion, not contention.

use std::sync::Mutex;

use resolventlab::suite::run_criterion;

const SEED: u64 = 42;

static SERIAL: Mutex<()> = Mutex::new(());

fn check(id: u32) {
    let _lock = SERIAL.lock().unwrap_or_else(|p| p.into_inner());
    let result = run_criterion(id, SEED).expect("criterion id in range");
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_residue_identity() {
    check(1);
}

#[test]
fn criterion_02_multiplier_identities() {
    check(2);
}

#[test]
fn criterion_03_pole_sector() {
    check(3);
}

#[test]
fn criterion_04_symbol_decay() {
    check(4);
}

#[test]
fn criterion_05_nonlocal_multiplier() {
    check(5);
}

#[test]
fn criterion_06_weyl_law() {
    check(6);
}

#[test]
fn criterion_07_cluster_structure() {
    check(7);
}

#[test]
fn criterion_08_blowup() {
    check(8);
}

#[test]
fn criterion_09_cluster_removal() {
    check(9);
}

#[test]
fn criterion_10_stationary_phase() {
    check(10);
}

#[test]
fn criterion_11_weighted_resolvent_integral() {
    check(11);
}

#[test]
fn criterion_12_norm_probe_soundness() {
    check(12);
}
