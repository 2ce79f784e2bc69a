//! Seeded instance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use std::f64::consts::PI;

use super::run::{run, RunResult};
use super::scenario::{CoefficientBlock, DataBlock, FamilyKind, Scenario, ScenarioError};

/// Uniform draw rounded to three decimals, so generated scenario files are
/// exact.
fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo..hi) * 1000.0).round() / 1000.0
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `a = a0 + α sin(πx) tanh(βy)` with `a_lo = a0 - α`, `a_hi = a0 + α`. Every
/// partial of order at most three is bounded by `2 α max(π, β)^3`.
pub fn random_coefficient(rng: &mut ChaCha8Rng) -> CoefficientBlock {
    let a0 = draw(rng, 0.8, 1.5);
    let alpha = draw(rng, 0.05, 0.4 * a0);
    let beta = draw(rng, 0.5, 2.0);
    let c3 = a0 + alpha + 2.0 * alpha * PI.max(beta).powi(3);
    CoefficientBlock {
        a: format!("{} + {}*sin(pi*x)*tanh({}*y)", num(a0), num(alpha), num(beta)),
        a_lo: a0 - alpha,
        a_hi: a0 + alpha,
        c3_bound: (c3 * 1000.0).ceil() / 1000.0,
    }
}

/// `Σ_k c_k sin(kπx)` with one to three modes; vanishes at both ends.
pub fn random_initial(rng: &mut ChaCha8Rng, amplitude: f64) -> String {
    let modes = rng.gen_range(1..=3);
    let mut terms = Vec::new();
    for k in 1..=modes {
        let c = draw(rng, -amplitude, amplitude) / k as f64;
        let c = (c * 1000.0).round() / 1000.0;
        if c != 0.0 {
            terms.push(format!("{}*sin({k}*pi*x)", num(c)));
        }
    }
    if terms.is_empty() {
        terms.push(format!("{}*sin(pi*x)", num(amplitude)));
    }
    terms.join(" + ")
}

/// `c t e^{-μt} + d sin(ωt) e^{-νt}`; vanishes at `t = 0`.
pub fn random_boundary(rng: &mut ChaCha8Rng, amplitude: f64) -> String {
    let c = draw(rng, -amplitude, amplitude);
    let mu = draw(rng, 0.5, 2.0);
    let d = draw(rng, -0.5 * amplitude, 0.5 * amplitude);
    let omega = draw(rng, 1.0, 4.0);
    let nu = draw(rng, 0.5, 2.0);
    format!(
        "{}*t*exp(-{}*t) + {}*sin({}*t)*exp(-{}*t)",
        num(c),
        num(mu),
        num(d),
        num(omega),
        num(nu)
    )
}

/// `count` admissible instances derived from `template`: the coefficient and
/// data are replaced, everything else is kept. Member `i` is named
/// `<template>-<i>` and carries seed `seed + i`.
pub fn generate_family(seed: u64, count: usize, template: &Scenario, kind: FamilyKind) -> Result<Vec<Scenario>, ScenarioError> {
    (0..count)
        .map(|i| {
            let member_seed = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(member_seed);
            let coefficient = random_coefficient(&mut rng);
            let (phi, g0, g1) = match kind {
                FamilyKind::Boundary => ("0".to_string(), random_boundary(&mut rng, 1.0), random_boundary(&mut rng, 1.0)),
                FamilyKind::Initial => (random_initial(&mut rng, 1.0), "0".to_string(), "0".to_string()),
                FamilyKind::Full => (
                    random_initial(&mut rng, 1.0),
                    random_boundary(&mut rng, 0.3),
                    random_boundary(&mut rng, 0.3),
                ),
            };
            let mut file = template.file.clone();
            file.name = format!("{}-{i:03}", template.file.name);
            file.seed = member_seed;
            file.coefficient = coefficient;
            file.data = DataBlock {
                phi,
                g0,
                g1,
                strict_corners: true,
            };
            file.family = None;
            file.reference = None;
            Scenario::from_file(file)
        })
        .collect()
}

/// Runs every member, possibly concurrently. Results are in member order.
pub fn run_family(members: &[Scenario]) -> Vec<RunResult> {
    members.par_iter().map(run).collect()
}

/// The family a scenario declares, or the scenario alone.
pub fn expand(sc: &Scenario, seed: Option<u64>) -> Result<Vec<Scenario>, ScenarioError> {
    match &sc.file.family {
        Some(f) => generate_family(seed.unwrap_or(sc.seed()), f.count, sc, f.kind),
        None => Ok(vec![sc.clone()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> Scenario {
        Scenario::parse(
            r#"
name = "tpl"
[coefficient]
a = "1 + 0*x + 0*y"
a_lo = 1
a_hi = 1
c3_bound = 1
[data]
phi = "0"
g0 = "0"
g1 = "0"
[numerics]
n_cells = 20
n_steps = 20
theta = 1.0
[window]
c1 = 0.1
eps = 0.1
T = 1.0
[checks]
run = ["lemma34"]
"#,
        )
        .unwrap()
    }

    #[test]
    fn families_are_admissible_and_reproducible() {
        let tpl = template();
        assert!(generate_family(1, 0, &tpl, FamilyKind::Full).unwrap().is_empty());
        for kind in [FamilyKind::Boundary, FamilyKind::Initial, FamilyKind::Full] {
            let a = generate_family(11, 4, &tpl, kind).unwrap();
            let b = generate_family(11, 4, &tpl, kind).unwrap();
            assert_eq!(a.len(), 4);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.file, y.file);
                assert!(x.bounds.passed() && x.compatibility.passed());
                assert!(x.compatibility.zero_corners);
            }
        }
    }

    #[test]
    fn family_runs_are_in_member_order() {
        let members = generate_family(5, 3, &template(), FamilyKind::Boundary).unwrap();
        let out = run_family(&members);
        let names: Vec<_> = out.iter().map(|r| r.scenario.as_str()).collect();
        assert_eq!(names, ["tpl-000", "tpl-001", "tpl-002"]);
        assert!(out.iter().all(RunResult::passed));
    }
}
