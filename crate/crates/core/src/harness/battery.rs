//! Seeded batteries for the appendix lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::appendix::{check_gronwall, check_poincare_a2, check_poincare_a3, construct_gronwall_pair, AppendixError};
use crate::expr::Expr;
use crate::grid::TimeGrid;
use crate::report::EstimateReport;

/// `c0 + Σ_{k=1}^{K} (a_k cos(kωx) + b_k sin(kωx))` with `K <= 3`.
pub fn random_trig(rng: &mut ChaCha8Rng) -> Expr {
    let omega = rng.gen_range(0.5..6.0);
    let mut text = format!("{:?}", rng.gen_range(-1.0..1.0));
    for k in 1..=rng.gen_range(1..=3) {
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        text.push_str(&format!(" + {a:?}*cos({}*x) + {b:?}*sin({}*x)", k as f64 * omega, k as f64 * omega));
    }
    Expr::parse(&text, &["x"]).expect("generated expression parses")
}

/// `f(t) = t exp(s(t))` with `s(t) = p sin(qt)` and `|s'| <= pq <= λ/2`,
/// so that `2f' + λf = exp(s)(2 + t(2s' + λ)) >= 0` and `f(0) = 0`.
pub fn random_gronwall_f(rng: &mut ChaCha8Rng, lambda: f64) -> Expr {
    let q = rng.gen_range(0.5..3.0);
    let p = rng.gen_range(0.0..1.0) * lambda / (2.0 * q);
    Expr::parse(&format!("t*exp({p:?}*sin({q:?}*t))"), &["t"]).expect("generated expression parses")
}

/// Equality-construction Gronwall triples: `count` seeded instances on
/// `[0, T]` with `steps` steps.
pub fn gronwall_battery(seed: u64, count: usize, horizon: f64, steps: usize) -> Result<Vec<EstimateReport>, AppendixError> {
    let tg = TimeGrid::new(0.0, horizon, steps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let lambda = rng.gen_range(0.2..5.0);
            let inflation = 1.0 + rng.gen_range(0.0..1.0);
            let f = random_gronwall_f(&mut rng, lambda);
            let triple = construct_gronwall_pair(&f, lambda, inflation, &tg)?;
            let mut r = check_gronwall(&triple, horizon)?;
            r.note = format!("#{i} f = {f}, λ = {lambda:.6}, inflation {inflation:.6}; {}", r.note);
            Ok(r)
        })
        .collect()
}

/// `count` trigonometric polynomials, each checked against (A.2) and (A.3) on
/// `intervals` random subintervals of `[0, 2]`.
pub fn poincare_battery(seed: u64, count: usize, intervals: usize, panels: usize) -> Result<Vec<EstimateReport>, AppendixError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * count * intervals);
    for _ in 0..count {
        let f = random_trig(&mut rng);
        for _ in 0..intervals {
            let a = rng.gen_range(0.0..1.5);
            let b = a + rng.gen_range(0.01..0.5);
            out.push(check_poincare_a2(&f, a, b, panels)?);
            out.push(check_poincare_a3(&f, a, b, panels)?);
        }
    }
    Ok(out)
}
