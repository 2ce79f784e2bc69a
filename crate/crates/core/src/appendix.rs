//! The two appendix lemmas with their explicit constants.
//!
//! Lemma A-1 (Gronwall type): if `f, h >= 0` and
//! `f(t)^2 <= e^{-λt} ∫_0^t e^{λτ} h(τ) f(τ) dτ` for all `t`, then
//! `∫_0^T f <= (2/λ) ∫_0^T h`.
//!
//! Witnesses come from the equality case. With `f(0) = 0`,
//! `d/dt (e^{λt} f^2) = e^{λt} f (2f' + λf)`, so `h = 2f' + λf` makes the
//! hypothesis an identity; multiplying `h` by `inflation >= 1` keeps it.
//!
//! Lemma A-2 (Poincaré type), on `[a, b]`:
//! `∫ f'^2 <= 2(b-a)^2 ∫ f''^2 + 2 (f(b) - f(a))^2 / (b-a)` and
//! `∫ f^2 <= 2(b-a)^2 ∫ f'^2 + 2 (b-a) f(a)^2`.

use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::grid::{trapezoid, GridError, TimeGrid};
use crate::report::{Constant, EstimateReport, Status};

#[derive(Debug, Error)]
pub enum AppendixError {
    #[error("precondition failed at t={t}: {msg}")]
    Precondition { t: f64, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

type Result<T> = std::result::Result<T, AppendixError>;

/// Hypothesis residual tolerance, relative to `max f^2`.
pub const HYPOTHESIS_TOL: f64 = 1e-8;
/// Conclusion quadrature slack, relative to the larger side.
pub const CONCLUSION_TOL: f64 = 1e-6;
/// Poincaré slack, relative to the larger side.
pub const POINCARE_TOL: f64 = 1e-9;

/// Nonnegative samples of `f` and `h` on equally spaced nodes from `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallTriple {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub h: Vec<f64>,
    pub lambda: f64,
}

impl GronwallTriple {
    pub fn new(tgrid: &TimeGrid, f: Vec<f64>, h: Vec<f64>, lambda: f64) -> Result<Self> {
        if tgrid.t_lo() != 0.0 {
            return Err(AppendixError::Invalid("time grid must start at 0".into()));
        }
        if f.len() != tgrid.n_nodes() || h.len() != tgrid.n_nodes() {
            return Err(AppendixError::Invalid("sample lengths do not match the grid".into()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(AppendixError::Invalid(format!("lambda must be positive, got {lambda}")));
        }
        let t = tgrid.nodes();
        for (i, (fv, hv)) in f.iter().zip(&h).enumerate() {
            if !(*fv >= 0.0 && *hv >= 0.0) {
                return Err(AppendixError::Precondition {
                    t: t[i],
                    msg: format!("f = {fv}, h = {hv} must be nonnegative and finite"),
                });
            }
        }
        Ok(GronwallTriple { t, f, h, lambda })
    }

    fn dt(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    /// `J(t_m) = e^{-λ t_m} ∫_0^{t_m} e^{λτ} h f dτ` at every node, by a
    /// fourth-order cumulative rule applied in the scaled form
    /// `J_{m+1} = e^{-λ dt} J_m + ∫_{t_m}^{t_{m+1}} e^{λ(τ - t_{m+1})} h f dτ`.
    pub fn hypothesis_rhs(&self) -> Vec<f64> {
        let n = self.t.len() - 1;
        let dt = self.dt();
        let lam = self.lambda;
        let q: Vec<f64> = self.f.iter().zip(&self.h).map(|(f, h)| f * h).collect();
        let mut out = vec![0.0; n + 1];
        for m in 0..n {
            // weights over nodes m-1..m+2, shifted at the ends
            let (start, w): (usize, [f64; 4]) = if n < 3 {
                (m, [0.5, 0.5, 0.0, 0.0])
            } else if m == 0 {
                (0, [9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0])
            } else if m == n - 1 {
                (n - 3, [1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0, 9.0 / 24.0])
            } else {
                (m - 1, [-1.0 / 24.0, 13.0 / 24.0, 13.0 / 24.0, -1.0 / 24.0])
            };
            let mut piece = 0.0;
            for (k, wk) in w.iter().enumerate() {
                let i = start + k;
                if *wk != 0.0 {
                    piece += wk * (lam * (self.t[i] - self.t[m + 1])).exp() * q[i];
                }
            }
            out[m + 1] = (-lam * dt).exp() * out[m] + dt * piece;
        }
        out
    }
}

/// Samples `f` and `h = inflation (2f' + λf)` on `tgrid`.
pub fn construct_gronwall_pair(f: &Expr, lambda: f64, inflation: f64, tgrid: &TimeGrid) -> Result<GronwallTriple> {
    if !(inflation >= 1.0) {
        return Err(AppendixError::Invalid(format!("inflation must be at least 1, got {inflation}")));
    }
    let f0 = f.eval1(tgrid.t_lo())?;
    if f0.abs() > 1e-12 {
        return Err(AppendixError::Precondition {
            t: tgrid.t_lo(),
            msg: format!("the equality construction needs f(0) = 0, got {f0}"),
        });
    }
    let var = f.vars()[0].clone();
    let df = f.differentiate(&var)?;
    let mut fs = Vec::with_capacity(tgrid.n_nodes());
    let mut hs = Vec::with_capacity(tgrid.n_nodes());
    for t in tgrid.nodes() {
        let fv = f.eval1(t)?;
        let base = 2.0 * df.eval1(t)? + lambda * fv;
        if fv < -1e-12 || base < -1e-12 {
            return Err(AppendixError::Precondition {
                t,
                msg: format!("need f >= 0 and 2f' + λf >= 0, got f = {fv}, 2f' + λf = {base}"),
            });
        }
        fs.push(fv.max(0.0));
        hs.push(inflation * base.max(0.0));
    }
    GronwallTriple::new(tgrid, fs, hs, lambda)
}

/// Checks the hypothesis node-wise up to `T`, then the conclusion. A failed
/// hypothesis makes the report `Inapplicable`.
pub fn check_gronwall(triple: &GronwallTriple, horizon: f64) -> Result<EstimateReport> {
    let dt = triple.dt();
    let last = ((horizon - triple.t[0]) / dt).round() as usize;
    if last >= triple.t.len() || (triple.t[last] - horizon).abs() > 1e-9 * dt {
        return Err(AppendixError::Invalid(format!("T = {horizon} is not a node of the triple's grid")));
    }
    let j = triple.hypothesis_rhs();
    let scale = triple.f[..=last]
        .iter()
        .zip(&j)
        .fold(0.0_f64, |a, (f, j)| a.max(f * f).max(j.abs()));
    let worst = (0..=last)
        .map(|m| triple.f[m] * triple.f[m] - j[m])
        .fold(f64::NEG_INFINITY, f64::max);
    let lhs = trapezoid(ndarray::ArrayView1::from(&triple.f[..=last]), dt);
    let hint = trapezoid(ndarray::ArrayView1::from(&triple.h[..=last]), dt);
    let c = 2.0 / triple.lambda;
    let rhs = c * hint;
    let report = EstimateReport::bound_abs(
        "gronwall",
        lhs,
        rhs,
        Constant::Explicit(c),
        0.0,
        CONCLUSION_TOL * lhs.max(rhs),
    );
    if worst > HYPOTHESIS_TOL * scale {
        return Ok(report
            .with_status(Status::Inapplicable)
            .with_note(format!("hypothesis violated by {worst:.3e}")));
    }
    Ok(report.with_note(format!("hypothesis residual {worst:.3e}")))
}

// 8-point Gauss-Legendre rule on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre quadrature on `panels` equal panels.
pub fn gauss_legendre(f: impl Fn(f64) -> std::result::Result<f64, ExprError>, a: f64, b: f64, panels: usize) -> Result<f64> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            s += w * (f(mid - half * x)? + f(mid + half * x)?);
        }
        acc += s * half;
    }
    Ok(acc)
}

fn interval(f: &Expr, a: f64, b: f64) -> Result<String> {
    if !(a < b) {
        return Err(AppendixError::Invalid(format!("need a < b, got [{a}, {b}]")));
    }
    Ok(f.vars()[0].clone())
}

/// (A.2) on `[a, b]` with `panels` quadrature panels.
pub fn check_poincare_a2(f: &Expr, a: f64, b: f64, panels: usize) -> Result<EstimateReport> {
    let var = interval(f, a, b)?;
    let d1 = f.differentiate(&var)?;
    let d2 = d1.differentiate(&var)?;
    let lhs = gauss_legendre(|x| d1.eval1(x).map(|v| v * v), a, b, panels)?;
    let curv = gauss_legendre(|x| d2.eval1(x).map(|v| v * v), a, b, panels)?;
    let jump = f.eval1(b)? - f.eval1(a)?;
    let len = b - a;
    let rhs = 2.0 * len * len * curv + 2.0 * jump * jump / len;
    Ok(EstimateReport::bound_abs(
        "poincare_a2",
        lhs,
        rhs,
        Constant::Explicit(2.0),
        0.0,
        POINCARE_TOL * lhs.max(rhs),
    ))
}

/// (A.3) on `[a, b]` with `panels` quadrature panels.
pub fn check_poincare_a3(f: &Expr, a: f64, b: f64, panels: usize) -> Result<EstimateReport> {
    let var = interval(f, a, b)?;
    let d1 = f.differentiate(&var)?;
    let lhs = gauss_legendre(|x| f.eval1(x).map(|v| v * v), a, b, panels)?;
    let slope = gauss_legendre(|x| d1.eval1(x).map(|v| v * v), a, b, panels)?;
    let fa = f.eval1(a)?;
    let len = b - a;
    let rhs = 2.0 * len * len * slope + 2.0 * len * fa * fa;
    Ok(EstimateReport::bound_abs(
        "poincare_a3",
        lhs,
        rhs,
        Constant::Explicit(2.0),
        0.0,
        POINCARE_TOL * lhs.max(rhs),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn t_expr(s: &str) -> Expr {
        Expr::parse(s, &["t"]).unwrap()
    }

    fn x_expr(s: &str) -> Expr {
        Expr::parse(s, &["x"]).unwrap()
    }

    #[test]
    fn equality_construction_satisfies_hypothesis() {
        let tg = TimeGrid::new(0.0, 2.0, 1999).unwrap();
        let tri = construct_gronwall_pair(&t_expr("t*exp(-t)"), 4.0, 1.0, &tg).unwrap();
        let j = tri.hypothesis_rhs();
        for m in 0..tri.t.len() {
            assert!((tri.f[m] * tri.f[m] - j[m]).abs() <= 1e-8, "m={m}");
            let t = tri.t[m];
            let h = 2.0 * (1.0 - t) * (-t).exp() + 4.0 * t * (-t).exp();
            assert!((tri.h[m] - h).abs() <= 1e-14);
        }
        let r = check_gronwall(&tri, 2.0).unwrap();
        assert!(r.passed() && r.margin() > 0.0);
        let int_f = 1.0 - 3.0 * (-2.0f64).exp();
        assert!((r.lhs - int_f).abs() < 1e-6);
        // ∫h = 2(f(2) - f(0)) + λ∫f
        let exact_rhs = 0.5 * (2.0 * 2.0 * (-2.0f64).exp() + 4.0 * int_f);
        assert!((r.rhs - exact_rhs).abs() < 1e-6);
    }

    #[test]
    fn inflation_and_zero_triples() {
        let tg = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let one = construct_gronwall_pair(&t_expr("t*exp(-t)"), 2.0, 1.0, &tg).unwrap();
        let two = construct_gronwall_pair(&t_expr("t*exp(-t)"), 2.0, 2.0, &tg).unwrap();
        for (a, b) in one.h.iter().zip(&two.h) {
            assert_eq!(2.0 * a, *b);
        }
        assert!(check_gronwall(&two, 1.0).unwrap().passed());
        let zero = construct_gronwall_pair(&t_expr("0"), 2.0, 1.0, &tg).unwrap();
        let r = check_gronwall(&zero, 1.0).unwrap();
        assert!(r.passed());
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn violated_hypothesis_is_inapplicable() {
        let tg = TimeGrid::new(0.0, 1.0, 100).unwrap();
        let tri = GronwallTriple::new(&tg, vec![1.0; 101], vec![0.0; 101], 1.0).unwrap();
        let r = check_gronwall(&tri, 1.0).unwrap();
        assert_eq!(r.status, Status::Inapplicable);
        assert!(construct_gronwall_pair(&t_expr("1 + t"), 1.0, 1.0, &tg).is_err());
        assert!(construct_gronwall_pair(&t_expr("t"), 1.0, 0.5, &tg).is_err());
    }

    #[test]
    fn poincare_closed_forms() {
        let r = check_poincare_a2(&x_expr("3"), 0.0, 1.0, 4).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.passed());
        let r = check_poincare_a2(&x_expr("2*x"), 0.5, 2.0, 4).unwrap();
        assert!((r.lhs - 4.0 * 1.5).abs() < 1e-13);
        assert!((r.rhs - 2.0 * 4.0 * 1.5).abs() < 1e-13);
        let r = check_poincare_a3(&x_expr("0"), -1.0, 1.0, 4).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let r = check_poincare_a3(&x_expr("3"), -1.0, 1.0, 4).unwrap();
        assert!((r.lhs - 18.0).abs() < 1e-13);
        assert!((r.rhs - 36.0).abs() < 1e-13);
    }

    #[test]
    fn poincare_on_sines() {
        for k in 1..=10 {
            let f = x_expr(&format!("sin({k}*pi*x)"));
            let kp = k as f64 * PI;
            let r = check_poincare_a2(&f, 0.0, 1.0, 32).unwrap();
            assert!((r.lhs - kp * kp / 2.0).abs() < 1e-10 * r.lhs);
            assert!((r.rhs - 2.0 * kp.powi(4) / 2.0).abs() < 1e-10 * r.rhs);
            assert!(r.passed());
            let r = check_poincare_a3(&f, 0.0, 1.0, 32).unwrap();
            assert!((r.lhs - 0.5).abs() < 1e-12);
            assert!(r.passed());
        }
    }

    #[test]
    fn a3_margin_scales_quadratically() {
        let f = x_expr("1 + x - x^3");
        let g = x_expr("3*(1 + x - x^3)");
        let r1 = check_poincare_a3(&f, -0.5, 1.5, 8).unwrap();
        let r3 = check_poincare_a3(&g, -0.5, 1.5, 8).unwrap();
        assert!((r3.margin() - 9.0 * r1.margin()).abs() <= 1e-10 * r3.margin().abs());
    }
}
