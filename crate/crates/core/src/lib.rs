//! Numerical workbench for the quasilinear parabolic problem
//! `W_t = a(x, W) W_xx` on `[0,1] x [0,T]` with Dirichlet data.

pub mod appendix;
pub mod decompose;
pub mod estimates;
pub mod expr;
pub mod grid;
pub mod harness;
pub mod pde;
pub mod problem;
pub mod report;
