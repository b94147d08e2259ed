//! Numerical machinery for degenerate elliptic Dirichlet problems with
//! linear-growth integrands `F(|∇u|)`.
//!
//! The crate classifies integrands by the solvability criterion
//! `∫₁^∞ t F″(t) dt = ∞`, reproduces the radial construction that obstructs
//! solvability on annuli when the criterion fails, builds and certifies the
//! barrier functions that prove solvability when it holds, and solves the
//! ε-regularized problems with piecewise-linear finite elements to exhibit
//! the dichotomy numerically.
//!
//! Modules:
//! - [`calculus`]: adaptive quadrature, improper-integral divergence
//!   classification, monotone inversion, tabulated antiderivatives.
//! - [`integrand`]: the prototype family `a_p(s) = (1+s^p)^{-1/p}`, custom
//!   integrands built from a second derivative, hypothesis reports.
//! - [`radial`]: exact radially symmetric solutions on annuli, the maximal
//!   attainable boundary gap and its explicit upper bound.
//! - [`barrier`]: the decreasing weight `g`, the weakened integrand, barrier
//!   profiles and the super-solution certification sweep.
//! - [`solver`]: 2D meshes, the damped-Newton energy minimizer for the
//!   regularized problems, and ε-sweep diagnostics.

pub mod barrier;
pub mod calculus;
pub mod integrand;
pub mod radial;
pub mod solver;
