//! Desk-scale workbench for regularized Epstein-Glaser renormalization.
//!
//! The crate bundles the combinatorial side (multigraphs with the full
//! subgraph taxonomy, set-partition lattices, Epstein-Glaser and Zimmermann
//! forests, the Faà di Bruno Hopf algebra with its composition product), the
//! exact symbolic side (truncated Laurent series over a transcendental
//! coefficient ring, Gamma expansions, minimal subtraction), and the numeric
//! side (modified Bessel functions, regularized Hadamard two-point functions,
//! one-dimensional distribution-extension experiments, and an exactly
//! solvable Euclidean amplitude backend for series-parallel graphs).

pub mod amplitude;
pub mod extend;
pub mod graph;
pub mod hadamard;
pub mod hopf;
pub mod laurent;
pub mod partition;
pub mod quad;
pub mod renorm;
pub mod special;
