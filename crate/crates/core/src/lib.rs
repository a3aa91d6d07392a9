//! Algebraic Sato-Tate toolkit: twisted decomposable Lefschetz groups over Q,
//! trace statistics of compact candidate groups, normalized Frobenius traces
//! of genus 1 and 2 curves, and equidistribution diagnostics.

pub mod arith;
pub mod endo_galois;
pub mod equidist;
pub mod frobenius;
pub mod linalg;
pub mod pairing;
pub mod haar;
pub mod lefschetz;
pub mod quadrature;
pub mod rng;
