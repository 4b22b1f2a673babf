//! Super-logarithms, weighted Hardy potentials and critical
//! Caffarelli–Kohn–Nirenberg (CKN) type inequalities.
//!
//! The crate is `no_std` (it needs `alloc`) and contains the numerical core:
//!
//! * [`superlog`]: iterated logarithms, the tower map `F(u) = a - log a + log u`,
//!   the infinite product `F̃`, its primitive `φ`, the super-logarithm `L` and the
//!   auxiliary families `A⁰_k`, `A¹_k`, `B⁰`.
//! * [`weight`]: poly-log, super-log and tabulated weights together with their
//!   Hardy potentials `f_η`, `G_η`, the radius map and the non-degeneracy data `H`.
//! * [`rearrangement`]: the weighted radial rearrangement `R_g[u]` of piecewise-linear
//!   radial profiles, with exact level-set arithmetic.
//! * [`functionals`]: radial evaluation of every Rayleigh quotient and inequality side.
//! * [`varopt`]: derivative-free best-constant estimation and near-extremal families.
//!
//! IO, file formats and the command-line front-end live in the companion
//! `superlog-ckn-cli` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod corpus;
pub mod functionals;
pub mod quadrature;
pub mod rearrangement;
pub mod roots;
pub mod superlog;
pub mod varopt;
pub mod weight;

pub use error::{Error, Result};
pub use functionals::{QuotientSpec, QuotientValue, Variant};
pub use rearrangement::{AdmissibleDensity, RadialProfile};
pub use superlog::{poly_exp, poly_log, SuperLog, SuperLogParams, TowerArg, TowerValue};
pub use varopt::BestConstantEstimate;
pub use weight::{HardyPotential, NdcReport, WeightClass, WeightSpec};
