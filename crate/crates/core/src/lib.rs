//! A laboratory for inhomogeneous random 2-SAT.
//!
//! The object of study is the random formula TwoSAT(n, W): variables get
//! independent types, and each clause on a distinct-variable pair is
//! included independently with probability proportional to a symmetric
//! block kernel W evaluated at the two signed types. Whether such a
//! formula is asymptotically satisfiable is governed by the spectral
//! radius of the kernel's implication digraphon restricted to its
//! contradictory components — the quantity `rho_star` computed here.
//!
//! The crate provides the full pipeline:
//!
//! - [`kernel`]: block kernels over a finite type space, their implication
//!   digraphons, and a small TOML file format.
//! - [`components`]: support-digraph decomposition into strongly connected
//!   components, contradictory-component detection, product form.
//! - [`spectra`]: Perron–Frobenius eigenpairs per component, `rho_star`,
//!   kernel powers, Gelfand-formula cross-checks, asymptotic power laws.
//! - [`sampler`]: seeded, coupled samplers for the base model, the
//!   signed-variable variant, the support indicator model, and the
//!   independent-arc digraph model; DIMACS and edge-list I/O.
//! - [`solver`]: linear-time 2-SAT via strongly connected components, with
//!   certifying witnesses, plus a brute-force oracle.
//! - [`structures`]: bicycles, snakes, and serpents — the finite witness
//!   substructures behind the unsatisfiability arguments.
//! - [`harness`]: deterministic Monte Carlo sweeps, threshold bisection,
//!   and the digraph-vs-2-CNF marginal equality test.
//!
//! Everything is deterministic given a master seed: per-trial keys are
//! derived by hashing, never drawn from shared mutable state, so parallel
//! and sequential runs agree bit for bit.

pub mod components;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod rng;
pub mod sampler;
pub mod scc;
pub mod solver;
pub mod spectra;
pub mod structures;

pub use error::{Error, Result};
pub use kernel::{BlockDigraphon, BlockKernel, BlockSet, Sign, SignedBlock, TypeSpace};
pub use sampler::{Clause, Digraph, Formula, Lit, Model, TypeAssignment};
pub use solver::{solve_bruteforce, solve_scc, Status, Verdict};
pub use spectra::{rho_star, spectral_radius, RhoStarReport, SpectralReport};
