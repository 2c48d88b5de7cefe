//! Exact-arithmetic workbench for genus-0 Gromov–Witten theory.
//!
//! The crate is organised bottom-up:
//!
//! * [`novikov`]: truncated Novikov-ring arithmetic over an effective curve-class monoid.
//! * [`cohomology`]: graded ring models (projective spaces and products) with pairing and diagonal.
//! * [`strata`]: dual graphs of stable maps and their expected dimension.
//! * [`correlators`]: correlator tables with reduction axioms and splitting residuals.
//! * [`wdvv`]: quantum product and the triangular WDVV solver.
//! * [`axioms`]: randomized and exhaustive property checks on solved tables.
//! * [`descendants`]: string/dilaton reducers and the genus-0 generating series.
//! * [`floer`]: Novikov-ring chain complexes and their homology ranks.
//! * [`cli`]: command-line front end; [`cache`] holds solved tables on disk.
//!
//! Every number that leaves the core is an exact rational.

pub mod axioms;
pub mod cache;
pub mod cli;
pub mod cohomology;
pub mod correlators;
pub mod descendants;
pub mod exact;
pub mod floer;
pub mod novikov;
pub mod strata;
pub mod wdvv;

pub use cohomology::{CohClass, RingModel};
pub use correlators::{CorrelatorKey, CorrelatorTable, Insertion, Provenance};
pub use exact::Rational;
pub use floer::FloerComplex;
pub use novikov::{ClassLattice, CurveClass, NovikovElement};
pub use strata::DualGraph;
