//! Combinatorial geometric models for derived categories of relative
//! Ginzburg algebras of n-angulated marked surfaces.
//!
//! The crate builds ideal n-angulations as ribbon graphs, constructs their
//! relative Ginzburg dg-quivers and Jacobian gentle algebras, computes exact
//! homology of the associated dg path categories, models matching curves and
//! their intersection combinatorics, and verifies the equality of the
//! geometric and categorical extended mutation matrices together with the
//! flip/mutation compatibility — all at desk scale with exact arithmetic.
//!
//! Start with the runnable examples (`cargo run --example <name>`), or the
//! `schober` binary for file-based workflows.

pub mod cluster;
pub mod curves;
pub mod dgalg;
pub mod ginzburg;
pub mod intersect;
pub mod surface;
pub mod workspace;
