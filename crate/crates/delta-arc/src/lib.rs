//! Delta modelling for component-and-connector architecture descriptions.
//!
//! A *core model* describes one complete product as a hierarchy of
//! components with typed, directed ports, wired by connectors — explicitly
//! or implicitly via autoconnect. *Delta models* transform that core by
//! adding, removing, renaming, replacing, and rewiring elements; a *product
//! configuration* selects the deltas for one variant. Derivation loads and
//! checks the core, computes an application order satisfying each delta's
//! constraint, applies the deltas with per-step applicability and local
//! wellformedness checks, fully checks the result, and pretty-prints it back
//! to `.arc` files.
//!
//! The pipeline is exposed module by module: [`lexer`]/[`parser`] build the
//! model types in [`model`], [`delta`] and [`order`] transform and schedule,
//! [`check`] enforces the context conditions, [`printer`] renders components
//! back to canonical text, [`generate`] orchestrates end-to-end derivation,
//! and [`metrics`] reports corpus sizes. All findings flow through
//! [`diag::Diagnostic`] with stable machine-readable codes.

pub mod check;
pub mod delta;
pub mod diag;
pub mod generate;
pub mod lexer;
pub mod metrics;
pub mod model;
pub mod order;
pub mod parser;
pub mod printer;

pub use diag::{CheckReport, Code, Diagnostic, Loc, Severity};
pub use model::ModelRepository;
