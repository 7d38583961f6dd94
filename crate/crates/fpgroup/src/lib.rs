//! Finitely presented groups.
//!
//! Words over a signed alphabet, presentations with a plain-text format,
//! coset tables built either by Todd-Coxeter enumeration or from a known
//! finite permutation action, Reidemeister-Schreier subgroup presentations,
//! Tietze simplification, and abelian invariants through Smith normal form.

pub mod abelian;
mod error;
pub mod coset;
pub mod presentation;
pub mod quotient;
pub mod schreier;
pub mod snf;
pub mod tietze;
pub mod todd_coxeter;
pub mod word;

pub use abelian::{abelianization, AbelianInvariants};
pub use coset::{CosetTable, SubgroupDescriptor};
pub use error::FpError;
pub use presentation::Presentation;
pub use quotient::coset_table_from_action;
pub use schreier::{reidemeister_schreier, reidemeister_schreier_capped, Rewriter, SchreierPresentation, TransversalOrder};
pub use snf::{smith_normal_form, IntMatrix, SmithForm};
pub use tietze::{simplify, simplify_with_limits, Simplified, SimplifyLimits};
pub use todd_coxeter::{todd_coxeter, Enumeration, EnumerationLimits, EnumerationStats};
pub use word::{FreeGroup, Letter, Word};
