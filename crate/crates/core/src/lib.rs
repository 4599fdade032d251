//! Word problems, equational deduction and finite-model checks for the
//! monoid variety J and the eleven varieties below it.
//!
//! ```
//! use varietal::{classify, identity, Bounds, Verdict, VarietyId};
//!
//! let c = classify(&identity("x z x y t y = x z y x t y"), &Bounds::new(4, 8), 2);
//! assert_eq!(c.verdict(VarietyId::I), Verdict::Holds);
//! assert_eq!(c.verdict(VarietyId::J), Verdict::Fails);
//! ```

pub mod error;
pub mod identity;
pub mod models;
pub mod nfb;
pub mod oracle;
pub mod rewrite;
pub mod word;

pub use error::{ExperimentError, FamilyError, ModelError, ParseError, RewriteError, WordError};
pub use identity::{
    basis, identity, lattice_leq, phi_system, u_word, w_family, Identity, IdentitySystem, Permutation, VarietyId,
};
pub use models::{b0_monoid, from_presentation, refuter_models, satisfies, satisfies_system, FiniteMonoid, Relation};
pub use nfb::{shape_experiment, template_experiment, u_shape, ShapeReport};
pub use oracle::{classify, necessary_filter, status, Classification, Evidence, HoldsStatus, Verdict};
pub use rewrite::{derive, explore, one_step, Bounds, Derivation, DeriveOutcome, Step, Substitution};
pub use word::{letter, word, Decomposition, DividerToken, Letter, Word};
