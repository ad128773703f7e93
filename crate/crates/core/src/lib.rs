//! Certified amplification norms `||φ_n||` of linear maps between concrete
//! operator spaces, and the summed norm `||φ||_p = Σ_n ||φ_n|| / n^p`.
//!
//! - [`opspace`]: spaces `V ⊆ M_d`, elements of `M_n(V)`, matrix norms.
//! - [`linmap`]: maps `φ: V → W`, amplification, brackets for `||φ_n||`.
//! - [`npnorm`]: enclosures of `||φ||_p`, membership, index estimation.
//! - [`catalog`]: built-in maps with known level norms.
//! - [`oracle`]: brute-force lower bounds used to cross-check the optimizer.
//! - [`io`]: JSON file formats.

pub mod bracket;
pub mod catalog;
pub mod error;
pub mod io;
pub mod linalg;
pub mod linmap;
pub mod npnorm;
pub mod opspace;
pub mod oracle;

pub use bracket::{BoundSource, NormBracket};
pub use error::{Error, Result};
pub use linmap::{
    base_norm, base_norm_with, build_level_table, cb_norm, level_norm_bracket, make_map, CbNorm, LevelEntry,
    LevelNormTable, LinearMapRep, OptBudget, Witness,
};
pub use npnorm::{
    inclusion_check, index_estimate, index_estimate_from_sequence, membership, np_norm, zeta_tail, ClosedForm,
    InclusionReport, IndexEstimate, NpParameter, NpResult, Verdict,
};
pub use opspace::{make_space, verify_axioms, OperatorSpace, SpaceElement};
