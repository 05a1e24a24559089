//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: composing [{lhs_src}]->[{lhs_tgt}] after [{rhs_src}]->[{rhs_tgt}]")]
    ArityMismatch {
        lhs_src: usize,
        lhs_tgt: usize,
        rhs_src: usize,
        rhs_tgt: usize,
    },

    #[error("monotone map not nondecreasing at position {position}")]
    NotMonotone { position: usize },

    #[error("map [{src}]->[{tgt}] is not strictly increasing at position {position}")]
    NotStrictlyIncreasing {
        src: usize,
        tgt: usize,
        position: usize,
    },

    #[error("simplicial identity violated: {relation} at dim {dim}, index {index}")]
    IdentityViolated {
        relation: String,
        dim: usize,
        index: usize,
    },

    #[error("face table out of range: dim {dim}, operator {op}, index {index}")]
    TableOutOfRange { dim: usize, op: usize, index: usize },

    #[error("degeneracy table s_{op} at dim {dim} is not injective")]
    DegeneracyNotInjective { dim: usize, op: usize },

    #[error("simplex reference ({dim}, {index}) out of range")]
    BadSimplexRef { dim: usize, index: usize },

    #[error("operation needs dimension {needed} but dim_cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("invalid horn parameter k={k} for n={n}")]
    InvalidHorn { k: usize, n: usize },

    #[error("map does not commute with {op} at dim {dim}, index {index}")]
    NotSimplicial {
        op: String,
        dim: usize,
        index: usize,
    },

    #[error("levelwise map at dim {dim} is not a bijection")]
    NotBijective { dim: usize },

    #[error("{law} fails in the given algebraic structure: {detail}")]
    LawViolated { law: String, detail: String },

    #[error("local system incompatible with 2-simplex {index}: tau* != rho* . sigma*")]
    LocalSystemIncompatible { index: usize },

    #[error("cochain is not a cocycle (coboundary nonzero on simplex ({dim}, {index}))")]
    NotACocycle { dim: usize, index: usize },

    #[error("cochain is not normalized (nonzero on degenerate simplex ({dim}, {index}))")]
    NotNormalized { dim: usize, index: usize },

    #[error("value is not a group homomorphism: {detail}")]
    NotAHomomorphism { detail: String },

    #[error("subgroup is not normal in the ambient group")]
    NotNormalSubgroup,

    #[error("group action is not by automorphisms: {detail}")]
    ActionNotAutomorphism { detail: String },

    #[error("function is not stabilizing: value differs on tuples {lhs:?} and {rhs:?}")]
    NotStabilizing { lhs: Vec<u32>, rhs: Vec<u32> },

    #[error("vertex cap {cap} leaves no headroom for apex above {needed}")]
    NoVertexHeadroom { cap: u32, needed: u32 },

    #[error("cone apex inadmissible: {detail}")]
    BadApex { detail: String },

    #[error("search budget of {budget} states exhausted; result undecided")]
    BudgetExhausted { budget: u64 },

    #[error("input must be Kan up to dim {needed}: unfillable horn ({n}, {k}) found")]
    NotKan { needed: usize, n: usize, k: usize },

    #[error("expected exactly one vertex, found {found}")]
    NotOneVertex { found: usize },

    #[error("bundle is not locally trivial over simplex ({dim}, {index})")]
    NotLocallyTrivial { dim: usize, index: usize },

    #[error("bundle operation requires fiber degree n > 1, got n = {n}")]
    FiberDegreeTooSmall { n: usize },

    #[error("base simplex ({dim}, {index}) is not free in dimension {m}")]
    NotFree { dim: usize, index: usize, m: usize },

    #[error("no normalized primitive exists at the current cap")]
    NoPrimitive,

    #[error("ordered complex invalid: {detail}")]
    BadOrderedComplex { detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("file format invalid: {detail}")]
    BadFile { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
