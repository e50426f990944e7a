//! The crate-wide error type.

use crate::label::{Category, Label};

/// Errors reported by validation, parsing, and resource guards.
///
/// Resource guards (`CapExceeded`, `Timeout`) are kept distinct from
/// validation errors so callers can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A label is not part of the given category's alphabet.
    #[error("label `{label}` is not admitted by category `{category}`")]
    LabelNotAdmitted {
        /// The offending label.
        label: Label,
        /// The category that rejects it.
        category: Category,
    },
    /// Join was requested in a category without a join operation.
    #[error("category `{0}` has no join operation")]
    JoinUndefined(Category),
    /// A symbol name was declared twice in one signature.
    #[error("duplicate symbol `{0}` in signature")]
    DuplicateSymbol(String),
    /// A symbol name is empty, reserved, or contains forbidden characters.
    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),
    /// A relation symbol was declared with arity 0.
    #[error("symbol `{0}` must have arity at least 1")]
    ZeroArity(String),
    /// A symbol name was looked up in a signature that does not declare it.
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    /// A symbol index was out of range for the signature.
    #[error("symbol index {index} out of range ({count} symbols)")]
    SymbolIndexOutOfRange {
        /// The requested index.
        index: usize,
        /// Number of declared symbols.
        count: usize,
    },
    /// A tuple's length does not match the symbol's arity.
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    ArityMismatch {
        /// Symbol whose arity was violated.
        symbol: String,
        /// Declared arity.
        expected: usize,
        /// Length of the offending tuple.
        got: usize,
    },
    /// A tuple mentions an element outside the domain.
    #[error("element {element} out of range for domain size {domain_size}")]
    ElementOutOfRange {
        /// The offending element.
        element: usize,
        /// The domain size it must be below.
        domain_size: usize,
    },
    /// Two structures that must share a signature do not.
    #[error("structures have different signatures")]
    SignatureMismatch,
    /// The two categories cannot be compared in a common order.
    #[error("categories `{0}` and `{1}` have no common comparison order")]
    IncompatibleCategories(Category, Category),
    /// A map's source or target size does not match the structures at hand.
    #[error("map shape mismatch: map is {map_source}->{map_target}, structures are {source_size}->{target_size}")]
    MapShapeMismatch {
        /// Source size recorded in the map.
        map_source: usize,
        /// Target size recorded in the map.
        map_target: usize,
        /// Domain size of the source structure.
        source_size: usize,
        /// Domain size of the target structure.
        target_size: usize,
    },
    /// The signature does not have the shape required by a transformation.
    #[error("signature has the wrong shape: {0}")]
    SignatureShape(String),
    /// The structure does not satisfy a transformation's input contract.
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    /// A configured resource cap would be exceeded.
    #[error("{what} exceeds the configured cap of {limit}")]
    CapExceeded {
        /// What grew past the cap.
        what: String,
        /// The cap value.
        limit: u64,
    },
    /// A deadline passed while searching.
    #[error("search deadline exceeded")]
    Timeout,
    /// A parse error with a 1-based line number (0 = end of input).
    #[error("line {line}: {msg}")]
    Parse {
        /// 1-based line number; 0 marks an end-of-input condition.
        line: usize,
        /// Human-readable diagnostic.
        msg: String,
    },
    /// A witness map does not have the shape the gadget guarantees.
    #[error("witness inconsistent with the gadget: {0}")]
    WitnessShape(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
