//! Matrix Partition problems over label posets.
//!
//! The crate represents finite structures whose relation tuples carry
//! labels from a small ordered alphabet, decides homomorphism questions
//! between them, and implements the constructive reductions that connect
//! the resulting problem families: a CSP encoding, a Hadamard blow-up,
//! arity packing, binary-to-many-relation rewrites, bounded obstruction
//! enumeration, and a 3-SAT hardness gadget.

#![warn(missing_docs)]

pub mod arity;
pub mod blowup;
pub mod canon;
pub mod cores;
pub mod encodings;
pub mod error;
pub mod gen;
pub mod hadamard;
pub mod label;
pub mod mps;
pub mod obstructions;
pub mod satgadget;
pub mod solver;
pub mod structure;

pub use arity::{
    binary_to_many_instance, binary_to_many_target, classify_packed_tuple, designated_no_instance,
    many_to_binary_instance, pack_structure, unpack_instance, NoCertificateReason, PackedSignature,
    TupleFamilyTag, UnpackOutcome,
};
pub use blowup::{block_size, star_to_01, BlowupResult};
pub use canon::{canonical_form, canonical_form_hex, canonical_representative, is_isomorphic};
pub use cores::{core_of, is_core};
pub use encodings::{base_of_doubled, from_csp, to_csp, DoubledSignature};
pub use error::{Error, Result};
pub use hadamard::{submatrix_monochromatic, sylvester, verify_hadamard, HadamardMatrix};
pub use label::{comparison_category, label_join, label_leq, Category, Label};
pub use mps::{parse_mps, serialize_mps};
pub use obstructions::{
    duality_holds, enumerate_structures, is_hom_minimal_obstruction,
    is_inclusion_minimal_obstruction, odd_cycle_empty, DualityOutcome, ObstructionMode,
    ObstructionReport, ObstructionSearch, ENUMERATION_CAP,
};
pub use satgadget::{
    assignment_to_hom, build_instance_tree, build_target, clause_path, expected_target_size,
    expected_tree_size, hom_to_assignment, parse_dimacs, random_cnf3, satisfiable_bruteforce,
    variable_path, verify_reduction, Cnf3, Lit, ReductionReport, TargetGadget, TreeGadget,
};
pub use solver::{
    enumerate_homomorphisms, find_homomorphism, for_each_homomorphism, hom_exists_bruteforce,
    SolveOpts, DEFAULT_MAP_CAP,
};
pub use structure::{is_homomorphism, is_trivial_target, HomMap, LStructure, Signature};
