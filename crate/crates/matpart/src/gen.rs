//! Small generators for tests, benchmarks, and the examples in the
//! command-line tool.

use rand::Rng;

use crate::error::Result;
use crate::label::{Category, Label};
use crate::structure::{for_each_tuple, LStructure, Signature};

/// The one-symbol graph signature `E/2`.
pub fn edge_signature() -> Signature {
    Signature::parse("E/2").expect("static signature")
}

/// A structure over `sig` with every tuple labeled independently and
/// uniformly from `cat`'s alphabet.
///
/// Walks the full tuple space of every symbol, so keep `n` at desk
/// scale. Deterministic for a seeded generator.
pub fn random_structure(
    sig: &Signature,
    cat: Category,
    n: usize,
    rng: &mut impl Rng,
) -> Result<LStructure> {
    let labels = cat.labels();
    let mut s = LStructure::new(sig.clone(), cat, n);
    for sym in 0..sig.len() {
        s.set_default(sym, labels[rng.gen_range(0..labels.len())])?;
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        for_each_tuple(n, sig.arity(sym), |t| tuples.push(t.to_vec()));
        for t in tuples {
            s.set_label(sym, &t, labels[rng.gen_range(0..labels.len())])?;
        }
    }
    Ok(s)
}

/// A random graph over `E/2` in the category with labels `{0, 1, *}`.
pub fn random_star_graph(n: usize, rng: &mut impl Rng) -> Result<LStructure> {
    random_structure(&edge_signature(), Category::CStar, n, rng)
}

/// The complete loopless graph on `n` vertices as a `{0, 1}` structure:
/// loops labeled `0`, all cross edges labeled `1`.
pub fn complete_01_graph(n: usize) -> LStructure {
    let mut s = LStructure::new(edge_signature(), Category::C01, n);
    s.set_default(0, Label::One).expect("1 admitted");
    for v in 0..n {
        s.set_label(0, &[v, v], Label::Zero).expect("0 admitted");
    }
    s
}
