//! Canonical forms and isomorphism testing by exhaustive permutation
//! minimization.
//!
//! Intended for the small structures produced by obstruction
//! enumeration; the domain size is capped at 8.

use crate::error::{Error, Result};
use crate::structure::{for_each_tuple, LStructure};

/// Largest domain size accepted for canonicalization.
pub const CANON_DOMAIN_CAP: usize = 8;

fn push_usize(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u64).to_le_bytes());
}

fn header_bytes(s: &LStructure) -> Vec<u8> {
    let mut out = Vec::new();
    out.push(s.category().code());
    push_usize(&mut out, s.signature().len());
    for (name, arity) in s.signature().iter() {
        push_usize(&mut out, name.len());
        out.extend_from_slice(name.as_bytes());
        push_usize(&mut out, arity);
    }
    push_usize(&mut out, s.domain_size());
    out
}

/// Full label table of one symbol in lexicographic tuple order, one code
/// byte per tuple.
fn label_table(s: &LStructure, sym: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for_each_tuple(s.domain_size(), s.signature().arity(sym), |t| {
        out.push(s.label_at(sym, t).code());
    });
    out
}

fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                go(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    go(n, &mut current, &mut used, &mut out);
    out
}

/// The label-table bytes of `s` relabeled by `perm` (element `e` becomes
/// `perm[e]`), without materializing the permuted structure.
fn permuted_tables(s: &LStructure, perm: &[usize], tables: &[Vec<u8>]) -> Vec<u8> {
    let n = s.domain_size();
    let mut inverse = vec![0usize; n];
    for (e, &p) in perm.iter().enumerate() {
        inverse[p] = e;
    }
    let mut out = Vec::new();
    for (sym, table) in tables.iter().enumerate() {
        let k = s.signature().arity(sym);
        for_each_tuple(n, k, |t| {
            let mut index = 0usize;
            for &e in t {
                index = index * n + inverse[e];
            }
            out.push(table[index]);
        });
    }
    out
}

fn check_cap(s: &LStructure) -> Result<()> {
    if s.domain_size() > CANON_DOMAIN_CAP {
        return Err(Error::CapExceeded {
            what: format!("canonicalization of domain size {}", s.domain_size()),
            limit: CANON_DOMAIN_CAP as u64,
        });
    }
    Ok(())
}

fn minimal_permutation(s: &LStructure) -> Result<(Vec<usize>, Vec<u8>)> {
    check_cap(s)?;
    let n = s.domain_size();
    let tables: Vec<Vec<u8>> = (0..s.signature().len())
        .map(|sym| label_table(s, sym))
        .collect();
    let mut best: Option<(Vec<usize>, Vec<u8>)> = None;
    for perm in lex_permutations(n) {
        let bytes = permuted_tables(s, &perm, &tables);
        let better = match &best {
            None => true,
            Some((_, b)) => bytes < *b,
        };
        if better {
            best = Some((perm, bytes));
        }
    }
    Ok(best.unwrap_or((Vec::new(), Vec::new())))
}

/// A byte string equal for two structures exactly when they are
/// isomorphic: a header (category, signature, domain size) followed by
/// the lexicographically least full label table over all relabelings.
///
/// The empty structure's form is the bare header. Errors beyond domain
/// size 8.
pub fn canonical_form(s: &LStructure) -> Result<Vec<u8>> {
    let (_, min_tables) = minimal_permutation(s)?;
    let mut out = header_bytes(s);
    out.extend_from_slice(&min_tables);
    Ok(out)
}

/// [`canonical_form`] rendered as lowercase hex, for reports and
/// fingerprints.
pub fn canonical_form_hex(s: &LStructure) -> Result<String> {
    let bytes = canonical_form(s)?;
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(out)
}

/// The relabeled copy of `s` that achieves the canonical form, using the
/// first permutation that reaches the minimum.
pub fn canonical_representative(s: &LStructure) -> Result<LStructure> {
    let (perm, _) = minimal_permutation(s)?;
    if s.domain_size() == 0 {
        return Ok(s.clone());
    }
    s.permuted(&perm)
}

/// Whether `g` and `h` are isomorphic: same signature, category, and
/// domain size, and equal canonical forms.
pub fn is_isomorphic(g: &LStructure, h: &LStructure) -> Result<bool> {
    if g.signature() != h.signature()
        || g.category() != h.category()
        || g.domain_size() != h.domain_size()
    {
        return Ok(false);
    }
    Ok(canonical_form(g)? == canonical_form(h)?)
}
