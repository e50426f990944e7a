//! Signature transformations: many relations into one relation of
//! higher arity (packing over a marker element), and the rewrites
//! between binary graphs and many-relation signatures.
//!
//! Packing maps a structure over `p` symbols of maximum arity `k` to a
//! structure over one symbol of arity `k + p - 1` plus a fresh marker
//! element. Tuples fall into three classes: a window of non-marker
//! positions aligned with one base symbol (inheriting that symbol's
//! label), the all-marker tuple (labeled 1), and the rest (labeled 0).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::label::{label_join, Category, Label};
use crate::structure::{for_each_tuple, LStructure, Signature};

/// A base signature together with its single-symbol packed counterpart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedSignature {
    base: Signature,
    packed: Signature,
}

impl PackedSignature {
    /// Packs `base` (with `p` symbols of maximum arity `k`) into the
    /// one-symbol signature `R` of arity `k + p - 1`.
    pub fn new(base: Signature) -> Result<PackedSignature> {
        if base.is_empty() {
            return Err(Error::SignatureShape(
                "packing needs at least one symbol".to_string(),
            ));
        }
        let arity = base.max_arity() + base.len() - 1;
        let packed = Signature::new([("R", arity)])?;
        Ok(PackedSignature { base, packed })
    }

    /// The original signature.
    pub fn base(&self) -> &Signature {
        &self.base
    }

    /// The one-symbol packed signature.
    pub fn packed(&self) -> &Signature {
        &self.packed
    }

    /// Arity of the packed symbol.
    pub fn packed_arity(&self) -> usize {
        self.packed.arity(0)
    }
}

/// The class of one packed tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TupleFamilyTag {
    /// A marker-free window aligned with base symbol `symbol`; the tuple
    /// stands for that symbol applied to `payload`.
    Payload {
        /// Position of the base symbol the window belongs to.
        symbol: usize,
        /// The window contents, one element per coordinate of the symbol.
        payload: Vec<usize>,
    },
    /// Every coordinate is the marker.
    AllMarker,
    /// Everything else.
    Residual,
}

fn classify_raw(tuple: &[usize], base: &Signature, marker: usize) -> TupleFamilyTag {
    let non_marker: Vec<usize> = (0..tuple.len()).filter(|&i| tuple[i] != marker).collect();
    if non_marker.is_empty() {
        return TupleFamilyTag::AllMarker;
    }
    let start = non_marker[0];
    let len = non_marker.len();
    let contiguous = non_marker.iter().enumerate().all(|(o, &pos)| pos == start + o);
    if contiguous && start < base.len() && base.arity(start) == len {
        TupleFamilyTag::Payload {
            symbol: start,
            payload: tuple[start..start + len].to_vec(),
        }
    } else {
        TupleFamilyTag::Residual
    }
}

/// Classifies one tuple of the packed tuple space: the leading marker
/// count selects the base symbol whose window the tuple may carry.
pub fn classify_packed_tuple(
    tuple: &[usize],
    base: &Signature,
    marker: usize,
) -> Result<TupleFamilyTag> {
    let packed = PackedSignature::new(base.clone())?;
    if tuple.len() != packed.packed_arity() {
        return Err(Error::ArityMismatch {
            symbol: packed.packed().name(0).to_string(),
            expected: packed.packed_arity(),
            got: tuple.len(),
        });
    }
    Ok(classify_raw(tuple, base, marker))
}

/// The window tuple standing for base symbol `symbol` applied to
/// `payload`: leading markers, the payload, trailing markers.
fn window_tuple(symbol: usize, payload: &[usize], marker: usize, packed_arity: usize) -> Vec<usize> {
    let mut out = vec![marker; packed_arity];
    out[symbol..symbol + payload.len()].copy_from_slice(payload);
    out
}

/// Packs `a` into a one-symbol structure: the domain gains a marker
/// element at the last index, window tuples inherit the base labels, the
/// all-marker tuple is labeled 1, and residual tuples are labeled 0.
///
/// The same construction serves targets and instances.
pub fn pack_structure(a: &LStructure) -> Result<LStructure> {
    if !matches!(a.category(), Category::CStar | Category::C01) {
        return Err(Error::UnsupportedInput(
            "packing expects a structure over the 0/1/* labels".to_string(),
        ));
    }
    let packed = PackedSignature::new(a.signature().clone())?;
    let n = a.domain_size();
    let marker = n;
    let mut out = LStructure::new(packed.packed().clone(), a.category(), n + 1);
    let mut writes: Vec<(Vec<usize>, Label)> = Vec::new();
    for_each_tuple(n + 1, packed.packed_arity(), |tuple| {
        match classify_raw(tuple, packed.base(), marker) {
            TupleFamilyTag::AllMarker => writes.push((tuple.to_vec(), Label::One)),
            TupleFamilyTag::Payload { symbol, payload } => {
                let label = a.label_at(symbol, &payload);
                if label != Label::Zero {
                    writes.push((tuple.to_vec(), label));
                }
            }
            TupleFamilyTag::Residual => {}
        }
    });
    for (tuple, label) in writes {
        out.set_label(0, &tuple, label)?;
    }
    Ok(out)
}

/// Why [`unpack_instance`] produced no structure: the certificate that
/// the input maps into no packed target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoCertificateReason {
    /// Some diagonal carries `*`, which no packed target's diagonals
    /// dominate.
    StarDiagonal,
    /// The collapsed all-marker class joins to `*` instead of 1.
    AllMarkerNotOne,
    /// Some collapsed residual-class label is not 0.
    ResidualNotZero,
}

impl fmt::Display for NoCertificateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            NoCertificateReason::StarDiagonal => "star-diagonal",
            NoCertificateReason::AllMarkerNotOne => "all-marker-label-not-one",
            NoCertificateReason::ResidualNotZero => "residual-label-not-zero",
        };
        write!(f, "{token}")
    }
}

/// The outcome of [`unpack_instance`]: a base-signature structure, or a
/// certificate that the input maps into no packed target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnpackOutcome {
    /// The recovered instance over the base signature.
    Structure(LStructure),
    /// No recovery: the input is a NO instance for every packed target,
    /// for the stated reason.
    NoCertificate(NoCertificateReason),
}

fn join_star(a: Label, b: Label) -> Label {
    // Inputs come from a 0/1/* structure, so the star-category join is
    // total here.
    label_join(a, b, Category::CStar).expect("star labels join")
}

/// Inverts packing on instances: splits the domain by diagonal label,
/// collapses the 1-diagonal part to a single marker (joining labels over
/// each collapsed class), validates the marker and residual labels, and
/// reads the base structure off the window tuples.
///
/// A structure is returned exactly when the input maps into some packed
/// target; otherwise the certificate names the failed check. The base
/// signature must have at least two symbols: with a single symbol the
/// packed diagonal cannot separate marker from payload elements.
pub fn unpack_instance(packed_instance: &LStructure, base: &Signature) -> Result<UnpackOutcome> {
    if !matches!(packed_instance.category(), Category::CStar | Category::C01) {
        return Err(Error::UnsupportedInput(
            "unpacking expects a structure over the 0/1/* labels".to_string(),
        ));
    }
    if base.is_empty() {
        return Err(Error::SignatureShape(
            "unpacking needs a base signature with at least one symbol".to_string(),
        ));
    }
    if base.len() < 2 {
        return Err(Error::UnsupportedInput(
            "unpacking needs at least two base symbols; with one symbol the packed \
             diagonals cannot separate the marker"
                .to_string(),
        ));
    }
    let packed = PackedSignature::new(base.clone())?;
    if packed_instance.signature().len() != 1 {
        return Err(Error::SignatureShape(format!(
            "packed instance must have exactly one symbol, got {}",
            packed_instance.signature().len()
        )));
    }
    let arity = packed.packed_arity();
    if packed_instance.signature().arity(0) != arity {
        return Err(Error::ArityMismatch {
            symbol: packed_instance.signature().name(0).to_string(),
            expected: arity,
            got: packed_instance.signature().arity(0),
        });
    }
    let m = packed_instance.domain_size();
    let mut to_marker = vec![false; m];
    let mut kept = Vec::new();
    for x in 0..m {
        match packed_instance.label_at(0, &vec![x; arity]) {
            Label::Star => return Ok(UnpackOutcome::NoCertificate(NoCertificateReason::StarDiagonal)),
            Label::One => to_marker[x] = true,
            _ => kept.push(x),
        }
    }
    if to_marker.iter().all(|&b| !b) {
        // Nothing can play the marker: the instance maps into a packed
        // target exactly when every label is 0, and then the empty
        // instance is equivalent to it over every nonempty target.
        let mut all_zero = true;
        for_each_tuple(m, arity, |tuple| {
            if packed_instance.label_at(0, tuple) != Label::Zero {
                all_zero = false;
            }
        });
        return Ok(if all_zero {
            UnpackOutcome::Structure(LStructure::new(base.clone(), Category::CStar, 0))
        } else {
            UnpackOutcome::NoCertificate(NoCertificateReason::ResidualNotZero)
        });
    }
    let mut new_index = vec![usize::MAX; m];
    for (i, &x) in kept.iter().enumerate() {
        new_index[x] = i;
    }
    let q = kept.len();
    let marker = q;
    let mut table: BTreeMap<Vec<usize>, Label> = BTreeMap::new();
    for_each_tuple(m, arity, |tuple| {
        let projected: Vec<usize> = tuple
            .iter()
            .map(|&x| if to_marker[x] { marker } else { new_index[x] })
            .collect();
        let label = packed_instance.label_at(0, tuple);
        table
            .entry(projected)
            .and_modify(|l| *l = join_star(*l, label))
            .or_insert(label);
    });
    if table[&vec![marker; arity]] != Label::One {
        return Ok(UnpackOutcome::NoCertificate(NoCertificateReason::AllMarkerNotOne));
    }
    for (tuple, &label) in &table {
        if classify_raw(tuple, base, marker) == TupleFamilyTag::Residual && label != Label::Zero {
            return Ok(UnpackOutcome::NoCertificate(NoCertificateReason::ResidualNotZero));
        }
    }
    let mut out = LStructure::new(base.clone(), Category::CStar, q);
    for sym in 0..base.len() {
        let mut writes: Vec<(Vec<usize>, Label)> = Vec::new();
        for_each_tuple(q, base.arity(sym), |payload| {
            let window = window_tuple(sym, payload, marker, arity);
            let label = table[&window];
            if label != Label::Zero {
                writes.push((payload.to_vec(), label));
            }
        });
        for (payload, label) in writes {
            out.set_label(sym, &payload, label)?;
        }
    }
    Ok(UnpackOutcome::Structure(out))
}

/// The fixed NO instance substituted for a [`NoCertificateReason`]: one
/// element whose every diagonal is `*`, which maps into a target exactly
/// when the target is trivial.
pub fn designated_no_instance(base: &Signature) -> LStructure {
    let mut out = LStructure::new(base.clone(), Category::CStar, 1);
    for sym in 0..base.len() {
        out.set_default(sym, Label::Star).expect("star admitted");
    }
    out
}

fn check_graph_shape(graph: &LStructure) -> Result<()> {
    if !matches!(graph.category(), Category::CStar | Category::C01) {
        return Err(Error::UnsupportedInput(
            "expected a graph over the 0/1/* labels".to_string(),
        ));
    }
    if graph.signature().len() != 1 || graph.signature().arity(0) != 2 {
        return Err(Error::SignatureShape(
            "expected a single binary symbol".to_string(),
        ));
    }
    Ok(())
}

fn check_leading_binary(sig: &Signature) -> Result<()> {
    if sig.is_empty() || sig.arity(0) < 2 {
        return Err(Error::SignatureShape(
            "the first symbol must have arity at least 2".to_string(),
        ));
    }
    Ok(())
}

/// Shared body of the graph-to-many-relation rewrites: the first symbol
/// reads the graph through its first two coordinates, every other
/// symbol is `*` everywhere.
fn graph_to_many(graph: &LStructure, sig: &Signature) -> Result<LStructure> {
    check_graph_shape(graph)?;
    check_leading_binary(sig)?;
    let n = graph.domain_size();
    let mut out = LStructure::new(sig.clone(), Category::CStar, n);
    out.set_default(0, graph.default_label(0)?)?;
    let k1 = sig.arity(0);
    let overrides: Vec<(Vec<usize>, Label)> = graph
        .overrides(0)?
        .map(|(t, l)| (t.to_vec(), l))
        .collect();
    for (pair, label) in overrides {
        let mut writes: Vec<Vec<usize>> = Vec::new();
        for_each_tuple(n, k1 - 2, |suffix| {
            let mut tuple = Vec::with_capacity(k1);
            tuple.extend_from_slice(&pair);
            tuple.extend_from_slice(suffix);
            writes.push(tuple);
        });
        for tuple in writes {
            out.set_label(0, &tuple, label)?;
        }
    }
    for sym in 1..sig.len() {
        out.set_default(sym, Label::Star)?;
    }
    Ok(out)
}

/// Rewrites a graph target over `sig`: the first symbol's label at a
/// tuple is the graph label of the tuple's first two coordinates, and
/// every other symbol is `*` everywhere.
pub fn binary_to_many_target(h: &LStructure, sig: &Signature) -> Result<LStructure> {
    graph_to_many(h, sig)
}

/// Rewrites a graph instance over `sig`; the construction is the same
/// as for targets.
pub fn binary_to_many_instance(g: &LStructure, sig: &Signature) -> Result<LStructure> {
    graph_to_many(g, sig)
}

/// Collapses a many-relation instance back to a graph: the edge label
/// of `(x, y)` is the join of the first symbol's labels over all tuples
/// whose first two coordinates are `(x, y)`. Other symbols are ignored.
pub fn many_to_binary_instance(b: &LStructure) -> Result<LStructure> {
    if !matches!(b.category(), Category::CStar | Category::C01) {
        return Err(Error::UnsupportedInput(
            "expected a structure over the 0/1/* labels".to_string(),
        ));
    }
    check_leading_binary(b.signature())?;
    let n = b.domain_size();
    let k1 = b.signature().arity(0);
    let mut out = LStructure::new(Signature::parse("E/2")?, Category::CStar, n);
    let mut writes: Vec<(Vec<usize>, Label)> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let mut joined: Option<Label> = None;
            let mut tuple = vec![0usize; k1];
            for_each_tuple(n, k1 - 2, |suffix| {
                tuple[0] = x;
                tuple[1] = y;
                tuple[2..].copy_from_slice(suffix);
                let label = b.label_at(0, &tuple);
                joined = Some(match joined {
                    None => label,
                    Some(acc) => join_star(acc, label),
                });
            });
            if let Some(label) = joined {
                if label != Label::Zero {
                    writes.push((vec![x, y], label));
                }
            }
        }
    }
    for (pair, label) in writes {
        out.set_label(0, &pair, label)?;
    }
    Ok(out)
}
