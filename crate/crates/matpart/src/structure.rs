//! Signatures, labeled structures, and homomorphism semantics.
//!
//! An [`LStructure`] assigns a label to every tuple of every relation
//! symbol; the labeling is total even though it is stored as a default
//! plus sparse overrides. A map `h` is a homomorphism from `G` to `H`
//! when the label of every tuple, loops and repeated coordinates
//! included, does not decrease: `R_G(t) <= R_H(h(t))`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::label::{comparison_category, Category, Label};

const RESERVED_WORDS: [&str; 4] = ["category", "signature", "domain", "default"];

/// An ordered list of relation symbols with arities.
///
/// Declaration order is significant: transformations that index relations
/// by position use this order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    /// Builds a signature from `(name, arity)` pairs.
    ///
    /// Names must be unique identifiers (`[A-Za-z_][A-Za-z0-9_]*`, none of
    /// the file-format keywords) and arities at least 1.
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            let valid = !name.is_empty()
                && !name.starts_with(|c: char| c.is_ascii_digit())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !RESERVED_WORDS.contains(&name.as_str());
            if !valid {
                return Err(Error::InvalidSymbolName(name));
            }
            if arity == 0 {
                return Err(Error::ZeroArity(name));
            }
            if out.iter().any(|(n, _)| *n == name) {
                return Err(Error::DuplicateSymbol(name));
            }
            out.push((name, arity));
        }
        Ok(Signature { symbols: out })
    }

    /// Parses a whitespace-separated list of `NAME/ARITY` entries,
    /// e.g. `"R/2 S/3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in text.split_whitespace() {
            let (name, arity) = part.split_once('/').ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("expected NAME/ARITY, got `{part}`"),
            })?;
            let arity: usize = arity.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("invalid arity in `{part}`"),
            })?;
            entries.push((name.to_string(), arity));
        }
        Signature::new(entries)
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Whether the signature declares no symbols.
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Name of symbol `i`.
    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i].0
    }

    /// Arity of symbol `i`.
    pub fn arity(&self, i: usize) -> usize {
        self.symbols[i].1
    }

    /// Position of the symbol called `name`, if declared.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    /// The largest declared arity (0 for an empty signature).
    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }

    /// Iterates over `(name, arity)` pairs in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(n, a)| (n.as_str(), *a))
    }

    fn check_symbol(&self, i: usize) -> Result<()> {
        if i < self.symbols.len() {
            Ok(())
        } else {
            Err(Error::SymbolIndexOutOfRange {
                index: i,
                count: self.symbols.len(),
            })
        }
    }
}

/// Calls `f` on every length-`k` tuple over `0..n` in lexicographic order.
pub(crate) fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; k];
    if k == 0 {
        f(&t);
        return;
    }
    if n == 0 {
        return;
    }
    loop {
        f(&t);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            t[pos] += 1;
            if t[pos] < n {
                break;
            }
            t[pos] = 0;
        }
    }
}

/// `n^k` as u128, or `None` on overflow.
pub(crate) fn tuple_space_size(n: usize, k: usize) -> Option<u128> {
    let mut out: u128 = 1;
    for _ in 0..k {
        out = out.checked_mul(n as u128)?;
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct RelationTable {
    default: Label,
    overrides: BTreeMap<Vec<usize>, Label>,
}

/// A finite domain together with a total labeling of every symbol's full
/// tuple space.
///
/// Elements are `0..domain_size()`. The labeling is stored as a default
/// label per symbol plus overrides; overrides equal to the default are
/// normalized away. Equality compares the label functions, so two
/// structures with different default/override splits of the same
/// labeling are equal.
#[derive(Clone, Debug)]
pub struct LStructure {
    signature: Signature,
    category: Category,
    domain_size: usize,
    relations: Vec<RelationTable>,
}

impl PartialEq for LStructure {
    fn eq(&self, other: &Self) -> bool {
        if self.signature != other.signature
            || self.category != other.category
            || self.domain_size != other.domain_size
        {
            return false;
        }
        for sym in 0..self.signature.len() {
            let a = &self.relations[sym];
            let b = &other.relations[sym];
            if a.default == b.default {
                // Overrides never equal the default, so the maps are
                // canonical for a fixed default.
                if a.overrides != b.overrides {
                    return false;
                }
                continue;
            }
            // Distinct defaults: every tuple must be overridden on at
            // least one side, and the label functions must agree there.
            let mut shared = 0u128;
            for (tuple, &label) in &a.overrides {
                if b.overrides.contains_key(tuple) {
                    shared += 1;
                }
                if other.label_at(sym, tuple) != label {
                    return false;
                }
            }
            for (tuple, &label) in &b.overrides {
                if self.label_at(sym, tuple) != label {
                    return false;
                }
            }
            let covered =
                a.overrides.len() as u128 + b.overrides.len() as u128 - shared;
            let space = tuple_space_size(self.domain_size, self.signature.arity(sym));
            if space != Some(covered) {
                return false;
            }
        }
        true
    }
}

impl Eq for LStructure {}

impl LStructure {
    /// A structure with every tuple of every symbol labeled `0`.
    pub fn new(signature: Signature, category: Category, domain_size: usize) -> LStructure {
        let relations = (0..signature.len())
            .map(|_| RelationTable {
                default: Label::Zero,
                overrides: BTreeMap::new(),
            })
            .collect();
        LStructure {
            signature,
            category,
            domain_size,
            relations,
        }
    }

    /// The signature.
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// The label category.
    pub fn category(&self) -> Category {
        self.category
    }

    /// Number of elements; elements are `0..domain_size()`.
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// The default label of symbol `sym`.
    pub fn default_label(&self, sym: usize) -> Result<Label> {
        self.signature.check_symbol(sym)?;
        Ok(self.relations[sym].default)
    }

    /// The explicitly overridden tuples of symbol `sym`, in lexicographic
    /// order. Every other tuple carries the default label.
    pub fn overrides(&self, sym: usize) -> Result<impl Iterator<Item = (&[usize], Label)>> {
        self.signature.check_symbol(sym)?;
        Ok(self.relations[sym]
            .overrides
            .iter()
            .map(|(t, &l)| (t.as_slice(), l)))
    }

    fn check_tuple(&self, sym: usize, tuple: &[usize]) -> Result<()> {
        self.signature.check_symbol(sym)?;
        let arity = self.signature.arity(sym);
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: self.signature.name(sym).to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        for &e in tuple {
            if e >= self.domain_size {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    domain_size: self.domain_size,
                });
            }
        }
        Ok(())
    }

    /// Sets the default label of symbol `sym`.
    ///
    /// Existing overrides keep their labels; overrides equal to the new
    /// default are normalized away.
    pub fn set_default(&mut self, sym: usize, label: Label) -> Result<()> {
        self.signature.check_symbol(sym)?;
        if !self.category.admits(label) {
            return Err(Error::LabelNotAdmitted {
                label,
                category: self.category,
            });
        }
        let rel = &mut self.relations[sym];
        rel.default = label;
        rel.overrides.retain(|_, l| *l != label);
        Ok(())
    }

    /// Sets the label of one tuple of symbol `sym`.
    pub fn set_label(&mut self, sym: usize, tuple: &[usize], label: Label) -> Result<()> {
        self.check_tuple(sym, tuple)?;
        if !self.category.admits(label) {
            return Err(Error::LabelNotAdmitted {
                label,
                category: self.category,
            });
        }
        let rel = &mut self.relations[sym];
        if label == rel.default {
            rel.overrides.remove(tuple);
        } else {
            rel.overrides.insert(tuple.to_vec(), label);
        }
        Ok(())
    }

    /// The label of `tuple` under symbol `sym`: the override if present,
    /// the symbol's default otherwise.
    pub fn get_label(&self, sym: usize, tuple: &[usize]) -> Result<Label> {
        self.check_tuple(sym, tuple)?;
        Ok(self.label_at(sym, tuple))
    }

    /// Unchecked label lookup for validated indices.
    pub(crate) fn label_at(&self, sym: usize, tuple: &[usize]) -> Label {
        let rel = &self.relations[sym];
        match rel.overrides.get(tuple) {
            Some(&l) => l,
            None => rel.default,
        }
    }

    /// Re-views the same labeling under another category.
    ///
    /// Errors if any stored label is outside `cat`'s alphabet.
    pub fn with_category(&self, cat: Category) -> Result<LStructure> {
        for rel in &self.relations {
            for &l in std::iter::once(&rel.default).chain(rel.overrides.values()) {
                if !cat.admits(l) {
                    return Err(Error::LabelNotAdmitted {
                        label: l,
                        category: cat,
                    });
                }
            }
        }
        let mut out = self.clone();
        out.category = cat;
        Ok(out)
    }

    /// The substructure induced by `subset`, with elements renumbered
    /// `0..subset.len()` in increasing order of the original indices.
    ///
    /// Every tuple over the subset keeps its label.
    pub fn induced_substructure(&self, subset: &[usize]) -> Result<LStructure> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &e in &keep {
            if e >= self.domain_size {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    domain_size: self.domain_size,
                });
            }
        }
        let mut new_index = vec![usize::MAX; self.domain_size];
        for (i, &e) in keep.iter().enumerate() {
            new_index[e] = i;
        }
        let mut out = LStructure::new(self.signature.clone(), self.category, keep.len());
        for (sym, rel) in self.relations.iter().enumerate() {
            out.relations[sym].default = rel.default;
            for (tuple, &label) in &rel.overrides {
                if tuple.iter().all(|&e| new_index[e] != usize::MAX) {
                    let mapped: Vec<usize> = tuple.iter().map(|&e| new_index[e]).collect();
                    out.relations[sym].overrides.insert(mapped, label);
                }
            }
        }
        Ok(out)
    }

    /// The substructure with element `v` deleted.
    pub fn delete_element(&self, v: usize) -> Result<LStructure> {
        if v >= self.domain_size {
            return Err(Error::ElementOutOfRange {
                element: v,
                domain_size: self.domain_size,
            });
        }
        let keep: Vec<usize> = (0..self.domain_size).filter(|&e| e != v).collect();
        self.induced_substructure(&keep)
    }

    /// Applies a permutation of the domain: element `e` becomes `perm[e]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<LStructure> {
        if perm.len() != self.domain_size {
            return Err(Error::MapShapeMismatch {
                map_source: perm.len(),
                map_target: self.domain_size,
                source_size: self.domain_size,
                target_size: self.domain_size,
            });
        }
        let mut seen = vec![false; self.domain_size];
        for &p in perm {
            if p >= self.domain_size || seen[p] {
                return Err(Error::ElementOutOfRange {
                    element: p,
                    domain_size: self.domain_size,
                });
            }
            seen[p] = true;
        }
        let mut out = LStructure::new(self.signature.clone(), self.category, self.domain_size);
        for (sym, rel) in self.relations.iter().enumerate() {
            out.relations[sym].default = rel.default;
            for (tuple, &label) in &rel.overrides {
                let mapped: Vec<usize> = tuple.iter().map(|&e| perm[e]).collect();
                out.relations[sym].overrides.insert(mapped, label);
            }
        }
        Ok(out)
    }
}

/// A total map between two domains, the candidate witness of a
/// homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMap {
    target_size: usize,
    image: Vec<usize>,
}

impl HomMap {
    /// Builds a map from the image array; entry `i` is the image of
    /// source element `i`.
    pub fn new(target_size: usize, image: Vec<usize>) -> Result<HomMap> {
        for &v in &image {
            if v >= target_size {
                return Err(Error::ElementOutOfRange {
                    element: v,
                    domain_size: target_size,
                });
            }
        }
        Ok(HomMap { target_size, image })
    }

    /// Number of source elements.
    pub fn source_size(&self) -> usize {
        self.image.len()
    }

    /// Number of target elements.
    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// The image of source element `e`.
    pub fn apply(&self, e: usize) -> usize {
        self.image[e]
    }

    /// The image array.
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// The set of elements hit by the map, sorted and deduplicated.
    pub fn image_set(&self) -> Vec<usize> {
        let mut s = self.image.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Whether the map is a bijection between equal-size domains.
    pub fn is_bijective(&self) -> bool {
        self.image.len() == self.target_size && self.image_set().len() == self.target_size
    }

    /// Composition `g` after `self`.
    pub fn then(&self, g: &HomMap) -> Result<HomMap> {
        if self.target_size != g.source_size() {
            return Err(Error::MapShapeMismatch {
                map_source: g.source_size(),
                map_target: g.target_size,
                source_size: self.image.len(),
                target_size: self.target_size,
            });
        }
        let image = self.image.iter().map(|&v| g.image[v]).collect();
        HomMap::new(g.target_size, image)
    }
}

fn check_hom_shapes(g: &LStructure, h: &LStructure, map: &HomMap) -> Result<Category> {
    if g.signature() != h.signature() {
        return Err(Error::SignatureMismatch);
    }
    let cat = comparison_category(g.category(), h.category())?;
    if map.source_size() != g.domain_size() || map.target_size() != h.domain_size() {
        return Err(Error::MapShapeMismatch {
            map_source: map.source_size(),
            map_target: map.target_size(),
            source_size: g.domain_size(),
            target_size: h.domain_size(),
        });
    }
    Ok(cat)
}

/// Whether `map` is a homomorphism from `g` to `h`.
///
/// Labels are compared in the coarser of the two categories; every tuple
/// of `g`'s full tuple space participates, loops and repeated coordinates
/// included.
pub fn is_homomorphism(g: &LStructure, h: &LStructure, map: &HomMap) -> Result<bool> {
    let cat = check_hom_shapes(g, h, map)?;
    let mut ok = true;
    let mut mapped = Vec::with_capacity(g.signature().max_arity());
    for sym in 0..g.signature().len() {
        if !ok {
            break;
        }
        let k = g.signature().arity(sym);
        for_each_tuple(g.domain_size(), k, |t| {
            if !ok {
                return;
            }
            let a = g.label_at(sym, t);
            mapped.clear();
            mapped.extend(t.iter().map(|&e| map.apply(e)));
            let b = h.label_at(sym, &mapped);
            if !cat.leq_raw(a, b) {
                ok = false;
            }
        });
    }
    Ok(ok)
}

/// Whether some element of `h` has every symbol's diagonal tuple labeled
/// `*`, which makes every structure of a compatible category map into `h`
/// by the constant map.
pub fn is_trivial_target(h: &LStructure) -> bool {
    (0..h.domain_size()).any(|x| {
        (0..h.signature().len()).all(|sym| {
            let diag = vec![x; h.signature().arity(sym)];
            h.label_at(sym, &diag) == Label::Star
        })
    })
}
