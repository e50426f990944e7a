//! Bounded obstruction-set enumeration: the structures that fail to map
//! into a fixed target and are minimal for induced-substructure deletion
//! or for the homomorphism order, plus a checker for duality pairs.
//!
//! Everything here is a semi-decision relative to explicit size bounds;
//! a passing check certifies the property over all structures within the
//! bounds and says nothing beyond them.

use std::collections::HashMap;
use std::rc::Rc;

use crate::canon::{canonical_form, canonical_form_hex, canonical_representative};
use crate::cores::is_core;
use crate::error::{Error, Result};
use crate::gen::edge_signature;
use crate::label::{Category, Label};
use crate::mps::serialize_mps;
use crate::solver::{find_homomorphism, SolveOpts};
use crate::structure::{for_each_tuple, is_trivial_target, LStructure, Signature};

/// Hard cap on label assignments walked by [`enumerate_structures`],
/// counted before isomorphism deduplication.
pub const ENUMERATION_CAP: u64 = 100_000_000;

/// All structures over `sig` with domain size exactly `n` and labels in
/// `cat`, one representative per isomorphism class, sorted by canonical
/// form.
///
/// Errors with the cap when the raw assignment count exceeds
/// [`ENUMERATION_CAP`].
pub fn enumerate_structures(sig: &Signature, n: usize, cat: Category) -> Result<Vec<LStructure>> {
    let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
    for sym in 0..sig.len() {
        for_each_tuple(n, sig.arity(sym), |tuple| {
            slots.push((sym, tuple.to_vec()));
        });
    }
    let labels = cat.labels();
    let mut raw: u128 = 1;
    for _ in 0..slots.len() {
        raw = raw.saturating_mul(labels.len() as u128);
        if raw > ENUMERATION_CAP as u128 {
            return Err(Error::CapExceeded {
                what: format!(
                    "enumerating {} label assignments over {} tuple slots",
                    raw, // saturated values still witness the overflow
                    slots.len()
                ),
                limit: ENUMERATION_CAP,
            });
        }
    }
    let mut reps: std::collections::BTreeMap<Vec<u8>, LStructure> = Default::default();
    let mut assignment = vec![0usize; slots.len()];
    loop {
        let mut s = LStructure::new(sig.clone(), cat, n);
        for (slot, &choice) in slots.iter().zip(&assignment) {
            s.set_label(slot.0, &slot.1, labels[choice])?;
        }
        let form = canonical_form(&s)?;
        reps.entry(form).or_insert(canonical_representative(&s)?);
        let mut pos = slots.len();
        loop {
            if pos == 0 {
                return Ok(reps.into_values().collect());
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < labels.len() {
                break;
            }
            assignment[pos] = 0;
        }
    }
}

/// Whether `g` fails to map into `h` while every one-element-deleted
/// substructure of `g` maps.
pub fn is_inclusion_minimal_obstruction(g: &LStructure, h: &LStructure) -> Result<bool> {
    ObstructionSearch::new().is_inclusion_minimal_obstruction(g, h)
}

/// Whether `g` is a core obstruction for `h` with nothing strictly
/// below it in the homomorphism order (among structures of size up to
/// `universe_bound`) that is also an obstruction.
pub fn is_hom_minimal_obstruction(
    g: &LStructure,
    h: &LStructure,
    universe_bound: usize,
) -> Result<bool> {
    ObstructionSearch::new().is_hom_minimal_obstruction(g, h, universe_bound)
}

/// Which minimality the members of a report satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstructionMode {
    /// Minimal for one-element deletion.
    Inclusion,
    /// Minimal in the homomorphism order among cores.
    Hom,
}

impl ObstructionMode {
    fn token(self) -> &'static str {
        match self {
            ObstructionMode::Inclusion => "inclusion",
            ObstructionMode::Hom => "hom",
        }
    }
}

/// The outcome of an obstruction enumeration over one target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    /// The target structure.
    pub target: LStructure,
    /// Label category of the candidate structures.
    pub category: Category,
    /// Largest candidate domain size considered.
    pub max_size: usize,
    /// The minimality notion the members satisfy.
    pub mode: ObstructionMode,
    /// Universe size bound of the hom-minimality check, for
    /// [`ObstructionMode::Hom`] reports.
    pub universe_bound: Option<usize>,
    /// Canonical representatives, pairwise non-isomorphic, sorted by
    /// canonical form.
    pub members: Vec<LStructure>,
}

impl ObstructionReport {
    /// Renders the report: a header identifying target and bounds, then
    /// one text block per member separated by `---` lines.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("target {}\n", canonical_form_hex(&self.target)?));
        out.push_str(&format!("category {}\n", self.category.token()));
        out.push_str(&format!("max-size {}\n", self.max_size));
        out.push_str(&format!("mode {}\n", self.mode.token()));
        if let Some(bound) = self.universe_bound {
            out.push_str(&format!("universe-bound {bound}\n"));
        }
        out.push_str(&format!("members {}\n", self.members.len()));
        for member in &self.members {
            out.push_str("---\n");
            out.push_str(&serialize_mps(member));
        }
        Ok(out)
    }
}

/// Whether a duality check succeeded within its bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualityOutcome {
    /// Every candidate within the bound satisfies the biconditional.
    Holds,
    /// The first candidate (by size, then canonical form) violating it.
    Violation(LStructure),
}

/// Obstruction enumeration state: memoized homomorphism-existence
/// checks keyed by canonical forms, and cached size-`n` universes.
///
/// One search may serve many targets; the caches carry over.
pub struct ObstructionSearch {
    hom_memo: HashMap<(Vec<u8>, Vec<u8>), bool>,
    universes: HashMap<(Signature, usize, Category), Rc<Vec<LStructure>>>,
}

impl Default for ObstructionSearch {
    fn default() -> Self {
        ObstructionSearch::new()
    }
}

impl ObstructionSearch {
    /// An empty search with cold caches.
    pub fn new() -> ObstructionSearch {
        ObstructionSearch {
            hom_memo: HashMap::new(),
            universes: HashMap::new(),
        }
    }

    /// Memoized homomorphism existence; equal canonical forms share one
    /// solver run.
    pub fn hom_exists(&mut self, g: &LStructure, h: &LStructure) -> Result<bool> {
        let key = (canonical_form(g)?, canonical_form(h)?);
        if let Some(&known) = self.hom_memo.get(&key) {
            return Ok(known);
        }
        let exists = find_homomorphism(g, h, &SolveOpts::default())?.is_some();
        self.hom_memo.insert(key, exists);
        Ok(exists)
    }

    fn universe(
        &mut self,
        sig: &Signature,
        n: usize,
        cat: Category,
    ) -> Result<Rc<Vec<LStructure>>> {
        let key = (sig.clone(), n, cat);
        if let Some(u) = self.universes.get(&key) {
            return Ok(Rc::clone(u));
        }
        let u = Rc::new(enumerate_structures(sig, n, cat)?);
        self.universes.insert(key, Rc::clone(&u));
        Ok(u)
    }

    /// Memoized [`is_inclusion_minimal_obstruction`].
    pub fn is_inclusion_minimal_obstruction(
        &mut self,
        g: &LStructure,
        h: &LStructure,
    ) -> Result<bool> {
        if self.hom_exists(g, h)? {
            return Ok(false);
        }
        for v in 0..g.domain_size() {
            let sub = g.delete_element(v)?;
            if !self.hom_exists(&sub, h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Memoized [`is_hom_minimal_obstruction`]: `g` must be a core and
    /// an obstruction, and every universe structure strictly below `g`
    /// in the homomorphism order must map into `h`.
    pub fn is_hom_minimal_obstruction(
        &mut self,
        g: &LStructure,
        h: &LStructure,
        universe_bound: usize,
    ) -> Result<bool> {
        if !is_core(g)? {
            return Ok(false);
        }
        if self.hom_exists(g, h)? {
            return Ok(false);
        }
        for n in 1..=universe_bound {
            let universe = self.universe(g.signature(), n, g.category())?;
            for candidate in universe.iter() {
                if !self.hom_exists(candidate, g)? {
                    continue;
                }
                if self.hom_exists(candidate, h)? {
                    continue;
                }
                if self.hom_exists(g, candidate)? {
                    continue;
                }
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All inclusion-minimal obstructions for `h` among `cat`-labeled
    /// structures of size 1 to `max_size`, over `h`'s signature.
    pub fn inclusion_minimal_obstructions(
        &mut self,
        h: &LStructure,
        cat: Category,
        max_size: usize,
    ) -> Result<ObstructionReport> {
        let mut members = Vec::new();
        if !is_trivial_target(h) {
            for n in 1..=max_size {
                let universe = self.universe(h.signature(), n, cat)?;
                for candidate in universe.iter() {
                    if self.is_inclusion_minimal_obstruction(candidate, h)? {
                        members.push(candidate.clone());
                    }
                }
            }
        }
        Ok(ObstructionReport {
            target: h.clone(),
            category: cat,
            max_size,
            mode: ObstructionMode::Inclusion,
            universe_bound: None,
            members,
        })
    }

    /// All hom-minimal obstructions for `h` among `cat`-labeled
    /// structures of size 1 to `max_size`, relative to `universe_bound`.
    pub fn hom_minimal_obstructions(
        &mut self,
        h: &LStructure,
        cat: Category,
        max_size: usize,
        universe_bound: usize,
    ) -> Result<ObstructionReport> {
        let mut members = Vec::new();
        if !is_trivial_target(h) {
            for n in 1..=max_size {
                let universe = self.universe(h.signature(), n, cat)?;
                for candidate in universe.iter() {
                    if self.is_hom_minimal_obstruction(candidate, h, universe_bound)? {
                        members.push(candidate.clone());
                    }
                }
            }
        }
        Ok(ObstructionReport {
            target: h.clone(),
            category: cat,
            max_size,
            mode: ObstructionMode::Hom,
            universe_bound: Some(universe_bound),
            members,
        })
    }

    /// Checks the duality biconditional within the bound: a nonempty
    /// `cat`-labeled structure of size up to `max_n` fails to map into
    /// `h` exactly when some family member maps into it.
    pub fn duality_holds(
        &mut self,
        family: &[LStructure],
        h: &LStructure,
        cat: Category,
        max_n: usize,
    ) -> Result<DualityOutcome> {
        for n in 1..=max_n {
            let universe = self.universe(h.signature(), n, cat)?;
            for candidate in universe.iter() {
                let blocked = !self.hom_exists(candidate, h)?;
                let mut witnessed = false;
                for f in family {
                    if self.hom_exists(f, candidate)? {
                        witnessed = true;
                        break;
                    }
                }
                if blocked != witnessed {
                    return Ok(DualityOutcome::Violation(candidate.clone()));
                }
            }
        }
        Ok(DualityOutcome::Holds)
    }
}

/// Checks a duality pair with a throwaway search; see
/// [`ObstructionSearch::duality_holds`].
pub fn duality_holds(
    family: &[LStructure],
    h: &LStructure,
    cat: Category,
    max_n: usize,
) -> Result<DualityOutcome> {
    ObstructionSearch::new().duality_holds(family, h, cat, max_n)
}

/// The directed cycle on `n` elements whose forward edges are labeled 1
/// and every other pair is labeled `e`.
pub fn odd_cycle_empty(n: usize) -> LStructure {
    let mut s = LStructure::new(edge_signature(), Category::CEmpty, n);
    s.set_default(0, Label::Empty).expect("empty admitted");
    for i in 0..n {
        s.set_label(0, &[i, (i + 1) % n], Label::One)
            .expect("cycle edge in range");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::gen::{complete_01_graph, random_star_graph};
    use crate::solver::hom_exists_bruteforce;
    use crate::solver::DEFAULT_MAP_CAP;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_counts_for_small_graphs() {
        let sig = edge_signature();
        assert_eq!(enumerate_structures(&sig, 1, Category::CStar).unwrap().len(), 3);
        assert_eq!(enumerate_structures(&sig, 1, Category::CEmpty).unwrap().len(), 4);
        assert_eq!(enumerate_structures(&sig, 2, Category::C01).unwrap().len(), 10);
    }

    #[test]
    fn enumeration_is_complete_and_irredundant() {
        let sig = edge_signature();
        let reps = enumerate_structures(&sig, 2, Category::C01).unwrap();
        for (i, a) in reps.iter().enumerate() {
            assert_eq!(a.domain_size(), 2);
            for b in &reps[i + 1..] {
                assert!(!is_isomorphic(a, b).unwrap());
            }
        }
        // Every raw structure lands in exactly one class.
        let labels = [Label::Zero, Label::One];
        for bits in 0..16u32 {
            let mut s = LStructure::new(sig.clone(), Category::C01, 2);
            for (pos, t) in [[0, 0], [0, 1], [1, 0], [1, 1]].iter().enumerate() {
                s.set_label(0, t, labels[(bits >> pos) as usize & 1]).unwrap();
            }
            let hits = reps
                .iter()
                .filter(|r| is_isomorphic(r, &s).unwrap())
                .count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let sig = edge_signature();
        assert!(matches!(
            enumerate_structures(&sig, 4, Category::CEmpty),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn odd_empty_cycles_obstruct_the_two_clique() {
        let k2 = complete_01_graph(2);
        for n in [3, 5] {
            assert!(is_inclusion_minimal_obstruction(&odd_cycle_empty(n), &k2).unwrap());
        }
        assert!(!is_inclusion_minimal_obstruction(&odd_cycle_empty(4), &k2).unwrap());
        let c3 = odd_cycle_empty(3);
        for v in 0..3 {
            let sub = c3.delete_element(v).unwrap();
            assert!(hom_exists_bruteforce(&sub, &k2, DEFAULT_MAP_CAP).unwrap());
        }
    }

    fn star_obstruction_counterexample() -> LStructure {
        // Two elements whose loops copy the target's and whose cross
        // pairs are both *.
        let mut g = LStructure::new(edge_signature(), Category::CStar, 2);
        g.set_label(0, &[0, 1], Label::Star).unwrap();
        g.set_label(0, &[1, 0], Label::Star).unwrap();
        g
    }

    #[test]
    fn deletion_minimal_does_not_imply_hom_minimal() {
        let k2 = complete_01_graph(2);
        let g = star_obstruction_counterexample();
        assert!(is_inclusion_minimal_obstruction(&g, &k2).unwrap());
        assert!(!is_hom_minimal_obstruction(&g, &k2, 3).unwrap());
        // The witness below g: one * pair resolved to 0.
        let mut witness = g.clone();
        witness.set_label(0, &[1, 0], Label::Zero).unwrap();
        let mut search = ObstructionSearch::new();
        assert!(search.hom_exists(&witness, &g).unwrap());
        assert!(!search.hom_exists(&witness, &k2).unwrap());
        assert!(!search.hom_exists(&g, &witness).unwrap());
    }

    #[test]
    fn the_single_one_loop_is_minimal_both_ways() {
        let k2 = complete_01_graph(2);
        let mut loop1 = LStructure::new(edge_signature(), Category::C01, 1);
        loop1.set_label(0, &[0, 0], Label::One).unwrap();
        assert!(is_inclusion_minimal_obstruction(&loop1, &k2).unwrap());
        assert!(is_hom_minimal_obstruction(&loop1, &k2, 3).unwrap());
    }

    #[test]
    fn hom_minimal_members_are_inclusion_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let mut search = ObstructionSearch::new();
        for _ in 0..6 {
            let h = random_star_graph(rng.gen_range(1..=2), &mut rng).unwrap();
            let hom = search
                .hom_minimal_obstructions(&h, Category::CStar, 2, 2)
                .unwrap();
            for member in &hom.members {
                assert!(search.is_inclusion_minimal_obstruction(member, &h).unwrap());
            }
        }
    }

    #[test]
    fn trivial_targets_have_no_obstructions() {
        let mut h = LStructure::new(edge_signature(), Category::CStar, 1);
        h.set_label(0, &[0, 0], Label::Star).unwrap();
        let mut search = ObstructionSearch::new();
        let report = search
            .inclusion_minimal_obstructions(&h, Category::CStar, 2)
            .unwrap();
        assert!(report.members.is_empty());
        assert_eq!(
            search.duality_holds(&[], &h, Category::CStar, 2).unwrap(),
            DualityOutcome::Holds
        );
    }

    #[test]
    fn inclusion_family_is_a_duality_family_within_bound() {
        let k2 = complete_01_graph(2);
        let mut search = ObstructionSearch::new();
        let report = search
            .inclusion_minimal_obstructions(&k2, Category::C01, 3)
            .unwrap();
        assert!(!report.members.is_empty());
        assert_eq!(
            search
                .duality_holds(&report.members, &k2, Category::C01, 3)
                .unwrap(),
            DualityOutcome::Holds
        );
    }

    #[test]
    fn missing_family_members_are_reported() {
        let k2 = complete_01_graph(2);
        match duality_holds(&[], &k2, Category::C01, 1).unwrap() {
            DualityOutcome::Violation(g) => {
                assert_eq!(g.domain_size(), 1);
                assert_eq!(g.get_label(0, &[0, 0]).unwrap(), Label::One);
            }
            DualityOutcome::Holds => panic!("an obstruction exists at size 1"),
        }
    }

    #[test]
    fn reports_render_deterministically() {
        let k2 = complete_01_graph(2);
        let make = || {
            ObstructionSearch::new()
                .inclusion_minimal_obstructions(&k2, Category::C01, 2)
                .unwrap()
                .to_text()
                .unwrap()
        };
        let text = make();
        assert_eq!(text, make());
        assert!(text.contains("mode inclusion"));
        assert!(text.contains("members"));
        assert!(text.contains("---\ncategory 01\n"));
        let forms: Vec<Vec<u8>> = ObstructionSearch::new()
            .inclusion_minimal_obstructions(&k2, Category::C01, 2)
            .unwrap()
            .members
            .iter()
            .map(|m| canonical_form(m).unwrap())
            .collect();
        let mut sorted = forms.clone();
        sorted.sort();
        assert_eq!(forms, sorted);
    }
}
