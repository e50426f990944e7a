//! Cores: structures whose endomorphisms are all automorphisms, and a
//! deterministic retraction onto a core.
//!
//! On a finite structure a bijective endomorphism is automatically an
//! automorphism (labels along each orbit form a cycle in the order, so
//! they are all equal), hence a structure fails to be a core exactly
//! when it has a non-surjective endomorphism.

use crate::error::{Error, Result};
use crate::solver::{for_each_homomorphism, SolveOpts, DEFAULT_MAP_CAP};
use crate::structure::{tuple_space_size, LStructure};

fn check_endo_cap(s: &LStructure) -> Result<()> {
    let n = s.domain_size();
    match tuple_space_size(n, n) {
        Some(c) if c <= DEFAULT_MAP_CAP as u128 => Ok(()),
        _ => Err(Error::CapExceeded {
            what: format!("endomorphism search over {n}^{n} maps"),
            limit: DEFAULT_MAP_CAP,
        }),
    }
}

/// Whether every endomorphism of `s` is an isomorphism.
///
/// Errors when `|S|^|S|` exceeds the brute-force cap.
pub fn is_core(s: &LStructure) -> Result<bool> {
    check_endo_cap(s)?;
    let n = s.domain_size();
    let mut core = true;
    for_each_homomorphism(s, s, &SolveOpts::default(), |w| {
        if w.image_set().len() < n {
            core = false;
        }
        !core
    })?;
    Ok(core)
}

/// The lexicographically least image set over all non-surjective
/// endomorphisms of `s`, or `None` when `s` is a core. Sorted image sets
/// are compared by slice order (a strict prefix is smaller).
fn least_proper_image(s: &LStructure) -> Result<Option<Vec<usize>>> {
    check_endo_cap(s)?;
    let n = s.domain_size();
    let mut best: Option<Vec<usize>> = None;
    for_each_homomorphism(s, s, &SolveOpts::default(), |w| {
        let image = w.image_set();
        if image.len() < n && best.as_ref().map_or(true, |b| image < *b) {
            let minimum_reached = image == [0];
            best = Some(image);
            return minimum_reached;
        }
        false
    })?;
    Ok(best)
}

/// Retracts `s` onto a core by repeatedly restricting to the
/// lexicographically least image set of a non-surjective endomorphism.
///
/// The result is an induced substructure of `s`, homomorphically
/// equivalent to it, and a core; it is deterministic, and unique up to
/// isomorphism among cores of `s`.
pub fn core_of(s: &LStructure) -> Result<LStructure> {
    let mut current = s.clone();
    loop {
        match least_proper_image(&current)? {
            None => return Ok(current),
            Some(image) => current = current.induced_substructure(&image)?,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{complete_01_graph, random_structure};
    use crate::label::{Category, Label};
    use crate::solver::find_homomorphism;
    use crate::structure::Signature;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k2_is_a_core() {
        assert!(is_core(&complete_01_graph(2)).unwrap());
        assert_eq!(core_of(&complete_01_graph(2)).unwrap().domain_size(), 2);
    }

    #[test]
    fn edgeless_pair_retracts_to_one_vertex() {
        let sig = Signature::parse("E/2").unwrap();
        let pair = LStructure::new(sig, Category::C01, 2);
        assert!(!is_core(&pair).unwrap());
        let core = core_of(&pair).unwrap();
        assert_eq!(core.domain_size(), 1);
        assert_eq!(core.get_label(0, &[0, 0]).unwrap(), Label::Zero);
    }

    #[test]
    fn single_vertex_structures_are_cores() {
        let sig = Signature::parse("E/2 T/3").unwrap();
        for cat in [Category::C01, Category::CStar, Category::CEmpty] {
            for &label in cat.labels() {
                let mut s = LStructure::new(sig.clone(), cat, 1);
                s.set_label(0, &[0, 0], label).unwrap();
                assert!(is_core(&s).unwrap());
            }
        }
    }

    #[test]
    fn star_absorbing_vertex_swallows_the_rest() {
        let sig = Signature::parse("E/2").unwrap();
        let mut s = LStructure::new(sig, Category::CStar, 2);
        s.set_default(0, Label::Star).unwrap();
        s.set_label(0, &[1, 1], Label::Zero).unwrap();
        let core = core_of(&s).unwrap();
        assert_eq!(core.domain_size(), 1);
        assert_eq!(core.get_label(0, &[0, 0]).unwrap(), Label::Star);
    }

    #[test]
    fn empty_structure_is_its_own_core() {
        let sig = Signature::parse("E/2").unwrap();
        let empty = LStructure::new(sig, Category::CStar, 0);
        assert!(is_core(&empty).unwrap());
        assert_eq!(core_of(&empty).unwrap().domain_size(), 0);
    }

    #[test]
    fn cores_are_equivalent_retracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let sig = Signature::parse("E/2").unwrap();
        for _ in 0..40 {
            let n = rng.gen_range(1..=4);
            let s = random_structure(&sig, Category::CStar, n, &mut rng).unwrap();
            let core = core_of(&s).unwrap();
            assert!(is_core(&core).unwrap());
            assert!(core.domain_size() <= s.domain_size());
            assert!(find_homomorphism(&s, &core, &SolveOpts::default())
                .unwrap()
                .is_some());
            assert!(find_homomorphism(&core, &s, &SolveOpts::default())
                .unwrap()
                .is_some());
            let again = core_of(&s).unwrap();
            assert_eq!(core, again);
        }
    }

    #[test]
    fn endomorphism_cap_is_enforced() {
        let sig = Signature::parse("E/2").unwrap();
        let big = LStructure::new(sig, Category::C01, 9);
        assert!(matches!(is_core(&big), Err(Error::CapExceeded { .. })));
        assert!(matches!(core_of(&big), Err(Error::CapExceeded { .. })));
    }
}
