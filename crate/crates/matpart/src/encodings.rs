//! The bijective translation between structures labeled over the
//! four-element order and relational structures over a doubled
//! signature.
//!
//! Every base symbol `R` splits into `R_0` and `R_1`; bit `j` of a tuple
//! records whether label `j` lies below the tuple's original label in
//! the four-element order. The translation preserves homomorphism
//! witnesses verbatim in both directions.

use crate::error::{Error, Result};
use crate::label::{Category, Label};
use crate::structure::{LStructure, Signature};

/// A base signature together with its doubled counterpart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubledSignature {
    base: Signature,
    derived: Signature,
}

impl DoubledSignature {
    /// Doubles `base`: symbol `R` of arity `k` becomes `R_0` and `R_1`,
    /// both of arity `k`, interleaved in base order.
    pub fn new(base: Signature) -> Result<DoubledSignature> {
        let mut derived = Vec::with_capacity(2 * base.len());
        for (name, arity) in base.iter() {
            derived.push((format!("{name}_0"), arity));
            derived.push((format!("{name}_1"), arity));
        }
        let derived = Signature::new(derived)?;
        Ok(DoubledSignature { base, derived })
    }

    /// The original signature.
    pub fn base(&self) -> &Signature {
        &self.base
    }

    /// The doubled signature.
    pub fn derived(&self) -> &Signature {
        &self.derived
    }
}

/// Reconstructs the base signature from a doubled one.
///
/// Errors when the symbol list is not an interleaved `R_0`, `R_1`
/// sequence with matching stems and arities.
pub fn base_of_doubled(derived: &Signature) -> Result<Signature> {
    if derived.len() % 2 != 0 {
        return Err(Error::SignatureShape(format!(
            "doubled signature needs an even symbol count, got {}",
            derived.len()
        )));
    }
    let mut base = Vec::with_capacity(derived.len() / 2);
    for i in (0..derived.len()).step_by(2) {
        let zero_name = derived.name(i);
        let one_name = derived.name(i + 1);
        let stem = zero_name.strip_suffix("_0").ok_or_else(|| {
            Error::SignatureShape(format!("symbol `{zero_name}` does not end in `_0`"))
        })?;
        if one_name != format!("{stem}_1") {
            return Err(Error::SignatureShape(format!(
                "symbol `{one_name}` does not pair with `{zero_name}`"
            )));
        }
        if derived.arity(i) != derived.arity(i + 1) {
            return Err(Error::SignatureShape(format!(
                "arities of `{zero_name}` and `{one_name}` differ"
            )));
        }
        base.push((stem.to_string(), derived.arity(i)));
    }
    Signature::new(base)
}

/// Bit `j` of `label` in the four-element order: whether `j` lies below
/// the label.
fn bit(label: Label, j: Label) -> Label {
    if Category::CEmpty.leq_raw(j, label) {
        Label::One
    } else {
        Label::Zero
    }
}

fn label_of_bits(zero_bit: Label, one_bit: Label) -> Label {
    match (zero_bit, one_bit) {
        (Label::One, Label::One) => Label::Star,
        (Label::One, Label::Zero) => Label::Zero,
        (Label::Zero, Label::One) => Label::One,
        _ => Label::Empty,
    }
}

/// Translates `a` to the doubled signature: `R_j(t) = 1` exactly when
/// `j` lies below `R(t)` in the four-element order.
///
/// Accepts any non-CSP category (their labels embed into the
/// four-element order); the result carries the CSP category. Runs on the
/// sparse representation, so it is polynomial in the stored size.
pub fn to_csp(a: &LStructure) -> Result<LStructure> {
    if a.category() == Category::CCsp {
        return Err(Error::UnsupportedInput(
            "input is already in the CSP category".to_string(),
        ));
    }
    let doubled = DoubledSignature::new(a.signature().clone())?;
    let mut out = LStructure::new(doubled.derived().clone(), Category::CCsp, a.domain_size());
    for sym in 0..a.signature().len() {
        let default = a.default_label(sym)?;
        for (j, j_label) in [Label::Zero, Label::One].into_iter().enumerate() {
            let derived_sym = 2 * sym + j;
            out.set_default(derived_sym, bit(default, j_label))?;
            let overrides: Vec<(Vec<usize>, Label)> = a
                .overrides(sym)?
                .map(|(t, l)| (t.to_vec(), l))
                .collect();
            for (tuple, label) in overrides {
                out.set_label(derived_sym, &tuple, bit(label, j_label))?;
            }
        }
    }
    Ok(out)
}

/// Inverts [`to_csp`]: reads bit pairs off a structure over a doubled
/// signature and rebuilds the four-element labeling.
///
/// Accepts the CSP category and its `{0, 1}` sublanguage; the result
/// carries the four-element category.
pub fn from_csp(a: &LStructure) -> Result<LStructure> {
    if !matches!(a.category(), Category::CCsp | Category::C01) {
        return Err(Error::UnsupportedInput(
            "doubled-signature input must carry 0/1 labels".to_string(),
        ));
    }
    let base = base_of_doubled(a.signature())?;
    let mut out = LStructure::new(base.clone(), Category::CEmpty, a.domain_size());
    for sym in 0..base.len() {
        let zero_default = a.default_label(2 * sym)?;
        let one_default = a.default_label(2 * sym + 1)?;
        out.set_default(sym, label_of_bits(zero_default, one_default))?;
        let mut tuples: Vec<Vec<usize>> = a
            .overrides(2 * sym)?
            .chain(a.overrides(2 * sym + 1)?)
            .map(|(t, _)| t.to_vec())
            .collect();
        tuples.sort();
        tuples.dedup();
        for tuple in tuples {
            let zero_bit = a.get_label(2 * sym, &tuple)?;
            let one_bit = a.get_label(2 * sym + 1, &tuple)?;
            out.set_label(sym, &tuple, label_of_bits(zero_bit, one_bit))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_structure;
    use crate::solver::{find_homomorphism, SolveOpts};
    use crate::structure::is_homomorphism;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn doubled_signature_shape() {
        let base = Signature::parse("E/2 T/3").unwrap();
        let d = DoubledSignature::new(base.clone()).unwrap();
        let names: Vec<&str> = d.derived().iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["E_0", "E_1", "T_0", "T_1"]);
        assert_eq!(d.derived().arity(2), 3);
        assert_eq!(base_of_doubled(d.derived()).unwrap(), base);
    }

    #[test]
    fn malformed_doubled_signatures_are_rejected() {
        for text in ["E_0/2", "E_0/2 F_1/2", "E_0/2 E_1/3", "E_1/2 E_0/2"] {
            let sig = Signature::parse(text).unwrap();
            assert!(matches!(
                base_of_doubled(&sig),
                Err(Error::SignatureShape(_))
            ));
        }
    }

    #[test]
    fn label_to_bit_pairs() {
        let sig = Signature::parse("E/2").unwrap();
        let mut a = LStructure::new(sig, Category::CEmpty, 1);
        let cases = [
            (Label::Star, Label::One, Label::One),
            (Label::Zero, Label::One, Label::Zero),
            (Label::One, Label::Zero, Label::One),
            (Label::Empty, Label::Zero, Label::Zero),
        ];
        for (label, zero_bit, one_bit) in cases {
            a.set_label(0, &[0, 0], label).unwrap();
            let enc = to_csp(&a).unwrap();
            assert_eq!(enc.category(), Category::CCsp);
            assert_eq!(enc.get_label(0, &[0, 0]).unwrap(), zero_bit);
            assert_eq!(enc.get_label(1, &[0, 0]).unwrap(), one_bit);
        }
    }

    #[test]
    fn round_trips_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let sig = Signature::parse("E/2 T/3 U/1").unwrap();
        for _ in 0..200 {
            let n = rng.gen_range(0..=3);
            let a = random_structure(&sig, Category::CEmpty, n, &mut rng).unwrap();
            assert_eq!(from_csp(&to_csp(&a).unwrap()).unwrap(), a);
        }
        let doubled = DoubledSignature::new(sig).unwrap();
        for _ in 0..200 {
            let n = rng.gen_range(0..=3);
            let a = random_structure(doubled.derived(), Category::CCsp, n, &mut rng).unwrap();
            assert_eq!(to_csp(&from_csp(&a).unwrap()).unwrap(), a);
        }
    }

    #[test]
    fn narrower_categories_translate_too() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let sig = Signature::parse("E/2").unwrap();
        for cat in [Category::C01, Category::CStar] {
            let a = random_structure(&sig, cat, 3, &mut rng).unwrap();
            let back = from_csp(&to_csp(&a).unwrap()).unwrap();
            assert_eq!(back, a.with_category(Category::CEmpty).unwrap());
        }
        let csp = random_structure(
            DoubledSignature::new(sig).unwrap().derived(),
            Category::CCsp,
            2,
            &mut rng,
        )
        .unwrap();
        assert!(matches!(to_csp(&csp), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn same_witness_serves_both_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let sig = Signature::parse("E/2").unwrap();
        let mut agreements = 0;
        for _ in 0..150 {
            let b = random_structure(&sig, Category::CEmpty, rng.gen_range(1..=3), &mut rng).unwrap();
            let a = random_structure(&sig, Category::CEmpty, rng.gen_range(1..=3), &mut rng).unwrap();
            let b_csp = to_csp(&b).unwrap();
            let a_csp = to_csp(&a).unwrap();
            let direct = find_homomorphism(&b, &a, &SolveOpts::default()).unwrap();
            let encoded = find_homomorphism(&b_csp, &a_csp, &SolveOpts::default()).unwrap();
            assert_eq!(direct.is_some(), encoded.is_some());
            if let Some(w) = direct {
                assert!(is_homomorphism(&b_csp, &a_csp, &w).unwrap());
                agreements += 1;
            }
            if let Some(w) = encoded {
                assert!(is_homomorphism(&b, &a, &w).unwrap());
            }
        }
        assert!(agreements > 10);
    }
}
