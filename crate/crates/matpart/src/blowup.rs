//! The star-to-01 instance blow-up: each element becomes a Hadamard-
//! sized block, and `*` labels become Hadamard sign patterns over the
//! first two intra-block indices.
//!
//! The construction depends on the target only through its domain size
//! `m`; homomorphisms into any `m`-element star target are preserved and
//! reflected.

use crate::error::{Error, Result};
use crate::hadamard::{sylvester, HadamardMatrix};
use crate::label::{Category, Label};
use crate::structure::{for_each_tuple, HomMap, LStructure};

/// The outcome of [`star_to_01`].
#[derive(Clone, Debug)]
pub struct BlowupResult {
    /// The blown-up instance, in the `{0, 1}` category.
    pub structure: LStructure,
    /// Elements per block: the smallest power of two above `4m^2 + 1`.
    pub block_size: usize,
    /// The block-collapsing map back onto the original domain; always a
    /// surjective homomorphism.
    pub projection: HomMap,
}

/// The smallest power of two strictly greater than `4m^2 + 1`.
///
/// Callers guarantee `m >= 1`.
pub fn block_size(m: usize) -> usize {
    (4 * m * m + 2).next_power_of_two()
}

/// Blows up `g` for target size `m`: the domain becomes consecutive
/// blocks of [`block_size`]`(m)` elements, one per original element.
/// A tuple over blocks `(g_1, ..., g_k)` with intra-block indices
/// `(i_1, ..., i_k)` keeps the original label of `(g_1, ..., g_k)`
/// unless that label is `*`, in which case it becomes `0` or `1`
/// according to the Hadamard sign at `(i_1, i_2)`.
///
/// Accepts star-category (or plain `{0, 1}`) structures; any symbol
/// carrying a `*` label must have arity at least 2, since the
/// replacement reads two intra-block indices.
pub fn star_to_01(g: &LStructure, m: usize) -> Result<BlowupResult> {
    if !matches!(g.category(), Category::CStar | Category::C01) {
        return Err(Error::UnsupportedInput(
            "blow-up input must be a star-category structure".to_string(),
        ));
    }
    if m < 1 {
        return Err(Error::UnsupportedInput(
            "target size must be at least 1".to_string(),
        ));
    }
    for sym in 0..g.signature().len() {
        if g.signature().arity(sym) == 1 {
            let starred = g.default_label(sym)? == Label::Star
                || g.overrides(sym)?.any(|(_, l)| l == Label::Star);
            if starred {
                return Err(Error::UnsupportedInput(format!(
                    "symbol `{}` has arity 1 and carries a `*` label",
                    g.signature().name(sym)
                )));
            }
        }
    }
    let b = block_size(m);
    let matrix = sylvester(b.trailing_zeros())?;
    let n = g.domain_size();
    let mut out = LStructure::new(g.signature().clone(), Category::C01, n * b);
    for sym in 0..g.signature().len() {
        let k = g.signature().arity(sym);
        let default = g.default_label(sym)?;
        let out_default = if default == Label::Star {
            Label::Zero
        } else {
            default
        };
        out.set_default(sym, out_default)?;
        let mut element = vec![0usize; k];
        let mut writes: Vec<(Vec<usize>, Label)> = Vec::new();
        for_each_tuple(n, k, |gt| {
            let base = g.label_at(sym, gt);
            if base != Label::Star && base == out_default {
                return;
            }
            for_each_tuple(b, k, |it| {
                let label = if base == Label::Star {
                    hadamard_label(&matrix, it)
                } else {
                    base
                };
                if label != out_default {
                    for pos in 0..k {
                        element[pos] = gt[pos] * b + it[pos];
                    }
                    writes.push((element.clone(), label));
                }
            });
        });
        for (tuple, label) in writes {
            out.set_label(sym, &tuple, label)?;
        }
    }
    let projection = HomMap::new(n, (0..n * b).map(|v| v / b).collect())?;
    Ok(BlowupResult {
        structure: out,
        block_size: b,
        projection,
    })
}

/// The `*` replacement: `(sign + 1) / 2` at the first two intra-block
/// indices.
fn hadamard_label(matrix: &HadamardMatrix, intra: &[usize]) -> Label {
    if matrix.entry(intra[0], intra[1]) == 1 {
        Label::One
    } else {
        Label::Zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{complete_01_graph, random_star_graph, random_structure};
    use crate::solver::{find_homomorphism, SolveOpts};
    use crate::structure::{is_homomorphism, Signature};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn block_sizes_match_the_inequality() {
        assert_eq!(block_size(1), 8);
        assert_eq!(block_size(2), 32);
        assert_eq!(block_size(3), 64);
        for m in 1..=100usize {
            let b = block_size(m) as u128;
            let bound = (4 * m * m + 1) as u128;
            assert!(b > bound);
            assert!(b / 2 <= bound, "not minimal at m = {m}");
            // The pigeonhole step needs b / (2m) >= sqrt(4m^2 + 1),
            // squared here to stay in integers.
            assert!(b * b >= 4 * (m as u128) * (m as u128) * bound);
        }
    }

    #[test]
    fn starless_input_copies_blockwise() {
        let g = complete_01_graph(2);
        let res = star_to_01(&g, 1).unwrap();
        assert_eq!(res.block_size, 8);
        assert_eq!(res.structure.domain_size(), 16);
        assert_eq!(res.structure.category(), Category::C01);
        for u in 0..16usize {
            for v in 0..16usize {
                assert_eq!(
                    res.structure.get_label(0, &[u, v]).unwrap(),
                    g.get_label(0, &[u / 8, v / 8]).unwrap()
                );
            }
        }
    }

    #[test]
    fn star_loop_becomes_the_hadamard_pattern() {
        let sig = Signature::parse("E/2").unwrap();
        let mut g = LStructure::new(sig, Category::CStar, 1);
        g.set_label(0, &[0, 0], Label::Star).unwrap();
        let res = star_to_01(&g, 1).unwrap();
        let h8 = sylvester(3).unwrap();
        assert_eq!(res.structure.domain_size(), 8);
        for i in 0..8usize {
            for j in 0..8usize {
                let expected = if h8.entry(i, j) == 1 { Label::One } else { Label::Zero };
                assert_eq!(res.structure.get_label(0, &[i, j]).unwrap(), expected);
            }
        }
    }

    #[test]
    fn wider_arities_read_the_first_two_indices() {
        let sig = Signature::parse("T/3").unwrap();
        let mut g = LStructure::new(sig, Category::CStar, 1);
        g.set_default(0, Label::Star).unwrap();
        let res = star_to_01(&g, 1).unwrap();
        let h8 = sylvester(3).unwrap();
        for i in 0..8usize {
            for j in 0..8usize {
                let expected = if h8.entry(i, j) == 1 { Label::One } else { Label::Zero };
                for t in 0..8usize {
                    assert_eq!(res.structure.get_label(0, &[i, j, t]).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn projection_is_a_surjective_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let g = random_star_graph(n, &mut rng).unwrap();
            let m = rng.gen_range(1..=2);
            let res = star_to_01(&g, m).unwrap();
            assert!(is_homomorphism(&res.structure, &g, &res.projection).unwrap());
            assert_eq!(res.projection.image_set().len(), n);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let sig = Signature::parse("E/2 U/1").unwrap();
        let mut g = LStructure::new(sig.clone(), Category::CStar, 2);
        g.set_label(1, &[0], Label::Star).unwrap();
        assert!(matches!(star_to_01(&g, 1), Err(Error::UnsupportedInput(_))));
        let ok = LStructure::new(sig.clone(), Category::CStar, 2);
        assert!(star_to_01(&ok, 1).is_ok());
        assert!(matches!(star_to_01(&ok, 0), Err(Error::UnsupportedInput(_))));
        let empty_cat = LStructure::new(sig, Category::CEmpty, 2);
        assert!(matches!(
            star_to_01(&empty_cat, 1),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn blowup_preserves_and_reflects_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for round in 0..24 {
            let g = random_star_graph(rng.gen_range(1..=2), &mut rng).unwrap();
            let m = 1 + round % 2;
            let h = random_star_graph(m, &mut rng).unwrap();
            let res = star_to_01(&g, m).unwrap();
            let direct = find_homomorphism(&g, &h, &SolveOpts::default())
                .unwrap()
                .is_some();
            let blown = find_homomorphism(&res.structure, &h, &SolveOpts::default())
                .unwrap()
                .is_some();
            assert_eq!(direct, blown);
            if let Some(w) = find_homomorphism(&res.structure, &h, &SolveOpts::default()).unwrap() {
                for block in 0..g.domain_size() {
                    let mut counts = vec![0usize; m];
                    for i in 0..res.block_size {
                        counts[w.apply(block * res.block_size + i)] += 1;
                    }
                    assert!(counts.iter().any(|&c| c >= res.block_size / m));
                }
            }
        }
    }

    #[test]
    fn multi_symbol_structures_blow_up_too() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let sig = Signature::parse("E/2 T/3").unwrap();
        let g = random_structure(&sig, Category::CStar, 2, &mut rng).unwrap();
        let res = star_to_01(&g, 1).unwrap();
        assert!(is_homomorphism(&res.structure, &g, &res.projection).unwrap());
        let h = random_structure(&sig, Category::CStar, 1, &mut rng).unwrap();
        let direct = find_homomorphism(&g, &h, &SolveOpts::default())
            .unwrap()
            .is_some();
        let blown = find_homomorphism(&res.structure, &h, &SolveOpts::default())
            .unwrap()
            .is_some();
        assert_eq!(direct, blown);
    }
}
