//! Acceptance suite: one test per library-level criterion, each
//! printing a single PASS/FAIL line with its elapsed time.

use std::time::{Duration, Instant};

use matpart::{
    binary_to_many_instance, binary_to_many_target, canonical_form, enumerate_structures,
    find_homomorphism, from_csp, hom_exists_bruteforce, is_homomorphism, is_isomorphic,
    is_trivial_target, label_join, label_leq, many_to_binary_instance, odd_cycle_empty,
    pack_structure, parse_dimacs, random_cnf3, star_to_01, submatrix_monochromatic, sylvester,
    to_csp, unpack_instance, variable_path, verify_reduction, Category, Label, LStructure,
    ObstructionSearch, PackedSignature, Signature, SolveOpts, UnpackOutcome, DEFAULT_MAP_CAP,
};
use matpart::gen::{complete_01_graph, edge_signature, random_star_graph, random_structure};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conclude(id: &str, name: &str, ok: bool, elapsed: Duration, budget: Duration) {
    let within = elapsed < budget;
    println!(
        "acceptance {id} ({name}): {} [{:.2}s of {:.0}s]",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "acceptance {id} ({name}): checks failed");
    assert!(
        within,
        "acceptance {id} ({name}): took {:.2}s, budget {:.0}s",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}

#[test]
fn acceptance_1_poset_and_join_laws() {
    let start = Instant::now();
    let mut ok = true;
    for cat in [
        Category::C01,
        Category::CCsp,
        Category::CStar,
        Category::CEmpty,
    ] {
        let labels = cat.labels();
        for &a in labels {
            ok &= label_leq(a, a, cat).unwrap();
            for &b in labels {
                let ab = label_leq(a, b, cat).unwrap();
                if ab && label_leq(b, a, cat).unwrap() {
                    ok &= a == b;
                }
                for &c in labels {
                    if ab && label_leq(b, c, cat).unwrap() {
                        ok &= label_leq(a, c, cat).unwrap();
                    }
                }
            }
        }
        if matches!(cat, Category::CStar | Category::CEmpty) {
            for &a in labels {
                ok &= label_join(a, a, cat).unwrap() == a;
                for &b in labels {
                    let j = label_join(a, b, cat).unwrap();
                    ok &= j == label_join(b, a, cat).unwrap();
                    ok &= label_leq(a, j, cat).unwrap();
                    ok &= label_leq(b, j, cat).unwrap();
                    for &c in labels {
                        let bc = label_join(b, c, cat).unwrap();
                        ok &= label_join(a, bc, cat).unwrap() == label_join(j, c, cat).unwrap();
                        if label_leq(a, c, cat).unwrap() && label_leq(b, c, cat).unwrap() {
                            ok &= label_leq(j, c, cat).unwrap();
                        }
                    }
                }
            }
        } else {
            ok &= label_join(Label::Zero, Label::One, cat).is_err();
        }
    }
    conclude(
        "1",
        "poset and join laws",
        ok,
        start.elapsed(),
        Duration::from_secs(1),
    );
}

fn random_small_signature(rng: &mut impl Rng) -> Signature {
    let names = ["R", "S"];
    let count = rng.gen_range(1..=2);
    Signature::new(
        (0..count).map(|i| (names[i], rng.gen_range(1..=3))),
    )
    .unwrap()
}

#[test]
fn acceptance_2_csp_encoding() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = true;
    for _ in 0..200 {
        let sig = random_small_signature(&mut rng);
        let n = rng.gen_range(1..=3);
        let a = random_structure(&sig, Category::CEmpty, n, &mut rng).unwrap();
        let back = from_csp(&to_csp(&a).unwrap()).unwrap();
        ok &= back == a;
    }
    for _ in 0..200 {
        let sig = random_small_signature(&mut rng);
        let g = random_structure(&sig, Category::CEmpty, rng.gen_range(1..=3), &mut rng).unwrap();
        let h = random_structure(&sig, Category::CEmpty, rng.gen_range(1..=3), &mut rng).unwrap();
        let eg = to_csp(&g).unwrap();
        let eh = to_csp(&h).unwrap();
        let plain = find_homomorphism(&g, &h, &SolveOpts::default()).unwrap();
        let encoded = find_homomorphism(&eg, &eh, &SolveOpts::default()).unwrap();
        ok &= plain.is_some() == encoded.is_some();
        for witness in [&plain, &encoded].into_iter().flatten() {
            ok &= is_homomorphism(&g, &h, witness).unwrap();
            ok &= is_homomorphism(&eg, &eh, witness).unwrap();
        }
    }
    conclude(
        "2",
        "empty-label and constraint problems coincide",
        ok,
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn acceptance_3_hadamard() {
    let start = Instant::now();
    let mut ok = true;
    for k in 0..=10 {
        ok &= matpart::verify_hadamard(&sylvester(k).unwrap());
    }
    // Every disjoint equal-size row/column pair larger than the square
    // root of the order picks out a mixed submatrix. At order 4 no such
    // pair exists; order 16 is checked exhaustively.
    for k in [2u32, 4] {
        let m = sylvester(k).unwrap();
        let n = m.order();
        let threshold = (n as f64).sqrt() as usize;
        for s in threshold + 1..=n / 2 {
            for rows_mask in 0u32..1 << n {
                if rows_mask.count_ones() as usize != s {
                    continue;
                }
                let comp = !rows_mask & ((1u32 << n) - 1);
                let rows: Vec<usize> = (0..n).filter(|&i| rows_mask >> i & 1 == 1).collect();
                let mut sub = comp;
                loop {
                    if sub.count_ones() as usize == s {
                        let cols: Vec<usize> = (0..n).filter(|&i| sub >> i & 1 == 1).collect();
                        ok &= !submatrix_monochromatic(&m, &rows, &cols).unwrap();
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & comp;
                }
            }
        }
    }
    conclude(
        "3",
        "Hadamard construction and mixed submatrices",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
    );
}

fn nontrivial_star_targets() -> Vec<LStructure> {
    let mut targets = Vec::new();
    for n in 1..=2 {
        targets.extend(
            enumerate_structures(&edge_signature(), n, Category::CStar)
                .unwrap()
                .into_iter()
                .filter(|h| !is_trivial_target(h)),
        );
    }
    targets
}

#[test]
fn acceptance_4_blowup() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    let mut slowest = Duration::ZERO;
    for h in &nontrivial_star_targets() {
        for _ in 0..50 {
            let instance_start = Instant::now();
            let g = random_star_graph(rng.gen_range(1..=3), &mut rng).unwrap();
            let blown = star_to_01(&g, h.domain_size()).unwrap();
            let small = hom_exists_bruteforce(&g, h, DEFAULT_MAP_CAP).unwrap();
            let big = find_homomorphism(&blown.structure, h, &SolveOpts::default())
                .unwrap()
                .is_some();
            ok &= small == big;
            ok &= is_homomorphism(&blown.structure, &g, &blown.projection).unwrap();
            ok &= blown.projection.image_set().len() == g.domain_size();
            slowest = slowest.max(instance_start.elapsed());
        }
    }
    ok &= slowest < Duration::from_secs(60);
    conclude(
        "4",
        "star blow-up preserves homomorphism existence",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn acceptance_5_arity_reductions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    for symbols in [vec![("R", 2), ("S", 1)], vec![("R", 2), ("S", 3)]] {
        let sig = Signature::new(symbols).unwrap();
        let packed_sig = PackedSignature::new(sig.clone()).unwrap();
        for _ in 0..100 {
            let a = random_structure(&sig, Category::CStar, rng.gen_range(1..=3), &mut rng)
                .unwrap();
            let b = random_structure(&sig, Category::CStar, rng.gen_range(1..=3), &mut rng)
                .unwrap();
            let pa = pack_structure(&a).unwrap();
            let pb = pack_structure(&b).unwrap();
            let plain = hom_exists_bruteforce(&b, &a, DEFAULT_MAP_CAP).unwrap();
            let packed = hom_exists_bruteforce(&pb, &pa, DEFAULT_MAP_CAP).unwrap();
            ok &= plain == packed;
            match unpack_instance(&pb, &sig).unwrap() {
                UnpackOutcome::Structure(back) => ok &= is_isomorphic(&back, &b).unwrap(),
                UnpackOutcome::NoCertificate(_) => ok = false,
            }
        }
        for _ in 0..100 {
            let a = random_structure(&sig, Category::CStar, rng.gen_range(1..=3), &mut rng)
                .unwrap();
            let pa = pack_structure(&a).unwrap();
            let instance = random_structure(
                packed_sig.packed(),
                Category::CStar,
                rng.gen_range(1..=3),
                &mut rng,
            )
            .unwrap();
            let direct = hom_exists_bruteforce(&instance, &pa, DEFAULT_MAP_CAP).unwrap();
            let via_unpack = match unpack_instance(&instance, &sig).unwrap() {
                UnpackOutcome::Structure(back) => {
                    hom_exists_bruteforce(&back, &a, DEFAULT_MAP_CAP).unwrap()
                }
                UnpackOutcome::NoCertificate(_) => false,
            };
            ok &= direct == via_unpack;
        }
    }
    conclude(
        "5",
        "arity packing equivalences",
        ok,
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn acceptance_6_binary_many_equivalences() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    let sig = Signature::new([("R", 3), ("S", 2)]).unwrap();
    for _ in 0..100 {
        let g = random_star_graph(rng.gen_range(1..=3), &mut rng).unwrap();
        let h = random_star_graph(rng.gen_range(1..=2), &mut rng).unwrap();
        let many_g = binary_to_many_instance(&g, &sig).unwrap();
        let many_h = binary_to_many_target(&h, &sig).unwrap();
        let graph_side = hom_exists_bruteforce(&g, &h, DEFAULT_MAP_CAP).unwrap();
        let many_side = hom_exists_bruteforce(&many_g, &many_h, DEFAULT_MAP_CAP).unwrap();
        ok &= graph_side == many_side;
        let instance =
            random_structure(&sig, Category::CStar, rng.gen_range(1..=3), &mut rng).unwrap();
        let collapsed = many_to_binary_instance(&instance).unwrap();
        let direct = hom_exists_bruteforce(&instance, &many_h, DEFAULT_MAP_CAP).unwrap();
        let reduced = hom_exists_bruteforce(&collapsed, &h, DEFAULT_MAP_CAP).unwrap();
        ok &= direct == reduced;
    }
    conclude(
        "6",
        "binary and many-relation problems coincide",
        ok,
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn acceptance_7_obstruction_sets() {
    let start = Instant::now();
    let mut ok = true;
    let mut search = ObstructionSearch::new();
    for h in &nontrivial_star_targets() {
        let inc = search
            .inclusion_minimal_obstructions(h, Category::C01, 3)
            .unwrap();
        let hom01 = search
            .hom_minimal_obstructions(h, Category::C01, 3, 3)
            .unwrap();
        let mut inc_forms: Vec<Vec<u8>> = inc
            .members
            .iter()
            .map(|m| canonical_form(m).unwrap())
            .collect();
        let mut hom01_forms: Vec<Vec<u8>> = hom01
            .members
            .iter()
            .map(|m| canonical_form(m).unwrap())
            .collect();
        inc_forms.sort();
        hom01_forms.sort();
        ok &= inc_forms == hom01_forms;
        let hom_star = search
            .hom_minimal_obstructions(h, Category::CStar, 3, 3)
            .unwrap();
        let mut relabeled_forms: Vec<Vec<u8>> = Vec::new();
        for member in &hom_star.members {
            match member.with_category(Category::C01) {
                Ok(relabeled) => relabeled_forms.push(canonical_form(&relabeled).unwrap()),
                Err(_) => ok = false,
            }
        }
        relabeled_forms.sort();
        ok &= relabeled_forms == hom01_forms;
    }
    // The two-vertex counterexample: zero loops, both cross pairs *,
    // against the two-clique.
    let k2 = complete_01_graph(2);
    let mut counterexample = LStructure::new(edge_signature(), Category::CStar, 2);
    counterexample.set_label(0, &[0, 1], Label::Star).unwrap();
    counterexample.set_label(0, &[1, 0], Label::Star).unwrap();
    ok &= search
        .is_inclusion_minimal_obstruction(&counterexample, &k2)
        .unwrap();
    ok &= !matpart::is_hom_minimal_obstruction(&counterexample, &k2, 3).unwrap();
    // Odd cycles obstruct the two-clique over the bottom-label
    // category, the even cycle does not.
    let k2_empty = k2.with_category(Category::CEmpty).unwrap();
    ok &= search
        .is_inclusion_minimal_obstruction(&odd_cycle_empty(3), &k2_empty)
        .unwrap();
    ok &= search
        .is_inclusion_minimal_obstruction(&odd_cycle_empty(5), &k2_empty)
        .unwrap();
    ok &= !search
        .is_inclusion_minimal_obstruction(&odd_cycle_empty(4), &k2_empty)
        .unwrap();
    conclude(
        "7",
        "obstruction sets and minimality",
        ok,
        start.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn acceptance_8_sat_gadget() {
    let start = Instant::now();
    let mut ok = true;
    let paths: Vec<LStructure> = (1..=8).map(|i| variable_path(i, 8).unwrap()).collect();
    for (i, p) in paths.iter().enumerate() {
        for (j, q) in paths.iter().enumerate() {
            let maps = find_homomorphism(p, q, &SolveOpts::default())
                .unwrap()
                .is_some();
            ok &= maps == (i == j);
        }
    }
    let fixtures = [
        ("p cnf 3 1\n-1 -2 -3 0\n", true),
        ("p cnf 2 2\n1 2 2 0\n-1 -2 -2 0\n", true),
        ("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n", false),
        ("p cnf 2 2\n2 2 2 0\n-2 -2 -2 0\n", false),
    ];
    let mut slowest = Duration::ZERO;
    for (text, expect_sat) in fixtures {
        let formula = parse_dimacs(text).unwrap();
        let run = Instant::now();
        let report = verify_reduction(&formula).unwrap();
        slowest = slowest.max(run.elapsed());
        ok &= report.sat == expect_sat;
        ok &= report.all_ok();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let formula = random_cnf3(rng.gen_range(1..=3), rng.gen_range(1..=2), &mut rng);
        let run = Instant::now();
        let report = verify_reduction(&formula).unwrap();
        slowest = slowest.max(run.elapsed());
        ok &= report.all_ok();
    }
    ok &= slowest < Duration::from_secs(60);
    conclude(
        "8",
        "satisfiability reduction",
        ok,
        start.elapsed(),
        Duration::from_secs(600),
    );
}
