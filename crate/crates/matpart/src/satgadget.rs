//! The 3-SAT reduction: from a formula, an oriented 01-tree and a
//! star-category target graph admitting a homomorphism exactly when the
//! formula is satisfiable, plus a verification harness.
//!
//! Clauses are read in the solver convention (a disjunction of three
//! literals); internally each clause excludes exactly one assignment of
//! its three positions. Per clause the tree hangs a clause-specific
//! oriented path off the root, then a branch edge, then one path per
//! literal occurrence. The target offers seven branches per clause, one
//! per non-excluded assignment, with each branch carrying value-tagged
//! copies of the same paths; cross edges between differently tagged
//! copies of one variable's path force every homomorphism to pick a
//! consistent assignment.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gen::edge_signature;
use crate::label::{Category, Label};
use crate::solver::{find_homomorphism, for_each_homomorphism, SolveOpts};
use crate::structure::{is_homomorphism, HomMap, LStructure};

/// Largest variable count [`verify_reduction`] will enumerate
/// assignments for.
pub const SAT_VARS_CAP: usize = 20;

/// How many witnesses the harness inspects for the root property.
const ROOT_WITNESS_SAMPLE: u64 = 100;

/// One literal: a 1-based variable index and its polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lit {
    /// Variable index, `1..=num_vars`.
    pub var: usize,
    /// Whether the literal is the plain variable rather than its
    /// negation.
    pub positive: bool,
}

/// A conjunction of clauses with exactly three literals each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<[Lit; 3]>,
}

impl Cnf3 {
    /// Builds a formula, checking variable ranges.
    pub fn new(num_vars: usize, clauses: Vec<[Lit; 3]>) -> Result<Cnf3> {
        for clause in &clauses {
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return Err(Error::UnsupportedInput(format!(
                        "literal variable {} outside 1..={num_vars}",
                        lit.var
                    )));
                }
            }
        }
        Ok(Cnf3 { num_vars, clauses })
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// The clauses.
    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    /// Whether `assignment` (indexed by variable minus one) satisfies
    /// every clause.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|lit| assignment[lit.var - 1] == lit.positive)
        })
    }
}

/// Parses DIMACS CNF text, requiring exactly three literals per clause
/// and a clause count matching the header.
pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<[Lit; 3]> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse {
                    line,
                    msg: "duplicate header".to_string(),
                });
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match tokens.as_slice() {
                ["p", "cnf", n, m] => n.parse::<usize>().ok().zip(m.parse::<usize>().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| Error::Parse {
                line,
                msg: "malformed header, expected `p cnf VARS CLAUSES`".to_string(),
            })?);
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| Error::Parse {
            line,
            msg: "clause before header".to_string(),
        })?;
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid literal `{token}`"),
            })?;
            if value == 0 {
                let got = current.len();
                let clause: [Lit; 3] = std::mem::take(&mut current)
                    .try_into()
                    .map_err(|_| Error::Parse {
                        line,
                        msg: format!("clause {} has {} literals, need 3", clauses.len() + 1, got),
                    })?;
                clauses.push(clause);
                continue;
            }
            let var = value.unsigned_abs() as usize;
            if var > num_vars {
                return Err(Error::Parse {
                    line,
                    msg: format!("variable {var} outside 1..={num_vars}"),
                });
            }
            current.push(Lit {
                var,
                positive: value > 0,
            });
        }
    }
    let (num_vars, declared) = header.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing header".to_string(),
    })?;
    if !current.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "unterminated clause".to_string(),
        });
    }
    if clauses.len() != declared {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {declared} clauses, found {}", clauses.len()),
        });
    }
    Cnf3::new(num_vars, clauses)
}

/// The 1-edges of the oriented path with a single reversed edge: edge
/// `j` runs from position `j` to `j + 1`, except edge `i` which is
/// reversed. Positions are `0..=n + 4`.
fn path_edge_positions(i: usize, n: usize) -> Vec<(usize, usize)> {
    (0..n + 4)
        .map(|j| if j == i { (j + 1, j) } else { (j, j + 1) })
        .collect()
}

/// The oriented path on `n + 5` elements whose edges all run forward
/// except the one between the `(i+1)`st and `(i+2)`nd elements.
pub fn variable_path(i: usize, n: usize) -> Result<LStructure> {
    if i == 0 || i > n {
        return Err(Error::UnsupportedInput(format!(
            "reversed-edge index {i} outside 1..={n}"
        )));
    }
    let mut path = LStructure::new(edge_signature(), Category::C01, n + 5);
    for (from, to) in path_edge_positions(i, n) {
        path.set_label(0, &[from, to], Label::One)?;
    }
    Ok(path)
}

/// The sign triple of a clause in the excluded-assignment convention: 1
/// marks a negated conjunct, which corresponds to a positive literal.
fn clause_signs(clause: &[Lit; 3]) -> [u8; 3] {
    [0, 1, 2].map(|l| u8::from(clause[l].positive))
}

/// The positional assignment a clause excludes: the one falsifying it.
fn excluded_assignment(clause: &[Lit; 3]) -> [u8; 3] {
    [0, 1, 2].map(|l| u8::from(!clause[l].positive))
}

/// The reversed-edge index encoding a sign triple, `1..=8`.
fn clause_path_index(signs: [u8; 3]) -> usize {
    4 * signs[0] as usize + 2 * signs[1] as usize + signs[2] as usize + 1
}

/// The clause-identifying oriented path of length 12 for one sign
/// triple (1 = negated conjunct).
pub fn clause_path(n1: u8, n2: u8, n3: u8) -> Result<LStructure> {
    for s in [n1, n2, n3] {
        if s > 1 {
            return Err(Error::UnsupportedInput(format!("sign {s} outside 0..=1")));
        }
    }
    variable_path(clause_path_index([n1, n2, n3]), 8)
}

/// Elements of one clause's part of the instance tree.
#[derive(Clone, Debug)]
pub struct TreeClauseBlock {
    /// The clause path elements; position 0 is the root.
    pub clause_path: Vec<usize>,
    /// Head of the extra edge hanging off the clause path's right end.
    pub branch_head: usize,
    /// Per literal position, the variable path elements; position 0 is
    /// the branch head.
    pub literal_paths: [Vec<usize>; 3],
}

/// The instance tree with its bookkeeping.
#[derive(Clone, Debug)]
pub struct TreeGadget {
    /// The oriented 01-tree.
    pub tree: LStructure,
    /// The root element.
    pub root: usize,
    /// One block per clause, in clause order.
    pub clauses: Vec<TreeClauseBlock>,
}

/// One satisfying branch of one clause in the target.
#[derive(Clone, Debug)]
pub struct TargetBranch {
    /// The positional assignment this branch stands for.
    pub assignment: [u8; 3],
    /// Head of the branch edge.
    pub head: usize,
    /// Per literal position, the tagged path copy; position 0 is the
    /// branch head, the last element is the copy's leaf.
    pub literal_paths: [Vec<usize>; 3],
}

/// Elements of one clause's part of the target.
#[derive(Clone, Debug)]
pub struct TargetClauseBlock {
    /// The clause path elements; position 0 is the root.
    pub clause_path: Vec<usize>,
    /// The seven branches, in ascending assignment order.
    pub branches: Vec<TargetBranch>,
}

/// The target graph with its bookkeeping.
#[derive(Clone, Debug)]
pub struct TargetGadget {
    /// The target structure; labels are 0/1 only.
    pub target: LStructure,
    /// The root element.
    pub root: usize,
    /// One block per clause, in clause order.
    pub clauses: Vec<TargetClauseBlock>,
}

/// Elements of the tree: `1 + m(3n + 25)`.
pub fn expected_tree_size(num_vars: usize, num_clauses: usize) -> usize {
    1 + num_clauses * (3 * num_vars + 25)
}

/// Elements of the target: `1 + m(21n + 103)`.
pub fn expected_target_size(num_vars: usize, num_clauses: usize) -> usize {
    1 + num_clauses * (21 * num_vars + 103)
}

/// Builds the instance tree: per clause, the clause path leaves the
/// root, one edge continues from its right end, and the three literal
/// paths fan out from that edge's head.
pub fn build_instance_tree(cnf: &Cnf3) -> TreeGadget {
    let n = cnf.num_vars();
    let root = 0usize;
    let mut next = 1usize;
    let mut fresh = |count: usize| -> Vec<usize> {
        let out: Vec<usize> = (next..next + count).collect();
        next += count;
        out
    };
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();
    for clause in cnf.clauses() {
        let mut clause_path = vec![root];
        clause_path.extend(fresh(12));
        let d = clause_path_index(clause_signs(clause));
        for (from, to) in path_edge_positions(d, 8) {
            edges.push((clause_path[from], clause_path[to]));
        }
        let branch_head = fresh(1)[0];
        edges.push((clause_path[12], branch_head));
        let literal_paths = [0, 1, 2].map(|l| {
            let mut path = vec![branch_head];
            path.extend(fresh(n + 4));
            for (from, to) in path_edge_positions(clause[l].var, n) {
                edges.push((path[from], path[to]));
            }
            path
        });
        blocks.push(TreeClauseBlock {
            clause_path,
            branch_head,
            literal_paths,
        });
    }
    let mut tree = LStructure::new(edge_signature(), Category::C01, next);
    for (from, to) in edges {
        tree.set_label(0, &[from, to], Label::One)
            .expect("edge within the allocated domain");
    }
    TreeGadget {
        tree,
        root,
        clauses: blocks,
    }
}

/// Builds the target: per clause, the clause path leaves the root and
/// fans out into seven branches, one per non-excluded positional
/// assignment, each carrying value-tagged copies of the literal paths;
/// then every 1-tagged copy leaf of a variable points to every 0-tagged
/// copy leaf of the same variable, across all clauses.
pub fn build_target(cnf: &Cnf3) -> TargetGadget {
    let n = cnf.num_vars();
    let root = 0usize;
    let mut next = 1usize;
    let mut fresh = |count: usize| -> Vec<usize> {
        let out: Vec<usize> = (next..next + count).collect();
        next += count;
        out
    };
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();
    // Leaves of every path copy, by variable and tag.
    let mut tagged_leaves: HashMap<(usize, u8), Vec<usize>> = HashMap::new();
    for clause in cnf.clauses() {
        let mut clause_path = vec![root];
        clause_path.extend(fresh(12));
        let d = clause_path_index(clause_signs(clause));
        for (from, to) in path_edge_positions(d, 8) {
            edges.push((clause_path[from], clause_path[to]));
        }
        let excluded = excluded_assignment(clause);
        let mut branches = Vec::new();
        for pattern in 0..8u8 {
            let assignment = [pattern >> 2 & 1, pattern >> 1 & 1, pattern & 1];
            if assignment == excluded {
                continue;
            }
            let head = fresh(1)[0];
            edges.push((clause_path[12], head));
            let literal_paths = [0, 1, 2].map(|l| {
                let mut path = vec![head];
                path.extend(fresh(n + 4));
                for (from, to) in path_edge_positions(clause[l].var, n) {
                    edges.push((path[from], path[to]));
                }
                tagged_leaves
                    .entry((clause[l].var, assignment[l]))
                    .or_default()
                    .push(*path.last().expect("path nonempty"));
                path
            });
            branches.push(TargetBranch {
                assignment,
                head,
                literal_paths,
            });
        }
        blocks.push(TargetClauseBlock {
            clause_path,
            branches,
        });
    }
    for var in 1..=n {
        if let (Some(ones), Some(zeros)) = (
            tagged_leaves.get(&(var, 1)),
            tagged_leaves.get(&(var, 0)),
        ) {
            for &one in ones {
                for &zero in zeros {
                    edges.push((one, zero));
                }
            }
        }
    }
    let mut target = LStructure::new(edge_signature(), Category::CStar, next);
    for (from, to) in edges {
        target
            .set_label(0, &[from, to], Label::One)
            .expect("edge within the allocated domain");
    }
    TargetGadget {
        target,
        root,
        clauses: blocks,
    }
}

/// The homomorphism induced by a satisfying assignment: each clause
/// block maps onto the branch matching the assignment's values at the
/// clause's positions.
pub fn assignment_to_hom(
    cnf: &Cnf3,
    tree: &TreeGadget,
    target: &TargetGadget,
    assignment: &[bool],
) -> Result<HomMap> {
    if assignment.len() != cnf.num_vars() {
        return Err(Error::WitnessShape(format!(
            "assignment covers {} variables, formula has {}",
            assignment.len(),
            cnf.num_vars()
        )));
    }
    let mut image = vec![0usize; tree.tree.domain_size()];
    image[tree.root] = target.root;
    for (c, clause) in cnf.clauses().iter().enumerate() {
        let values = [0, 1, 2].map(|l| u8::from(assignment[clause[l].var - 1]));
        let t_block = &tree.clauses[c];
        let h_block = &target.clauses[c];
        let branch = h_block
            .branches
            .iter()
            .find(|b| b.assignment == values)
            .ok_or_else(|| {
                Error::WitnessShape(format!("assignment does not satisfy clause {}", c + 1))
            })?;
        for (pos, &element) in t_block.clause_path.iter().enumerate() {
            image[element] = h_block.clause_path[pos];
        }
        image[t_block.branch_head] = branch.head;
        for l in 0..3 {
            for (pos, &element) in t_block.literal_paths[l].iter().enumerate() {
                image[element] = branch.literal_paths[l][pos];
            }
        }
    }
    HomMap::new(target.target.domain_size(), image)
}

/// Reads an assignment back from a homomorphism: each variable takes
/// the tag of the path copies its tree paths land in; variables with no
/// occurrence default to false.
///
/// Errors when the map is not a homomorphism, a leaf lands outside the
/// tagged leaves of its own variable, or two occurrences disagree.
pub fn hom_to_assignment(
    cnf: &Cnf3,
    tree: &TreeGadget,
    target: &TargetGadget,
    hom: &HomMap,
) -> Result<Vec<bool>> {
    if !is_homomorphism(&tree.tree, &target.target, hom)? {
        return Err(Error::WitnessShape(
            "the map is not a homomorphism of the gadget pair".to_string(),
        ));
    }
    let mut leaf_tags: HashMap<usize, (usize, u8)> = HashMap::new();
    for (clause, block) in cnf.clauses().iter().zip(&target.clauses) {
        for branch in &block.branches {
            for (l, path) in branch.literal_paths.iter().enumerate() {
                let leaf = *path.last().expect("path nonempty");
                leaf_tags.insert(leaf, (clause[l].var, branch.assignment[l]));
            }
        }
    }
    let mut values: Vec<Option<bool>> = vec![None; cnf.num_vars()];
    for (c, clause) in cnf.clauses().iter().enumerate() {
        for l in 0..3 {
            let leaf = *tree.clauses[c].literal_paths[l]
                .last()
                .expect("path nonempty");
            let (var, tag) = *leaf_tags.get(&hom.apply(leaf)).ok_or_else(|| {
                Error::WitnessShape(format!(
                    "clause {} position {} maps its leaf outside the tagged leaves",
                    c + 1,
                    l + 1
                ))
            })?;
            if var != clause[l].var {
                return Err(Error::WitnessShape(format!(
                    "clause {} position {} lands in a copy of variable {var}",
                    c + 1,
                    l + 1
                )));
            }
            let value = tag == 1;
            match values[var - 1] {
                Some(prev) if prev != value => {
                    return Err(Error::WitnessShape(format!(
                        "occurrences of variable {var} read back conflicting values"
                    )));
                }
                _ => values[var - 1] = Some(value),
            }
        }
    }
    Ok(values.into_iter().map(|v| v.unwrap_or(false)).collect())
}

/// Exhaustive satisfiability over all assignments; capped at
/// [`SAT_VARS_CAP`] variables.
pub fn satisfiable_bruteforce(cnf: &Cnf3) -> Result<bool> {
    if cnf.num_vars() > SAT_VARS_CAP {
        return Err(Error::CapExceeded {
            what: format!("enumerating assignments of {} variables", cnf.num_vars()),
            limit: SAT_VARS_CAP as u64,
        });
    }
    let n = cnf.num_vars();
    let mut assignment = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (i, slot) in assignment.iter_mut().enumerate() {
            *slot = mask >> i & 1 == 1;
        }
        if cnf.evaluate(&assignment) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The harness verdict for one formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    /// Exhaustive-assignment satisfiability verdict.
    pub sat: bool,
    /// Solver verdict on the gadget pair.
    pub hom: bool,
    /// Whether the two verdicts agree.
    pub equivalent: bool,
    /// Whether every inspected witness maps root to root and pinning
    /// the root loses no witness.
    pub root_ok: bool,
    /// Tree element count.
    pub tree_size: usize,
    /// Expected tree element count from the closed form.
    pub tree_expected: usize,
    /// Target element count.
    pub target_size: usize,
    /// Expected target element count from the closed form.
    pub target_expected: usize,
}

impl ReductionReport {
    /// Whether all checks passed.
    pub fn all_ok(&self) -> bool {
        self.equivalent && self.root_ok && self.sizes_ok()
    }

    /// Whether both element counts match the closed forms.
    pub fn sizes_ok(&self) -> bool {
        self.tree_size == self.tree_expected && self.target_size == self.target_expected
    }

    /// Renders the report with one verdict per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "SAT={} HOM={} EQUIV={}\n",
            self.sat, self.hom, self.equivalent
        ));
        out.push_str(&format!(
            "ROOT={}\n",
            if self.root_ok { "ok" } else { "violated" }
        ));
        out.push_str(&format!(
            "SIZE tree={} expected={} {}\n",
            self.tree_size,
            self.tree_expected,
            if self.tree_size == self.tree_expected {
                "ok"
            } else {
                "mismatch"
            }
        ));
        out.push_str(&format!(
            "SIZE target={} expected={} {}\n",
            self.target_size,
            self.target_expected,
            if self.target_size == self.target_expected {
                "ok"
            } else {
                "mismatch"
            }
        ));
        out
    }
}

/// Runs the full harness on one formula: exhaustive satisfiability,
/// solver verdict on the gadget pair, root behavior of found witnesses,
/// and element counts against the closed forms.
pub fn verify_reduction(cnf: &Cnf3) -> Result<ReductionReport> {
    let sat = satisfiable_bruteforce(cnf)?;
    let tree = build_instance_tree(cnf);
    let target = build_target(cnf);
    let hom = find_homomorphism(&tree.tree, &target.target, &SolveOpts::default())?.is_some();
    let mut root_ok = true;
    if hom {
        let mut inspected = 0u64;
        for_each_homomorphism(&tree.tree, &target.target, &SolveOpts::default(), |w| {
            if w.apply(tree.root) != target.root {
                root_ok = false;
                return true;
            }
            inspected += 1;
            inspected >= ROOT_WITNESS_SAMPLE
        })?;
        let pinned = SolveOpts {
            pins: vec![(tree.root, target.root)],
            ..SolveOpts::default()
        };
        if find_homomorphism(&tree.tree, &target.target, &pinned)?.is_none() {
            root_ok = false;
        }
    }
    let (n, m) = (cnf.num_vars(), cnf.clauses().len());
    Ok(ReductionReport {
        sat,
        hom,
        equivalent: sat == hom,
        root_ok,
        tree_size: tree.tree.domain_size(),
        tree_expected: expected_tree_size(n, m),
        target_size: target.target.domain_size(),
        target_expected: expected_target_size(n, m),
    })
}

/// Draws a random formula; repeated variables in one clause are
/// allowed.
pub fn random_cnf3(num_vars: usize, num_clauses: usize, rng: &mut impl rand::Rng) -> Cnf3 {
    let clauses = (0..num_clauses)
        .map(|_| {
            [0; 3].map(|_| Lit {
                var: rng.gen_range(1..=num_vars),
                positive: rng.gen_bool(0.5),
            })
        })
        .collect();
    Cnf3::new(num_vars, clauses).expect("drawn variables are in range")
}
