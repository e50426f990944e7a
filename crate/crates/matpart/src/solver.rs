//! Homomorphism search: a deterministic backtracking solver plus an
//! exhaustive brute-force oracle.
//!
//! The solver assigns source elements to target elements. Unary symbols
//! and diagonal tuples are folded into the initial domains, binary
//! symbols are enforced by forward checking (optionally strengthened by
//! arc consistency on small instances), and wider symbols are checked as
//! soon as a tuple becomes fully assigned.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::label::{comparison_category, Category, Label};
use crate::structure::{for_each_tuple, tuple_space_size, HomMap, LStructure};

/// Default cap on the number of candidate maps the brute-force oracle
/// will enumerate.
pub const DEFAULT_MAP_CAP: u64 = 10_000_000;

/// Instances smaller than this (by `|G|^2 * |H|^2`) get an arc
/// consistency pass over the binary symbols before search.
const AC_BUDGET: u64 = 2_000_000;

/// Search controls for [`find_homomorphism`] and
/// [`enumerate_homomorphisms`].
#[derive(Clone, Debug, Default)]
pub struct SolveOpts {
    /// Forced images: `(source element, target element)` pairs. Multiple
    /// pins on one element intersect.
    pub pins: Vec<(usize, usize)>,
    /// Wall-clock cutoff; exceeding it aborts with [`Error::Timeout`].
    pub deadline: Option<Instant>,
    /// Cap on search nodes (value assignments tried); exceeding it aborts
    /// with [`Error::CapExceeded`].
    pub node_cap: Option<u64>,
}

fn bit_get(words: &[u64], i: usize) -> bool {
    words[i / 64] & (1u64 << (i % 64)) != 0
}

fn bit_clear(words: &mut [u64], i: usize) {
    words[i / 64] &= !(1u64 << (i % 64));
}

fn bit_count(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

struct Search<'a> {
    g: &'a LStructure,
    h: &'a LStructure,
    cat: Category,
    n: usize,
    m: usize,
    words: usize,
    /// Ordered-pair label tables for each binary symbol: `g_bin[b][u*n+w]`
    /// and `h_bin[b][v*m+y]` are the labels of `(u,w)` and `(v,y)`.
    g_bin: Vec<Vec<Label>>,
    h_bin: Vec<Vec<Label>>,
    /// Symbols of arity 3 or more, as `(symbol, arity)`.
    wide: Vec<(usize, usize)>,
    assignment: Vec<usize>,
    assigned: Vec<bool>,
    assigned_order: Vec<usize>,
    nodes: u64,
    node_cap: Option<u64>,
    deadline: Option<Instant>,
}

impl<'a> Search<'a> {
    fn new(g: &'a LStructure, h: &'a LStructure, opts: &SolveOpts) -> Result<Search<'a>> {
        if g.signature() != h.signature() {
            return Err(Error::SignatureMismatch);
        }
        let cat = comparison_category(g.category(), h.category())?;
        let n = g.domain_size();
        let m = h.domain_size();
        let mut g_bin = Vec::new();
        let mut h_bin = Vec::new();
        let mut wide = Vec::new();
        for sym in 0..g.signature().len() {
            match g.signature().arity(sym) {
                1 => {}
                2 => {
                    let mut gt = Vec::with_capacity(n * n);
                    for u in 0..n {
                        for w in 0..n {
                            gt.push(g.label_at(sym, &[u, w]));
                        }
                    }
                    let mut ht = Vec::with_capacity(m * m);
                    for v in 0..m {
                        for y in 0..m {
                            ht.push(h.label_at(sym, &[v, y]));
                        }
                    }
                    g_bin.push(gt);
                    h_bin.push(ht);
                }
                k => wide.push((sym, k)),
            }
        }
        Ok(Search {
            g,
            h,
            cat,
            n,
            m,
            words: m.div_ceil(64).max(1),
            g_bin,
            h_bin,
            wide,
            assignment: vec![0; n],
            assigned: vec![false; n],
            assigned_order: Vec::with_capacity(n),
            nodes: 0,
            node_cap: opts.node_cap,
            deadline: opts.deadline,
        })
    }

    fn charge_node(&mut self) -> Result<()> {
        self.nodes += 1;
        if let Some(cap) = self.node_cap {
            if self.nodes > cap {
                return Err(Error::CapExceeded {
                    what: "search node count".to_string(),
                    limit: cap,
                });
            }
        }
        if let Some(deadline) = self.deadline {
            if self.nodes % 64 == 0 && Instant::now() >= deadline {
                return Err(Error::Timeout);
            }
        }
        Ok(())
    }

    /// Initial domains: `v` survives for `u` iff every symbol's diagonal
    /// satisfies `R_G(u,..,u) <= R_H(v,..,v)`. This subsumes all unary
    /// constraints.
    fn initial_domains(&self, opts: &SolveOpts) -> Result<Vec<Vec<u64>>> {
        let mut domains = vec![vec![0u64; self.words]; self.n];
        for u in 0..self.n {
            for v in 0..self.m {
                let mut ok = true;
                for sym in 0..self.g.signature().len() {
                    let k = self.g.signature().arity(sym);
                    let a = self.g.label_at(sym, &vec![u; k]);
                    let b = self.h.label_at(sym, &vec![v; k]);
                    if !self.cat.leq_raw(a, b) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    domains[u][v / 64] |= 1u64 << (v % 64);
                }
            }
        }
        for &(u, v) in &opts.pins {
            if u >= self.n {
                return Err(Error::ElementOutOfRange {
                    element: u,
                    domain_size: self.n,
                });
            }
            if v >= self.m {
                return Err(Error::ElementOutOfRange {
                    element: v,
                    domain_size: self.m,
                });
            }
            let keep = if bit_get(&domains[u], v) { 1u64 << (v % 64) } else { 0 };
            for w in domains[u].iter_mut() {
                *w = 0;
            }
            domains[u][v / 64] = keep;
        }
        Ok(domains)
    }

    /// Whether target pair `(v, y)` supports source pair `(u, w)` across
    /// every binary symbol, in both orientations.
    fn pair_ok(&self, u: usize, w: usize, v: usize, y: usize) -> bool {
        for (gt, ht) in self.g_bin.iter().zip(&self.h_bin) {
            if !self.cat.leq_raw(gt[u * self.n + w], ht[v * self.m + y]) {
                return false;
            }
            if !self.cat.leq_raw(gt[w * self.n + u], ht[y * self.m + v]) {
                return false;
            }
        }
        true
    }

    /// Arc consistency over the binary symbols. Returns false when some
    /// domain became empty.
    fn ac3(&self, domains: &mut [Vec<u64>]) -> bool {
        if self.g_bin.is_empty() || self.n < 2 {
            return domains.iter().all(|d| bit_count(d) > 0);
        }
        let mut queue: Vec<(usize, usize)> = Vec::new();
        for u in 0..self.n {
            for w in 0..self.n {
                if u != w {
                    queue.push((u, w));
                }
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let (u, w) = queue[head];
            head += 1;
            let mut changed = false;
            for v in 0..self.m {
                if !bit_get(&domains[u], v) {
                    continue;
                }
                let supported =
                    (0..self.m).any(|y| bit_get(&domains[w], y) && self.pair_ok(u, w, v, y));
                if !supported {
                    bit_clear(&mut domains[u], v);
                    changed = true;
                }
            }
            if changed {
                if bit_count(&domains[u]) == 0 {
                    return false;
                }
                for x in 0..self.n {
                    if x != u && x != w && !queue[head..].contains(&(x, u)) {
                        queue.push((x, u));
                    }
                }
            }
        }
        true
    }

    /// Forward checking after assigning `u := v`: prunes every unassigned
    /// domain against the new assignment. Returns false on a wipeout.
    fn forward_check(&self, u: usize, v: usize, domains: &mut [Vec<u64>]) -> bool {
        if self.g_bin.is_empty() {
            return true;
        }
        for w in 0..self.n {
            if self.assigned[w] {
                continue;
            }
            let mut alive = false;
            for y in 0..self.m {
                if !bit_get(&domains[w], y) {
                    continue;
                }
                if self.pair_ok(u, w, v, y) {
                    alive = true;
                } else {
                    bit_clear(&mut domains[w], y);
                }
            }
            if !alive {
                return false;
            }
        }
        true
    }

    /// Checks every tuple of every wide symbol that became fully assigned
    /// with the assignment of `u`.
    fn wide_ok(&self, u: usize) -> bool {
        if self.wide.is_empty() {
            return true;
        }
        let base = self.assigned_order.len();
        let mut actual = Vec::new();
        let mut mapped = Vec::new();
        for &(sym, k) in &self.wide {
            let mut ok = true;
            for_each_tuple(base, k, |idx| {
                if !ok {
                    return;
                }
                actual.clear();
                actual.extend(idx.iter().map(|&i| self.assigned_order[i]));
                if !actual.contains(&u) {
                    return;
                }
                mapped.clear();
                mapped.extend(actual.iter().map(|&e| self.assignment[e]));
                let a = self.g.label_at(sym, &actual);
                let b = self.h.label_at(sym, &mapped);
                if !self.cat.leq_raw(a, b) {
                    ok = false;
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    fn pick_mrv(&self, domains: &[Vec<u64>]) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for u in 0..self.n {
            if self.assigned[u] {
                continue;
            }
            let size = bit_count(&domains[u]);
            if best.map_or(true, |(s, _)| size < s) {
                best = Some((size, u));
            }
        }
        best.map(|(_, u)| u)
    }

    /// Depth-first search. `static_order` replaces most-constrained-first
    /// with the fixed order `0..n`, which makes complete visits come out
    /// in lexicographic witness order. The visitor returns true to stop.
    fn search(
        &mut self,
        domains: &[Vec<u64>],
        static_order: bool,
        visit: &mut dyn FnMut(HomMap) -> bool,
    ) -> Result<bool> {
        let u = if static_order {
            (0..self.n).find(|&u| !self.assigned[u])
        } else {
            self.pick_mrv(domains)
        };
        let u = match u {
            Some(u) => u,
            None => {
                let witness = HomMap::new(self.m, self.assignment.clone())?;
                return Ok(visit(witness));
            }
        };
        for v in 0..self.m {
            if !bit_get(&domains[u], v) {
                continue;
            }
            self.charge_node()?;
            self.assignment[u] = v;
            self.assigned[u] = true;
            self.assigned_order.push(u);
            let mut pruned = domains.to_vec();
            let feasible = self.wide_ok(u) && self.forward_check(u, v, &mut pruned);
            let done = if feasible {
                self.search(&pruned, static_order, visit)?
            } else {
                false
            };
            self.assigned[u] = false;
            self.assigned_order.pop();
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn run(
        &mut self,
        opts: &SolveOpts,
        static_order: bool,
        visit: &mut dyn FnMut(HomMap) -> bool,
    ) -> Result<()> {
        if self.n == 0 {
            visit(HomMap::new(self.m, Vec::new())?);
            return Ok(());
        }
        let mut domains = self.initial_domains(opts)?;
        if domains.iter().any(|d| bit_count(d) == 0) {
            return Ok(());
        }
        let cost = (self.n as u64 * self.n as u64).saturating_mul(self.m as u64 * self.m as u64);
        if cost <= AC_BUDGET && !self.ac3(&mut domains) {
            return Ok(());
        }
        self.search(&domains, static_order, visit)?;
        Ok(())
    }
}

/// Finds a homomorphism from `g` to `h` under `opts`, or `None` when no
/// homomorphism exists.
///
/// Deterministic: repeated calls return the same witness, the first one
/// found under most-constrained-first variable order with ascending
/// values.
pub fn find_homomorphism(
    g: &LStructure,
    h: &LStructure,
    opts: &SolveOpts,
) -> Result<Option<HomMap>> {
    let mut search = Search::new(g, h, opts)?;
    let mut first = None;
    search.run(opts, false, &mut |w| {
        first = Some(w);
        true
    })?;
    Ok(first)
}

/// Enumerates every homomorphism from `g` to `h` under `opts`, in
/// lexicographic order of the image arrays, each exactly once.
pub fn enumerate_homomorphisms(
    g: &LStructure,
    h: &LStructure,
    opts: &SolveOpts,
) -> Result<Vec<HomMap>> {
    let mut out = Vec::new();
    let mut search = Search::new(g, h, opts)?;
    search.run(opts, true, &mut |w| {
        out.push(w);
        false
    })?;
    Ok(out)
}

/// Streams every homomorphism from `g` to `h` in lexicographic order
/// without materializing the full list. The callback returns true to
/// stop the search early.
pub fn for_each_homomorphism(
    g: &LStructure,
    h: &LStructure,
    opts: &SolveOpts,
    mut f: impl FnMut(&HomMap) -> bool,
) -> Result<()> {
    let mut search = Search::new(g, h, opts)?;
    search.run(opts, true, &mut |w| f(&w))
}

/// Exhaustive oracle: tries all `|H|^|G|` maps through
/// [`is_homomorphism`](crate::structure::is_homomorphism).
///
/// Independent of the backtracking solver by construction; property
/// tests compare the two. Errors when the map count exceeds `map_cap`.
pub fn hom_exists_bruteforce(g: &LStructure, h: &LStructure, map_cap: u64) -> Result<bool> {
    if g.signature() != h.signature() {
        return Err(Error::SignatureMismatch);
    }
    comparison_category(g.category(), h.category())?;
    let n = g.domain_size();
    let m = h.domain_size();
    let count = tuple_space_size(m, n);
    match count {
        Some(c) if c <= map_cap as u128 => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "brute-force map enumeration".to_string(),
                limit: map_cap,
            })
        }
    }
    if n == 0 {
        return Ok(true);
    }
    let mut found = false;
    for_each_tuple(m, n, |image| {
        if found {
            return;
        }
        let map = HomMap::new(m, image.to_vec()).expect("image within range");
        if crate::structure::is_homomorphism(g, h, &map).expect("shapes validated") {
            found = true;
        }
    });
    Ok(found)
}
