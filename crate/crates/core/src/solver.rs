//! Exact transversal search on covers: existence, counting, enumeration,
//! and the greedy coloring used by the peeling arguments.
//!
//! The backtracking search keeps one bitmask domain per vertex, picks the
//! unassigned vertex with the smallest remaining domain (ties by index), and
//! forward-checks matched partners. Counting factors over connected
//! components and switches to a transfer-matrix product when the base graph
//! is a single cycle.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::{subcover, Cover};
use crate::error::{Error, Result};

/// A transversal of a cover: one list index per vertex, avoiding every
/// matched pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HColoring {
    pub choice: Vec<usize>,
}

/// Search effort counters, reported on the diagnostics stream only.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    #[serde(serialize_with = "ser_duration_ms")]
    pub elapsed: Duration,
}

fn ser_duration_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

/// Checks a choice vector against every link of the cover.
pub fn is_valid_coloring(cover: &Cover, coloring: &HColoring) -> bool {
    let g = cover.graph();
    if coloring.choice.len() != g.vertex_count() {
        return false;
    }
    if (0..g.vertex_count()).any(|v| coloring.choice[v] >= cover.list_size(v)) {
        return false;
    }
    g.edges().iter().enumerate().all(|(e, &(u, v))| {
        !cover
            .link(e)
            .contains(&(coloring.choice[u], coloring.choice[v]))
    })
}

const MAX_FOLD: usize = 64;

/// Partner tables per vertex: for each neighbor, `table[i]` is the matched
/// index on the other side, if any.
struct LinkIndex {
    nbrs: Vec<Vec<(usize, Vec<Option<usize>>)>>,
}

impl LinkIndex {
    fn build(cover: &Cover) -> Result<LinkIndex> {
        let g = cover.graph();
        if cover.list_sizes().iter().any(|&m| m > MAX_FOLD) {
            return Err(Error::Unsupported(format!(
                "list sizes above {} are not supported by the solver",
                MAX_FOLD
            )));
        }
        let mut nbrs: Vec<Vec<(usize, Vec<Option<usize>>)>> =
            (0..g.vertex_count()).map(|_| Vec::new()).collect();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let mut u_to_v = vec![None; cover.list_size(u)];
            let mut v_to_u = vec![None; cover.list_size(v)];
            for &(i, j) in cover.link(e) {
                u_to_v[i] = Some(j);
                v_to_u[j] = Some(i);
            }
            nbrs[u].push((v, u_to_v));
            nbrs[v].push((u, v_to_u));
        }
        Ok(LinkIndex { nbrs })
    }
}

struct Search<'a> {
    cover: &'a Cover,
    index: LinkIndex,
    domains: Vec<u64>,
    assigned: Vec<Option<usize>>,
    trail: Vec<(usize, u64)>,
    stats: SearchStats,
}

enum Goal {
    FindOne,
    CountAll,
}

impl<'a> Search<'a> {
    fn new(cover: &'a Cover) -> Result<Search<'a>> {
        let index = LinkIndex::build(cover)?;
        let domains = cover
            .list_sizes()
            .iter()
            .map(|&m| if m == 64 { u64::MAX } else { (1u64 << m) - 1 })
            .collect();
        Ok(Search {
            cover,
            index,
            domains,
            assigned: vec![None; cover.graph().vertex_count()],
            trail: Vec::new(),
            stats: SearchStats::default(),
        })
    }

    fn pick_vertex(&self) -> Option<usize> {
        (0..self.assigned.len())
            .filter(|&v| self.assigned[v].is_none())
            .min_by_key(|&v| (self.domains[v].count_ones(), v))
    }

    /// Assigns `v := i` and prunes matched partners. Returns the trail mark
    /// to undo and whether every neighbor domain stayed nonempty.
    fn assign(&mut self, v: usize, i: usize) -> (usize, bool) {
        let mark = self.trail.len();
        self.assigned[v] = Some(i);
        self.stats.nodes += 1;
        for (w, table) in &self.index.nbrs[v] {
            if self.assigned[*w].is_some() {
                continue;
            }
            if let Some(j) = table[i] {
                let bit = 1u64 << j;
                if self.domains[*w] & bit != 0 {
                    self.trail.push((*w, bit));
                    self.domains[*w] &= !bit;
                    if self.domains[*w] == 0 {
                        return (mark, false);
                    }
                }
            }
        }
        (mark, true)
    }

    fn undo(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let (w, bit) = self.trail.pop().unwrap();
            self.domains[w] |= bit;
        }
        self.assigned[v] = None;
    }

    fn run(&mut self, goal: &Goal) -> (BigUint, Option<HColoring>) {
        let started = Instant::now();
        let mut count = BigUint::zero();
        let mut found = None;
        self.search(goal, &mut count, &mut found);
        self.stats.elapsed = started.elapsed();
        (count, found)
    }

    fn search(&mut self, goal: &Goal, count: &mut BigUint, found: &mut Option<HColoring>) -> bool {
        let v = match self.pick_vertex() {
            Some(v) => v,
            None => {
                *count += 1u32;
                if found.is_none() {
                    *found = Some(HColoring {
                        choice: self.assigned.iter().map(|a| a.unwrap()).collect(),
                    });
                }
                return matches!(goal, Goal::FindOne);
            }
        };
        let mut domain = self.domains[v];
        while domain != 0 {
            let i = domain.trailing_zeros() as usize;
            domain &= domain - 1;
            let (mark, viable) = self.assign(v, i);
            if viable && self.search(goal, count, found) {
                self.undo(v, mark);
                return true;
            }
            self.undo(v, mark);
            self.stats.backtracks += 1;
        }
        false
    }
}

/// Finds one transversal, or proves there is none.
pub fn find_coloring(cover: &Cover) -> Result<Option<HColoring>> {
    Ok(find_coloring_stats(cover)?.0)
}

pub fn find_coloring_stats(cover: &Cover) -> Result<(Option<HColoring>, SearchStats)> {
    if cover.list_sizes().iter().any(|&m| m == 0) {
        return Ok((None, SearchStats::default()));
    }
    let mut search = Search::new(cover)?;
    let (_, found) = search.run(&Goal::FindOne);
    debug_assert!(found.iter().all(|c| is_valid_coloring(cover, c)));
    Ok((found, search.stats))
}

/// Exact number of transversals.
pub fn count_colorings(cover: &Cover) -> Result<BigUint> {
    Ok(count_colorings_stats(cover)?.0)
}

pub fn count_colorings_stats(cover: &Cover) -> Result<(BigUint, SearchStats)> {
    let comps = cover.graph().components();
    let mut total = BigUint::one();
    let mut stats = SearchStats::default();
    for comp in comps {
        let part = if comp.len() == cover.graph().vertex_count() {
            cover.clone()
        } else {
            subcover(cover, &comp)?
        };
        let (c, s) = count_component(&part)?;
        stats.nodes += s.nodes;
        stats.backtracks += s.backtracks;
        stats.elapsed += s.elapsed;
        if c.is_zero() {
            return Ok((BigUint::zero(), stats));
        }
        total *= c;
    }
    Ok((total, stats))
}

fn count_component(cover: &Cover) -> Result<(BigUint, SearchStats)> {
    if cover.list_sizes().iter().any(|&m| m == 0) {
        return Ok((BigUint::zero(), SearchStats::default()));
    }
    if cover.graph().vertex_count() == 1 {
        return Ok((BigUint::from(cover.list_size(0)), SearchStats::default()));
    }
    if cover.graph().is_cycle() {
        return Ok((cycle_transfer_count(cover), SearchStats::default()));
    }
    let mut search = Search::new(cover)?;
    let (count, _) = search.run(&Goal::CountAll);
    Ok((count, search.stats))
}

/// Transfer-matrix count around a cycle: the trace of the product of the
/// per-edge matrices (all-ones minus the link indicator).
fn cycle_transfer_count(cover: &Cover) -> BigUint {
    let order = cover.graph().cycle_order().expect("single cycle");
    let n = order.len();
    // acc starts as the matrix for edge order[0]-order[1], then absorbs the
    // rest; entry (i, j) counts partial transversals from index i at order[0]
    // to index j at the current end.
    let mut acc = edge_matrix(cover, order[0], order[1]);
    for s in 1..n {
        let next = edge_matrix(cover, order[s], order[(s + 1) % n]);
        acc = mat_mul(&acc, &next);
    }
    let mut trace = BigUint::zero();
    for i in 0..acc.len() {
        trace += acc[i][i].clone();
    }
    trace
}

fn edge_matrix(cover: &Cover, u: usize, v: usize) -> Vec<Vec<BigUint>> {
    let mu = cover.list_size(u);
    let mv = cover.list_size(v);
    let mut m = vec![vec![BigUint::one(); mv]; mu];
    for (i, j) in cover.link_between(u, v) {
        m[i][j] = BigUint::zero();
    }
    m
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![BigUint::zero(); cols]; rows];
    for r in 0..rows {
        for m in 0..inner {
            if a[r][m].is_zero() {
                continue;
            }
            for c in 0..cols {
                let add = &a[r][m] * &b[m][c];
                out[r][c] += add;
            }
        }
    }
    out
}

/// Streams every transversal exactly once, in lexicographic order of the
/// choice vector.
pub fn enumerate_colorings(cover: &Cover) -> Result<ColoringIter<'_>> {
    let index = LinkIndex::build(cover)?;
    Ok(ColoringIter {
        cover,
        index,
        choice: Vec::new(),
        exhausted: cover.list_sizes().iter().any(|&m| m == 0),
        fresh: true,
    })
}

pub struct ColoringIter<'a> {
    cover: &'a Cover,
    index: LinkIndex,
    choice: Vec<usize>,
    exhausted: bool,
    fresh: bool,
}

impl ColoringIter<'_> {
    fn conflicts(&self, v: usize, i: usize) -> bool {
        self.index.nbrs[v]
            .iter()
            .any(|(w, table)| *w < v && table[i] == Some(self.choice[*w]))
    }
}

impl Iterator for ColoringIter<'_> {
    type Item = HColoring;

    fn next(&mut self) -> Option<HColoring> {
        if self.exhausted {
            return None;
        }
        let n = self.cover.graph().vertex_count();
        // Depth-first in static vertex order; after a yield, resume by
        // bumping the last position.
        let mut v = self.choice.len();
        let mut next_try = if self.fresh {
            self.fresh = false;
            0
        } else {
            let last = self.choice.pop().unwrap();
            v -= 1;
            last + 1
        };
        loop {
            debug_assert_eq!(v, self.choice.len());
            let mut placed = false;
            for i in next_try..self.cover.list_size(v) {
                if !self.conflicts(v, i) {
                    self.choice.push(i);
                    placed = true;
                    break;
                }
            }
            if placed {
                v += 1;
                next_try = 0;
                if v == n {
                    return Some(HColoring {
                        choice: self.choice.clone(),
                    });
                }
            } else {
                if v == 0 {
                    self.exhausted = true;
                    return None;
                }
                let last = self.choice.pop().unwrap();
                v -= 1;
                next_try = last + 1;
            }
        }
    }
}

/// Greedy transversal along a vertex ordering: each vertex takes the smallest
/// index not matched to an earlier choice. Returns `None` on a stuck vertex.
pub fn greedy_coloring(cover: &Cover, ordering: &[usize]) -> Result<Option<HColoring>> {
    let n = cover.graph().vertex_count();
    if ordering.len() != n {
        return Err(Error::Parameter("ordering length mismatch".into()));
    }
    let mut seen = vec![false; n];
    for &v in ordering {
        if v >= n || seen[v] {
            return Err(Error::Parameter("ordering is not a permutation".into()));
        }
        seen[v] = true;
    }
    let index = LinkIndex::build(cover)?;
    let mut choice: Vec<Option<usize>> = vec![None; n];
    for &v in ordering {
        let mut forbidden = 0u64;
        for (w, table) in &index.nbrs[v] {
            if let Some(c) = choice[*w] {
                for (i, slot) in table.iter().enumerate() {
                    if *slot == Some(c) {
                        forbidden |= 1u64 << i;
                    }
                }
            }
        }
        let picked = (0..cover.list_size(v)).find(|&i| forbidden & (1u64 << i) == 0);
        match picked {
            Some(i) => choice[v] = Some(i),
            None => return Ok(None),
        }
    }
    Ok(Some(HColoring {
        choice: choice.into_iter().map(|c| c.unwrap()).collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{canonical_cover, make_twister, random_full_cover};
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force transversal count by direct enumeration of all index
    /// vectors; the independent oracle for everything in this module.
    fn brute_force_count(cover: &Cover) -> u64 {
        let n = cover.graph().vertex_count();
        let mut vec = vec![0usize; n];
        let mut count = 0u64;
        loop {
            let ok = cover.graph().edges().iter().enumerate().all(|(e, &(u, v))| {
                !cover.link(e).contains(&(vec[u], vec[v]))
            });
            if ok {
                count += 1;
            }
            let mut carry = true;
            for v in 0..n {
                if carry {
                    vec[v] += 1;
                    if vec[v] == cover.list_size(v) {
                        vec[v] = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry || n == 0 {
                return count;
            }
        }
    }

    #[test]
    fn canonical_c3_two_fold_has_no_coloring() {
        let c = canonical_cover(&Graph::cycle(3).unwrap(), 2).unwrap();
        assert_eq!(find_coloring(&c).unwrap(), None);
        assert_eq!(count_colorings(&c).unwrap(), BigUint::zero());
        assert_eq!(enumerate_colorings(&c).unwrap().count(), 0);
    }

    #[test]
    fn twisted_two_fold_c4_has_no_coloring() {
        let tw = make_twister(2, 2).unwrap();
        assert_eq!(find_coloring(&tw).unwrap(), None);
    }

    #[test]
    fn one_twist_on_odd_cycle_unlocks_a_coloring() {
        let g = Graph::cycle(3).unwrap();
        let mut links = vec![vec![(0, 0), (1, 1)]; 3];
        links[0] = vec![(0, 1), (1, 0)];
        let c = Cover::new(g, vec![2; 3], links).unwrap();
        let found = find_coloring(&c).unwrap().expect("colorable");
        assert!(is_valid_coloring(&c, &found));
    }

    #[test]
    fn counts_match_chromatic_oracle_on_canonical_covers() {
        // Canonical-cover transversals are exactly proper colorings.
        let graphs = [
            Graph::cycle(3).unwrap(),
            Graph::cycle(4).unwrap(),
            Graph::cycle(5).unwrap(),
            Graph::path(4).unwrap(),
            Graph::complete(4).unwrap(),
            Graph::complete_bipartite(2, 3).unwrap(),
        ];
        for g in &graphs {
            for m in 1..=4usize {
                let c = canonical_cover(g, m).unwrap();
                let expected = brute_force_count(&c);
                assert_eq!(count_colorings(&c).unwrap(), BigUint::from(expected));
            }
        }
    }

    #[test]
    fn known_counts() {
        let c3 = canonical_cover(&Graph::cycle(3).unwrap(), 3).unwrap();
        assert_eq!(count_colorings(&c3).unwrap(), BigUint::from(6u32));
        let c4 = canonical_cover(&Graph::cycle(4).unwrap(), 3).unwrap();
        assert_eq!(count_colorings(&c4).unwrap(), BigUint::from(18u32));
        let tw = make_twister(2, 3).unwrap();
        assert_eq!(count_colorings(&tw).unwrap(), BigUint::from(15u32));
        let k1 = canonical_cover(&Graph::complete(1).unwrap(), 1).unwrap();
        assert_eq!(count_colorings(&k1).unwrap(), BigUint::one());
    }

    #[test]
    fn transfer_matrix_agrees_with_backtracking_on_random_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(20240521);
        for trial in 0..500 {
            let n = 3 + (trial % 5);
            let m = 2 + (trial % 3);
            let g = Graph::cycle(n).unwrap();
            let c = random_full_cover(&g, m, &mut rng);
            let fast = count_colorings(&c).unwrap();
            let slow = brute_force_count(&c);
            assert_eq!(fast, BigUint::from(slow), "n={} m={}", n, m);
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let c = canonical_cover(&Graph::complete(1).unwrap(), 2).unwrap();
        let all: Vec<_> = enumerate_colorings(&c).unwrap().collect();
        assert_eq!(
            all,
            vec![HColoring { choice: vec![0] }, HColoring { choice: vec![1] }]
        );

        let c3 = canonical_cover(&Graph::cycle(3).unwrap(), 3).unwrap();
        let all: Vec<_> = enumerate_colorings(&c3).unwrap().collect();
        assert_eq!(all.len(), 6);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(all, sorted, "lexicographic and duplicate-free");
        for h in &all {
            assert!(is_valid_coloring(&c3, h));
        }
    }

    #[test]
    fn count_equals_enumeration_on_random_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = Graph::complete_bipartite(2, 2).unwrap();
            let c = random_full_cover(&g, 3, &mut rng);
            let listed = enumerate_colorings(&c).unwrap().count();
            assert_eq!(count_colorings(&c).unwrap(), BigUint::from(listed));
            assert_eq!(
                find_coloring(&c).unwrap().is_some(),
                listed > 0,
                "existence agrees with count"
            );
        }
    }

    #[test]
    fn greedy_cases() {
        // One big list placed last always finishes on a cycle.
        let g = Graph::cycle(5).unwrap();
        let mut sizes = vec![2; 5];
        sizes[4] = 3;
        let links: Vec<Vec<(usize, usize)>> = g
            .edges()
            .iter()
            .map(|_| vec![(0, 0), (1, 1)])
            .collect();
        let c = Cover::new(g, sizes, links).unwrap();
        let got = greedy_coloring(&c, &[0, 1, 2, 3, 4]).unwrap();
        assert!(got.is_some());
        assert!(is_valid_coloring(&c, &got.unwrap()));

        let p3 = canonical_cover(&Graph::path(3).unwrap(), 2).unwrap();
        let got = greedy_coloring(&p3, &[0, 1, 2]).unwrap().unwrap();
        assert_eq!(got.choice, vec![0, 1, 0]);

        let c3 = canonical_cover(&Graph::cycle(3).unwrap(), 2).unwrap();
        for ordering in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            assert_eq!(greedy_coloring(&c3, &ordering).unwrap(), None);
        }
    }

    #[test]
    fn zero_list_size_means_no_coloring() {
        let g = Graph::complete(1).unwrap();
        let c = Cover::new(g, vec![0], vec![]).unwrap();
        assert_eq!(find_coloring(&c).unwrap(), None);
        assert_eq!(count_colorings(&c).unwrap(), BigUint::zero());
    }

    #[test]
    fn disconnected_counts_multiply() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = canonical_cover(&g, 3).unwrap();
        // Triangle gives 6, each isolated vertex gives 3.
        assert_eq!(count_colorings(&c).unwrap(), BigUint::from(54u32));
    }
}
