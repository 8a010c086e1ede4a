//! Exhaustive minimization over m-fold covers.
//!
//! The search space is cut down to full covers whose links are the identity
//! on a breadth-first spanning forest: completing a cover never adds
//! transversals and relabeling along forest edges is count-preserving, so
//! the minimum over this normal form equals the minimum over all m-fold
//! covers. The remaining free edges each range over all m! permutations.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::cover::{zero_fold_cover, Cover};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::solver::{count_colorings, find_coloring};

/// Default cap on the number of normalized covers examined per call.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Outcome of an exhaustive scan: the extremal value, a cover attaining it,
/// and how many covers were examined.
#[derive(Debug, Clone)]
pub struct ExhaustiveResult {
    pub value: BigUint,
    pub witness: Cover,
    pub covers_examined: u64,
}

impl Serialize for ExhaustiveResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExhaustiveResult", 3)?;
        st.serialize_field("value", &crate::biguint_json(&self.value))?;
        st.serialize_field("witness", &self.witness)?;
        st.serialize_field("covers_examined", &self.covers_examined)?;
        st.end()
    }
}

/// All permutations of `0..m` in lexicographic order.
fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        // Next lexicographic permutation.
        let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..m).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

fn factorial_u128(m: usize) -> Option<u128> {
    (1..=m as u128).try_fold(1u128, |acc, x| acc.checked_mul(x))
}

/// Breadth-first spanning forest edge set, rooted at the smallest vertex of
/// each component.
fn spanning_forest(g: &Graph) -> Vec<bool> {
    let n = g.vertex_count();
    let mut in_tree = vec![false; g.edge_count()];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    in_tree[g.edge_index(v, w).unwrap()] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    in_tree
}

/// Iterates every normalized full m-fold cover of `g`.
pub struct NormalizedCovers {
    graph: Graph,
    m: usize,
    perms: Vec<Vec<usize>>,
    free_edges: Vec<usize>,
    state: Vec<usize>,
    done: bool,
}

impl NormalizedCovers {
    pub fn new(g: &Graph, m: usize, budget: u64) -> Result<NormalizedCovers> {
        if m == 0 {
            return Err(Error::Parameter("fold size must be >= 1".into()));
        }
        let in_tree = spanning_forest(g);
        let free_edges: Vec<usize> = (0..g.edge_count()).filter(|&e| !in_tree[e]).collect();
        let fact = factorial_u128(m)
            .ok_or_else(|| Error::Budget(format!("{}! overflows the cover counter", m)))?;
        let total = free_edges
            .iter()
            .try_fold(1u128, |acc, _| acc.checked_mul(fact))
            .ok_or_else(|| Error::Budget("normalized cover count overflows".into()))?;
        if total > budget as u128 {
            return Err(Error::Budget(format!(
                "{} normalized {}-fold covers exceed budget {}",
                total, m, budget
            )));
        }
        Ok(NormalizedCovers {
            graph: g.clone(),
            m,
            perms: permutations(m),
            state: vec![0; free_edges.len()],
            free_edges,
            done: false,
        })
    }

    /// Total number of covers this iterator will produce.
    pub fn total(&self) -> u64 {
        (self.perms.len() as u128).pow(self.free_edges.len() as u32) as u64
    }

    /// Splits the cover space by the permutation of the first free edge, for
    /// callers that want to scan disjoint partitions concurrently. With no
    /// free edge there is a single partition.
    pub fn partition_count(&self) -> usize {
        if self.free_edges.is_empty() {
            1
        } else {
            self.perms.len()
        }
    }
}

impl Iterator for NormalizedCovers {
    type Item = Cover;

    fn next(&mut self) -> Option<Cover> {
        if self.done {
            return None;
        }
        let identity: Vec<(usize, usize)> = (0..self.m).map(|i| (i, i)).collect();
        let mut links = vec![identity; self.graph.edge_count()];
        for (slot, &e) in self.free_edges.iter().enumerate() {
            links[e] = self.perms[self.state[slot]]
                .iter()
                .enumerate()
                .map(|(i, &j)| (i, j))
                .collect();
        }
        let cover = Cover::new(
            self.graph.clone(),
            vec![self.m; self.graph.vertex_count()],
            links,
        )
        .expect("normalized covers are valid");
        // Odometer step.
        let mut carry = true;
        for slot in self.state.iter_mut() {
            if carry {
                *slot += 1;
                if *slot == self.perms.len() {
                    *slot = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            self.done = true;
        }
        Some(cover)
    }
}

/// The DP color function value P_DP(G, m): the minimum transversal count
/// over all m-fold covers, with a witness cover attaining it.
pub fn pdp_exhaustive(g: &Graph, m: usize, budget: u64) -> Result<ExhaustiveResult> {
    let covers = NormalizedCovers::new(g, m, budget)?;
    let mut best: Option<(BigUint, Cover)> = None;
    let mut examined = 0u64;
    for cover in covers {
        let count = count_colorings(&cover)?;
        examined += 1;
        let better = match &best {
            None => true,
            Some((b, _)) => count < *b,
        };
        if better {
            best = Some((count, cover));
        }
    }
    let (value, witness) = best.expect("at least one normalized cover exists");
    Ok(ExhaustiveResult {
        value,
        witness,
        covers_examined: examined,
    })
}

/// The DP chromatic number: the smallest m such that every normalized full
/// m-fold cover admits a transversal. The witness is a bad cover at m - 1
/// (the all-empty zero-fold cover when m = 1).
pub fn chi_dp_exhaustive(g: &Graph, budget: u64) -> Result<ExhaustiveResult> {
    let mut prev_bad = zero_fold_cover(g);
    let mut examined = 0u64;
    for m in 1..=g.vertex_count() {
        let covers = NormalizedCovers::new(g, m, budget)?;
        let mut bad = None;
        for cover in covers {
            examined += 1;
            if find_coloring(&cover)?.is_none() {
                bad = Some(cover);
                break;
            }
        }
        match bad {
            Some(cover) => prev_bad = cover,
            None => {
                return Ok(ExhaustiveResult {
                    value: BigUint::from(m),
                    witness: prev_bad,
                    covers_examined: examined,
                })
            }
        }
    }
    // col(G) <= n bounds the DP chromatic number, so this is unreachable for
    // valid graphs.
    Err(Error::Parameter("no fold size up to n admitted all covers".into()))
}
