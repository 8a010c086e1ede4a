//! Covers of products G □ K_{k,t}: structured fiber access, residual covers
//! after fixing a coloring of the X side, the volatile-coloring badness
//! test, and the bad-cover constructions.

mod construct;
mod shift;
mod upper;

pub use construct::{
    bad_cover_deterministic, bad_cover_even_cycle, bad_cover_odd_cycle, replication_count,
    ConstructionParams, Parity,
};
pub use shift::{shift_classes_odd_cycle, shift_classes_twister, ShiftClassPartition, ShiftRelation};
pub use upper::upper_bound_coloring;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::cover::{subcover, Cover};
use crate::error::{Error, Result, Violation};
use crate::graph::{Graph, ProductGraph};
use crate::solver::{count_colorings, enumerate_colorings, find_coloring, is_valid_coloring, HColoring};

/// Default cap on the number of X-side colorings a verdict or census will
/// enumerate.
pub const DEFAULT_X_BUDGET: u64 = 1_000_000;

/// A cover of G □ K_{k,t} with fiber bookkeeping. The X part of K_{k,t} is
/// numbered 0..k and the Y part k..k+t; the fiber over a fixed second-factor
/// vertex is a contiguous block of flat indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCover {
    product: ProductGraph,
    cover: Cover,
    k: usize,
    t: usize,
    seed: Option<u64>,
}

/// A matching between the lists of (g_vertex, k_a) and (g_vertex, k_b),
/// where `k_a` and `k_b` are vertices of K_{k,t}. Only X-Y pairs are product
/// edges; anything else is rejected on assembly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossLink {
    pub g_vertex: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl ProductCover {
    /// Wraps an existing cover over the flat product graph.
    pub fn new(left: &Graph, k: usize, t: usize, cover: Cover, seed: Option<u64>) -> Result<ProductCover> {
        if k == 0 || t == 0 {
            return Err(Error::Parameter("both parts of K_{k,t} must be nonempty".into()));
        }
        let right = Graph::complete_bipartite(k, t)?;
        let product = ProductGraph::new(left, &right);
        if cover.graph() != product.graph() {
            return Err(Error::Parameter(
                "cover base graph does not match the product graph".into(),
            ));
        }
        Ok(ProductCover {
            product,
            cover,
            k,
            t,
            seed,
        })
    }

    pub fn left(&self) -> &Graph {
        self.product.left()
    }

    pub fn product(&self) -> &ProductGraph {
        &self.product
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Flat index of (u, x_j).
    pub fn x_vertex(&self, u: usize, j: usize) -> usize {
        debug_assert!(j < self.k);
        self.product.index(u, j)
    }

    /// Flat index of (u, y_q).
    pub fn y_vertex(&self, u: usize, q: usize) -> usize {
        debug_assert!(q < self.t);
        self.product.index(u, self.k + q)
    }

    /// The subcover induced by the X side. Its vertex order matches the flat
    /// order, so vertex j*n + u is (u, x_j).
    pub fn x_subcover(&self) -> Cover {
        let n = self.left().vertex_count();
        let verts: Vec<usize> = (0..self.k * n).collect();
        subcover(&self.cover, &verts).expect("X side is nonempty")
    }

    /// The subcover induced by the fiber over y_q, a cover of G.
    pub fn y_fiber_cover(&self, q: usize) -> Cover {
        let n = self.left().vertex_count();
        let base = (self.k + q) * n;
        let verts: Vec<usize> = (base..base + n).collect();
        subcover(&self.cover, &verts).expect("fiber is nonempty")
    }

    /// Keeps only the first `t_new` Y-fibers.
    pub fn truncate_fibers(&self, t_new: usize) -> Result<ProductCover> {
        if t_new == 0 || t_new > self.t {
            return Err(Error::Parameter("fiber truncation out of range".into()));
        }
        let n = self.left().vertex_count();
        let verts: Vec<usize> = (0..(self.k + t_new) * n).collect();
        let cover = subcover(&self.cover, &verts)?;
        ProductCover::new(self.left(), self.k, t_new, cover, self.seed)
    }

    /// The residual cover on fiber y_q induced by an X-side coloring:
    /// surviving indices are exactly those with no chosen neighbor, links
    /// are the fiber links restricted to survivors.
    pub fn residual_fiber(&self, x_coloring: &HColoring, q: usize) -> Result<ResidualCover> {
        if q >= self.t {
            return Err(Error::Parameter(format!("fiber {} out of range", q)));
        }
        let xsc = self.x_subcover();
        if !is_valid_coloring(&xsc, x_coloring) {
            return Err(Error::Parameter("invalid X-side coloring".into()));
        }
        let n = self.left().vertex_count();
        let mut survivors: Vec<Vec<usize>> = Vec::with_capacity(n);
        for u in 0..n {
            let yv = self.y_vertex(u, q);
            let mut alive: Vec<bool> = vec![true; self.cover.list_size(yv)];
            for j in 0..self.k {
                let xv = self.x_vertex(u, j);
                let chosen = x_coloring.choice[j * n + u];
                if let Some(dead) = self.cover.partner(xv, yv, chosen) {
                    alive[dead] = false;
                }
            }
            survivors.push((0..alive.len()).filter(|&i| alive[i]).collect());
        }
        let mut position: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(n);
        for surv in &survivors {
            position.push(surv.iter().enumerate().map(|(pos, &idx)| (idx, pos)).collect());
        }
        let sizes: Vec<usize> = survivors.iter().map(|s| s.len()).collect();
        let links: Vec<Vec<(usize, usize)>> = self
            .left()
            .edges()
            .iter()
            .map(|&(a, b)| {
                self.cover
                    .link_between(self.y_vertex(a, q), self.y_vertex(b, q))
                    .into_iter()
                    .filter_map(|(i, j)| match (position[a].get(&i), position[b].get(&j)) {
                        (Some(&pi), Some(&pj)) => Some((pi, pj)),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        let cover = Cover::new(self.left().clone(), sizes, links)?;
        Ok(ResidualCover { survivors, cover })
    }

    /// True iff the residual cover on fiber y_q is bad for this X coloring.
    pub fn is_volatile(&self, x_coloring: &HColoring, q: usize) -> Result<bool> {
        let residual = self.residual_fiber(x_coloring, q)?;
        Ok(find_coloring(&residual.cover)?.is_none())
    }

    /// Decides badness of the whole product cover by scanning X-side
    /// colorings: bad iff every one of them is volatile for some fiber. A
    /// good verdict carries an explicit transversal assembled from a
    /// non-volatile X coloring and per-fiber residual colorings.
    pub fn badness_verdict(&self, x_budget: u64) -> Result<BadnessVerdict> {
        let xsc = self.x_subcover();
        let total = count_colorings(&xsc)?;
        if total > BigUint::from(x_budget) {
            return Err(Error::Budget(format!(
                "{} X-side colorings exceed budget {}",
                total, x_budget
            )));
        }
        let mut witness = BTreeMap::new();
        'next_coloring: for (index, ix) in enumerate_colorings(&xsc)?.enumerate() {
            for q in 0..self.t {
                if self.is_volatile(&ix, q)? {
                    witness.insert(index as u64, q);
                    continue 'next_coloring;
                }
            }
            return Ok(BadnessVerdict::Good {
                coloring: self.assemble_good_coloring(&ix)?,
            });
        }
        Ok(BadnessVerdict::Bad { witness })
    }

    fn assemble_good_coloring(&self, ix: &HColoring) -> Result<HColoring> {
        let n = self.left().vertex_count();
        let mut choice = vec![0usize; self.cover.graph().vertex_count()];
        choice[..self.k * n].copy_from_slice(&ix.choice);
        for q in 0..self.t {
            let residual = self.residual_fiber(ix, q)?;
            let sol = find_coloring(&residual.cover)?
                .ok_or_else(|| Error::Parameter("fiber unexpectedly bad".into()))?;
            for u in 0..n {
                choice[self.y_vertex(u, q)] = residual.survivors[u][sol.choice[u]];
            }
        }
        let coloring = HColoring { choice };
        debug_assert!(is_valid_coloring(&self.cover, &coloring));
        Ok(coloring)
    }

    /// Counts X colorings and, per fiber, how many of them are volatile.
    /// The certificate flag is set when c > (max_q z_q) * t, which forces a
    /// transversal to exist.
    pub fn volatile_census(&self, x_budget: u64) -> Result<VolatileCensus> {
        let xsc = self.x_subcover();
        let total = count_colorings(&xsc)?;
        if total > BigUint::from(x_budget) {
            return Err(Error::Budget(format!(
                "{} X-side colorings exceed budget {}",
                total, x_budget
            )));
        }
        let mut per_fiber = vec![0u64; self.t];
        for ix in enumerate_colorings(&xsc)? {
            for (q, slot) in per_fiber.iter_mut().enumerate() {
                if self.is_volatile(&ix, q)? {
                    *slot += 1;
                }
            }
        }
        let max_z = per_fiber.iter().copied().max().unwrap_or(0);
        let certificate = total > BigUint::from(max_z) * BigUint::from(self.t);
        Ok(VolatileCensus {
            x_colorings: total,
            volatile_per_fiber: per_fiber,
            certificate,
        })
    }
}

/// Builds a product cover from per-fiber covers of G plus cross matchings
/// between X and Y lists over the same G-vertex.
pub fn assemble_product_cover(
    g: &Graph,
    k: usize,
    t: usize,
    x_fibers: &[Cover],
    y_fibers: &[Cover],
    cross: &[CrossLink],
) -> Result<ProductCover> {
    if k == 0 || t == 0 {
        return Err(Error::Parameter("both parts of K_{k,t} must be nonempty".into()));
    }
    if x_fibers.len() != k || y_fibers.len() != t {
        return Err(Error::Parameter(format!(
            "expected {} X-fiber and {} Y-fiber covers, got {} and {}",
            k,
            t,
            x_fibers.len(),
            y_fibers.len()
        )));
    }
    for fiber in x_fibers.iter().chain(y_fibers) {
        if fiber.graph() != g {
            return Err(Error::Parameter("fiber cover base graph mismatch".into()));
        }
    }
    let n = g.vertex_count();
    let right = Graph::complete_bipartite(k, t)?;
    let product = ProductGraph::new(g, &right);
    let flat = product.graph();

    let mut sizes = vec![0usize; flat.vertex_count()];
    for (z, fiber) in x_fibers.iter().chain(y_fibers).enumerate() {
        for u in 0..n {
            sizes[z * n + u] = fiber.list_size(u);
        }
    }

    let mut links: Vec<Vec<(usize, usize)>> = vec![Vec::new(); flat.edge_count()];
    for (z, fiber) in x_fibers.iter().chain(y_fibers).enumerate() {
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let fe = flat
                .edge_index(z * n + a, z * n + b)
                .expect("fiber edges exist in the product");
            links[fe] = fiber.link(e).to_vec();
        }
    }
    for link in cross {
        let (u, a, b) = (link.g_vertex, link.k_a, link.k_b);
        if u >= n || a >= k + t || b >= k + t {
            return Err(Violation::new(format!(
                "cross link ({}, {}, {}) out of range",
                u, a, b
            ))
            .into());
        }
        if !right.has_edge(a, b) {
            return Err(Violation::new(format!(
                "cross link between K-vertices {} and {} is not on a product edge",
                a, b
            ))
            .into());
        }
        let (va, vb) = (a * n + u, b * n + u);
        let fe = flat.edge_index(va, vb).unwrap();
        // Store pairs oriented with the smaller flat endpoint on the left.
        let oriented: Vec<(usize, usize)> = if va < vb {
            link.pairs.clone()
        } else {
            link.pairs.iter().map(|&(i, j)| (j, i)).collect()
        };
        links[fe].extend(oriented);
    }

    let cover = Cover::new(flat.clone(), sizes, links)?;
    ProductCover::new(g, k, t, cover, None)
}

/// Surviving index sets on a fiber after fixing an X coloring, plus the
/// restricted cover on them. `cover` vertex u's index i corresponds to the
/// original list index `survivors[u][i]`.
#[derive(Debug, Clone)]
pub struct ResidualCover {
    pub survivors: Vec<Vec<usize>>,
    pub cover: Cover,
}

/// Either an explicit transversal of the product cover, or a map sending
/// every X-coloring index (in lexicographic enumeration order) to a fiber it
/// is volatile for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BadnessVerdict {
    Good { coloring: HColoring },
    Bad { witness: BTreeMap<u64, usize> },
}

impl BadnessVerdict {
    pub fn is_bad(&self) -> bool {
        matches!(self, BadnessVerdict::Bad { .. })
    }
}

/// Census of the X side: c, the per-fiber volatile counts z_q, and whether
/// c > (max z_q) * t.
#[derive(Debug, Clone)]
pub struct VolatileCensus {
    pub x_colorings: BigUint,
    pub volatile_per_fiber: Vec<u64>,
    pub certificate: bool,
}

impl Serialize for VolatileCensus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VolatileCensus", 3)?;
        st.serialize_field("c", &crate::biguint_json(&self.x_colorings))?;
        st.serialize_field("z", &self.volatile_per_fiber)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.end()
    }
}

#[derive(Serialize, Deserialize)]
struct ProductCoverJson {
    cover: Cover,
    k: usize,
    t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl Serialize for ProductCover {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProductCoverJson {
            cover: self.cover.clone(),
            k: self.k,
            t: self.t,
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductCover {
    fn deserialize<D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<ProductCover, D::Error> {
        use serde::de::Error as DeError;
        let raw = ProductCoverJson::deserialize(d)?;
        let parts = raw.k + raw.t;
        let total = raw.cover.graph().vertex_count();
        if parts == 0 || total % parts != 0 {
            return Err(D::Error::custom("vertex count is not divisible by k + t"));
        }
        let n = total / parts;
        // Recover the left factor from the first fiber, then validate the
        // whole flat graph against the product rule.
        let left_edges: Vec<(usize, usize)> = raw
            .cover
            .graph()
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| a < n && b < n)
            .collect();
        let left = Graph::new(n, &left_edges).map_err(D::Error::custom)?;
        ProductCover::new(&left, raw.k, raw.t, raw.cover, raw.seed).map_err(D::Error::custom)
    }
}
