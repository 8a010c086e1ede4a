//! Covers of a graph: per-vertex list sizes plus a partial matching of list
//! indices over every base edge.
//!
//! The clique inside each list is implicit. A transversal (one index per
//! vertex) is blocked only by the stored cross pairs, so the within-list
//! cliques can never be violated structurally.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::graph::Graph;

/// A cover: the base graph, one list size per vertex, and one partial
/// matching of list indices per base edge.
///
/// Pairs on edge `(u, v)` (with `u < v`) are `(i, j)` meaning list index `i`
/// of `u` is matched to list index `j` of `v`; they are kept sorted by left
/// index, and cover equality is structural equality on this normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    graph: Graph,
    list_sizes: Vec<usize>,
    links: Vec<Vec<(usize, usize)>>,
}

impl Cover {
    /// Builds a cover from links given per edge, in the same order as
    /// `graph.edges()`. Validates every cover invariant.
    pub fn new(graph: Graph, list_sizes: Vec<usize>, links: Vec<Vec<(usize, usize)>>) -> Result<Cover> {
        if list_sizes.len() != graph.vertex_count() {
            return Err(Violation::new(format!(
                "expected {} list sizes, got {}",
                graph.vertex_count(),
                list_sizes.len()
            ))
            .into());
        }
        if links.len() != graph.edge_count() {
            return Err(Violation::new(format!(
                "expected {} links, got {}",
                graph.edge_count(),
                links.len()
            ))
            .into());
        }
        let mut links = links;
        for (e, pairs) in links.iter_mut().enumerate() {
            let (u, v) = graph.edges()[e];
            validate_matching(pairs, (u, v), list_sizes[u], list_sizes[v])?;
            pairs.sort_unstable();
        }
        Ok(Cover {
            graph,
            list_sizes,
            links,
        })
    }

    /// Re-checks every invariant; `Ok` for any value built by this module.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        for (e, pairs) in self.links.iter().enumerate() {
            let (u, v) = self.graph.edges()[e];
            validate_matching(pairs, (u, v), self.list_sizes[u], self.list_sizes[v])?;
        }
        Ok(())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn list_sizes(&self) -> &[usize] {
        &self.list_sizes
    }

    pub fn list_size(&self, v: usize) -> usize {
        self.list_sizes[v]
    }

    /// The uniform fold size, if all lists agree.
    pub fn fold(&self) -> Option<usize> {
        let m = self.list_sizes[0];
        self.list_sizes.iter().all(|&s| s == m).then_some(m)
    }

    /// Pairs on the edge with this index in `graph.edges()`.
    pub fn link(&self, edge_index: usize) -> &[(usize, usize)] {
        &self.links[edge_index]
    }

    pub fn links(&self) -> &[Vec<(usize, usize)>] {
        &self.links
    }

    /// Pairs on edge `{u,v}`, oriented so the first component indexes `u`'s
    /// list. Empty if the edge does not exist.
    pub fn link_between(&self, u: usize, v: usize) -> Vec<(usize, usize)> {
        match self.graph.edge_index(u, v) {
            None => Vec::new(),
            Some(e) => {
                let pairs = &self.links[e];
                if u < v {
                    pairs.clone()
                } else {
                    let mut flipped: Vec<_> = pairs.iter().map(|&(i, j)| (j, i)).collect();
                    flipped.sort_unstable();
                    flipped
                }
            }
        }
    }

    /// The partner of index `i` at `u` across edge `{u,v}`, if matched.
    pub fn partner(&self, u: usize, v: usize, i: usize) -> Option<usize> {
        let e = self.graph.edge_index(u, v)?;
        let (a, _) = self.graph.edges()[e];
        if u == a {
            self.links[e].iter().find(|&&(x, _)| x == i).map(|&(_, y)| y)
        } else {
            self.links[e].iter().find(|&&(_, y)| y == i).map(|&(x, _)| x)
        }
    }

    /// True iff every matching is perfect.
    pub fn is_full(&self) -> bool {
        self.links.iter().enumerate().all(|(e, pairs)| {
            let (u, v) = self.graph.edges()[e];
            self.list_sizes[u] == self.list_sizes[v] && pairs.len() == self.list_sizes[u]
        })
    }
}

fn validate_matching(
    pairs: &[(usize, usize)],
    edge: (usize, usize),
    left_size: usize,
    right_size: usize,
) -> std::result::Result<(), Violation> {
    let mut left_seen = vec![false; left_size];
    let mut right_seen = vec![false; right_size];
    for &(i, j) in pairs {
        if i >= left_size || j >= right_size {
            return Err(Violation::at_pair(edge, (i, j), "pair index out of list range"));
        }
        if left_seen[i] {
            return Err(Violation::at_pair(edge, (i, j), "left index repeats in matching"));
        }
        if right_seen[j] {
            return Err(Violation::at_pair(edge, (i, j), "right index repeats in matching"));
        }
        left_seen[i] = true;
        right_seen[j] = true;
    }
    Ok(())
}

/// The canonical m-fold cover: every matching is the identity. Transversals
/// of this cover are exactly the proper m-colorings of the base graph.
pub fn canonical_cover(g: &Graph, m: usize) -> Result<Cover> {
    if m == 0 {
        return Err(Error::Parameter("canonical cover needs fold >= 1".into()));
    }
    let identity: Vec<(usize, usize)> = (0..m).map(|i| (i, i)).collect();
    let links = vec![identity; g.edge_count()];
    Cover::new(g.clone(), vec![m; g.vertex_count()], links)
}

/// The all-empty cover with zero-size lists; trivially bad on any graph.
pub fn zero_fold_cover(g: &Graph) -> Cover {
    Cover::new(
        g.clone(),
        vec![0; g.vertex_count()],
        vec![Vec::new(); g.edge_count()],
    )
    .expect("empty cover is valid")
}

/// Completes every matching to a perfect one: unmatched left indices are
/// paired with unmatched right indices in ascending order. Requires equal
/// list sizes on the endpoints of every edge.
pub fn full_completion(c: &Cover) -> Result<Cover> {
    let g = c.graph();
    let mut links = Vec::with_capacity(g.edge_count());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if c.list_size(u) != c.list_size(v) {
            return Err(Violation::at_edge(
                (u, v),
                "completion needs equal list sizes on edge endpoints",
            )
            .into());
        }
        let m = c.list_size(u);
        let mut left_free: Vec<bool> = vec![true; m];
        let mut right_free: Vec<bool> = vec![true; m];
        let mut pairs = c.link(e).to_vec();
        for &(i, j) in &pairs {
            left_free[i] = false;
            right_free[j] = false;
        }
        let rights: Vec<usize> = (0..m).filter(|&j| right_free[j]).collect();
        let lefts: Vec<usize> = (0..m).filter(|&i| left_free[i]).collect();
        pairs.extend(lefts.into_iter().zip(rights));
        links.push(pairs);
    }
    Cover::new(g.clone(), c.list_sizes().to_vec(), links)
}

/// The subcover induced by a vertex subset: base graph restricted, lists
/// kept, links kept on surviving edges.
pub fn subcover(c: &Cover, vertices: &[usize]) -> Result<Cover> {
    let (sub, map) = c.graph().induced(vertices)?;
    let sizes: Vec<usize> = map.iter().map(|&old| c.list_size(old)).collect();
    let links: Vec<Vec<(usize, usize)>> = sub
        .edges()
        .iter()
        .map(|&(a, b)| c.link_between(map[a], map[b]))
        .collect();
    Cover::new(sub, sizes, links)
}

/// One permutation of list indices per vertex; `perms[v][old] = new`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabeling {
    pub perms: Vec<Vec<usize>>,
}

impl Relabeling {
    pub fn identity(c: &Cover) -> Relabeling {
        Relabeling {
            perms: c.list_sizes().iter().map(|&m| (0..m).collect()).collect(),
        }
    }

    pub fn random<R: Rng>(c: &Cover, rng: &mut R) -> Relabeling {
        Relabeling {
            perms: c
                .list_sizes()
                .iter()
                .map(|&m| {
                    let mut p: Vec<usize> = (0..m).collect();
                    p.shuffle(rng);
                    p
                })
                .collect(),
        }
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling {
            perms: self
                .perms
                .iter()
                .map(|p| {
                    let mut inv = vec![0; p.len()];
                    for (old, &new) in p.iter().enumerate() {
                        inv[new] = old;
                    }
                    inv
                })
                .collect(),
        }
    }

    fn validate_for(&self, c: &Cover) -> Result<()> {
        if self.perms.len() != c.graph().vertex_count() {
            return Err(Error::Relabeling("wrong number of vertex permutations".into()));
        }
        for (v, p) in self.perms.iter().enumerate() {
            if p.len() != c.list_size(v) {
                return Err(Error::Relabeling(format!(
                    "permutation at vertex {} has arity {}, list size is {}",
                    v,
                    p.len(),
                    c.list_size(v)
                )));
            }
            let mut seen = vec![false; p.len()];
            for &x in p {
                if x >= p.len() || seen[x] {
                    return Err(Error::Relabeling(format!("not a bijection at vertex {}", v)));
                }
                seen[x] = true;
            }
        }
        Ok(())
    }
}

/// Renames list indices vertex by vertex: pair `(i, j)` on `uv` becomes
/// `(R_u(i), R_v(j))`. Transversals correspond bijectively.
pub fn relabel(c: &Cover, r: &Relabeling) -> Result<Cover> {
    r.validate_for(c)?;
    let g = c.graph();
    let links: Vec<Vec<(usize, usize)>> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            c.link(e)
                .iter()
                .map(|&(i, j)| (r.perms[u][i], r.perms[v][j]))
                .collect()
        })
        .collect();
    Cover::new(g.clone(), c.list_sizes().to_vec(), links)
}

/// The k-fold twister cover of the even cycle `C_{2m}`: identity matchings
/// along the path edges and a cyclic index shift closing the cycle, with the
/// shift oriented from the last vertex back to vertex 0.
pub fn make_twister(half_length: usize, k: usize) -> Result<Cover> {
    if half_length < 2 {
        return Err(Error::Parameter("twister needs half length >= 2".into()));
    }
    if k == 0 {
        return Err(Error::Parameter("twister needs fold >= 1".into()));
    }
    let n = 2 * half_length;
    let g = Graph::cycle(n)?;
    let identity: Vec<(usize, usize)> = (0..k).map(|i| (i, i)).collect();
    let mut links = vec![identity; g.edge_count()];
    // Closing edge is stored as (0, n-1); index l at vertex n-1 maps to
    // (l + 1) mod k at vertex 0.
    let e = g.edge_index(0, n - 1).unwrap();
    links[e] = (0..k).map(|l| ((l + 1) % k, l)).collect();
    Cover::new(g, vec![k; n], links)
}

/// A uniformly random full m-fold cover: every edge gets an independent
/// uniformly random perfect matching.
pub fn random_full_cover<R: Rng>(g: &Graph, m: usize, rng: &mut R) -> Cover {
    let links: Vec<Vec<(usize, usize)>> = (0..g.edge_count())
        .map(|_| {
            let mut image: Vec<usize> = (0..m).collect();
            image.shuffle(rng);
            (0..m).map(|i| (i, image[i])).collect()
        })
        .collect();
    Cover::new(g.clone(), vec![m; g.vertex_count()], links).expect("random matchings are valid")
}

/// DOT rendering: one shaded cluster per list, cross edges only.
pub fn cover_to_dot(c: &Cover) -> String {
    use std::fmt::Write;
    let mut out = String::from("graph cover {\n  node [shape=point];\n");
    for v in 0..c.graph().vertex_count() {
        let _ = writeln!(
            out,
            "  subgraph cluster_v{} {{ label=\"v{}\"; style=filled; color=lightgrey;",
            v, v
        );
        for i in 0..c.list_size(v) {
            let _ = writeln!(out, "    v{}_{} [label=\"\"];", v, i);
        }
        out.push_str("  }\n");
    }
    for (e, &(u, v)) in c.graph().edges().iter().enumerate() {
        for &(i, j) in c.link(e) {
            let _ = writeln!(out, "  v{}_{} -- v{}_{};", u, i, v, j);
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct LinkJson {
    edge: (usize, usize),
    pairs: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    graph: Graph,
    list_sizes: Vec<usize>,
    links: Vec<LinkJson>,
}

impl Serialize for Cover {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let links = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &edge)| LinkJson {
                edge,
                pairs: self.links[e].clone(),
            })
            .collect();
        CoverJson {
            graph: self.graph.clone(),
            list_sizes: self.list_sizes.clone(),
            links,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cover {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Cover, D::Error> {
        use serde::de::Error as DeError;
        let raw = CoverJson::deserialize(d)?;
        let mut links: Vec<Option<Vec<(usize, usize)>>> = vec![None; raw.graph.edge_count()];
        for entry in raw.links {
            let (u, v) = entry.edge;
            let e = raw
                .graph
                .edge_index(u, v)
                .ok_or_else(|| D::Error::custom(format!("link on non-edge {}-{}", u, v)))?;
            if links[e].is_some() {
                return Err(D::Error::custom(format!("duplicate link entry for edge {}-{}", u, v)));
            }
            // Accept either orientation; store left = min endpoint.
            let pairs = if u <= v {
                entry.pairs
            } else {
                entry.pairs.into_iter().map(|(i, j)| (j, i)).collect()
            };
            links[e] = Some(pairs);
        }
        let links = links.into_iter().map(|l| l.unwrap_or_default()).collect();
        Cover::new(raw.graph, raw.list_sizes, links).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_two_fold_c3() -> Cover {
        canonical_cover(&Graph::cycle(3).unwrap(), 2).unwrap()
    }

    #[test]
    fn validates_identity_cover() {
        assert!(identity_two_fold_c3().validate().is_ok());
    }

    #[test]
    fn rejects_repeating_left_index() {
        let g = Graph::cycle(3).unwrap();
        let err = Cover::new(
            g,
            vec![2; 3],
            vec![vec![(0, 0), (0, 1)], vec![], vec![]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("left index repeats"));
    }

    #[test]
    fn rejects_out_of_range_pair() {
        let g = Graph::cycle(3).unwrap();
        let err = Cover::new(g, vec![2; 3], vec![vec![(0, 2)], vec![], vec![]]).unwrap_err();
        assert!(err.to_string().contains("out of list range"));
    }

    #[test]
    fn completion_leaves_full_cover_unchanged() {
        let c = identity_two_fold_c3();
        assert_eq!(full_completion(&c).unwrap(), c);
    }

    #[test]
    fn completion_of_empty_links_is_identity() {
        let g = Graph::cycle(4).unwrap();
        let empty = Cover::new(g.clone(), vec![2; 4], vec![vec![]; 4]).unwrap();
        assert_eq!(full_completion(&empty).unwrap(), canonical_cover(&g, 2).unwrap());
    }

    #[test]
    fn completion_extends_single_pair() {
        let g = Graph::path(2).unwrap();
        let c = Cover::new(g, vec![2; 2], vec![vec![(0, 1)]]).unwrap();
        let full = full_completion(&c).unwrap();
        assert_eq!(full.link(0), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn completion_requires_equal_sizes() {
        let g = Graph::path(2).unwrap();
        let c = Cover::new(g, vec![2, 3], vec![vec![]]).unwrap();
        assert!(full_completion(&c).is_err());
    }

    #[test]
    fn subcover_cases() {
        let g = Graph::cycle(4).unwrap();
        let c = canonical_cover(&g, 2).unwrap();
        assert_eq!(subcover(&c, &[0, 1, 2, 3]).unwrap(), c);

        let adjacent = subcover(&c, &[0, 1]).unwrap();
        assert_eq!(adjacent.graph().edge_count(), 1);
        assert_eq!(adjacent.link(0), &[(0, 0), (1, 1)]);

        let opposite = subcover(&c, &[0, 2]).unwrap();
        assert_eq!(opposite.graph().edge_count(), 0);

        assert!(subcover(&c, &[]).is_err());
    }

    #[test]
    fn relabel_round_trip() {
        let c = identity_two_fold_c3();
        let id = Relabeling::identity(&c);
        assert_eq!(relabel(&c, &id).unwrap(), c);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = Relabeling::random(&c, &mut rng);
        let once = relabel(&c, &r).unwrap();
        let back = relabel(&once, &r.inverse()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn relabel_clears_a_swapped_edge() {
        // 2-fold cover of C_3 with one swapped link; swapping that endpoint's
        // list turns every link into the identity.
        let g = Graph::cycle(3).unwrap();
        let mut links = vec![vec![(0, 0), (1, 1)]; 3];
        let e = g.edge_index(0, 1).unwrap();
        links[e] = vec![(0, 1), (1, 0)];
        let c = Cover::new(g, vec![2; 3], links).unwrap();
        let r = Relabeling {
            perms: vec![vec![1, 0], vec![0, 1], vec![1, 0]],
        };
        let relabeled = relabel(&c, &r).unwrap();
        for e in 0..3 {
            assert_eq!(relabeled.link(e), &[(0, 0), (1, 1)]);
        }
    }

    #[test]
    fn relabel_rejects_arity_mismatch() {
        let c = identity_two_fold_c3();
        let r = Relabeling {
            perms: vec![vec![0], vec![0, 1], vec![0, 1]],
        };
        assert!(relabel(&c, &r).is_err());
    }

    #[test]
    fn twister_shape() {
        let tw = make_twister(2, 3).unwrap();
        assert_eq!(tw.graph(), &Graph::cycle(4).unwrap());
        assert!(tw.is_full());
        let e = tw.graph().edge_index(0, 3).unwrap();
        assert_eq!(tw.link(e), &[(0, 2), (1, 0), (2, 1)]);
        for (e2, &(u, v)) in tw.graph().edges().iter().enumerate() {
            if e2 != e {
                assert_eq!(tw.link(e2), &[(0, 0), (1, 1), (2, 2)], "edge {}-{}", u, v);
            }
        }
        assert!(make_twister(1, 3).is_err());
    }

    #[test]
    fn random_full_cover_is_full() {
        let g = Graph::cycle(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_full_cover(&g, 3, &mut rng);
        assert!(c.is_full());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn dot_export_mentions_clusters_and_cross_edges() {
        let c = identity_two_fold_c3();
        let dot = cover_to_dot(&c);
        assert!(dot.contains("cluster_v0"));
        assert!(dot.contains("v0_0 -- v1_0"));
    }

    #[test]
    fn cover_json_round_trip_and_orientation() {
        let tw = make_twister(2, 3).unwrap();
        let s = serde_json::to_string(&tw).unwrap();
        let back: Cover = serde_json::from_str(&s).unwrap();
        assert_eq!(tw, back);

        // Links written with the edge flipped parse to the same cover.
        let flipped = r#"{
            "graph": {"n": 2, "edges": [[0, 1]]},
            "list_sizes": [2, 2],
            "links": [{"edge": [1, 0], "pairs": [[1, 0]]}]
        }"#;
        let c: Cover = serde_json::from_str(flipped).unwrap();
        assert_eq!(c.link(0), &[(0, 1)]);

        let non_edge = r#"{
            "graph": {"n": 3, "edges": [[0, 1]]},
            "list_sizes": [1, 1, 1],
            "links": [{"edge": [1, 2], "pairs": []}]
        }"#;
        assert!(serde_json::from_str::<Cover>(non_edge).is_err());
    }
}
