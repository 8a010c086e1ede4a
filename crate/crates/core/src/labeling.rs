//! Canonical and twisted-canonical labelings of full covers.
//!
//! A cover has a canonical labeling when some per-vertex renaming of list
//! indices turns every matching into the identity; a twisted-canonical
//! labeling allows one distinguished edge (the twist) to stay a perfect
//! non-identity matching. Detection propagates forced renamings along a
//! breadth-first spanning forest and verifies the result by re-application.

use serde::{Deserialize, Serialize};

use crate::cover::{relabel, Cover, Relabeling};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Canonical,
    TwistedCanonical,
}

/// A labeling certificate: applying `relabeling` makes every non-twist link
/// the identity; for the twisted kind the twist link is a perfect matching
/// moving at least one index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelingWitness {
    pub kind: LabelKind,
    pub relabeling: Relabeling,
    pub twist_edge: Option<(usize, usize)>,
}

/// Checks a witness by re-applying it; used before returning any witness.
pub fn verify_witness(c: &Cover, w: &LabelingWitness) -> bool {
    let relabeled = match relabel(c, &w.relabeling) {
        Ok(r) => r,
        Err(_) => return false,
    };
    match w.kind {
        LabelKind::Canonical => w.twist_edge.is_none(),
        LabelKind::TwistedCanonical => w.twist_edge.is_some(),
    }
    .then_some(())
    .map_or(false, |()| {
        relabeled.graph().edges().iter().enumerate().all(|(e, &edge)| {
            let pairs = relabeled.link(e);
            let m = relabeled.list_size(edge.0);
            if Some(edge) == w.twist_edge {
                // Perfect and moves at least one index.
                relabeled.list_size(edge.1) == m
                    && pairs.len() == m
                    && pairs.iter().any(|&(i, j)| i != j)
            } else {
                relabeled.list_size(edge.1) == m
                    && pairs.len() == m
                    && pairs.iter().all(|&(i, j)| i == j)
            }
        })
    })
}

/// The left-to-right permutation of a perfect matching on edge `e`.
fn link_permutation(c: &Cover, e: usize) -> Option<Vec<usize>> {
    let (u, v) = c.graph().edges()[e];
    let m = c.list_size(u);
    if c.list_size(v) != m || c.link(e).len() != m {
        return None;
    }
    let mut perm = vec![usize::MAX; m];
    for &(i, j) in c.link(e) {
        perm[i] = j;
    }
    Some(perm)
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Breadth-first forest of the base graph minus `skip_edge`, with the forced
/// renaming that makes every tree link the identity. Roots (the smallest
/// vertex of each component) start from the identity. Also returns the
/// component id of every vertex.
fn propagate_forest(c: &Cover, skip_edge: Option<usize>) -> (Relabeling, Vec<usize>) {
    let g = c.graph();
    let n = g.vertex_count();
    let mut perms: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut component = vec![usize::MAX; n];
    let mut comp_count = 0;
    for root in 0..n {
        if perms[root].is_some() {
            continue;
        }
        perms[root] = Some((0..c.list_size(root)).collect());
        component[root] = comp_count;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                let e = g.edge_index(v, w).unwrap();
                if Some(e) == skip_edge || perms[w].is_some() {
                    continue;
                }
                let (a, _) = g.edges()[e];
                let l2r = link_permutation(c, e).expect("full cover link is a permutation");
                let rv = perms[v].as_ref().unwrap();
                // Renaming at w forced by identity on the tree link v-w.
                let rw = if v == a {
                    // pairs (i, l2r(i)): R_w(l2r(i)) = R_v(i)
                    let inv = invert(&l2r);
                    (0..l2r.len()).map(|j| rv[inv[j]]).collect::<Vec<_>>()
                } else {
                    // w is the left endpoint: R_w(i) = R_v(l2r(i))
                    (0..l2r.len()).map(|i| rv[l2r[i]]).collect::<Vec<_>>()
                };
                perms[w] = Some(rw);
                component[w] = component[v];
                queue.push_back(w);
            }
        }
        comp_count += 1;
    }
    (
        Relabeling {
            perms: perms.into_iter().map(|p| p.unwrap()).collect(),
        },
        component,
    )
}

/// Finds a canonical labeling of a full uniform-fold cover, or `None`.
pub fn detect_canonical(c: &Cover) -> Option<LabelingWitness> {
    c.fold()?;
    if !c.is_full() {
        return None;
    }
    let (relabeling, _) = propagate_forest(c, None);
    let witness = LabelingWitness {
        kind: LabelKind::Canonical,
        relabeling,
        twist_edge: None,
    };
    verify_witness(c, &witness).then_some(witness)
}

/// Finds a twisted-canonical labeling of a full uniform-fold cover, or
/// `None`. Candidate twist edges with a non-identity stored matching are
/// tried first, so a cover whose links already single out an edge reports
/// that edge as the twist.
pub fn detect_twisted_canonical(c: &Cover) -> Option<LabelingWitness> {
    let fold = c.fold()?;
    if !c.is_full() {
        return None;
    }
    let g = c.graph();
    let mut candidates: Vec<usize> = (0..g.edge_count()).collect();
    candidates.sort_by_key(|&e| (c.link(e).iter().all(|&(i, j)| i == j), e));
    for e in candidates {
        let (mut relabeling, component) = propagate_forest(c, Some(e));
        let (u, v) = g.edges()[e];
        if component[u] != component[v] && fold >= 2 {
            // Bridge: the far side is free, so force a twist with a swap.
            let is_identity = {
                let l2r = link_permutation(c, e).unwrap();
                (0..fold).all(|i| relabeling.perms[v][l2r[i]] == relabeling.perms[u][i])
            };
            if is_identity {
                for w in 0..g.vertex_count() {
                    if component[w] == component[v] {
                        for x in relabeling.perms[w].iter_mut() {
                            if *x < 2 {
                                *x = 1 - *x;
                            }
                        }
                    }
                }
            }
        }
        let witness = LabelingWitness {
            kind: LabelKind::TwistedCanonical,
            relabeling,
            twist_edge: Some((u, v)),
        };
        if verify_witness(c, &witness) {
            return Some(witness);
        }
    }
    None
}

/// Labels a full uniform-fold cover of a tree: canonical mode propagates the
/// identity everywhere; twisted mode takes the lexicographically first edge
/// as twist and composes a cyclic index shift on its far side.
pub fn tree_labeling(c: &Cover, kind: LabelKind) -> Result<LabelingWitness> {
    let g = c.graph();
    if !g.is_tree() {
        return Err(Error::Parameter("base graph is not a tree".into()));
    }
    let fold = c
        .fold()
        .ok_or_else(|| Error::Parameter("cover is not uniform-fold".into()))?;
    if !c.is_full() {
        return Err(Error::Parameter("cover is not full".into()));
    }
    let witness = match kind {
        LabelKind::Canonical => {
            let (relabeling, _) = propagate_forest(c, None);
            LabelingWitness {
                kind,
                relabeling,
                twist_edge: None,
            }
        }
        LabelKind::TwistedCanonical => {
            if fold < 2 {
                return Err(Error::Parameter(
                    "twisted labeling needs fold >= 2".into(),
                ));
            }
            if g.edge_count() == 0 {
                return Err(Error::Parameter("tree has no edge to twist".into()));
            }
            let twist = g.edges()[0];
            let e = g.edge_index(twist.0, twist.1).unwrap();
            let (mut relabeling, component) = propagate_forest(c, Some(e));
            for w in 0..g.vertex_count() {
                if component[w] == component[twist.1] {
                    for x in relabeling.perms[w].iter_mut() {
                        *x = (*x + 1) % fold;
                    }
                }
            }
            LabelingWitness {
                kind,
                relabeling,
                twist_edge: Some(twist),
            }
        }
    };
    if !verify_witness(c, &witness) {
        return Err(Error::Parameter("labeling verification failed".into()));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{canonical_cover, make_twister};
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute force over every relabeling; usable only for tiny covers.
    fn brute_force_canonical(c: &Cover) -> bool {
        let fold = match c.fold() {
            Some(f) => f,
            None => return false,
        };
        if !c.is_full() {
            return false;
        }
        fn perms(m: usize) -> Vec<Vec<usize>> {
            if m == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(m - 1) {
                for slot in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(slot, m - 1);
                    out.push(q);
                }
            }
            out
        }
        let all = perms(fold);
        let n = c.graph().vertex_count();
        let mut idx = vec![0usize; n];
        loop {
            let r = Relabeling {
                perms: idx.iter().map(|&i| all[i].clone()).collect(),
            };
            let relabeled = relabel(c, &r).unwrap();
            if relabeled
                .links()
                .iter()
                .all(|pairs| pairs.iter().all(|&(i, j)| i == j))
            {
                return true;
            }
            let mut carry = true;
            for slot in idx.iter_mut() {
                if carry {
                    *slot += 1;
                    if *slot == all.len() {
                        *slot = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                return false;
            }
        }
    }

    /// Cycle cover with the given left-to-right permutation on each edge of
    /// the cyclic walk 0,1,...,n-1,0.
    fn cycle_cover(n: usize, fold: usize, walk_perms: &[Vec<usize>]) -> Cover {
        let g = Graph::cycle(n).unwrap();
        let mut links = vec![Vec::new(); g.edge_count()];
        for i in 0..n {
            let (a, b) = (i, (i + 1) % n);
            let e = g.edge_index(a, b).unwrap();
            let p = &walk_perms[i];
            links[e] = if a < b {
                (0..fold).map(|x| (x, p[x])).collect()
            } else {
                (0..fold).map(|x| (p[x], x)).collect()
            };
        }
        Cover::new(g, vec![fold; n], links).unwrap()
    }

    #[test]
    fn canonical_survives_random_relabeling() {
        let c = canonical_cover(&Graph::cycle(5).unwrap(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let r = Relabeling::random(&c, &mut rng);
        let scrambled = relabel(&c, &r).unwrap();
        let w = detect_canonical(&scrambled).expect("witness");
        let fixed = relabel(&scrambled, &w.relabeling).unwrap();
        for pairs in fixed.links() {
            assert!(pairs.iter().all(|&(i, j)| i == j));
        }
    }

    #[test]
    fn twister_has_no_canonical_labeling() {
        let tw = make_twister(2, 3).unwrap();
        assert!(detect_canonical(&tw).is_none());
        assert!(brute_force_canonical(&tw) == false);
    }

    #[test]
    fn transposed_cycle_cover_not_canonical() {
        // Composite permutation around C_3 is a transposition.
        let c = cycle_cover(3, 2, &[vec![0, 1], vec![0, 1], vec![1, 0]]);
        assert!(detect_canonical(&c).is_none());
        assert!(!brute_force_canonical(&c));
    }

    #[test]
    fn detection_matches_brute_force_on_small_cycles() {
        // All full 2-fold covers of C_n, n in 3..=5, as walk permutations.
        for n in 3..=5 {
            for mask in 0..(1u32 << n) {
                let perms: Vec<Vec<usize>> = (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            vec![1, 0]
                        } else {
                            vec![0, 1]
                        }
                    })
                    .collect();
                let c = cycle_cover(n, 2, &perms);
                assert_eq!(
                    detect_canonical(&c).is_some(),
                    brute_force_canonical(&c),
                    "n={} mask={:b}",
                    n,
                    mask
                );
            }
        }
    }

    #[test]
    fn twist_detection_on_even_cycle() {
        // One swapped link on C_4: the witness twist is that edge.
        let g = Graph::cycle(4).unwrap();
        let mut links = vec![vec![(0, 0), (1, 1)]; 4];
        let e = g.edge_index(1, 2).unwrap();
        links[e] = vec![(0, 1), (1, 0)];
        let c = Cover::new(g, vec![2; 4], links).unwrap();
        let w = detect_twisted_canonical(&c).expect("witness");
        assert_eq!(w.twist_edge, Some((1, 2)));

        // An already-canonical cover of C_4 has no twisted labeling.
        let canon = canonical_cover(&Graph::cycle(4).unwrap(), 2).unwrap();
        assert!(detect_twisted_canonical(&canon).is_none());
    }

    #[test]
    fn paths_always_twist() {
        for n in 2..=5 {
            let c = canonical_cover(&Graph::path(n).unwrap(), 2).unwrap();
            let w = detect_twisted_canonical(&c).expect("full tree covers always twist");
            assert!(verify_witness(&c, &w));
        }
    }

    #[test]
    fn tree_labeling_modes() {
        let p4 = canonical_cover(&Graph::path(4).unwrap(), 3).unwrap();
        let w = tree_labeling(&p4, LabelKind::Canonical).unwrap();
        assert!(w.twist_edge.is_none());

        let k2 = canonical_cover(&Graph::path(2).unwrap(), 2).unwrap();
        let w = tree_labeling(&k2, LabelKind::TwistedCanonical).unwrap();
        assert_eq!(w.twist_edge, Some((0, 1)));

        let g = Graph::path(3).unwrap();
        let partial = Cover::new(g, vec![2; 3], vec![vec![(0, 0)], vec![]]).unwrap();
        assert!(tree_labeling(&partial, LabelKind::Canonical).is_err());

        let c3 = canonical_cover(&Graph::cycle(3).unwrap(), 2).unwrap();
        assert!(tree_labeling(&c3, LabelKind::Canonical).is_err());
    }

    #[test]
    fn non_full_and_non_uniform_return_none() {
        let g = Graph::path(2).unwrap();
        let partial = Cover::new(g.clone(), vec![2; 2], vec![vec![(0, 0)]]).unwrap();
        assert!(detect_canonical(&partial).is_none());
        assert!(detect_twisted_canonical(&partial).is_none());
        let uneven = Cover::new(g, vec![2, 3], vec![vec![(0, 0), (1, 1)]]).unwrap();
        assert!(detect_canonical(&uneven).is_none());
    }
}
