//! The peeling algorithm behind the product upper bound: any cover of
//! G □ H with fold at least chi_DP(G) + col(H) - 1 admits a transversal,
//! found by coloring the H-fibers along a degeneracy ordering and solving a
//! trimmed chi_DP(G)-fold cover of G at each step.

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{coloring_number, ProductGraph};
use crate::solver::{find_coloring, is_valid_coloring, HColoring};

/// Colors a cover of `product.graph()` whose fold is at least
/// `chi_left + col(H) - 1`, where `chi_left` is the DP chromatic number of
/// the left factor (certified by the caller, e.g. via `chi_dp_exhaustive`).
pub fn upper_bound_coloring(
    product: &ProductGraph,
    cover: &Cover,
    chi_left: usize,
) -> Result<HColoring> {
    if cover.graph() != product.graph() {
        return Err(Error::Parameter(
            "cover base graph does not match the product graph".into(),
        ));
    }
    if chi_left == 0 {
        return Err(Error::Parameter("chi_left must be positive".into()));
    }
    let fold = cover
        .fold()
        .ok_or_else(|| Error::Parameter("cover must be uniform-fold".into()))?;
    let right = product.right();
    let width = coloring_number(right);
    let needed = chi_left + width.width - 1;
    if fold < needed {
        return Err(Error::Parameter(format!(
            "fold {} is below chi_left + col(H) - 1 = {}",
            fold, needed
        )));
    }

    let left = product.left();
    let n = left.vertex_count();
    let mut choice: Vec<Option<usize>> = vec![None; product.graph().vertex_count()];
    let mut processed = vec![false; right.vertex_count()];

    for &h_vertex in &width.ordering {
        // Indices of L(u, h_vertex) matched to a chosen vertex over an
        // earlier neighbor of h_vertex; at most col(H) - 1 of them.
        let mut lists: Vec<Vec<usize>> = Vec::with_capacity(n);
        for u in 0..n {
            let here = product.index(u, h_vertex);
            let mut alive = vec![true; fold];
            for &w in right.neighbors(h_vertex) {
                if !processed[w] {
                    continue;
                }
                let there = product.index(u, w);
                let picked = choice[there].expect("processed fiber is colored");
                if let Some(dead) = cover.partner(there, here, picked) {
                    alive[dead] = false;
                }
            }
            let surviving: Vec<usize> = (0..fold)
                .filter(|&i| alive[i])
                .take(chi_left)
                .collect();
            if surviving.len() < chi_left {
                return Err(Error::Parameter(
                    "survivor list shorter than chi_left; ordering width violated".into(),
                ));
            }
            lists.push(surviving);
        }
        // Trimmed chi_left-fold cover of the left factor on this fiber.
        let links: Vec<Vec<(usize, usize)>> = left
            .edges()
            .iter()
            .map(|&(a, b)| {
                let fa = product.index(a, h_vertex);
                let fb = product.index(b, h_vertex);
                cover
                    .link_between(fa, fb)
                    .into_iter()
                    .filter_map(|(i, j)| {
                        let pi = lists[a].iter().position(|&x| x == i)?;
                        let pj = lists[b].iter().position(|&x| x == j)?;
                        Some((pi, pj))
                    })
                    .collect()
            })
            .collect();
        let trimmed = Cover::new(left.clone(), vec![chi_left; n], links)?;
        let sol = find_coloring(&trimmed)?.ok_or_else(|| {
            Error::Parameter(
                "trimmed fiber cover admitted no coloring; chi_left is not an upper certificate"
                    .into(),
            )
        })?;
        for u in 0..n {
            choice[product.index(u, h_vertex)] = Some(lists[u][sol.choice[u]]);
        }
        processed[h_vertex] = true;
    }

    let coloring = HColoring {
        choice: choice.into_iter().map(|c| c.unwrap()).collect(),
    };
    debug_assert!(is_valid_coloring(cover, &coloring));
    Ok(coloring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{canonical_cover, random_full_cover};
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn colors_random_four_fold_covers_of_c3_k2() {
        let g = Graph::cycle(3).unwrap();
        let h = Graph::complete(2).unwrap();
        let product = ProductGraph::new(&g, &h);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let cover = random_full_cover(product.graph(), 4, &mut rng);
            let coloring = upper_bound_coloring(&product, &cover, 3).unwrap();
            assert!(is_valid_coloring(&cover, &coloring));
        }
    }

    #[test]
    fn identity_second_factor_reduces_to_fiber_search() {
        let g = Graph::cycle(5).unwrap();
        let h = Graph::complete(1).unwrap();
        let product = ProductGraph::new(&g, &h);
        let cover = canonical_cover(product.graph(), 3).unwrap();
        let coloring = upper_bound_coloring(&product, &cover, 3).unwrap();
        assert!(is_valid_coloring(&cover, &coloring));
    }

    #[test]
    fn fold_below_threshold_is_rejected() {
        let g = Graph::cycle(3).unwrap();
        let h = Graph::complete(2).unwrap();
        let product = ProductGraph::new(&g, &h);
        let cover = canonical_cover(product.graph(), 3).unwrap();
        assert!(upper_bound_coloring(&product, &cover, 3).is_err());
    }
}
