//! The three bad-cover constructions for G □ K_{k,t}.
//!
//! The deterministic one pairs every X-side coloring of a minimizing cover
//! with a dedicated fiber whose first k indices are matched to that
//! coloring's choices, leaving a bad residual behind. The two cycle
//! constructions replace the per-coloring pairing with shift classes and
//! seeded random bijections, resampled per class until every class member is
//! volatile for one of the class's dedicated fibers.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{assemble_product_cover, CrossLink, ProductCover};
use crate::cover::{canonical_cover, make_twister, Cover};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::solver::{count_colorings, enumerate_colorings, find_coloring, HColoring};

pub const DEFAULT_RETRY_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Replication count for the randomized constructions: the least c >= 1 for
/// which c independent fiber samples per class push the expected number of
/// non-volatile class members strictly below one.
///
/// Exactly: the least c with (good - hit)^c * q^k < good^c, where q = k + 2,
/// and per fiber a class member is volatile in `hit` of the `good` equally
/// likely bijection choices. Odd cycles: good = 2 q^k, hit = q!. Even
/// cycles: good = q^k, hit = floor(q/2) k!.
pub fn replication_count(parity: Parity, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::Parameter("k must be >= 1".into()));
    }
    let q = BigUint::from(k + 2);
    let qk = q.pow(k as u32);
    let factorial = |n: usize| -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, x| acc * BigUint::from(x))
    };
    let (good, hit) = match parity {
        Parity::Odd => (BigUint::from(2u32) * &qk, factorial(k + 2)),
        Parity::Even => (qk.clone(), BigUint::from((k + 2) / 2) * factorial(k)),
    };
    if hit > good || hit.is_zero() {
        return Err(Error::Parameter(
            "volatility probability outside (0, 1]".into(),
        ));
    }
    let bad = &good - &hit;
    let mut bad_pow = bad.clone();
    let mut good_pow = good.clone();
    for c in 1..=1_000_000u64 {
        if &bad_pow * &qk < good_pow {
            return Ok(c);
        }
        bad_pow *= &bad;
        good_pow *= &good;
    }
    Err(Error::Parameter("replication count out of range".into()))
}

/// A deterministic bad cover of G □ K_{k,t} built from an (m+k-1)-fold cover
/// of G with few colorings and a bad (m-1)-fold cover of G.
///
/// In auto mode (both covers `None`) the pieces come from the exhaustive
/// scans: m is the DP chromatic number with its bad witness at m-1, and the
/// X-fiber cover is a DP-color-function minimizer at m+k-1. Explicit covers
/// bypass the scans; they must share the base graph, the bad cover must
/// actually be bad, and the folds must differ by exactly k.
pub fn bad_cover_deterministic(
    g: &Graph,
    k: usize,
    t: usize,
    minimizing: Option<Cover>,
    bad: Option<Cover>,
    budget: u64,
) -> Result<ProductCover> {
    if k == 0 || t == 0 {
        return Err(Error::Parameter("k and t must be >= 1".into()));
    }
    let (minimizing, bad) = match (minimizing, bad) {
        (Some(h), Some(hb)) => (h, hb),
        (h, hb) => {
            let chi = crate::exhaustive::chi_dp_exhaustive(g, budget)?;
            let m = usize::try_from(&chi.value)
                .map_err(|_| Error::Parameter("chromatic value out of range".into()))?;
            let h = match h {
                Some(h) => h,
                None => crate::exhaustive::pdp_exhaustive(g, m + k - 1, budget)?.witness,
            };
            let hb = match hb {
                Some(hb) => hb,
                None => chi.witness,
            };
            (h, hb)
        }
    };
    if minimizing.graph() != g || bad.graph() != g {
        return Err(Error::Parameter("cover base graph mismatch".into()));
    }
    let fold = minimizing
        .fold()
        .ok_or_else(|| Error::Parameter("X cover must be uniform-fold".into()))?;
    let bad_fold = bad
        .fold()
        .ok_or_else(|| Error::Parameter("bad cover must be uniform-fold".into()))?;
    if fold != bad_fold + k {
        return Err(Error::Parameter(format!(
            "fold {} must exceed the bad cover's fold {} by exactly k = {}",
            fold, bad_fold, k
        )));
    }
    if find_coloring(&bad)?.is_some() {
        return Err(Error::Parameter("the residual cover is not bad".into()));
    }

    let colorings: Vec<HColoring> = enumerate_colorings(&minimizing)?.collect();
    let d = colorings.len();
    let tuples = (d as u128)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Parameter("coloring tuple count overflows".into()))?;
    if (t as u128) < tuples {
        return Err(Error::Parameter(format!(
            "t = {} is below the {} X-side colorings to pin down",
            t, tuples
        )));
    }

    let n = g.vertex_count();
    // Y fibers: first k indices are the pinning block, the rest carry the
    // bad cover shifted up by k.
    let y_links: Vec<Vec<(usize, usize)>> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, _)| {
            bad.link(e)
                .iter()
                .map(|&(i, j)| (i + k, j + k))
                .collect()
        })
        .collect();
    let y_fiber = Cover::new(g.clone(), vec![fold; n], y_links)?;

    let mut cross = Vec::new();
    for (i, fiber) in (0..tuples as usize).map(|i| (i, k + i)) {
        for j in 0..k {
            // Digit j of i in base d picks the coloring on X-fiber j; fiber
            // blocks are most significant first, matching the lexicographic
            // enumeration order of X-side colorings.
            let a = if d == 0 {
                unreachable!("no tuples when d = 0")
            } else {
                (i / d.pow((k - 1 - j) as u32)) % d
            };
            for u in 0..n {
                cross.push(CrossLink {
                    g_vertex: u,
                    k_a: j,
                    k_b: fiber,
                    pairs: vec![(colorings[a].choice[u], j)],
                });
            }
        }
    }

    let x_fibers = vec![minimizing; k];
    let y_fibers = vec![y_fiber; t];
    assemble_product_cover(g, k, t, &x_fibers, &y_fibers, &cross)
}

/// Parameters for the randomized cycle constructions. `m` selects the cycle
/// length: 2m+1 for the odd construction, 2m+2 for the even one.
#[derive(Debug, Clone, Copy)]
pub struct ConstructionParams {
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub seed: u64,
    pub retry_cap: u64,
}

/// A bad (k+2)-fold cover of C_{2m+1} □ K_{k,t}: canonical covers on every
/// fiber, shift classes of the X-side colorings, and per-class seeded random
/// bijections from class members to fiber rows.
pub fn bad_cover_odd_cycle(params: ConstructionParams) -> Result<ProductCover> {
    if params.m < 1 {
        return Err(Error::Parameter("m must be >= 1".into()));
    }
    let n = 2 * params.m + 1;
    let fold = params.k + 2;
    let g = Graph::cycle(n)?;
    let fiber = canonical_cover(&g, fold)?;
    let classes = super::shift_classes_odd_cycle(n, fold)?.classes;
    let c = replication_count(Parity::Odd, params.k)?;
    randomized_class_construction(&g, fold, fiber.clone(), fiber, classes, c, params, |rows| {
        distinct(rows) == params.k
    })
}

/// A bad (k+2)-fold cover of C_{2m+2} □ K_{k,t}: twisters on the X fibers,
/// paired rows closed by a swap on the Y fibers, twister shift classes, and
/// per-class seeded random bijections.
pub fn bad_cover_even_cycle(params: ConstructionParams) -> Result<ProductCover> {
    if params.m < 1 {
        return Err(Error::Parameter("m must be >= 1".into()));
    }
    let n = 2 * params.m + 2;
    let fold = params.k + 2;
    let g = Graph::cycle(n)?;
    let x_fiber = make_twister(params.m + 1, fold)?;
    let y_fiber = paired_rows_cover(&g, fold)?;
    let classes = super::shift_classes_twister(&x_fiber)?.classes;
    let c = replication_count(Parity::Even, params.k)?;
    let k = params.k;
    randomized_class_construction(&g, fold, x_fiber, y_fiber, classes, c, params, move |rows| {
        if distinct(rows) != k {
            return false;
        }
        // The two surviving rows must be an intact swap pair.
        (0..fold / 2).any(|a| !rows.contains(&(2 * a)) && !rows.contains(&(2 * a + 1)))
    })
}

/// Y-fiber cover for the even construction: identity links along the path,
/// rows swapped pairwise on the closing edge, the odd row (if any) closing
/// on itself.
fn paired_rows_cover(g: &Graph, fold: usize) -> Result<Cover> {
    let n = g.vertex_count();
    let identity: Vec<(usize, usize)> = (0..fold).map(|i| (i, i)).collect();
    let mut links = vec![identity; g.edge_count()];
    let closing = g
        .edge_index(0, n - 1)
        .ok_or_else(|| Error::Parameter("cycle must close".into()))?;
    let mut swap = Vec::with_capacity(fold);
    for a in 0..fold / 2 {
        swap.push((2 * a, 2 * a + 1));
        swap.push((2 * a + 1, 2 * a));
    }
    if fold % 2 == 1 {
        swap.push((fold - 1, fold - 1));
    }
    links[closing] = swap;
    Cover::new(g.clone(), vec![fold; n], links)
}

fn distinct(rows: &[usize]) -> usize {
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Shared machinery for the randomized constructions. `classes` must
/// partition the X-fiber coloring set into groups of size `fold` whose
/// members pairwise disagree everywhere (so at each vertex a class touches
/// every index exactly once). The sigma criterion is the closed-form
/// volatility test on the multiset of rows hit by a class member; the
/// residual-cover search stays the arbiter.
#[allow(clippy::too_many_arguments)]
fn randomized_class_construction<F>(
    g: &Graph,
    fold: usize,
    x_fiber: Cover,
    y_fiber: Cover,
    classes: Vec<Vec<HColoring>>,
    c: u64,
    params: ConstructionParams,
    sigma_volatile: F,
) -> Result<ProductCover>
where
    F: Fn(&[usize]) -> bool,
{
    let ConstructionParams {
        k,
        t,
        seed,
        retry_cap,
        ..
    } = params;
    if k == 0 || t == 0 {
        return Err(Error::Parameter("k and t must be >= 1".into()));
    }
    if retry_cap == 0 {
        return Err(Error::Parameter("retry cap must be >= 1".into()));
    }
    let n = g.vertex_count();
    let b = classes.len();
    let class_tuples = (b as u128)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Parameter("class tuple count overflows".into()))?;
    let t_min = class_tuples
        .checked_mul(c as u128)
        .ok_or_else(|| Error::Parameter("required fiber count overflows".into()))?;
    if (t as u128) < t_min {
        return Err(Error::Parameter(format!(
            "t = {} is below the required {} fibers ({} class tuples, {} each)",
            t, t_min, class_tuples, c
        )));
    }
    for class in &classes {
        debug_assert_eq!(class.len(), fold);
    }

    // member_at[p][u][index] = which member of class p picks `index` at u.
    let member_at: Vec<Vec<Vec<usize>>> = classes
        .iter()
        .map(|class| {
            let mut table = vec![vec![usize::MAX; fold]; n];
            for (l, member) in class.iter().enumerate() {
                for (u, &idx) in member.choice.iter().enumerate() {
                    debug_assert_eq!(table[u][idx], usize::MAX, "class partitions each list");
                    table[u][idx] = l;
                }
            }
            table
        })
        .collect();

    let mut cross = Vec::new();
    for a in 0..class_tuples as usize {
        // Class tuple digits, X-fiber 0 most significant.
        let tuple: Vec<usize> = (0..k)
            .map(|j| (a / b.pow((k - 1 - j) as u32)) % b)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(a as u64);
        let mut accepted = None;
        for _attempt in 0..retry_cap {
            // One bijection per dedicated fiber and X-fiber: member -> row.
            let sigmas: Vec<Vec<Vec<usize>>> = (0..c)
                .map(|_| {
                    (0..k)
                        .map(|_| {
                            let mut rows: Vec<usize> = (0..fold).collect();
                            rows.shuffle(&mut rng);
                            rows
                        })
                        .collect()
                })
                .collect();
            if every_member_volatile(
                g,
                fold,
                k,
                &classes,
                &member_at,
                &tuple,
                &sigmas,
                &y_fiber,
                &sigma_volatile,
            )? {
                accepted = Some(sigmas);
                break;
            }
        }
        let sigmas = accepted.ok_or_else(|| {
            Error::RetryExhausted(format!(
                "class tuple {} of {}: no volatile assignment in {} attempts \
                 (per-fiber volatility probability {})",
                a,
                class_tuples,
                retry_cap,
                volatility_probability(&sigma_volatile, fold, k)
            ))
        })?;
        for (ell, fiber_sigmas) in sigmas.iter().enumerate() {
            let q = c as usize * a + ell;
            for (j, sigma) in fiber_sigmas.iter().enumerate() {
                for u in 0..n {
                    let pairs: Vec<(usize, usize)> = (0..fold)
                        .map(|l| (classes[tuple[j]][l].choice[u], sigma[l]))
                        .collect();
                    cross.push(CrossLink {
                        g_vertex: u,
                        k_a: j,
                        k_b: k + q,
                        pairs,
                    });
                }
            }
        }
    }

    let x_fibers = vec![x_fiber; k];
    let y_fibers = vec![y_fiber; t];
    let mut pc = assemble_product_cover(g, k, t, &x_fibers, &y_fibers, &cross)?;
    pc.seed = Some(seed);
    Ok(pc)
}

/// Checks that every class member tuple is volatile for at least one of the
/// class's fibers, deciding volatility by solving the residual cover and
/// cross-checking the closed-form row criterion.
#[allow(clippy::too_many_arguments)]
fn every_member_volatile<F>(
    g: &Graph,
    fold: usize,
    k: usize,
    classes: &[Vec<HColoring>],
    member_at: &[Vec<Vec<usize>>],
    tuple: &[usize],
    sigmas: &[Vec<Vec<usize>>],
    y_fiber: &Cover,
    sigma_volatile: &F,
) -> Result<bool>
where
    F: Fn(&[usize]) -> bool,
{
    let n = g.vertex_count();
    let members = (fold as u64).pow(k as u32);
    for s in 0..members {
        // Member digits, X-fiber 0 most significant.
        let picks: Vec<usize> = (0..k)
            .map(|j| ((s / (fold as u64).pow((k - 1 - j) as u32)) % fold as u64) as usize)
            .collect();
        let mut volatile_somewhere = false;
        for fiber_sigmas in sigmas {
            // Rows killed at each vertex, computed through the matchings.
            let mut killed: Vec<Vec<usize>> = vec![Vec::with_capacity(k); n];
            let mut head_rows = Vec::with_capacity(k);
            for j in 0..k {
                let class = tuple[j];
                let choice = &classes[class][picks[j]].choice;
                for u in 0..n {
                    let member = member_at[class][u][choice[u]];
                    killed[u].push(fiber_sigmas[j][member]);
                }
                head_rows.push(killed[0][k - 1 - (k - 1 - j)]);
            }
            let volatile = residual_is_bad(g, fold, y_fiber, &killed)?;
            debug_assert_eq!(
                volatile,
                sigma_volatile(&head_rows),
                "row criterion must agree with the residual search"
            );
            if volatile {
                volatile_somewhere = true;
                break;
            }
        }
        if !volatile_somewhere {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Restricts the Y-fiber cover to the rows not killed at each vertex and
/// asks the solver whether anything is left.
fn residual_is_bad(
    g: &Graph,
    fold: usize,
    y_fiber: &Cover,
    killed: &[Vec<usize>],
) -> Result<bool> {
    let n = g.vertex_count();
    let survivors: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..fold).filter(|i| !killed[u].contains(i)).collect())
        .collect();
    let sizes: Vec<usize> = survivors.iter().map(|s| s.len()).collect();
    let links: Vec<Vec<(usize, usize)>> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            y_fiber
                .link(e)
                .iter()
                .filter_map(|&(i, j)| {
                    let pi = survivors[a].iter().position(|&x| x == i)?;
                    let pj = survivors[b].iter().position(|&x| x == j)?;
                    Some((pi, pj))
                })
                .collect()
        })
        .collect();
    let residual = Cover::new(g.clone(), sizes, links)?;
    Ok(find_coloring(&residual)?.is_none())
}

/// Formats the exact per-fiber volatility probability of the row criterion
/// for error reports, by enumerating row tuples.
fn volatility_probability<F>(sigma_volatile: &F, fold: usize, k: usize) -> String
where
    F: Fn(&[usize]) -> bool,
{
    // Rows hit by a fixed member are independent uniform-without-replacement
    // picks per X-fiber; enumerating all fold^k tuples with multiplicity
    // weights would be overkill for a message, so report the fraction over
    // injective tuples plus the raw criterion arity.
    let mut hit = 0u64;
    let mut total = 0u64;
    let mut rows = vec![0usize; k];
    loop {
        total += 1;
        if sigma_volatile(&rows) {
            hit += 1;
        }
        let mut carry = true;
        for slot in rows.iter_mut() {
            if carry {
                *slot += 1;
                if *slot == fold {
                    *slot = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    format!("{}/{} over row tuples", hit, total)
}
