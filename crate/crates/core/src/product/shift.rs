//! Orbits of colorings under adding a constant to every index modulo the
//! fold size. Both the odd-cycle relation on proper colorings and the
//! twister relation on transversals partition their coloring sets into
//! classes of exactly `modulus` members that disagree at every vertex.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cover::{canonical_cover, make_twister, Cover};
use crate::error::{Error, Result};
use crate::solver::{enumerate_colorings, HColoring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftRelation {
    /// Proper colorings of an odd cycle, shifted mod the color count.
    ProperColorShift,
    /// Transversals of an even-cycle twister, shifted mod the fold size.
    TwisterIndexShift,
}

/// A partition of a coloring set into shift orbits. Classes are ordered by
/// their lexicographically smallest member; members are in shift order
/// starting from that smallest one.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftClassPartition {
    pub relation: ShiftRelation,
    pub modulus: usize,
    pub classes: Vec<Vec<HColoring>>,
}

impl ShiftClassPartition {
    /// Which class contains this coloring, if any.
    pub fn class_of(&self, coloring: &HColoring) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(coloring))
    }
}

fn shift(h: &HColoring, j: usize, modulus: usize) -> HColoring {
    HColoring {
        choice: h.choice.iter().map(|&c| (c + j) % modulus).collect(),
    }
}

fn group_by_shift(
    all: Vec<HColoring>,
    modulus: usize,
    relation: ShiftRelation,
) -> Result<ShiftClassPartition> {
    let mut remaining: BTreeSet<HColoring> = all.into_iter().collect();
    let mut classes = Vec::new();
    while let Some(seed) = remaining.iter().next().cloned() {
        let mut class = Vec::with_capacity(modulus);
        for j in 0..modulus {
            let member = shift(&seed, j, modulus);
            if !remaining.remove(&member) {
                return Err(Error::Parameter(
                    "coloring set is not closed under index shifts".into(),
                ));
            }
            class.push(member);
        }
        classes.push(class);
    }
    Ok(ShiftClassPartition {
        relation,
        modulus,
        classes,
    })
}

/// Partitions the proper `colors`-colorings of the odd cycle C_n into shift
/// classes of size `colors`.
pub fn shift_classes_odd_cycle(n: usize, colors: usize) -> Result<ShiftClassPartition> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Parameter("cycle length must be odd and >= 3".into()));
    }
    if colors == 0 {
        return Err(Error::Parameter("need at least one color".into()));
    }
    let cover = canonical_cover(&crate::graph::Graph::cycle(n)?, colors)?;
    let all: Vec<HColoring> = enumerate_colorings(&cover)?.collect();
    group_by_shift(all, colors, ShiftRelation::ProperColorShift)
}

/// Partitions the transversals of a twister cover (as produced by
/// `make_twister`, fold >= 3) into shift classes of size `fold`.
pub fn shift_classes_twister(tw: &Cover) -> Result<ShiftClassPartition> {
    let fold = tw
        .fold()
        .ok_or_else(|| Error::Parameter("twister must be uniform-fold".into()))?;
    if fold < 3 {
        return Err(Error::Parameter(
            "twister shift classes need fold >= 3".into(),
        ));
    }
    let n = tw.graph().vertex_count();
    if n % 2 != 0 || n < 4 || make_twister(n / 2, fold)? != *tw {
        return Err(Error::Parameter(
            "cover is not a twister in the standard form".into(),
        ));
    }
    let all: Vec<HColoring> = enumerate_colorings(tw)?.collect();
    group_by_shift(all, fold, ShiftRelation::TwisterIndexShift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partition(p: &ShiftClassPartition, expected_classes: usize) {
        assert_eq!(p.classes.len(), expected_classes);
        let mut seen = BTreeSet::new();
        for class in &p.classes {
            assert_eq!(class.len(), p.modulus, "class size equals the modulus");
            for member in class {
                assert!(seen.insert(member.clone()), "classes are disjoint");
            }
            // Distinct members of a class differ at every vertex.
            for a in 0..class.len() {
                for b in a + 1..class.len() {
                    assert!(class[a]
                        .choice
                        .iter()
                        .zip(&class[b].choice)
                        .all(|(x, y)| x != y));
                }
            }
        }
    }

    #[test]
    fn odd_cycle_classes() {
        let p = shift_classes_odd_cycle(3, 3).unwrap();
        check_partition(&p, 2);

        let p = shift_classes_odd_cycle(5, 3).unwrap();
        check_partition(&p, 10);

        let empty = shift_classes_odd_cycle(3, 2).unwrap();
        assert!(empty.classes.is_empty());

        assert!(shift_classes_odd_cycle(4, 3).is_err());
    }

    #[test]
    fn twister_classes() {
        let tw = make_twister(2, 3).unwrap();
        let p = shift_classes_twister(&tw).unwrap();
        check_partition(&p, 5);

        let tw6 = make_twister(3, 3).unwrap();
        let p6 = shift_classes_twister(&tw6).unwrap();
        check_partition(&p6, 21);
    }

    #[test]
    fn twister_classes_reject_bad_input() {
        let two_fold = make_twister(2, 2).unwrap();
        assert!(shift_classes_twister(&two_fold).is_err());
        let canon = canonical_cover(&crate::graph::Graph::cycle(4).unwrap(), 3).unwrap();
        assert!(shift_classes_twister(&canon).is_err());
    }

    #[test]
    fn class_lookup() {
        let p = shift_classes_odd_cycle(3, 3).unwrap();
        let member = p.classes[1][2].clone();
        assert_eq!(p.class_of(&member), Some(1));
        assert_eq!(
            p.class_of(&HColoring {
                choice: vec![0, 0, 0]
            }),
            None
        );
    }
}
