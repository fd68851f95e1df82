//! Constructors for the standard groupoid families.
//!
//! Arrow numbering: units come first in every family except disjoint unions,
//! which concatenate their components.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::group::FiniteGroup;
use crate::groupoid::{Arrow, FiniteGroupoid};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParams { family: &'static str, reason: String },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

fn invalid(family: &'static str, reason: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParams { family, reason: reason.into() }
}

/// A family name with its parameters, as accepted by [`make_family`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    Pair(usize),
    CyclicGroup(usize),
    GroupBundle(Vec<usize>),
    Transformation { group: Vec<Vec<usize>>, points: usize, action: Vec<Vec<usize>> },
    DisjointUnion(Vec<FamilySpec>),
}

pub fn make_family(spec: &FamilySpec) -> Result<FiniteGroupoid, FamilyError> {
    match spec {
        FamilySpec::Pair(n) => pair(*n),
        FamilySpec::CyclicGroup(n) => cyclic_group(*n),
        FamilySpec::GroupBundle(orders) => group_bundle(orders),
        FamilySpec::Transformation { group, points, action } => {
            let group = FiniteGroup::from_table(group.clone()).map_err(|e| invalid("transformation", e.to_string()))?;
            transformation(&group, *points, action)
        }
        FamilySpec::DisjointUnion(parts) => {
            let parts = parts.iter().map(make_family).collect::<Result<Vec<_>, _>>()?;
            Ok(disjoint_union(&parts))
        }
    }
}

/// The pair groupoid `R_n` on `n` points: arrows `(i,j)` with source `j`,
/// range `i`, and `(i,j)(j,k) = (i,k)`. Units `(i,i)` first, then the
/// remaining pairs in lexicographic order.
pub fn pair(n: usize) -> Result<FiniteGroupoid, FamilyError> {
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    let id: HashMap<(usize, usize), Arrow> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    FiniteGroupoid::from_fn(
        pairs.iter().map(|&(i, j)| i == j).collect(),
        pairs.iter().map(|&(_, j)| id[&(j, j)]).collect(),
        pairs.iter().map(|&(i, _)| id[&(i, i)]).collect(),
        pairs.iter().map(|&(i, j)| id[&(j, i)]).collect(),
        |a, b| id[&(pairs[a].0, pairs[b].1)],
    )
    .map_err(|e| invalid("pair", e.to_string()))
}

/// `Z/n` as a one-unit groupoid; arrow `k` is the `k`-th power of a generator.
pub fn cyclic_group(n: usize) -> Result<FiniteGroupoid, FamilyError> {
    if n == 0 {
        return Err(invalid("cyclic_group", "order must be at least 1"));
    }
    group_as_groupoid(&FiniteGroup::cyclic(n))
}

/// A group as a groupoid with a single unit.
pub fn group_as_groupoid(g: &FiniteGroup) -> Result<FiniteGroupoid, FamilyError> {
    transformation(g, 1, &vec![vec![0]; g.order()])
}

/// Disjoint union of cyclic groups, one per point.
pub fn group_bundle(orders: &[usize]) -> Result<FiniteGroupoid, FamilyError> {
    let parts = orders
        .iter()
        .map(|&n| cyclic_group(n).map_err(|_| invalid("group_bundle", "every fibre order must be at least 1")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(disjoint_union(&parts))
}

/// The transformation groupoid `Γ⋉X`: arrows `(g,x)` with source `x`, range
/// `g·x`, `(g,h·x)(h,x) = (gh,x)` and `(g,x)⁻¹ = (g⁻¹,g·x)`. `action[g][x]` is
/// `g·x`. Units `(e,x)` first, then `(g,x)` for `g ≠ e` in lexicographic order.
pub fn transformation(
    group: &FiniteGroup,
    points: usize,
    action: &[Vec<usize>],
) -> Result<FiniteGroupoid, FamilyError> {
    const NAME: &str = "transformation";
    if action.len() != group.order() || action.iter().any(|row| row.len() != points) {
        return Err(invalid(NAME, format!("action table must be {}×{points}", group.order())));
    }
    if action.iter().flatten().any(|&y| y >= points) {
        return Err(invalid(NAME, "action sends a point out of range"));
    }
    let e = group.identity();
    for x in 0..points {
        if action[e][x] != x {
            return Err(invalid(NAME, format!("identity moves point {x}")));
        }
        for g in group.elements() {
            for h in group.elements() {
                if action[g][action[h][x]] != action[group.mul(g, h)][x] {
                    return Err(invalid(NAME, format!("not an action at ({g},{h},{x})")));
                }
            }
        }
    }
    let mut arrows: Vec<(usize, usize)> = (0..points).map(|x| (e, x)).collect();
    for g in group.elements().filter(|&g| g != e) {
        for x in 0..points {
            arrows.push((g, x));
        }
    }
    let id: HashMap<(usize, usize), Arrow> = arrows.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    FiniteGroupoid::from_fn(
        arrows.iter().map(|&(g, _)| g == e).collect(),
        arrows.iter().map(|&(_, x)| id[&(e, x)]).collect(),
        arrows.iter().map(|&(g, x)| id[&(e, action[g][x])]).collect(),
        arrows.iter().map(|&(g, x)| id[&(group.inv(g), action[g][x])]).collect(),
        |a, b| {
            let ((g, _), (h, x)) = (arrows[a], arrows[b]);
            id[&(group.mul(g, h), x)]
        },
    )
    .map_err(|err| invalid(NAME, err.to_string()))
}

pub fn disjoint_union(parts: &[FiniteGroupoid]) -> FiniteGroupoid {
    parts.iter().fold(FiniteGroupoid::empty(), |acc, p| acc.disjoint_union(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::find_isomorphism;
    use std::sync::Arc;

    #[test]
    fn basic_families() {
        let r2 = pair(2).unwrap();
        assert_eq!(r2.arrow_count(), 4);
        assert_eq!(r2.units(), &[0, 1]);
        // (1,2) has source (2,2) and range (1,1)
        assert_eq!((r2.src(2), r2.rng(2)), (1, 0));
        let z2 = cyclic_group(2).unwrap();
        assert_eq!((z2.arrow_count(), z2.units().len()), (2, 1));
        assert!(cyclic_group(0).is_err());
    }

    #[test]
    fn free_transitive_action_gives_pair_groupoid() {
        let z2 = FiniteGroup::cyclic(2);
        let g = transformation(&z2, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.arrow_count(), 4);
        assert!(find_isomorphism(&Arc::new(g), &Arc::new(pair(2).unwrap())).is_some());
    }

    #[test]
    fn bad_action_is_rejected() {
        let z2 = FiniteGroup::cyclic(2);
        assert!(transformation(&z2, 2, &[vec![0, 1], vec![1, 1]]).is_err());
        assert!(transformation(&z2, 2, &[vec![1, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec = FamilySpec::DisjointUnion(vec![FamilySpec::Pair(2), FamilySpec::CyclicGroup(2)]);
        let json = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(make_family(&spec).unwrap().arrow_count(), 6);
    }
}
