//! Groupoid homomorphisms between finite groupoids, and exhaustive search for them.

use serde::Serialize;
use std::sync::Arc;

use crate::groupoid::{Arrow, FiniteGroupoid, GroupoidError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomViolation {
    #[error("map has length {found}, domain has {expected} arrows")]
    Length { expected: usize, found: usize },
    #[error("arrow {arrow} maps to {image}, outside the codomain")]
    OutOfRange { arrow: Arrow, image: Arrow },
    #[error("unit {arrow} maps to non-unit {image}")]
    UnitToNonUnit { arrow: Arrow, image: Arrow },
    #[error("map does not commute with source/range at arrow {arrow}")]
    Endpoints { arrow: Arrow },
    #[error("map does not commute with inversion at arrow {arrow}")]
    Inverse { arrow: Arrow },
    #[error("map is not multiplicative on ({a},{b})")]
    Product { a: Arrow, b: Arrow },
    #[error("arrows {a} and {b} have the same image")]
    NotInjective { a: Arrow, b: Arrow },
    #[error("arrow {missed} of the codomain is not hit")]
    NotSurjective { missed: Arrow },
}

/// Check the homomorphism laws of an arrow map.
pub fn check_hom(dom: &FiniteGroupoid, cod: &FiniteGroupoid, map: &[Arrow]) -> Result<(), HomViolation> {
    if map.len() != dom.arrow_count() {
        return Err(HomViolation::Length { expected: dom.arrow_count(), found: map.len() });
    }
    for a in dom.arrows() {
        let image = map[a];
        if image >= cod.arrow_count() {
            return Err(HomViolation::OutOfRange { arrow: a, image });
        }
        if dom.is_unit(a) && !cod.is_unit(image) {
            return Err(HomViolation::UnitToNonUnit { arrow: a, image });
        }
    }
    for a in dom.arrows() {
        if map[dom.src(a)] != cod.src(map[a]) || map[dom.rng(a)] != cod.rng(map[a]) {
            return Err(HomViolation::Endpoints { arrow: a });
        }
        if map[dom.inv(a)] != cod.inv(map[a]) {
            return Err(HomViolation::Inverse { arrow: a });
        }
    }
    for a in dom.arrows() {
        for b in dom.arrows() {
            if let Some(ab) = dom.compose(a, b) {
                if cod.compose(map[a], map[b]) != Some(map[ab]) {
                    return Err(HomViolation::Product { a, b });
                }
            }
        }
    }
    Ok(())
}

/// A verified groupoid homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidHom {
    domain: Arc<FiniteGroupoid>,
    codomain: Arc<FiniteGroupoid>,
    map: Vec<Arrow>,
}

impl GroupoidHom {
    pub fn new(
        domain: Arc<FiniteGroupoid>,
        codomain: Arc<FiniteGroupoid>,
        map: Vec<Arrow>,
    ) -> Result<GroupoidHom, HomViolation> {
        check_hom(&domain, &codomain, &map)?;
        Ok(GroupoidHom { domain, codomain, map })
    }

    pub fn identity(g: Arc<FiniteGroupoid>) -> GroupoidHom {
        let map = g.arrows().collect();
        GroupoidHom { domain: g.clone(), codomain: g, map }
    }

    pub fn domain(&self) -> &Arc<FiniteGroupoid> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteGroupoid> {
        &self.codomain
    }

    pub fn map(&self) -> &[Arrow] {
        &self.map
    }

    pub fn apply(&self, a: Arrow) -> Arrow {
        self.map[a]
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.map.iter().enumerate().all(|(i, &a)| i == a)
    }

    pub fn injectivity_witness(&self) -> Option<(Arrow, Arrow)> {
        let mut seen = vec![usize::MAX; self.codomain.arrow_count()];
        for (a, &img) in self.map.iter().enumerate() {
            if seen[img] != usize::MAX {
                return Some((seen[img], a));
            }
            seen[img] = a;
        }
        None
    }

    pub fn is_injective_on_units(&self) -> bool {
        let mut images: Vec<Arrow> = self.domain.units().iter().map(|&x| self.map[x]).collect();
        images.sort_unstable();
        images.windows(2).all(|w| w[0] != w[1])
    }

    pub fn check_bijective(&self) -> Result<(), HomViolation> {
        if let Some((a, b)) = self.injectivity_witness() {
            return Err(HomViolation::NotInjective { a, b });
        }
        let mut hit = vec![false; self.codomain.arrow_count()];
        for &img in &self.map {
            hit[img] = true;
        }
        if let Some(missed) = hit.iter().position(|h| !h) {
            return Err(HomViolation::NotSurjective { missed });
        }
        Ok(())
    }

    /// Inverse of a bijective homomorphism.
    pub fn inverse(&self) -> Result<GroupoidHom, HomViolation> {
        self.check_bijective()?;
        let mut inv = vec![0; self.map.len()];
        for (a, &img) in self.map.iter().enumerate() {
            inv[img] = a;
        }
        Ok(GroupoidHom { domain: self.codomain.clone(), codomain: self.domain.clone(), map: inv })
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupoidHom) -> GroupoidHom {
        assert_eq!(first.codomain.arrow_count(), self.domain.arrow_count(), "composable homomorphisms");
        GroupoidHom {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            map: first.map.iter().map(|&a| self.map[a]).collect(),
        }
    }
}

/// Which homomorphisms [`search_homs`] should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomSearch {
    /// Every homomorphism.
    Any,
    /// Homomorphisms injective on the unit space.
    InjectiveOnUnits,
    /// Isomorphisms.
    Bijective,
}

/// All homomorphisms of the requested kind, in lexicographic order of their
/// arrow maps. Stops after `limit` results.
pub fn search_homs(dom: &FiniteGroupoid, cod: &FiniteGroupoid, kind: HomSearch, limit: usize) -> Vec<Vec<Arrow>> {
    if kind == HomSearch::Bijective
        && (dom.arrow_count() != cod.arrow_count() || dom.units().len() != cod.units().len())
    {
        return vec![];
    }
    // units first so that endpoint constraints prune non-units
    let order: Vec<Arrow> = dom.units().iter().copied().chain(dom.arrows().filter(|&a| !dom.is_unit(a))).collect();
    let mut search = Search {
        dom,
        cod,
        kind,
        order,
        map: vec![None; dom.arrow_count()],
        used: vec![false; cod.arrow_count()],
        out: Vec::new(),
        limit,
    };
    search.step(0);
    let mut out = search.out;
    out.sort();
    out
}

struct Search<'a> {
    dom: &'a FiniteGroupoid,
    cod: &'a FiniteGroupoid,
    kind: HomSearch,
    order: Vec<Arrow>,
    map: Vec<Option<Arrow>>,
    used: Vec<bool>,
    out: Vec<Vec<Arrow>>,
    limit: usize,
}

impl Search<'_> {
    fn step(&mut self, depth: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            let map: Vec<Arrow> = self.map.iter().map(|m| m.expect("complete")).collect();
            if check_hom(self.dom, self.cod, &map).is_ok() {
                self.out.push(map);
            }
            return;
        }
        let a = self.order[depth];
        for b in self.cod.arrows() {
            if !self.admissible(a, b) {
                continue;
            }
            self.map[a] = Some(b);
            let mark = self.marks_usage(a);
            if mark {
                self.used[b] = true;
            }
            if self.consistent(a) {
                self.step(depth + 1);
            }
            if mark {
                self.used[b] = false;
            }
            self.map[a] = None;
        }
    }

    fn marks_usage(&self, a: Arrow) -> bool {
        match self.kind {
            HomSearch::Any => false,
            HomSearch::InjectiveOnUnits => self.dom.is_unit(a),
            HomSearch::Bijective => true,
        }
    }

    fn admissible(&self, a: Arrow, b: Arrow) -> bool {
        let (dom, cod) = (self.dom, self.cod);
        if dom.is_unit(a) {
            if !cod.is_unit(b) {
                return false;
            }
        } else if self.kind == HomSearch::Bijective && cod.is_unit(b) {
            return false;
        }
        if self.marks_usage(a) && self.used[b] {
            return false;
        }
        if let Some(s) = self.map[dom.src(a)] {
            if cod.src(b) != s {
                return false;
            }
        }
        if let Some(r) = self.map[dom.rng(a)] {
            if cod.rng(b) != r {
                return false;
            }
        }
        if let Some(i) = self.map[dom.inv(a)] {
            if cod.inv(b) != i {
                return false;
            }
        }
        true
    }

    /// Multiplicativity on every fully assigned triple involving `a`.
    fn consistent(&self, a: Arrow) -> bool {
        let (dom, cod) = (self.dom, self.cod);
        let m = |x: Arrow| self.map[x];
        for x in dom.arrows() {
            let Some(mx) = m(x) else { continue };
            if let Some(ax) = dom.compose(a, x) {
                if let Some(max) = m(ax) {
                    if cod.compose(m(a).unwrap(), mx) != Some(max) {
                        return false;
                    }
                }
            }
            if let Some(xa) = dom.compose(x, a) {
                if let Some(mxa) = m(xa) {
                    if cod.compose(mx, m(a).unwrap()) != Some(mxa) {
                        return false;
                    }
                }
            }
            // a as a product x·y
            if dom.rng(x) == dom.rng(a) {
                for y in dom.arrows() {
                    if dom.compose(x, y) == Some(a) {
                        if let Some(my) = m(y) {
                            if cod.compose(mx, my) != m(a) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// All automorphisms of `g`, in lexicographic order of arrow maps.
pub fn enumerate_automorphisms(g: &Arc<FiniteGroupoid>, cap: usize) -> Result<Vec<GroupoidHom>, GroupoidError> {
    g.check_cap(cap)?;
    Ok(search_homs(g, g, HomSearch::Bijective, usize::MAX)
        .into_iter()
        .map(|map| GroupoidHom { domain: g.clone(), codomain: g.clone(), map })
        .collect())
}

/// Some isomorphism `g → h`, if one exists.
pub fn find_isomorphism(g: &Arc<FiniteGroupoid>, h: &Arc<FiniteGroupoid>) -> Option<GroupoidHom> {
    search_homs(g, h, HomSearch::Bijective, 1).pop().map(|map| GroupoidHom {
        domain: g.clone(),
        codomain: h.clone(),
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn automorphisms_of_pair_groupoids() {
        let r2 = Arc::new(families::pair(2).unwrap());
        let auts = enumerate_automorphisms(&r2, 16).unwrap();
        assert_eq!(auts.len(), 2);
        assert!(auts[0].is_identity());
        assert_eq!(auts[1].map(), &[1, 0, 3, 2]);
        let r3 = Arc::new(families::pair(3).unwrap());
        assert_eq!(enumerate_automorphisms(&r3, 16).unwrap().len(), 6);
    }

    #[test]
    fn automorphisms_of_cyclic_groups() {
        // Aut(Z/n) has φ(n) elements
        for (n, expected) in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 4)] {
            let g = Arc::new(families::cyclic_group(n).unwrap());
            assert_eq!(enumerate_automorphisms(&g, 16).unwrap().len(), expected, "Z/{n}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = Arc::new(families::pair(3).unwrap());
        assert_eq!(enumerate_automorphisms(&g, 4).unwrap_err(), GroupoidError::CapExceeded { arrows: 9, cap: 4 });
    }

    #[test]
    fn hom_checks_reject_bad_maps() {
        let r2 = Arc::new(families::pair(2).unwrap());
        assert!(matches!(
            GroupoidHom::new(r2.clone(), r2.clone(), vec![0, 1, 3, 2]),
            Err(HomViolation::Endpoints { .. })
        ));
        assert!(matches!(
            GroupoidHom::new(r2.clone(), r2.clone(), vec![2, 1, 3, 2]),
            Err(HomViolation::UnitToNonUnit { .. })
        ));
        let h = GroupoidHom::new(r2.clone(), r2.clone(), vec![1, 0, 3, 2]).unwrap();
        assert!(h.after(&h).is_identity());
        assert_eq!(h.inverse().unwrap(), h);
    }

    #[test]
    fn isomorphism_search() {
        let r2 = Arc::new(families::pair(2).unwrap());
        let z2 = Arc::new(families::cyclic_group(2).unwrap());
        assert!(find_isomorphism(&r2, &r2).is_some());
        assert!(find_isomorphism(&r2, &z2).is_none());
    }
}
