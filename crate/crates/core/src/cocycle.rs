//! Circle-valued 1-cocycles, i.e. groupoid homomorphisms into the circle group.

use std::sync::Arc;

use crate::groupoid::{Arrow, FiniteGroupoid, GroupoidError};
use crate::hom::GroupoidHom;
use crate::phase::Phase;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CocycleError {
    #[error("cocycle has {found} values, groupoid has {expected} arrows")]
    Length { expected: usize, found: usize },
    #[error("cocycle is not 1 on unit {0}")]
    NontrivialOnUnit(Arrow),
    #[error("cocycle is not multiplicative on ({a},{b})")]
    NotMultiplicative { a: Arrow, b: Arrow },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    groupoid: Arc<FiniteGroupoid>,
    values: Vec<Phase>,
}

impl Cocycle {
    pub fn new(groupoid: Arc<FiniteGroupoid>, values: Vec<Phase>) -> Result<Cocycle, CocycleError> {
        if values.len() != groupoid.arrow_count() {
            return Err(CocycleError::Length { expected: groupoid.arrow_count(), found: values.len() });
        }
        if let Some(&x) = groupoid.units().iter().find(|&&x| !values[x].is_one()) {
            return Err(CocycleError::NontrivialOnUnit(x));
        }
        for a in groupoid.arrows() {
            for b in groupoid.arrows() {
                if let Some(ab) = groupoid.compose(a, b) {
                    if values[ab] != values[a] * values[b] {
                        return Err(CocycleError::NotMultiplicative { a, b });
                    }
                }
            }
        }
        Ok(Cocycle { groupoid, values })
    }

    pub fn trivial(groupoid: Arc<FiniteGroupoid>) -> Cocycle {
        let values = vec![Phase::ONE; groupoid.arrow_count()];
        Cocycle { groupoid, values }
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn values(&self) -> &[Phase] {
        &self.values
    }

    pub fn value(&self, a: Arrow) -> Phase {
        self.values[a]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|p| p.is_one())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Cocycle) -> Cocycle {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| *a * *b).collect();
        Cocycle { groupoid: self.groupoid.clone(), values }
    }

    /// Pointwise inverse.
    pub fn inverse(&self) -> Cocycle {
        Cocycle { groupoid: self.groupoid.clone(), values: self.values.iter().map(|p| p.conj()).collect() }
    }

    /// `α ↦ c(Φ⁻¹(α))` for an automorphism `Φ` of the underlying groupoid.
    pub fn pushforward(&self, aut: &GroupoidHom) -> Cocycle {
        let inv = aut.inverse().expect("automorphism");
        self.pullback(&inv)
    }

    /// `α ↦ c(Φ(α))`.
    pub fn pullback(&self, aut: &GroupoidHom) -> Cocycle {
        let values = aut.map().iter().map(|&a| self.values[a]).collect();
        Cocycle { groupoid: aut.domain().clone(), values }
    }

    pub fn approx_eq(&self, other: &Cocycle, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.distance(*b) <= tol)
    }
}

/// All `μ_N`-valued cocycles, in lexicographic order of their exponent vectors.
pub fn enumerate_cocycles(g: &Arc<FiniteGroupoid>, order: u32, cap: usize) -> Result<Vec<Cocycle>, GroupoidError> {
    g.check_cap(cap)?;
    assert!(order >= 1, "root of unity order must be positive");
    let n = g.arrow_count();
    let mut exps: Vec<Option<u32>> = vec![None; n];
    for &x in g.units() {
        exps[x] = Some(0);
    }
    let mut found = Vec::new();
    extend(g, order, &mut exps, &mut found);
    Ok(found
        .into_iter()
        .map(|e| {
            let values = e.iter().map(|&k| Phase::root_of_unity(k as u64, order).expect("order >= 1")).collect();
            Cocycle::new(g.clone(), values).expect("enumerated values form a cocycle")
        })
        .collect())
}

fn extend(g: &FiniteGroupoid, order: u32, exps: &mut [Option<u32>], found: &mut Vec<Vec<u32>>) {
    let Some(free) = exps.iter().position(|e| e.is_none()) else {
        found.push(exps.iter().map(|e| e.unwrap()).collect());
        return;
    };
    for k in 0..order {
        let mut trial = exps.to_vec();
        trial[free] = Some(k);
        if propagate(g, order, &mut trial) {
            extend(g, order, &mut trial, found);
        }
    }
}

/// Close the partial assignment under inverses and products; false on conflict.
fn propagate(g: &FiniteGroupoid, order: u32, exps: &mut [Option<u32>]) -> bool {
    let mut changed = true;
    let set = |exps: &mut [Option<u32>], a: Arrow, v: u32, changed: &mut bool| -> bool {
        match exps[a] {
            Some(w) => w == v,
            None => {
                exps[a] = Some(v);
                *changed = true;
                true
            }
        }
    };
    while changed {
        changed = false;
        for a in g.arrows() {
            let Some(ea) = exps[a] else { continue };
            if !set(exps, g.inv(a), (order - ea) % order, &mut changed) {
                return false;
            }
            for b in g.arrows() {
                let Some(eb) = exps[b] else { continue };
                if let Some(ab) = g.compose(a, b) {
                    if !set(exps, ab, (ea + eb) % order, &mut changed) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn pair_groupoid_sign_cocycles() {
        let r2 = Arc::new(families::pair(2).unwrap());
        let cs = enumerate_cocycles(&r2, 2, 16).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs[0].is_trivial());
        let minus = Phase::root_of_unity(1, 2).unwrap();
        assert_eq!(cs[1].values(), &[Phase::ONE, Phase::ONE, minus, minus]);
    }

    #[test]
    fn point_has_only_trivial_cocycle() {
        let pt = Arc::new(families::pair(1).unwrap());
        for n in 1..6 {
            assert_eq!(enumerate_cocycles(&pt, n, 16).unwrap().len(), 1);
        }
    }

    #[test]
    fn cyclic_group_characters() {
        // homs Z/4 → μ_N number gcd(4, N)
        let z4 = Arc::new(families::cyclic_group(4).unwrap());
        for (n, expected) in [(1, 1), (2, 2), (3, 1), (4, 4), (6, 2)] {
            assert_eq!(enumerate_cocycles(&z4, n, 16).unwrap().len(), expected);
        }
    }

    #[test]
    fn constructor_rejects_non_cocycles() {
        let r2 = Arc::new(families::pair(2).unwrap());
        let minus = Phase::root_of_unity(1, 2).unwrap();
        assert_eq!(
            Cocycle::new(r2.clone(), vec![minus, Phase::ONE, Phase::ONE, Phase::ONE]),
            Err(CocycleError::NontrivialOnUnit(0))
        );
        assert!(matches!(
            Cocycle::new(r2, vec![Phase::ONE, Phase::ONE, minus, Phase::ONE]),
            Err(CocycleError::NotMultiplicative { .. })
        ));
    }
}
