//! Slices: closed diagonal bimodules of normalizers, and the map `Ψ` from
//! bisections to slices.

use num_complex::Complex64;
use std::sync::Arc;

use crate::algebra::AlgebraElement;
use crate::groupoid::{Arrow, FiniteGroupoid};
use crate::semigroup::{Bisection, SemigroupError};

/// Vectors with residual norm below this are dropped during orthonormalization,
/// and subspaces agree when mutual projection residuals stay below it.
pub const SLICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SliceError {
    #[error("slices live on different groupoids")]
    GroupoidMismatch,
    #[error("groupoid is not effective, so slices need not come from bisections")]
    NotEffective,
    #[error("span is not a diagonal bimodule: δ_{unit} times basis vector {basis} leaves it")]
    NotBimodule { basis: usize, unit: Arrow },
    #[error("span contains a non-normalizer: basis pair ({i},{j}) at unit {unit}")]
    NotNormalizer { i: usize, j: usize, unit: Arrow },
    #[error("support is not a bisection: {0}")]
    NotBisection(SemigroupError),
    #[error("slice differs from the span of deltas over its support")]
    SupportMismatch,
}

/// A subspace of `C*_r(G)`, stored by an orthonormal basis of coefficient vectors.
#[derive(Debug, Clone)]
pub struct Slice {
    groupoid: Arc<FiniteGroupoid>,
    basis: Vec<AlgebraElement>,
}

fn inner(a: &AlgebraElement, b: &AlgebraElement) -> Complex64 {
    a.coeff().iter().zip(b.coeff()).map(|(x, y)| x.conj() * y).sum()
}

impl Slice {
    /// The span of `vectors`, orthonormalized by modified Gram-Schmidt.
    pub fn span(groupoid: Arc<FiniteGroupoid>, vectors: impl IntoIterator<Item = AlgebraElement>) -> Slice {
        let mut basis: Vec<AlgebraElement> = Vec::new();
        for v in vectors {
            let mut r = v;
            // two passes keep the basis orthonormal to working precision
            for _ in 0..2 {
                for b in &basis {
                    r = r.add(&b.scale(-inner(b, &r))).expect("same groupoid");
                }
            }
            let norm = r.l2_norm();
            if norm > SLICE_TOL {
                basis.push(r.scale(Complex64::new(1.0 / norm, 0.0)));
            }
        }
        Slice { groupoid, basis }
    }

    pub fn zero(groupoid: Arc<FiniteGroupoid>) -> Slice {
        Slice { groupoid, basis: Vec::new() }
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Norm of the component of `v` orthogonal to the slice.
    pub fn residual(&self, v: &AlgebraElement) -> f64 {
        let mut r = v.clone();
        for b in &self.basis {
            r = r.add(&b.scale(-inner(b, &r))).expect("same groupoid");
        }
        r.l2_norm()
    }

    pub fn contains(&self, v: &AlgebraElement) -> bool {
        self.residual(v) <= SLICE_TOL * v.l2_norm().max(1.0)
    }

    /// Arrows in the support of some basis vector.
    pub fn support(&self) -> Vec<Arrow> {
        let mut s: Vec<Arrow> = self.basis.iter().flat_map(|b| b.support(SLICE_TOL)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Check the slice axioms: invariance under multiplication by the diagonal
    /// on both sides, and that every element of the span is a normalizer.
    ///
    /// By polarization the span consists of normalizers iff all cross terms
    /// `b_i δ_x b_j*` and `b_i* δ_x b_j` are diagonal.
    pub fn verify(&self) -> Result<(), SliceError> {
        let g = &self.groupoid;
        let deltas: Vec<(Arrow, AlgebraElement)> =
            g.units().iter().map(|&x| (x, AlgebraElement::delta(g.clone(), x))).collect();
        for (i, b) in self.basis.iter().enumerate() {
            for (x, d) in &deltas {
                let left = d.convolve(b).expect("same groupoid");
                let right = b.convolve(d).expect("same groupoid");
                if !self.contains(&left) || !self.contains(&right) {
                    return Err(SliceError::NotBimodule { basis: i, unit: *x });
                }
            }
        }
        let stars: Vec<AlgebraElement> = self.basis.iter().map(|b| b.star()).collect();
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                for (x, d) in &deltas {
                    let a = self.basis[i].convolve(d).and_then(|h| h.convolve(&stars[j])).expect("same groupoid");
                    let b = stars[i].convolve(d).and_then(|h| h.convolve(&self.basis[j])).expect("same groupoid");
                    if !a.is_diagonal(SLICE_TOL) || !b.is_diagonal(SLICE_TOL) {
                        return Err(SliceError::NotNormalizer { i, j, unit: *x });
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Ψ(U) = span{δ_α : α ∈ U}`.
pub fn slice_of_bisection(u: &Bisection) -> Slice {
    let g = u.groupoid().clone();
    Slice::span(g.clone(), u.arrows().iter().map(|&a| AlgebraElement::delta(g.clone(), a)))
}

/// The span of all products `m * n`.
pub fn slice_product(m: &Slice, n: &Slice) -> Result<Slice, SliceError> {
    if !same_groupoid(&m.groupoid, &n.groupoid) {
        return Err(SliceError::GroupoidMismatch);
    }
    let products: Vec<AlgebraElement> =
        m.basis.iter().flat_map(|a| n.basis.iter().map(move |b| a.convolve(b).expect("same groupoid"))).collect();
    Ok(Slice::span(m.groupoid.clone(), products))
}

/// Equality of subspaces via mutual projection residuals.
pub fn same_subspace(m: &Slice, n: &Slice) -> bool {
    same_groupoid(&m.groupoid, &n.groupoid)
        && m.dim() == n.dim()
        && m.basis.iter().all(|b| n.residual(b) <= SLICE_TOL)
        && n.basis.iter().all(|b| m.residual(b) <= SLICE_TOL)
}

/// The inverse of `Ψ` on an effective groupoid: the union of open supports.
pub fn slice_to_bisection(m: &Slice) -> Result<Bisection, SliceError> {
    if !m.groupoid.is_effective() {
        return Err(SliceError::NotEffective);
    }
    m.verify()?;
    let u = Bisection::new(m.groupoid.clone(), m.support()).map_err(SliceError::NotBisection)?;
    if !same_subspace(&slice_of_bisection(&u), m) {
        return Err(SliceError::SupportMismatch);
    }
    Ok(u)
}

fn same_groupoid(a: &Arc<FiniteGroupoid>, b: &Arc<FiniteGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn r2() -> Arc<FiniteGroupoid> {
        Arc::new(families::pair(2).unwrap())
    }

    fn bis(g: &Arc<FiniteGroupoid>, arrows: &[Arrow]) -> Bisection {
        Bisection::new(g.clone(), arrows.iter().copied()).unwrap()
    }

    #[test]
    fn empty_bisection_gives_zero_slice() {
        let g = r2();
        assert_eq!(slice_of_bisection(&bis(&g, &[])).dim(), 0);
    }

    #[test]
    fn product_of_off_diagonal_slices() {
        let g = r2();
        let p = slice_product(&slice_of_bisection(&bis(&g, &[2])), &slice_of_bisection(&bis(&g, &[3]))).unwrap();
        assert!(same_subspace(&p, &slice_of_bisection(&bis(&g, &[0]))));
    }

    #[test]
    fn support_recovery() {
        let g = r2();
        let m = Slice::span(g.clone(), [AlgebraElement::delta(g.clone(), 2)]);
        assert_eq!(slice_to_bisection(&m).unwrap().arrows(), &[2]);
        let swap = slice_of_bisection(&bis(&g, &[2, 3]));
        assert_eq!(slice_to_bisection(&swap).unwrap().arrows(), &[2, 3]);
    }

    #[test]
    fn non_slices_are_rejected() {
        let g = r2();
        let c = |re| Complex64::new(re, 0.0);
        // a single vector δ_(1,2) + δ_(2,1) spans no diagonal bimodule
        let v = AlgebraElement::new(g.clone(), vec![c(0.0), c(0.0), c(1.0), c(1.0)]).unwrap();
        let m = Slice::span(g.clone(), [v]);
        assert!(matches!(slice_to_bisection(&m), Err(SliceError::NotBimodule { .. })));
        // span{δ_(1,1), δ_(1,2)} is a bimodule but holds non-normalizers
        let m = Slice::span(g.clone(), [AlgebraElement::delta(g.clone(), 0), AlgebraElement::delta(g.clone(), 2)]);
        assert!(matches!(m.verify(), Err(SliceError::NotNormalizer { .. })));
    }

    #[test]
    fn non_effective_groupoid_is_refused() {
        let z2 = Arc::new(families::cyclic_group(2).unwrap());
        let m = slice_of_bisection(&bis(&z2, &[1]));
        assert_eq!(slice_to_bisection(&m).unwrap_err(), SliceError::NotEffective);
    }
}
