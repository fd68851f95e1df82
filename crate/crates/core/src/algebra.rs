//! The convolution algebra `C_c(G) = C*_r(G)` of a finite groupoid.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;

use crate::groupoid::{Arrow, FiniteGroupoid, GroupoidError};

/// Tolerance on norm comparisons.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("element has {found} coefficients, groupoid has {expected} arrows")]
    Length { expected: usize, found: usize },
    #[error("coefficient at arrow {0} is not finite")]
    NonFinite(Arrow),
    #[error("elements live on different groupoids")]
    GroupoidMismatch,
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

/// A function on the arrows, i.e. an element of `C*_r(G)` for finite `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    groupoid: Arc<FiniteGroupoid>,
    coeff: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn new(groupoid: Arc<FiniteGroupoid>, coeff: Vec<Complex64>) -> Result<AlgebraElement, AlgebraError> {
        if coeff.len() != groupoid.arrow_count() {
            return Err(AlgebraError::Length { expected: groupoid.arrow_count(), found: coeff.len() });
        }
        if let Some(a) = coeff.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AlgebraError::NonFinite(a));
        }
        Ok(AlgebraElement { groupoid, coeff })
    }

    pub fn zero(groupoid: Arc<FiniteGroupoid>) -> AlgebraElement {
        let coeff = vec![Complex64::new(0.0, 0.0); groupoid.arrow_count()];
        AlgebraElement { groupoid, coeff }
    }

    /// `δ_α`.
    pub fn delta(groupoid: Arc<FiniteGroupoid>, a: Arrow) -> AlgebraElement {
        let mut f = AlgebraElement::zero(groupoid);
        f.coeff[a] = Complex64::new(1.0, 0.0);
        f
    }

    /// Indicator of the unit space, the unit of the algebra.
    pub fn unit_indicator(groupoid: Arc<FiniteGroupoid>) -> AlgebraElement {
        let mut f = AlgebraElement::zero(groupoid.clone());
        for &x in groupoid.units() {
            f.coeff[x] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn coeff(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn get(&self, a: Arrow) -> Complex64 {
        self.coeff[a]
    }

    fn same_groupoid(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.groupoid, &other.groupoid) || self.groupoid == other.groupoid {
            Ok(())
        } else {
            Err(AlgebraError::GroupoidMismatch)
        }
    }

    /// `(f*g)(γ) = Σ_{αβ=γ} f(α) g(β)`.
    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_groupoid(other)?;
        let g = &self.groupoid;
        let mut out = AlgebraElement::zero(g.clone());
        for a in g.arrows().filter(|&a| self.coeff[a] != Complex64::default()) {
            for b in g.arrows_to(g.src(a)) {
                let ab = g.compose(a, b).expect("composable");
                out.coeff[ab] += self.coeff[a] * other.coeff[b];
            }
        }
        Ok(out)
    }

    /// `f*(γ) = conj(f(γ⁻¹))`.
    pub fn star(&self) -> AlgebraElement {
        let g = &self.groupoid;
        let coeff = g.arrows().map(|a| self.coeff[g.inv(a)].conj()).collect();
        AlgebraElement { groupoid: g.clone(), coeff }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_groupoid(other)?;
        let coeff = self.coeff.iter().zip(&other.coeff).map(|(a, b)| a + b).collect();
        Ok(AlgebraElement { groupoid: self.groupoid.clone(), coeff })
    }

    pub fn scale(&self, z: Complex64) -> AlgebraElement {
        AlgebraElement { groupoid: self.groupoid.clone(), coeff: self.coeff.iter().map(|c| c * z).collect() }
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn l2_norm(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Arrows with coefficient modulus above `tol` (the open support when `tol = 0`).
    pub fn support(&self, tol: f64) -> Vec<Arrow> {
        self.groupoid.arrows().filter(|&a| self.coeff[a].norm() > tol).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.groupoid.arrows().all(|a| self.groupoid.is_unit(a) || self.coeff[a].norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &AlgebraElement) -> f64 {
        self.coeff.iter().zip(&other.coeff).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn reduced_norm(&self) -> f64 {
        reduced_norm(self)
    }
}

/// `λ_x` on `ℓ²(G_x)`, with basis `G_x` in ascending arrow order.
#[derive(Debug, Clone)]
pub struct LeftRegular {
    groupoid: Arc<FiniteGroupoid>,
    unit: Arrow,
    basis: Vec<Arrow>,
}

pub fn left_regular(g: &Arc<FiniteGroupoid>, x: Arrow) -> Result<LeftRegular, AlgebraError> {
    if x >= g.arrow_count() || !g.is_unit(x) {
        return Err(GroupoidError::NotAUnit(x).into());
    }
    Ok(LeftRegular { groupoid: g.clone(), unit: x, basis: g.arrows_from(x) })
}

impl LeftRegular {
    pub fn unit(&self) -> Arrow {
        self.unit
    }

    pub fn basis(&self) -> &[Arrow] {
        &self.basis
    }

    /// Matrix of `λ_x(f)`: `λ_x(f) δ_α = Σ_{src(β) = rng(α)} f(β) δ_{βα}`.
    pub fn rep(&self, f: &AlgebraElement) -> DMatrix<Complex64> {
        let g = &self.groupoid;
        let k = self.basis.len();
        let pos = |a: Arrow| self.basis.binary_search(&a).expect("arrow in G_x");
        let mut m = DMatrix::zeros(k, k);
        for (col, &a) in self.basis.iter().enumerate() {
            for b in g.arrows_from(g.rng(a)) {
                let ba = g.compose(b, a).expect("composable");
                m[(pos(ba), col)] += f.coeff[b];
            }
        }
        m
    }
}

/// Operator norm, the largest singular value.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `‖f‖ = max_x ‖λ_x(f)‖`.
pub fn reduced_norm(f: &AlgebraElement) -> f64 {
    let g = &f.groupoid;
    g.units().iter().map(|&x| operator_norm(&left_regular(g, x).expect("unit").rep(f))).fold(0.0, f64::max)
}

/// Whether `f δ_x f*` and `f* δ_x f` are diagonal for every unit `x`.
pub fn is_normalizer(f: &AlgebraElement) -> bool {
    normalizer_witness(f).is_none()
}

/// A unit `x` for which `f δ_x f*` or `f* δ_x f` leaves the diagonal.
pub fn normalizer_witness(f: &AlgebraElement) -> Option<Arrow> {
    let g = &f.groupoid;
    let fs = f.star();
    let tol = NORM_TOL * f.sup_norm().powi(2).max(1.0);
    g.units().iter().copied().find(|&x| {
        let d = AlgebraElement::delta(g.clone(), x);
        let left = f.convolve(&d).and_then(|h| h.convolve(&fs)).expect("same groupoid");
        let right = fs.convolve(&d).and_then(|h| h.convolve(f)).expect("same groupoid");
        !(left.is_diagonal(tol) && right.is_diagonal(tol))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn r2() -> Arc<FiniteGroupoid> {
        Arc::new(families::pair(2).unwrap())
    }

    #[test]
    fn delta_products() {
        let g = r2();
        let d = |a| AlgebraElement::delta(g.clone(), a);
        // (1,2)(2,1) = (1,1)
        assert_eq!(d(2).convolve(&d(3)).unwrap(), d(0));
        // (1,2)(1,2) is not composable
        assert_eq!(d(2).convolve(&d(2)).unwrap(), AlgebraElement::zero(g.clone()));
    }

    #[test]
    fn all_ones_squares_to_twice_itself() {
        let g = r2();
        let ones = AlgebraElement::new(g.clone(), vec![c(1.0); 4]).unwrap();
        assert_eq!(ones.convolve(&ones).unwrap(), ones.scale(c(2.0)));
        assert!((ones.reduced_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn left_regular_matrices() {
        let g = r2();
        let lr = left_regular(&g, 0).unwrap();
        assert_eq!(lr.basis(), &[0, 3]);
        let m = lr.rep(&AlgebraElement::delta(g.clone(), 3));
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]);
        assert_eq!(m, expected);
        assert_eq!(lr.rep(&AlgebraElement::unit_indicator(g.clone())), DMatrix::identity(2, 2));

        let z2 = Arc::new(families::cyclic_group(2).unwrap());
        let m = left_regular(&z2, 0).unwrap().rep(&AlgebraElement::delta(z2.clone(), 1));
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
        assert!(left_regular(&g, 2).is_err());
    }

    #[test]
    fn norms() {
        let g = r2();
        assert!((AlgebraElement::unit_indicator(g.clone()).reduced_norm() - 1.0).abs() < 1e-12);
        let swap = AlgebraElement::new(g.clone(), vec![c(0.0), c(0.0), c(1.0), c(1.0)]).unwrap();
        assert!((swap.reduced_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalizers() {
        let g = r2();
        let f = AlgebraElement::new(g.clone(), vec![c(1.0), c(0.0), c(1.0), c(0.0)]).unwrap();
        assert!(!is_normalizer(&f));
        let swap = AlgebraElement::new(g.clone(), vec![c(0.0), c(0.0), c(2.0), c(-1.0)]).unwrap();
        assert!(is_normalizer(&swap));
        let diag = AlgebraElement::new(g.clone(), vec![c(3.0), c(-1.0), c(0.0), c(0.0)]).unwrap();
        assert!(is_normalizer(&diag));
    }

    #[test]
    fn constructor_checks() {
        let g = r2();
        assert!(matches!(AlgebraElement::new(g.clone(), vec![c(0.0); 3]), Err(AlgebraError::Length { .. })));
        assert_eq!(
            AlgebraElement::new(g.clone(), vec![c(0.0), c(f64::NAN), c(0.0), c(0.0)]),
            Err(AlgebraError::NonFinite(1))
        );
        let other = Arc::new(families::cyclic_group(4).unwrap());
        let f = AlgebraElement::zero(other);
        assert_eq!(f.convolve(&AlgebraElement::zero(g)), Err(AlgebraError::GroupoidMismatch));
    }
}
