//! Diagonal-compatible *-homomorphisms `C*_r(G) → C*_r(H)` and their
//! decomposition data `(F, Φ, c)`.
//!
//! A homomorphism is a dense matrix whose column `γ` is the image of `δ_γ`.
//! [`build_phi`] turns data into a matrix and [`decompose`] recovers the data;
//! the two are mutually inverse whenever `H` is effective.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::AlgebraElement;
use crate::cocycle::Cocycle;
use crate::groupoid::{Arrow, FiniteGroupoid, GroupoidError, Quotient, UnitSet};
use crate::hom::GroupoidHom;
use crate::phase::Phase;
use crate::semigroup::{canonical_iso, enumerate_bisections, induced_germ_hom, SemigroupAction, SemigroupError};

/// Tolerance for the *-homomorphism and diagonal checks, scaled by the
/// largest squared entry when that exceeds one.
pub const HOM_TOL: f64 = 1e-9;

/// Entrywise tolerance for `build_phi(decompose(φ)) = φ`.
pub const ROUNDTRIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecompositionError {
    #[error("matrix must be {rows}×{cols}, found {found_rows}×{found_cols}")]
    Shape { rows: usize, cols: usize, found_rows: usize, found_cols: usize },
    #[error("entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("target groupoid is not effective")]
    TargetNotEffective,
    #[error("check `{check}` failed: {witness}")]
    Hypothesis { check: &'static str, witness: HomWitness },
    #[error("map is not surjective: rank {rank}, target dimension {needed}")]
    NotSurjective { rank: usize, needed: usize },
    #[error("invalid decomposition data: {0}")]
    InvalidData(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Cap(#[from] GroupoidError),
}

impl DecompositionError {
    /// 2 for refused hypotheses, 3 for inconsistencies, 1 for malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            DecompositionError::Shape { .. } | DecompositionError::NonFinite { .. } => 1,
            DecompositionError::Inconsistent(_) => 3,
            _ => 2,
        }
    }
}

fn inconsistent(e: impl std::fmt::Display) -> DecompositionError {
    DecompositionError::Inconsistent(e.to_string())
}

/// A linear map `C*_r(G) → C*_r(H)` in the delta bases.
#[derive(Debug, Clone, PartialEq)]
pub struct HomMatrix {
    source: Arc<FiniteGroupoid>,
    target: Arc<FiniteGroupoid>,
    entries: DMatrix<Complex64>,
}

impl HomMatrix {
    pub fn new(
        source: Arc<FiniteGroupoid>,
        target: Arc<FiniteGroupoid>,
        entries: DMatrix<Complex64>,
    ) -> Result<HomMatrix, DecompositionError> {
        let (rows, cols) = (target.arrow_count(), source.arrow_count());
        if entries.shape() != (rows, cols) {
            let (found_rows, found_cols) = entries.shape();
            return Err(DecompositionError::Shape { rows, cols, found_rows, found_cols });
        }
        for col in 0..cols {
            for row in 0..rows {
                let z = entries[(row, col)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(DecompositionError::NonFinite { row, col });
                }
            }
        }
        Ok(HomMatrix { source, target, entries })
    }

    pub fn identity(g: Arc<FiniteGroupoid>) -> HomMatrix {
        let n = g.arrow_count();
        HomMatrix { source: g.clone(), target: g, entries: DMatrix::identity(n, n) }
    }

    pub fn source(&self) -> &Arc<FiniteGroupoid> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroupoid> {
        &self.target
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `φ(δ_γ)`.
    pub fn image(&self, gamma: Arrow) -> AlgebraElement {
        let coeff = self.entries.column(gamma).iter().copied().collect();
        AlgebraElement::new(self.target.clone(), coeff).expect("finite entries")
    }

    pub fn apply(&self, f: &AlgebraElement) -> AlgebraElement {
        let v = nalgebra::DVector::from_column_slice(f.coeff());
        let coeff = (&self.entries * v).iter().copied().collect();
        AlgebraElement::new(self.target.clone(), coeff).expect("finite entries")
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &HomMatrix) -> Result<HomMatrix, DecompositionError> {
        if *first.target != *self.source {
            return Err(DecompositionError::InvalidData("maps are not composable".into()));
        }
        HomMatrix::new(first.source.clone(), self.target.clone(), &self.entries * &first.entries)
    }

    pub fn max_abs_diff(&self, other: &HomMatrix) -> f64 {
        if self.entries.shape() != other.entries.shape() {
            return f64::INFINITY;
        }
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Numerical rank, counting singular values above `HOM_TOL` relative to the largest.
    pub fn rank(&self) -> usize {
        rank(&self.entries)
    }

    fn tol(&self) -> f64 {
        let m = self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        HOM_TOL * m.powi(2).max(1.0)
    }
}

fn rank(m: &DMatrix<Complex64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > HOM_TOL * top.max(1.0)).count()
}

/// Why a check in [`validate_hom`] failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomWitness {
    /// `φ(δ_a * δ_b) ≠ φ(δ_a) * φ(δ_b)`.
    Product { a: Arrow, b: Arrow, residual: f64 },
    /// `φ(δ_a*) ≠ φ(δ_a)*`.
    Star { a: Arrow, residual: f64 },
    /// The image of the unit `unit` has weight on the non-unit arrow `arrow`.
    OffDiagonal { unit: Arrow, arrow: Arrow },
    /// The image of the diagonal spans `rank` dimensions over a support of larger size.
    NotIdeal { support: Vec<Arrow>, rank: usize },
}

impl std::fmt::Display for HomWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use crate::report::sig12;
        match self {
            HomWitness::Product { a, b, residual } => {
                write!(f, "φ(δ_{a}·δ_{b}) differs from φ(δ_{a})·φ(δ_{b}) by {}", sig12(*residual))
            }
            HomWitness::Star { a, residual } => write!(f, "φ(δ_{a}*) differs from φ(δ_{a})* by {}", sig12(*residual)),
            HomWitness::OffDiagonal { unit, arrow } => write!(f, "φ(δ_{unit}) has weight on non-unit arrow {arrow}"),
            HomWitness::NotIdeal { support, rank } => {
                write!(f, "image of the diagonal has rank {rank} over support {support:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomCheck {
    pub pass: bool,
    pub witness: Option<HomWitness>,
}

impl HomCheck {
    fn from_witness(witness: Option<HomWitness>) -> HomCheck {
        HomCheck { pass: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomReport {
    pub is_star_hom: HomCheck,
    pub diagonal_into_diagonal: HomCheck,
    pub image_diag_is_ideal: HomCheck,
}

impl HomReport {
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.pass)
    }

    pub fn checks(&self) -> [(&'static str, &HomCheck); 3] {
        [
            ("is_star_hom", &self.is_star_hom),
            ("diagonal_into_diagonal", &self.diagonal_into_diagonal),
            ("image_diag_is_ideal", &self.image_diag_is_ideal),
        ]
    }

    /// The first failed check as a hypothesis error.
    pub fn require(&self) -> Result<(), DecompositionError> {
        for (check, c) in self.checks() {
            if let Some(w) = &c.witness {
                return Err(DecompositionError::Hypothesis { check, witness: w.clone() });
            }
        }
        Ok(())
    }
}

pub fn validate_hom(phi: &HomMatrix) -> HomReport {
    HomReport {
        is_star_hom: HomCheck::from_witness(star_hom_witness(phi)),
        diagonal_into_diagonal: HomCheck::from_witness(off_diagonal_witness(phi)),
        image_diag_is_ideal: HomCheck::from_witness(ideal_witness(phi)),
    }
}

fn star_hom_witness(phi: &HomMatrix) -> Option<HomWitness> {
    let (g, tol) = (&phi.source, phi.tol());
    let images: Vec<AlgebraElement> = g.arrows().map(|a| phi.image(a)).collect();
    let zero = AlgebraElement::zero(phi.target.clone());
    for a in g.arrows() {
        let residual = images[g.inv(a)].max_abs_diff(&images[a].star());
        if residual > tol {
            return Some(HomWitness::Star { a, residual });
        }
    }
    for a in g.arrows() {
        for b in g.arrows() {
            let lhs = g.compose(a, b).map_or(&zero, |ab| &images[ab]);
            let rhs = images[a].convolve(&images[b]).expect("same target");
            let residual = lhs.max_abs_diff(&rhs);
            if residual > tol {
                return Some(HomWitness::Product { a, b, residual });
            }
        }
    }
    None
}

fn off_diagonal_witness(phi: &HomMatrix) -> Option<HomWitness> {
    let (g, h, tol) = (&phi.source, &phi.target, phi.tol());
    for &unit in g.units() {
        if let Some(arrow) = h.arrows().find(|&b| !h.is_unit(b) && phi.entries[(b, unit)].norm() > tol) {
            return Some(HomWitness::OffDiagonal { unit, arrow });
        }
    }
    None
}

/// In finite dimensions the ideals of `C(H⁽⁰⁾)` are the functions on subsets, so
/// the image of the diagonal is an ideal iff it is everything on its support.
fn ideal_witness(phi: &HomMatrix) -> Option<HomWitness> {
    let (g, h, tol) = (&phi.source, &phi.target, phi.tol());
    let support: Vec<Arrow> =
        h.units().iter().copied().filter(|&y| g.units().iter().any(|&x| phi.entries[(y, x)].norm() > tol)).collect();
    let block = DMatrix::from_fn(support.len(), g.units().len(), |i, j| phi.entries[(support[i], g.units()[j])]);
    let r = rank(&block);
    (r != support.len()).then_some(HomWitness::NotIdeal { support, rank: r })
}

/// The data `(F, Φ, c)`: an invariant unit set `F ⊂ G⁽⁰⁾`, a homomorphism
/// `Φ: G_F → H` injective on `F`, and a cocycle `c` on `G_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionData {
    source: Arc<FiniteGroupoid>,
    f: UnitSet,
    embedding: Vec<Arrow>,
    phi: GroupoidHom,
    cocycle: Cocycle,
}

impl DecompositionData {
    pub fn new(
        source: Arc<FiniteGroupoid>,
        f: UnitSet,
        phi: GroupoidHom,
        cocycle: Cocycle,
    ) -> Result<DecompositionData, DecompositionError> {
        let restriction = source.restrict(&f).map_err(|e| DecompositionError::InvalidData(e.to_string()))?;
        if **phi.domain() != restriction.groupoid {
            return Err(DecompositionError::InvalidData("Phi is not defined on G_F".into()));
        }
        if **cocycle.groupoid() != restriction.groupoid {
            return Err(DecompositionError::InvalidData("cocycle is not defined on G_F".into()));
        }
        // injectivity on F forces injectivity on every bisection, since two
        // arrows of a bisection with one image would share their source image
        if !phi.is_injective_on_units() {
            return Err(DecompositionError::InvalidData("Phi is not injective on F".into()));
        }
        Ok(DecompositionData { source, f, embedding: restriction.embedding, phi, cocycle })
    }

    pub fn source(&self) -> &Arc<FiniteGroupoid> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroupoid> {
        self.phi.codomain()
    }

    pub fn f(&self) -> &UnitSet {
        &self.f
    }

    /// `G_F`, whose arrow `i` is the arrow `embedding()[i]` of `G`.
    pub fn restriction(&self) -> &Arc<FiniteGroupoid> {
        self.phi.domain()
    }

    pub fn embedding(&self) -> &[Arrow] {
        &self.embedding
    }

    pub fn phi(&self) -> &GroupoidHom {
        &self.phi
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// `Φ` in terms of the arrows of `G`: pairs `(γ, Φ(γ))` for `γ ∈ G_F`.
    pub fn phi_table(&self) -> Vec<(Arrow, Arrow)> {
        self.embedding.iter().enumerate().map(|(i, &a)| (a, self.phi.apply(i))).collect()
    }

    /// `c` in terms of the arrows of `G`.
    pub fn cocycle_table(&self) -> Vec<(Arrow, Phase)> {
        self.embedding.iter().enumerate().map(|(i, &a)| (a, self.cocycle.value(i))).collect()
    }

    /// `σ = Φ|_F` as pairs of units of `G` and `H`.
    pub fn sigma(&self) -> Vec<(Arrow, Arrow)> {
        self.phi_table().into_iter().filter(|&(a, _)| self.source.is_unit(a)).collect()
    }

    /// Same `F` and `Φ`, cocycles equal within `tol`.
    pub fn matches(&self, other: &DecompositionData, tol: f64) -> bool {
        self.f == other.f && self.phi.map() == other.phi.map() && self.cocycle.approx_eq(&other.cocycle, tol)
    }
}

/// `φ_{Φ,c}` composed with restriction to `G_F`: column `γ` is zero off `G_F`
/// and `c(γ) δ_{Φ(γ)}` on it.
pub fn build_phi(
    g: &Arc<FiniteGroupoid>,
    h: &Arc<FiniteGroupoid>,
    data: &DecompositionData,
) -> Result<HomMatrix, DecompositionError> {
    if **g != *data.source {
        return Err(DecompositionError::InvalidData("data was built over another source groupoid".into()));
    }
    if **h != **data.target() {
        return Err(DecompositionError::InvalidData("Phi lands in another target groupoid".into()));
    }
    let mut entries = DMatrix::zeros(h.arrow_count(), g.arrow_count());
    for (i, &a) in data.embedding.iter().enumerate() {
        entries[(data.phi.apply(i), a)] = data.cocycle.value(i).to_complex();
    }
    HomMatrix::new(g.clone(), h.clone(), entries)
}

/// Recover `(F, Φ, c)` from a validated homomorphism into an effective groupoid,
/// then check that rebuilding reproduces the input.
///
/// Recovered phases are snapped to exact roots of unity, so the rebuild check
/// allows for the largest snapping shift on top of [`ROUNDTRIP_TOL`].
pub fn decompose(phi: &HomMatrix) -> Result<DecompositionData, DecompositionError> {
    let (g, h) = (&phi.source, &phi.target);
    if !h.is_effective() {
        return Err(DecompositionError::TargetNotEffective);
    }
    validate_hom(phi).require()?;
    let tol = phi.tol();

    let mut f = Vec::new();
    let mut sigma: HashMap<Arrow, Arrow> = HashMap::new();
    for &x in g.units() {
        match phi.image(x).support(tol)[..] {
            [] => {}
            [y] => {
                f.push(x);
                sigma.insert(x, y);
            }
            _ => return Err(inconsistent(format!("image of unit {x} is supported on several units"))),
        }
    }
    let f = UnitSet::new(g, f).map_err(inconsistent)?;
    let restriction = g
        .restrict(&f)
        .map_err(|e| inconsistent(format!("units outside the kernel do not form an invariant set: {e}")))?;

    let mut map = Vec::with_capacity(restriction.embedding.len());
    let mut values = Vec::with_capacity(restriction.embedding.len());
    let mut shift: f64 = 0.0;
    for &a in &restriction.embedding {
        let b = match phi.image(a).support(tol)[..] {
            [b] => b,
            _ => return Err(inconsistent(format!("image of arrow {a} is not supported on a single arrow"))),
        };
        if h.src(b) != sigma[&g.src(a)] || h.rng(b) != sigma[&g.rng(a)] {
            return Err(inconsistent(format!("image of arrow {a} has the wrong endpoints")));
        }
        let z = phi.entries[(b, a)];
        let p = Phase::snap(z).map_err(|e| inconsistent(format!("coefficient of arrow {a}: {e}")))?;
        shift = shift.max((p.to_complex() - z).norm());
        map.push(b);
        values.push(p);
    }
    let gf = Arc::new(restriction.groupoid);
    let phi_hom = GroupoidHom::new(gf.clone(), h.clone(), map).map_err(inconsistent)?;
    let cocycle = Cocycle::new(gf, values).map_err(inconsistent)?;
    let data = DecompositionData::new(g.clone(), f, phi_hom, cocycle).map_err(inconsistent)?;

    let diff = build_phi(g, h, &data)?.max_abs_diff(phi);
    if diff > ROUNDTRIP_TOL + shift {
        return Err(inconsistent(format!("rebuilt homomorphism differs by {diff}")));
    }
    Ok(data)
}

/// Recover `Φ` a second way, through bisections and germs: `ψ(U)` is the
/// support of `φ(C₀(U))`, `σ` is read off the diagonal, and `Φ` is the
/// homomorphism of germ groupoids they induce, transported along the
/// canonical isomorphisms `Bis(G_F)⋉F ≅ G_F` and `Bis(H)⋉H⁽⁰⁾ ≅ H`.
pub fn phi_via_germs(phi: &HomMatrix, data: &DecompositionData, cap: usize) -> Result<GroupoidHom, DecompositionError> {
    let gf = data.restriction();
    let h = &phi.target;
    let tol = phi.tol();
    let semigroup_err = |e: SemigroupError| match e {
        SemigroupError::Groupoid(inner) => DecompositionError::Cap(inner),
        other => inconsistent(other),
    };
    let s = enumerate_bisections(gf, cap).map_err(semigroup_err)?;
    let t = enumerate_bisections(h, cap).map_err(semigroup_err)?;

    let mut psi = Vec::with_capacity(s.len());
    for u in s.bisections() {
        let mut support: Vec<Arrow> =
            u.arrows().iter().flat_map(|&a| phi.image(data.embedding[a]).support(tol)).collect();
        support.sort_unstable();
        support.dedup();
        let image = t
            .index_of_arrows(&support)
            .ok_or_else(|| inconsistent(format!("image of C0({:?}) is not supported on a bisection", u.arrows())))?;
        psi.push(image);
    }
    let mut sigma = Vec::with_capacity(gf.units().len());
    for &x in gf.units() {
        let y = match phi.image(data.embedding[x]).support(tol)[..] {
            [y] => y,
            _ => return Err(inconsistent(format!("image of unit {} is not a single unit", data.embedding[x]))),
        };
        sigma.push(h.units().iter().position(|&u| u == y).ok_or_else(|| inconsistent("unit maps off the diagonal"))?);
    }

    let induced = induced_germ_hom(&sigma, &psi, &SemigroupAction::canonical(&s), &SemigroupAction::canonical(&t))
        .map_err(semigroup_err)?;
    let from_gf = canonical_iso(gf, cap).map_err(semigroup_err)?.iso.inverse().map_err(inconsistent)?;
    let to_h = canonical_iso(h, cap).map_err(semigroup_err)?.iso;
    Ok(to_h.after(&induced.hom.after(&from_gf)))
}

/// `φ_Q: C*_r(H) → C*_r(H/Iso(H)°)`, summing each fibre of the quotient map.
pub fn quotient_star_hom(h: &Arc<FiniteGroupoid>) -> (Quotient, HomMatrix) {
    let q = h.quotient_by_iso_interior();
    let mut entries = DMatrix::zeros(q.groupoid.arrow_count(), h.arrow_count());
    for a in h.arrows() {
        entries[(q.map.apply(a), a)] = Complex64::new(1.0, 0.0);
    }
    let m = HomMatrix::new(h.clone(), q.groupoid.clone(), entries).expect("shape matches");
    (q, m)
}

/// The isomorphism `G_F/Iso(G_F)° ≅ H` induced by a surjective `φ`.
#[derive(Debug, Clone)]
pub struct RigidityCertificate {
    pub data: DecompositionData,
    pub quotient: Quotient,
    pub iso: GroupoidHom,
}

pub fn rigidity_check(phi: &HomMatrix) -> Result<RigidityCertificate, DecompositionError> {
    let needed = phi.target.arrow_count();
    let rank = phi.rank();
    if rank < needed {
        return Err(DecompositionError::NotSurjective { rank, needed });
    }
    let data = decompose(phi)?;
    let gf = data.restriction().clone();
    let quotient = gf.quotient_by_iso_interior();
    let mut map: Vec<Option<Arrow>> = vec![None; quotient.groupoid.arrow_count()];
    for a in gf.arrows() {
        let (class, image) = (quotient.map.apply(a), data.phi.apply(a));
        match map[class] {
            None => map[class] = Some(image),
            Some(prev) if prev != image => {
                return Err(inconsistent(format!("Phi separates arrows {a} and {prev} of one isotropy class")))
            }
            Some(_) => {}
        }
    }
    let map = map.into_iter().map(|m| m.expect("every class has a member")).collect();
    let iso = GroupoidHom::new(quotient.groupoid.clone(), phi.target.clone(), map).map_err(inconsistent)?;
    iso.check_bijective().map_err(inconsistent)?;
    Ok(RigidityCertificate { data, quotient, iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn arc(g: FiniteGroupoid) -> Arc<FiniteGroupoid> {
        Arc::new(g)
    }

    fn sign_data(r2: &Arc<FiniteGroupoid>) -> DecompositionData {
        let minus = Phase::root_of_unity(1, 2).unwrap();
        let c = Cocycle::new(r2.clone(), vec![Phase::ONE, Phase::ONE, minus, minus]).unwrap();
        DecompositionData::new(r2.clone(), UnitSet::all(r2), GroupoidHom::identity(r2.clone()), c).unwrap()
    }

    #[test]
    fn build_identity_and_sign() {
        let r2 = arc(families::pair(2).unwrap());
        let id = DecompositionData::new(
            r2.clone(),
            UnitSet::all(&r2),
            GroupoidHom::identity(r2.clone()),
            Cocycle::trivial(r2.clone()),
        )
        .unwrap();
        assert_eq!(build_phi(&r2, &r2, &id).unwrap(), HomMatrix::identity(r2.clone()));
        let sign = build_phi(&r2, &r2, &sign_data(&r2)).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1.0), c(-1.0), c(-1.0)]));
        assert!(sign.entries().iter().zip(expected.iter()).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn build_restriction_kills_the_extra_point() {
        let g = arc(families::disjoint_union(&[families::pair(2).unwrap(), families::pair(1).unwrap()]));
        let h = arc(families::pair(2).unwrap());
        let f = UnitSet::new(&g, [0, 1]).unwrap();
        let gf = arc(g.restrict(&f).unwrap().groupoid);
        let phi = GroupoidHom::new(gf.clone(), h.clone(), vec![0, 1, 2, 3]).unwrap();
        let data = DecompositionData::new(g.clone(), f, phi, Cocycle::trivial(gf)).unwrap();
        let m = build_phi(&g, &h, &data).unwrap();
        assert_eq!(m.entries().shape(), (4, 5));
        for row in 0..4 {
            for col in 0..5 {
                assert_eq!(m.entries()[(row, col)], c(if row == col { 1.0 } else { 0.0 }));
            }
        }
        assert!(validate_hom(&m).all_pass());
        assert!(decompose(&m).unwrap().matches(&data, 1e-12));
    }

    #[test]
    fn validation_of_examples() {
        let r2 = arc(families::pair(2).unwrap());
        assert!(validate_hom(&HomMatrix::identity(r2.clone())).all_pass());
        assert!(validate_hom(&build_phi(&r2, &r2, &sign_data(&r2)).unwrap()).all_pass());
        let dense = DMatrix::from_fn(4, 4, |i, j| Complex64::new((i * 4 + j) as f64 * 0.37 - 1.1, 0.2 * i as f64));
        let report = validate_hom(&HomMatrix::new(r2.clone(), r2, dense).unwrap());
        assert!(!report.is_star_hom.pass);
        assert!(report.is_star_hom.witness.is_some());
    }

    #[test]
    fn decompose_sign_matrix() {
        let r2 = arc(families::pair(2).unwrap());
        let data = sign_data(&r2);
        let m = build_phi(&r2, &r2, &data).unwrap();
        let back = decompose(&m).unwrap();
        assert!(back.matches(&data, 1e-12));
        assert_eq!(back.f().members(), &[0, 1]);
        assert_eq!(back.sigma(), vec![(0, 0), (1, 1)]);
        assert_eq!(phi_via_germs(&m, &back, 16).unwrap().map(), back.phi().map());
    }

    #[test]
    fn quotient_maps() {
        let r2 = arc(families::pair(2).unwrap());
        assert_eq!(quotient_star_hom(&r2).1.entries(), HomMatrix::identity(r2).entries());

        let z2 = arc(families::cyclic_group(2).unwrap());
        let (_, m) = quotient_star_hom(&z2);
        assert_eq!(m.entries().shape(), (1, 2));
        assert!(m.entries().iter().all(|&z| z == c(1.0)));
        let data = decompose(&m).unwrap();
        assert_eq!(data.phi().map(), &[0, 0]);
        assert!(data.cocycle().is_trivial());

        let bundle = arc(families::group_bundle(&[2, 1]).unwrap());
        let (_, m) = quotient_star_hom(&bundle);
        let expected = [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(m.entries()[(i, j)], c(v));
            }
        }
    }

    #[test]
    fn rigidity_examples() {
        for g in [
            families::cyclic_group(2).unwrap(),
            families::group_bundle(&[2, 1]).unwrap(),
            families::disjoint_union(&[families::pair(2).unwrap(), families::cyclic_group(2).unwrap()]),
        ] {
            let g = arc(g);
            let (_, m) = quotient_star_hom(&g);
            let cert = rigidity_check(&m).unwrap();
            cert.iso.check_bijective().unwrap();
        }
        let r2 = arc(families::pair(2).unwrap());
        let cert = rigidity_check(&build_phi(&r2, &r2, &sign_data(&r2)).unwrap()).unwrap();
        assert!(cert.iso.map().iter().enumerate().all(|(i, &a)| i == a));
    }

    #[test]
    fn refusals() {
        let z2 = arc(families::cyclic_group(2).unwrap());
        assert_eq!(decompose(&HomMatrix::identity(z2)), Err(DecompositionError::TargetNotEffective));

        let r2 = arc(families::pair(2).unwrap());
        let mut bad = DMatrix::identity(4, 4);
        bad[(2, 0)] = c(0.5);
        let err = decompose(&HomMatrix::new(r2.clone(), r2.clone(), bad).unwrap()).unwrap_err();
        assert!(matches!(err, DecompositionError::Hypothesis { .. }));
        assert_eq!(err.exit_code(), 2);

        // a point into the first unit of R₂ is a *-homomorphism but not onto
        let pt = arc(families::pair(1).unwrap());
        let mut e = DMatrix::zeros(4, 1);
        e[(0, 0)] = c(1.0);
        let m = HomMatrix::new(pt, r2.clone(), e).unwrap();
        assert!(validate_hom(&m).all_pass());
        assert_eq!(rigidity_check(&m).unwrap_err(), DecompositionError::NotSurjective { rank: 1, needed: 4 });

        assert!(matches!(HomMatrix::new(r2.clone(), r2, DMatrix::zeros(3, 4)), Err(DecompositionError::Shape { .. })));
    }

    #[test]
    fn non_ideal_image_is_reported() {
        // the unit of a point sent to the sum of both units of a 2-point space
        let pt = arc(families::pair(1).unwrap());
        let two = arc(families::group_bundle(&[1, 1]).unwrap());
        let m = HomMatrix::new(pt, two, DMatrix::from_element(2, 1, c(1.0))).unwrap();
        let report = validate_hom(&m);
        assert!(report.is_star_hom.pass && report.diagonal_into_diagonal.pass);
        assert_eq!(report.image_diag_is_ideal.witness, Some(HomWitness::NotIdeal { support: vec![0, 1], rank: 1 }));
    }
}
