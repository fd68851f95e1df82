//! The semidirect product `Aut(G)⋉Z(G,T)` and its image among the
//! diagonal-preserving automorphisms of `C*_r(G)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cocycle::{enumerate_cocycles, Cocycle};
use crate::decomposition::{decompose, validate_hom, DecompositionError, HomMatrix};
use crate::group::FiniteGroup;
use crate::groupoid::{FiniteGroupoid, GroupoidError};
use crate::hom::{enumerate_automorphisms, GroupoidHom, HomViolation};

/// Entrywise tolerance when comparing automorphism matrices.
pub const AUT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AutError {
    #[error("pairs live on different groupoids")]
    GroupoidMismatch,
    #[error("Phi is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("cocycle is defined on another groupoid")]
    CocycleMismatch,
    #[error("groupoid is not principal")]
    NotPrincipal,
    #[error("element {element} does not fix the diagonal")]
    NotDiagonalFixing { element: usize },
    #[error("invalid action at element {element}: {reason}")]
    InvalidAction { element: usize, reason: String },
    #[error("assignment is not multiplicative on ({0},{1})")]
    NotMultiplicative(usize, usize),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Cap(#[from] GroupoidError),
}

impl AutError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AutError::Decomposition(e) => e.exit_code(),
            _ => 2,
        }
    }
}

impl From<HomViolation> for AutError {
    fn from(v: HomViolation) -> AutError {
        AutError::NotAutomorphism(v.to_string())
    }
}

fn same(a: &Arc<FiniteGroupoid>, b: &Arc<FiniteGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An element `(Φ, c)` of `Aut(G)⋉Z(G,T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutPair {
    phi: GroupoidHom,
    c: Cocycle,
}

impl AutPair {
    pub fn new(phi: GroupoidHom, c: Cocycle) -> Result<AutPair, AutError> {
        if !same(phi.domain(), phi.codomain()) {
            return Err(AutError::NotAutomorphism("domain and codomain differ".into()));
        }
        phi.check_bijective()?;
        if !same(c.groupoid(), phi.domain()) {
            return Err(AutError::CocycleMismatch);
        }
        Ok(AutPair { phi, c })
    }

    pub fn identity(g: Arc<FiniteGroupoid>) -> AutPair {
        AutPair { phi: GroupoidHom::identity(g.clone()), c: Cocycle::trivial(g) }
    }

    pub fn phi(&self) -> &GroupoidHom {
        &self.phi
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.c
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.phi.domain()
    }
}

/// `(Φ₁, c₁)·(Φ₂, c₂) = (Φ₁∘Φ₂, (Φ₂⁻¹.c₁)·c₂)` where `(Φ.c)(α) = c(Φ⁻¹(α))`,
/// so that `(Φ₂⁻¹.c₁)(α) = c₁(Φ₂(α))`.
pub fn sd_multiply(a: &AutPair, b: &AutPair) -> Result<AutPair, AutError> {
    if !same(a.groupoid(), b.groupoid()) {
        return Err(AutError::GroupoidMismatch);
    }
    Ok(AutPair { phi: a.phi.after(&b.phi), c: a.c.pullback(&b.phi).mul(&b.c) })
}

/// `(Φ, c)⁻¹ = (Φ⁻¹, α ↦ conj c(Φ⁻¹(α)))`.
pub fn sd_inverse(a: &AutPair) -> AutPair {
    AutPair { phi: a.phi.inverse().expect("automorphism"), c: a.c.pushforward(&a.phi).inverse() }
}

/// `φ_{Φ,c}`: the monomial matrix sending `δ_β` to `c(β) δ_{Φ(β)}`.
pub fn psi(a: &AutPair) -> HomMatrix {
    let g = a.groupoid();
    let n = g.arrow_count();
    let mut m = DMatrix::zeros(n, n);
    for b in g.arrows() {
        m[(a.phi.apply(b), b)] = a.c.value(b).to_complex();
    }
    HomMatrix::new(g.clone(), g.clone(), m).expect("square matrix")
}

/// Whether a matrix fixes every `δ_x` for `x` a unit.
pub fn fixes_diagonal(m: &HomMatrix) -> bool {
    let g = m.source();
    g.units().iter().all(|&x| {
        (0..m.entries().nrows()).all(|row| {
            let want = if row == x { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            (m.entries()[(row, x)] - want).norm() <= AUT_TOL
        })
    })
}

/// Whether `ψ(Φ, c)` fixes the diagonal pointwise, i.e. lies in `FAut`.
pub fn faut_test(a: &AutPair) -> bool {
    fixes_diagonal(&psi(a))
}

/// All pairs `(Φ, c)` with `c` valued in `μ_N`, automorphism-major in lexicographic order.
pub fn enumerate_semidirect(g: &Arc<FiniteGroupoid>, order: u32, cap: usize) -> Result<Vec<AutPair>, AutError> {
    let auts = enumerate_automorphisms(g, cap)?;
    let cocycles = enumerate_cocycles(g, order, cap)?;
    Ok(auts.iter().flat_map(|phi| cocycles.iter().map(move |c| AutPair { phi: phi.clone(), c: c.clone() })).collect())
}

/// A greedy generating set of a finite group given by its elements: indices
/// are taken in order whenever they fall outside the span so far. The
/// identity is never chosen.
pub fn generating_set(elements: &[AutPair]) -> Vec<usize> {
    let mut gens: Vec<usize> = Vec::new();
    let mut span: BTreeSet<usize> = BTreeSet::new();
    let index = |p: &AutPair| elements.iter().position(|q| q == p);
    for i in 0..elements.len() {
        if span.contains(&i) {
            continue;
        }
        if elements[i].phi.is_identity() && elements[i].c.is_trivial() {
            span.insert(i);
            continue;
        }
        gens.push(i);
        span.insert(i);
        loop {
            let mut added = Vec::new();
            for &s in &span {
                for &t in &gens {
                    let st = sd_multiply(&elements[s], &elements[t]).expect("same groupoid");
                    if let Some(k) = index(&st) {
                        if !span.contains(&k) {
                            added.push(k);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            span.extend(added);
        }
    }
    gens
}

/// Read off `(Φ, c)` from a diagonal-preserving automorphism of `C*_r(G)`.
pub fn pair_from_automorphism(m: &HomMatrix) -> Result<AutPair, AutError> {
    let g = m.source().clone();
    if **m.target() != *g {
        return Err(AutError::NotAutomorphism("source and target groupoids differ".into()));
    }
    let data = decompose(m)?;
    if data.f().len() != g.units().len() {
        return Err(AutError::NotAutomorphism("map has a nonzero kernel on the diagonal".into()));
    }
    // F is everything, so G_F = G arrow for arrow
    let phi = GroupoidHom::new(g.clone(), g.clone(), data.phi().map().to_vec())?;
    let c = Cocycle::new(g, data.cocycle().values().to_vec())
        .map_err(|e| AutError::Decomposition(DecompositionError::Inconsistent(e.to_string())))?;
    AutPair::new(phi, c)
}

/// The FAut classification: `μ_N` cocycles against the diagonal-fixing pairs.
#[derive(Debug, Clone)]
pub struct FautClassification {
    pub cocycles: Vec<Cocycle>,
    /// Pairs of the enumerated semidirect product that pass [`faut_test`].
    pub diagonal_fixing: Vec<AutPair>,
    pub principal: bool,
    /// For principal groupoids: whether `c ↦ ψ(id, c)` is a bijection onto the
    /// diagonal-fixing pairs. Not asserted otherwise.
    pub bijective: Option<bool>,
}

pub fn classify_faut(g: &Arc<FiniteGroupoid>, order: u32, cap: usize) -> Result<FautClassification, AutError> {
    let cocycles = enumerate_cocycles(g, order, cap)?;
    let diagonal_fixing: Vec<AutPair> = enumerate_semidirect(g, order, cap)?.into_iter().filter(faut_test).collect();
    let principal = g.is_topologically_principal();
    let bijective = principal.then(|| {
        diagonal_fixing.len() == cocycles.len()
            && diagonal_fixing.iter().all(|p| p.phi.is_identity())
            && cocycles.iter().all(|c| diagonal_fixing.iter().any(|p| p.c == *c))
    });
    Ok(FautClassification { cocycles, diagonal_fixing, principal, bijective })
}

/// A finite group acting on `C*_r(G)` by automorphism matrices.
#[derive(Debug, Clone)]
pub struct FiniteGroupAction {
    group: FiniteGroup,
    assignment: Vec<HomMatrix>,
}

impl FiniteGroupAction {
    pub fn new(group: FiniteGroup, assignment: Vec<HomMatrix>) -> Result<FiniteGroupAction, AutError> {
        if assignment.len() != group.order() {
            return Err(AutError::InvalidAction {
                element: 0,
                reason: "one matrix per group element is required".into(),
            });
        }
        let g = assignment[0].source().clone();
        for (s, m) in assignment.iter().enumerate() {
            let invalid = |reason: &str| AutError::InvalidAction { element: s, reason: reason.into() };
            if **m.source() != *g || **m.target() != *g {
                return Err(invalid("matrix acts on another groupoid"));
            }
            if !validate_hom(m).all_pass() {
                return Err(invalid("matrix is not a diagonal-compatible *-homomorphism"));
            }
            if m.rank() != g.arrow_count() {
                return Err(invalid("matrix is not invertible"));
            }
        }
        for s in group.elements() {
            for t in group.elements() {
                let st = assignment[s].after(&assignment[t]).expect("same groupoid");
                if st.max_abs_diff(&assignment[group.mul(s, t)]) > AUT_TOL {
                    return Err(AutError::NotMultiplicative(s, t));
                }
            }
        }
        Ok(FiniteGroupAction { group, assignment })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn assignment(&self) -> &[HomMatrix] {
        &self.assignment
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.assignment[0].source()
    }
}

/// Evidence that an action through `FAut` factors through the abelianization.
#[derive(Debug, Clone)]
pub struct AbelianizationCertificate {
    pub factors: bool,
    /// A pair `(s, t)` whose commutator acts nontrivially, when `factors` is false.
    pub witness: Option<(usize, usize)>,
    pub commutator_subgroup: Vec<usize>,
    /// Coset of each group element, numbered by least member.
    pub coset_of: Vec<usize>,
    /// The induced action of each coset, taken from its least member.
    pub table: Vec<HomMatrix>,
}

impl AbelianizationCertificate {
    pub fn abelianization_order(&self) -> usize {
        self.table.len()
    }
}

pub fn factors_through_abelianization(action: &FiniteGroupAction) -> Result<AbelianizationCertificate, AutError> {
    let g = action.groupoid();
    if !g.is_topologically_principal() {
        return Err(AutError::NotPrincipal);
    }
    let group = &action.group;
    if let Some(element) = group.elements().find(|&s| !fixes_diagonal(&action.assignment[s])) {
        return Err(AutError::NotDiagonalFixing { element });
    }
    let identity = HomMatrix::identity(g.clone());
    let witness = group
        .elements()
        .flat_map(|s| group.elements().map(move |t| (s, t)))
        .find(|&(s, t)| action.assignment[group.commutator(s, t)].max_abs_diff(&identity) > AUT_TOL);
    let comm = group.commutator_subgroup();
    let coset_of = group.cosets(&comm);
    let cosets = coset_of.iter().max().map_or(0, |m| m + 1);
    let table = (0..cosets)
        .map(|k| action.assignment[coset_of.iter().position(|&c| c == k).expect("nonempty coset")].clone())
        .collect();
    Ok(AbelianizationCertificate {
        factors: witness.is_none(),
        witness,
        commutator_subgroup: comm.into_iter().collect(),
        coset_of,
        table,
    })
}
