//! Finite discrete groupoids given by explicit tables.
//!
//! Arrows are the integers `0..n`; units are flagged arrows. A finite
//! Hausdorff étale groupoid is discrete, so every subset is open and closed:
//! the interior of the isotropy is the isotropy itself, "closed invariant"
//! just means invariant, and effective coincides with principal.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::hom::GroupoidHom;

pub type Arrow = usize;

/// Default arrow-count cap for exponential enumerations.
pub const DEFAULT_CAP: usize = 16;

/// Default arrow-count cap for linear-algebra-only work.
pub const LINEAR_CAP: usize = 64;

/// Raw groupoid tables, exactly as they appear in the JSON interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidTables {
    pub arrows: usize,
    pub units: Vec<Arrow>,
    pub src: Vec<Arrow>,
    pub rng: Vec<Arrow>,
    pub compose: Vec<[Arrow; 3]>,
    pub inv: Vec<Arrow>,
}

/// Tables that cannot even be read as a groupoid candidate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructuralError {
    #[error("table `{table}` has length {found}, expected {expected}")]
    LengthMismatch { table: &'static str, expected: usize, found: usize },
    #[error("table `{table}` entry {index} refers to arrow {value}, but only {arrows} arrows exist")]
    OutOfRange { table: &'static str, index: usize, value: usize, arrows: usize },
}

/// One violated groupoid axiom with a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `src` or `rng` sends an arrow outside the unit set.
    EndpointNotUnit { arrow: Arrow, endpoint: Arrow },
    /// A unit `x` with `src(x) != x` or `rng(x) != x`.
    UnitNotFixed { unit: Arrow },
    /// `α·src(α) != α` or `rng(α)·α != α`.
    UnitLaw { arrow: Arrow },
    /// A product is listed for a pair with `src(a) != rng(b)`.
    ProductNotComposable { a: Arrow, b: Arrow },
    /// A composable pair has no listed product.
    ProductMissing { a: Arrow, b: Arrow },
    /// The same pair is listed more than once.
    ProductDuplicated { a: Arrow, b: Arrow },
    /// `src(ab) != src(b)` or `rng(ab) != rng(a)`.
    ProductEndpoints { a: Arrow, b: Arrow, ab: Arrow },
    /// `(ab)c != a(bc)`.
    Associativity { a: Arrow, b: Arrow, c: Arrow },
    /// The listed inverse does not invert.
    Inverse { arrow: Arrow, listed: Arrow },
    /// More than one arrow satisfies the inverse equations.
    InverseNotUnique { arrow: Arrow, candidates: Vec<Arrow> },
}

impl Violation {
    /// Number of the groupoid axiom this violation belongs to.
    pub fn axiom(&self) -> u8 {
        match self {
            Violation::EndpointNotUnit { .. } | Violation::UnitNotFixed { .. } => 1,
            Violation::UnitLaw { .. } => 2,
            Violation::ProductNotComposable { .. }
            | Violation::ProductMissing { .. }
            | Violation::ProductDuplicated { .. }
            | Violation::ProductEndpoints { .. } => 3,
            Violation::Associativity { .. } => 4,
            Violation::Inverse { .. } | Violation::InverseNotUnique { .. } => 5,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom ({}): ", self.axiom())?;
        match self {
            Violation::EndpointNotUnit { arrow, endpoint } => {
                write!(f, "arrow {arrow} has endpoint {endpoint}, which is not a unit")
            }
            Violation::UnitNotFixed { unit } => write!(f, "unit {unit} is not its own source and range"),
            Violation::UnitLaw { arrow } => write!(f, "units do not act trivially on arrow {arrow}"),
            Violation::ProductNotComposable { a, b } => write!(f, "product ({a},{b}) listed but not composable"),
            Violation::ProductMissing { a, b } => write!(f, "composable pair ({a},{b}) has no product"),
            Violation::ProductDuplicated { a, b } => write!(f, "pair ({a},{b}) listed twice"),
            Violation::ProductEndpoints { a, b, ab } => {
                write!(f, "product {a}·{b} = {ab} has wrong source or range")
            }
            Violation::Associativity { a, b, c } => write!(f, "({a}·{b})·{c} != {a}·({b}·{c})"),
            Violation::Inverse { arrow, listed } => write!(f, "{listed} is not an inverse of {arrow}"),
            Violation::InverseNotUnique { arrow, candidates } => {
                write!(f, "arrow {arrow} has several inverses {candidates:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupoidError {
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error("groupoid axioms violated: {}", .0.violations.first().map(|v| v.to_string()).unwrap_or_default())]
    Invalid(ValidationReport),
    #[error("arrow {0} is not a unit")]
    NotAUnit(Arrow),
    #[error("unit set is not invariant: arrow {arrow} leaves it")]
    NotInvariant { arrow: Arrow },
    #[error("groupoid has {arrows} arrows, above the enumeration cap {cap}")]
    CapExceeded { arrows: usize, cap: usize },
}

fn check_len(table: &'static str, expected: usize, found: usize) -> Result<(), StructuralError> {
    if expected != found {
        return Err(StructuralError::LengthMismatch { table, expected, found });
    }
    Ok(())
}

fn check_range(table: &'static str, values: impl Iterator<Item = usize>, n: usize) -> Result<(), StructuralError> {
    for (index, value) in values.enumerate() {
        if value >= n {
            return Err(StructuralError::OutOfRange { table, index, value, arrows: n });
        }
    }
    Ok(())
}

/// Check the groupoid axioms on raw tables, collecting every violation.
pub fn validate(t: &GroupoidTables) -> Result<ValidationReport, StructuralError> {
    let n = t.arrows;
    check_len("src", n, t.src.len())?;
    check_len("rng", n, t.rng.len())?;
    check_len("inv", n, t.inv.len())?;
    check_range("units", t.units.iter().copied(), n)?;
    check_range("src", t.src.iter().copied(), n)?;
    check_range("rng", t.rng.iter().copied(), n)?;
    check_range("inv", t.inv.iter().copied(), n)?;
    check_range("compose", t.compose.iter().flatten().copied(), n)?;

    let mut is_unit = vec![false; n];
    for &u in &t.units {
        is_unit[u] = true;
    }
    let mut out = Vec::new();

    for a in 0..n {
        for endpoint in [t.src[a], t.rng[a]] {
            if !is_unit[endpoint] {
                out.push(Violation::EndpointNotUnit { arrow: a, endpoint });
                break;
            }
        }
    }
    for x in (0..n).filter(|&x| is_unit[x]) {
        if t.src[x] != x || t.rng[x] != x {
            out.push(Violation::UnitNotFixed { unit: x });
        }
    }

    let mut table: Vec<Option<Arrow>> = vec![None; n * n];
    let mut sorted = t.compose.clone();
    sorted.sort_unstable();
    for (i, &[a, b, ab]) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1][0] == a && sorted[i - 1][1] == b {
            if sorted[i - 1][2] != ab {
                out.push(Violation::ProductDuplicated { a, b });
            }
            continue;
        }
        if t.src[a] != t.rng[b] {
            out.push(Violation::ProductNotComposable { a, b });
            continue;
        }
        table[a * n + b] = Some(ab);
        if t.src[ab] != t.src[b] || t.rng[ab] != t.rng[a] {
            out.push(Violation::ProductEndpoints { a, b, ab });
        }
    }
    for a in 0..n {
        for b in 0..n {
            if t.src[a] == t.rng[b] && table[a * n + b].is_none() {
                out.push(Violation::ProductMissing { a, b });
            }
        }
    }
    let mul = |a: Arrow, b: Arrow| table[a * n + b];

    for a in 0..n {
        if mul(a, t.src[a]) != Some(a) || mul(t.rng[a], a) != Some(a) {
            out.push(Violation::UnitLaw { arrow: a });
        }
    }

    for a in 0..n {
        for b in 0..n {
            let Some(ab) = mul(a, b) else { continue };
            for c in 0..n {
                let Some(bc) = mul(b, c) else { continue };
                if let (Some(l), Some(r)) = (mul(ab, c), mul(a, bc)) {
                    if l != r {
                        out.push(Violation::Associativity { a, b, c });
                    }
                }
            }
        }
    }

    for g in 0..n {
        let listed = t.inv[g];
        let ok = mul(listed, g) == Some(t.src[g]) && mul(g, listed) == Some(t.rng[g]) && t.inv[listed] == g;
        if !ok {
            out.push(Violation::Inverse { arrow: g, listed });
        }
        let candidates: Vec<Arrow> =
            (0..n).filter(|&h| mul(h, g) == Some(t.src[g]) && mul(g, h) == Some(t.rng[g])).collect();
        if candidates.len() > 1 {
            out.push(Violation::InverseNotUnique { arrow: g, candidates });
        }
    }

    Ok(ValidationReport { violations: out })
}

/// A finite discrete groupoid. Always satisfies the groupoid axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    n: usize,
    is_unit: Vec<bool>,
    units: Vec<Arrow>,
    src: Vec<Arrow>,
    rng: Vec<Arrow>,
    inv: Vec<Arrow>,
    table: Vec<Option<Arrow>>,
}

impl FiniteGroupoid {
    /// Validate raw tables and build the groupoid.
    pub fn from_tables(t: &GroupoidTables) -> Result<FiniteGroupoid, GroupoidError> {
        let report = validate(t)?;
        if !report.passed() {
            return Err(GroupoidError::Invalid(report));
        }
        let n = t.arrows;
        let mut is_unit = vec![false; n];
        for &u in &t.units {
            is_unit[u] = true;
        }
        let mut table = vec![None; n * n];
        for &[a, b, ab] in &t.compose {
            table[a * n + b] = Some(ab);
        }
        Ok(FiniteGroupoid {
            n,
            units: (0..n).filter(|&a| is_unit[a]).collect(),
            is_unit,
            src: t.src.clone(),
            rng: t.rng.clone(),
            inv: t.inv.clone(),
            table,
        })
    }

    /// Build from a unit flag, endpoint maps, inverse and a total product
    /// function on composable pairs. Used by trusted constructors; the result
    /// is still validated.
    pub(crate) fn from_fn(
        is_unit: Vec<bool>,
        src: Vec<Arrow>,
        rng: Vec<Arrow>,
        inv: Vec<Arrow>,
        mut product: impl FnMut(Arrow, Arrow) -> Arrow,
    ) -> Result<FiniteGroupoid, GroupoidError> {
        let n = is_unit.len();
        let mut compose = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if src.get(a) == rng.get(b) {
                    compose.push([a, b, product(a, b)]);
                }
            }
        }
        FiniteGroupoid::from_tables(&GroupoidTables {
            arrows: n,
            units: (0..n).filter(|&a| is_unit[a]).collect(),
            src,
            rng,
            compose,
            inv,
        })
    }

    pub fn empty() -> FiniteGroupoid {
        FiniteGroupoid { n: 0, is_unit: vec![], units: vec![], src: vec![], rng: vec![], inv: vec![], table: vec![] }
    }

    /// Canonical tables, products sorted by pair.
    pub fn to_tables(&self) -> GroupoidTables {
        let mut compose = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if let Some(ab) = self.compose(a, b) {
                    compose.push([a, b, ab]);
                }
            }
        }
        GroupoidTables {
            arrows: self.n,
            units: self.units.clone(),
            src: self.src.clone(),
            rng: self.rng.clone(),
            compose,
            inv: self.inv.clone(),
        }
    }

    pub fn arrow_count(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> std::ops::Range<Arrow> {
        0..self.n
    }

    pub fn units(&self) -> &[Arrow] {
        &self.units
    }

    pub fn is_unit(&self, a: Arrow) -> bool {
        self.is_unit[a]
    }

    pub fn src(&self, a: Arrow) -> Arrow {
        self.src[a]
    }

    pub fn rng(&self, a: Arrow) -> Arrow {
        self.rng[a]
    }

    pub fn inv(&self, a: Arrow) -> Arrow {
        self.inv[a]
    }

    /// `ab`, defined exactly when `src(a) == rng(b)`.
    pub fn compose(&self, a: Arrow, b: Arrow) -> Option<Arrow> {
        self.table[a * self.n + b]
    }

    /// `G_x = src⁻¹(x)`, ascending.
    pub fn arrows_from(&self, x: Arrow) -> Vec<Arrow> {
        self.arrows().filter(|&a| self.src[a] == x).collect()
    }

    /// `Gˣ = rng⁻¹(x)`, ascending.
    pub fn arrows_to(&self, x: Arrow) -> Vec<Arrow> {
        self.arrows().filter(|&a| self.rng[a] == x).collect()
    }

    /// The interior of `Iso(G)`; in the discrete model it is all of `Iso(G)`.
    pub fn isotropy_interior(&self) -> Vec<Arrow> {
        self.arrows().filter(|&a| self.src[a] == self.rng[a]).collect()
    }

    pub fn is_effective(&self) -> bool {
        self.isotropy_interior().len() == self.units.len()
    }

    /// Units with trivial isotropy group must be dense, i.e. all units.
    pub fn is_topologically_principal(&self) -> bool {
        self.units.iter().all(|&x| self.arrows().filter(|&a| self.src[a] == x && self.rng[a] == x).count() == 1)
    }

    /// Orbit index of every unit, numbered in order of the least unit of each orbit.
    pub fn orbits(&self) -> Vec<Vec<Arrow>> {
        let mut label: HashMap<Arrow, usize> = HashMap::new();
        let mut orbits: Vec<Vec<Arrow>> = Vec::new();
        for &x in &self.units {
            if label.contains_key(&x) {
                continue;
            }
            let members: BTreeSet<Arrow> = self.arrows_from(x).into_iter().map(|a| self.rng[a]).collect();
            for &m in &members {
                label.insert(m, orbits.len());
            }
            orbits.push(members.into_iter().collect());
        }
        orbits
    }

    pub fn is_invariant(&self, f: &UnitSet) -> bool {
        self.invariance_witness(f).is_none()
    }

    fn invariance_witness(&self, f: &UnitSet) -> Option<Arrow> {
        self.arrows().find(|&a| f.contains(self.src[a]) && !f.contains(self.rng[a]))
    }

    /// All invariant unit sets, ordered as in [`UnitSet`]'s `Ord`.
    pub fn invariant_subsets(&self, max_orbits: usize) -> Result<Vec<UnitSet>, GroupoidError> {
        let orbits = self.orbits();
        if orbits.len() > max_orbits {
            return Err(GroupoidError::CapExceeded { arrows: orbits.len(), cap: max_orbits });
        }
        let mut out: Vec<UnitSet> = (0u64..1 << orbits.len())
            .map(|mask| {
                let mut members: Vec<Arrow> = orbits
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .flat_map(|(_, o)| o.iter().copied())
                    .collect();
                members.sort_unstable();
                UnitSet(members)
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// The subgroupoid `G_F = src⁻¹(F)` for an invariant `F`, renumbered in
    /// increasing order of the original arrow ids.
    pub fn restrict(&self, f: &UnitSet) -> Result<Restriction, GroupoidError> {
        for &x in f.members() {
            if x >= self.n || !self.is_unit[x] {
                return Err(GroupoidError::NotAUnit(x));
            }
        }
        if let Some(arrow) = self.invariance_witness(f) {
            return Err(GroupoidError::NotInvariant { arrow });
        }
        let embedding: Vec<Arrow> = self.arrows().filter(|&a| f.contains(self.src[a])).collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &a) in embedding.iter().enumerate() {
            index[a] = i;
        }
        let sub = |a: Arrow| index[a];
        let groupoid = FiniteGroupoid::from_fn(
            embedding.iter().map(|&a| self.is_unit[a]).collect(),
            embedding.iter().map(|&a| sub(self.src[a])).collect(),
            embedding.iter().map(|&a| sub(self.rng[a])).collect(),
            embedding.iter().map(|&a| sub(self.inv[a])).collect(),
            |a, b| sub(self.compose(embedding[a], embedding[b]).expect("composable in parent")),
        )
        .expect("restriction to an invariant set is a groupoid");
        Ok(Restriction { groupoid, embedding })
    }

    /// The quotient `G/Iso(G)°` with its quotient map.
    ///
    /// Arrows `α ~ β` iff they share source and `αβ⁻¹` is isotropy, i.e. iff
    /// they share source and range. Classes are numbered by least member.
    pub fn quotient_by_iso_interior(self: &Arc<Self>) -> Quotient {
        let mut class_of = vec![usize::MAX; self.n];
        let mut reps: Vec<Arrow> = Vec::new();
        let mut by_ends: HashMap<(Arrow, Arrow), usize> = HashMap::new();
        for a in self.arrows() {
            let id = *by_ends.entry((self.rng[a], self.src[a])).or_insert_with(|| {
                reps.push(a);
                reps.len() - 1
            });
            class_of[a] = id;
        }
        let q = |a: Arrow| class_of[a];
        let h = FiniteGroupoid::from_fn(
            // the class of a unit x is the (x, x) class, whose least member may be isotropy
            reps.iter().map(|&a| self.src[a] == self.rng[a]).collect(),
            reps.iter().map(|&a| q(self.src[a])).collect(),
            reps.iter().map(|&a| q(self.rng[a])).collect(),
            reps.iter().map(|&a| q(self.inv[a])).collect(),
            // classes are (range, source) pairs, so representatives of
            // composable classes are themselves composable
            |a, b| q(self.compose(reps[a], reps[b]).expect("composable representatives")),
        )
        .expect("quotient by isotropy is a groupoid");
        let h = Arc::new(h);
        let map = GroupoidHom::new(self.clone(), h.clone(), class_of).expect("quotient map is a homomorphism");
        Quotient { groupoid: h, map }
    }

    /// Disjoint union, arrows of `self` first.
    pub fn disjoint_union(&self, other: &FiniteGroupoid) -> FiniteGroupoid {
        let n = self.n;
        let shift = |a: Arrow| a + n;
        let mut is_unit = self.is_unit.clone();
        is_unit.extend(&other.is_unit);
        let mut src = self.src.clone();
        src.extend(other.src.iter().map(|&a| shift(a)));
        let mut rng = self.rng.clone();
        rng.extend(other.rng.iter().map(|&a| shift(a)));
        let mut inv = self.inv.clone();
        inv.extend(other.inv.iter().map(|&a| shift(a)));
        FiniteGroupoid::from_fn(is_unit, src, rng, inv, |a, b| {
            if a < n {
                self.compose(a, b).expect("composable")
            } else {
                shift(other.compose(a - n, b - n).expect("composable"))
            }
        })
        .expect("disjoint union of groupoids is a groupoid")
    }

    pub(crate) fn check_cap(&self, cap: usize) -> Result<(), GroupoidError> {
        if self.n > cap {
            return Err(GroupoidError::CapExceeded { arrows: self.n, cap });
        }
        Ok(())
    }
}

/// A restriction `G_F` together with the inclusion of its arrows into `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub groupoid: FiniteGroupoid,
    /// `embedding[i]` is the arrow of the parent groupoid numbered `i` in `G_F`.
    pub embedding: Vec<Arrow>,
}

impl Restriction {
    /// Index in `G_F` of a parent arrow, if it lies in `G_F`.
    pub fn index_of(&self, parent: Arrow) -> Option<Arrow> {
        self.embedding.binary_search(&parent).ok()
    }
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub groupoid: Arc<FiniteGroupoid>,
    pub map: GroupoidHom,
}

/// A set of units, stored sorted.
///
/// Ordered colexicographically (compare largest members first), which is the
/// order of the characteristic bit masks read as integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UnitSet(Vec<Arrow>);

impl UnitSet {
    pub fn new(g: &FiniteGroupoid, members: impl IntoIterator<Item = Arrow>) -> Result<UnitSet, GroupoidError> {
        let mut v: Vec<Arrow> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if let Some(&bad) = v.iter().find(|&&x| x >= g.n || !g.is_unit[x]) {
            return Err(GroupoidError::NotAUnit(bad));
        }
        Ok(UnitSet(v))
    }

    pub fn all(g: &FiniteGroupoid) -> UnitSet {
        UnitSet(g.units.clone())
    }

    pub fn members(&self) -> &[Arrow] {
        &self.0
    }

    pub fn contains(&self, x: Arrow) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &UnitSet) -> UnitSet {
        let s: BTreeSet<Arrow> = self.0.iter().chain(&other.0).copied().collect();
        UnitSet(s.into_iter().collect())
    }

    pub fn intersection(&self, other: &UnitSet) -> UnitSet {
        UnitSet(self.0.iter().copied().filter(|x| other.contains(*x)).collect())
    }
}

impl Ord for UnitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for UnitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
