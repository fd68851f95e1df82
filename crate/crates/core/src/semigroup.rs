//! Bisections as an inverse semigroup, inverse semigroup actions on finite
//! sets, and the groupoid of germs of such an action.

use std::collections::HashMap;
use std::sync::Arc;

use crate::groupoid::{Arrow, FiniteGroupoid, GroupoidError};
use crate::hom::{GroupoidHom, HomViolation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemigroupError {
    #[error("arrows {a} and {b} share a source or a range, so the set is not a bisection")]
    NotABisection { a: Arrow, b: Arrow },
    #[error("arrow {0} is out of range")]
    ArrowOutOfRange(Arrow),
    #[error("bisections live on different groupoids")]
    GroupoidMismatch,
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("inverse semigroup table is inconsistent: {0}")]
    Table(String),
    #[error("action is inconsistent at element {element}, point {point}: {reason}")]
    Action { element: usize, point: usize, reason: &'static str },
    #[error("map of semigroups is not multiplicative on ({0},{1})")]
    NotSemigroupHom(usize, usize),
    #[error("equivariance fails at element {element}, point {point}")]
    NotEquivariant { element: usize, point: usize },
    #[error(transparent)]
    Hom(#[from] HomViolation),
}

/// A set of arrows on which source and range are both injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    groupoid: Arc<FiniteGroupoid>,
    arrows: Vec<Arrow>,
}

impl Bisection {
    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        arrows: impl IntoIterator<Item = Arrow>,
    ) -> Result<Bisection, SemigroupError> {
        let mut arrows: Vec<Arrow> = arrows.into_iter().collect();
        arrows.sort_unstable();
        arrows.dedup();
        if let Some(&a) = arrows.iter().find(|&&a| a >= groupoid.arrow_count()) {
            return Err(SemigroupError::ArrowOutOfRange(a));
        }
        for (i, &a) in arrows.iter().enumerate() {
            for &b in &arrows[i + 1..] {
                if groupoid.src(a) == groupoid.src(b) || groupoid.rng(a) == groupoid.rng(b) {
                    return Err(SemigroupError::NotABisection { a, b });
                }
            }
        }
        Ok(Bisection { groupoid, arrows })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn contains(&self, a: Arrow) -> bool {
        self.arrows.binary_search(&a).is_ok()
    }

    /// `UV = {αβ : α ∈ U, β ∈ V, src(α) = rng(β)}`.
    pub fn product(&self, other: &Bisection) -> Result<Bisection, SemigroupError> {
        if self.groupoid != other.groupoid {
            return Err(SemigroupError::GroupoidMismatch);
        }
        let g = &self.groupoid;
        let arrows = self.arrows.iter().flat_map(|&a| other.arrows.iter().filter_map(move |&b| g.compose(a, b)));
        Ok(Bisection::new(g.clone(), arrows).expect("product of bisections is a bisection"))
    }

    /// `U⁻¹ = {α⁻¹ : α ∈ U}`.
    pub fn inverse(&self) -> Bisection {
        let g = &self.groupoid;
        Bisection::new(g.clone(), self.arrows.iter().map(|&a| g.inv(a))).expect("inverse of a bisection")
    }

    pub fn is_idempotent(&self) -> bool {
        self.arrows.iter().all(|&a| self.groupoid.is_unit(a))
    }

    /// The arrow of `U` with the given source unit.
    pub fn arrow_from(&self, x: Arrow) -> Option<Arrow> {
        self.arrows.iter().copied().find(|&a| self.groupoid.src(a) == x)
    }

    /// `θ_U = r ∘ (d|_U)⁻¹` applied to a unit.
    pub fn theta(&self, x: Arrow) -> Option<Arrow> {
        self.arrow_from(x).map(|a| self.groupoid.rng(a))
    }
}

/// An abstract finite inverse semigroup on `0..len` given by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSemigroup {
    len: usize,
    product: Vec<usize>,
    star: Vec<usize>,
    zero: Option<usize>,
}

impl InverseSemigroup {
    /// Build from a product table and involution, verifying the axioms.
    pub fn new(product: Vec<Vec<usize>>, star: Vec<usize>) -> Result<InverseSemigroup, SemigroupError> {
        let len = star.len();
        if product.len() != len || product.iter().any(|r| r.len() != len) {
            return Err(SemigroupError::Table("product table shape".into()));
        }
        let s = InverseSemigroup::from_parts(len, product.into_iter().flatten().collect(), star);
        s.check()?;
        Ok(s)
    }

    fn from_parts(len: usize, product: Vec<usize>, star: Vec<usize>) -> InverseSemigroup {
        let zero = (0..len).find(|&z| (0..len).all(|s| product[z * len + s] == z && product[s * len + z] == z));
        InverseSemigroup { len, product, star, zero }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.product[s * self.len + t]
    }

    pub fn star(&self, s: usize) -> usize {
        self.star[s]
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len).filter(|&e| self.is_idempotent(e)).collect()
    }

    /// Associativity, uniqueness of generalized inverses, agreement with the
    /// star table, and commutation of idempotents. Cubic in the size.
    pub fn check(&self) -> Result<(), SemigroupError> {
        let n = self.len;
        if let Some(&v) = self.product.iter().chain(&self.star).find(|&&v| v >= n) {
            return Err(SemigroupError::Table(format!("entry {v} out of range")));
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(SemigroupError::Table(format!("not associative on ({a},{b},{c})")));
                    }
                }
            }
        }
        for s in 0..n {
            let inverses: Vec<usize> =
                (0..n).filter(|&t| self.mul(self.mul(s, t), s) == s && self.mul(self.mul(t, s), t) == t).collect();
            if inverses != [self.star[s]] {
                return Err(SemigroupError::Table(format!("element {s} has generalized inverses {inverses:?}")));
            }
        }
        let idem = self.idempotents();
        for &e in &idem {
            for &f in &idem {
                if self.mul(e, f) != self.mul(f, e) {
                    return Err(SemigroupError::Table(format!("idempotents {e} and {f} do not commute")));
                }
            }
        }
        Ok(())
    }
}

/// `Bis(G)` with its multiplication table.
#[derive(Debug, Clone)]
pub struct BisectionSemigroup {
    groupoid: Arc<FiniteGroupoid>,
    bisections: Vec<Bisection>,
    index: HashMap<Vec<Arrow>, usize>,
    semigroup: InverseSemigroup,
}

impl BisectionSemigroup {
    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn bisections(&self) -> &[Bisection] {
        &self.bisections
    }

    pub fn get(&self, i: usize) -> &Bisection {
        &self.bisections[i]
    }

    pub fn semigroup(&self) -> &InverseSemigroup {
        &self.semigroup
    }

    pub fn index_of(&self, u: &Bisection) -> Option<usize> {
        self.index.get(u.arrows()).copied()
    }

    pub fn index_of_arrows(&self, arrows: &[Arrow]) -> Option<usize> {
        let mut v = arrows.to_vec();
        v.sort_unstable();
        v.dedup();
        self.index.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.bisections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bisections.is_empty()
    }
}

/// Every bisection of `g`, ordered lexicographically by sorted arrow list
/// (so `∅` comes first and is the zero element).
pub fn enumerate_bisections(g: &Arc<FiniteGroupoid>, cap: usize) -> Result<BisectionSemigroup, SemigroupError> {
    g.check_cap(cap)?;
    // backtrack over units as sources: each unit contributes no arrow or one
    // arrow whose range is still free
    let by_src: Vec<Vec<Arrow>> = g.units().iter().map(|&x| g.arrows_from(x)).collect();
    let mut found: Vec<Vec<Arrow>> = Vec::new();
    let mut used_rng = vec![false; g.arrow_count()];
    let mut chosen = Vec::new();
    fn go(
        g: &FiniteGroupoid,
        by_src: &[Vec<Arrow>],
        i: usize,
        chosen: &mut Vec<Arrow>,
        used_rng: &mut [bool],
        found: &mut Vec<Vec<Arrow>>,
    ) {
        if i == by_src.len() {
            let mut v = chosen.clone();
            v.sort_unstable();
            found.push(v);
            return;
        }
        go(g, by_src, i + 1, chosen, used_rng, found);
        for &a in &by_src[i] {
            let r = g.rng(a);
            if used_rng[r] {
                continue;
            }
            used_rng[r] = true;
            chosen.push(a);
            go(g, by_src, i + 1, chosen, used_rng, found);
            chosen.pop();
            used_rng[r] = false;
        }
    }
    go(g, &by_src, 0, &mut chosen, &mut used_rng, &mut found);
    found.sort();

    let bisections: Vec<Bisection> =
        found.iter().map(|v| Bisection { groupoid: g.clone(), arrows: v.clone() }).collect();
    let index: HashMap<Vec<Arrow>, usize> = found.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    let len = bisections.len();
    let mut product = Vec::with_capacity(len * len);
    for u in &bisections {
        for v in &bisections {
            let uv = u.product(v)?;
            product.push(index[uv.arrows()]);
        }
    }
    let star = bisections.iter().map(|u| index[u.inverse().arrows()]).collect();
    let semigroup = InverseSemigroup::from_parts(len, product, star);
    Ok(BisectionSemigroup { groupoid: g.clone(), bisections, index, semigroup })
}

/// An action of an inverse semigroup on the points `0..points` by partial bijections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupAction {
    semigroup: InverseSemigroup,
    points: usize,
    maps: Vec<Vec<Option<usize>>>,
}

impl SemigroupAction {
    /// `maps[s][x]` is `α_s(x)` when `x ∈ D_{s*s}`.
    pub fn new(
        semigroup: InverseSemigroup,
        points: usize,
        maps: Vec<Vec<Option<usize>>>,
    ) -> Result<SemigroupAction, SemigroupError> {
        let fail = |element, point, reason| Err(SemigroupError::Action { element, point, reason });
        if maps.len() != semigroup.len() {
            return fail(0, 0, "one partial map per element is required");
        }
        for (s, m) in maps.iter().enumerate() {
            if m.len() != points {
                return fail(s, 0, "partial map has the wrong length");
            }
            let mut hit = vec![false; points];
            for (x, y) in m.iter().enumerate() {
                if let Some(y) = *y {
                    if y >= points {
                        return fail(s, x, "image out of range");
                    }
                    if hit[y] {
                        return fail(s, x, "partial map is not injective");
                    }
                    hit[y] = true;
                }
            }
        }
        for s in 0..semigroup.len() {
            for t in 0..semigroup.len() {
                let st = semigroup.mul(s, t);
                for x in 0..points {
                    let composed = maps[t][x].and_then(|y| maps[s][y]);
                    if composed != maps[st][x] {
                        return fail(st, x, "α_s ∘ α_t differs from α_st");
                    }
                }
            }
        }
        let idempotents = semigroup.idempotents();
        if let Some(x) = (0..points).find(|&x| !idempotents.iter().any(|&e| maps[e][x].is_some())) {
            return fail(0, x, "point lies in no idempotent domain");
        }
        Ok(SemigroupAction { semigroup, points, maps })
    }

    /// The canonical action of `Bis(G)` on the unit space; point `i` is `g.units()[i]`.
    pub fn canonical(bis: &BisectionSemigroup) -> SemigroupAction {
        let g = bis.groupoid();
        let units = g.units();
        let point_of = |unit: Arrow| units.binary_search(&unit).expect("unit");
        let maps = bis.bisections().iter().map(|u| units.iter().map(|&x| u.theta(x).map(point_of)).collect()).collect();
        SemigroupAction { semigroup: bis.semigroup().clone(), points: units.len(), maps }
    }

    pub fn semigroup(&self) -> &InverseSemigroup {
        &self.semigroup
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn act(&self, s: usize, x: usize) -> Option<usize> {
        self.maps[s][x]
    }

    pub fn in_domain(&self, s: usize, x: usize) -> bool {
        self.maps[s][x].is_some()
    }
}

/// The groupoid of germs `S⋉X` of an action, with a representative `(s, x)` for every arrow.
#[derive(Debug, Clone)]
pub struct GermGroupoid {
    pub groupoid: Arc<FiniteGroupoid>,
    /// Least representative `(s, x)` of each germ, indexed by arrow id.
    pub representatives: Vec<(usize, usize)>,
    class_of: HashMap<(usize, usize), Arrow>,
}

impl GermGroupoid {
    /// The arrow `[s, x]`, if `x ∈ D_{s*s}`.
    pub fn germ(&self, s: usize, x: usize) -> Option<Arrow> {
        self.class_of.get(&(s, x)).copied()
    }
}

/// Build `S⋉X`. Germs are numbered by their lexicographically least representative.
pub fn germ_groupoid(action: &SemigroupAction) -> Result<GermGroupoid, SemigroupError> {
    let sg = &action.semigroup;
    let idem = sg.idempotents();
    let mut class_of: HashMap<(usize, usize), Arrow> = HashMap::new();
    let mut representatives: Vec<(usize, usize)> = Vec::new();
    // classes per point by union-find over S*X
    let mut pending: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for x in 0..action.points {
        let members: Vec<usize> = (0..sg.len()).filter(|&s| action.in_domain(s, x)).collect();
        let mut parent: Vec<usize> = (0..members.len()).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let (s, t) = (members[i], members[j]);
                let same = idem.iter().any(|&e| action.in_domain(e, x) && sg.mul(s, e) == sg.mul(t, e));
                if same {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        for i in 0..members.len() {
            let root = find(&mut parent, i);
            pending.push(((members[root], x), (members[i], x)));
        }
    }
    // number classes by least representative (s, x)
    let mut roots: Vec<(usize, usize)> = pending.iter().map(|&(r, _)| r).collect();
    roots.sort_unstable();
    roots.dedup();
    let root_id: HashMap<(usize, usize), Arrow> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    for &(root, member) in &pending {
        class_of.insert(member, root_id[&root]);
    }
    representatives.extend(roots.iter().copied());

    let n = representatives.len();
    let germ = |s: usize, x: usize| -> Result<Arrow, SemigroupError> {
        class_of.get(&(s, x)).copied().ok_or(SemigroupError::Action {
            element: s,
            point: x,
            reason: "germ outside S*X",
        })
    };
    let mut unit_at = vec![usize::MAX; action.points];
    let mut is_unit = vec![false; n];
    let (mut src, mut rng, mut inv) = (vec![0; n], vec![0; n], vec![0; n]);
    for (id, &(s, x)) in representatives.iter().enumerate() {
        if sg.is_idempotent(s) {
            is_unit[id] = true;
            unit_at[x] = id;
        }
    }
    for (id, &(s, x)) in representatives.iter().enumerate() {
        let y = action.act(s, x).expect("x in domain");
        src[id] = unit_at[x];
        rng[id] = unit_at[y];
        inv[id] = germ(sg.star(s), y)?;
    }
    let mut compose = Vec::new();
    for (a, &(s, _)) in representatives.iter().enumerate() {
        for (b, &(t, x)) in representatives.iter().enumerate() {
            if src[a] == rng[b] {
                compose.push([a, b, germ(sg.mul(s, t), x)?]);
            }
        }
    }
    let tables = crate::groupoid::GroupoidTables {
        arrows: n,
        units: (0..n).filter(|&i| is_unit[i]).collect(),
        src,
        rng,
        compose,
        inv,
    };
    let groupoid = Arc::new(FiniteGroupoid::from_tables(&tables)?);
    Ok(GermGroupoid { groupoid, representatives, class_of })
}

/// `Bis(G)⋉G⁽⁰⁾ ≅ G` with all the intermediate objects.
#[derive(Debug, Clone)]
pub struct CanonicalIso {
    pub bisections: BisectionSemigroup,
    pub action: SemigroupAction,
    pub germs: GermGroupoid,
    /// `[U, x] ↦` the arrow of `U` with source `x`.
    pub iso: GroupoidHom,
}

pub fn canonical_iso(g: &Arc<FiniteGroupoid>, cap: usize) -> Result<CanonicalIso, SemigroupError> {
    let bisections = enumerate_bisections(g, cap)?;
    let action = SemigroupAction::canonical(&bisections);
    let germs = germ_groupoid(&action)?;
    let map = germs
        .representatives
        .iter()
        .map(|&(u, x)| bisections.get(u).arrow_from(g.units()[x]).expect("x in d(U)"))
        .collect();
    let iso = GroupoidHom::new(germs.groupoid.clone(), g.clone(), map)?;
    iso.check_bijective()?;
    Ok(CanonicalIso { bisections, action, germs, iso })
}

/// The induced homomorphism `[s, x] ↦ [ψ(s), σ(x)]` between germ groupoids.
#[derive(Debug, Clone)]
pub struct InducedGermHom {
    pub source: GermGroupoid,
    pub target: GermGroupoid,
    pub hom: GroupoidHom,
}

pub fn induced_germ_hom(
    sigma: &[usize],
    psi: &[usize],
    alpha: &SemigroupAction,
    beta: &SemigroupAction,
) -> Result<InducedGermHom, SemigroupError> {
    let (s_sg, t_sg) = (&alpha.semigroup, &beta.semigroup);
    if sigma.len() != alpha.points || sigma.iter().any(|&y| y >= beta.points) {
        return Err(SemigroupError::Action { element: 0, point: 0, reason: "point map has the wrong shape" });
    }
    if psi.len() != s_sg.len() || psi.iter().any(|&t| t >= t_sg.len()) {
        return Err(SemigroupError::Table("semigroup map has the wrong shape".into()));
    }
    for s in 0..s_sg.len() {
        for t in 0..s_sg.len() {
            if psi[s_sg.mul(s, t)] != t_sg.mul(psi[s], psi[t]) {
                return Err(SemigroupError::NotSemigroupHom(s, t));
            }
        }
    }
    for s in 0..s_sg.len() {
        let ss = s_sg.mul(s_sg.star(s), s);
        for x in 0..alpha.points {
            if !alpha.in_domain(ss, x) {
                continue;
            }
            let ok =
                beta.in_domain(psi[ss], sigma[x]) && beta.act(psi[s], sigma[x]) == alpha.act(s, x).map(|y| sigma[y]);
            if !ok {
                return Err(SemigroupError::NotEquivariant { element: s, point: x });
            }
        }
    }
    let source = germ_groupoid(alpha)?;
    let target = germ_groupoid(beta)?;
    let map = source
        .representatives
        .iter()
        .map(|&(s, x)| target.germ(psi[s], sigma[x]).expect("equivariance puts σ(x) in the domain of ψ(s)"))
        .collect();
    let hom = GroupoidHom::new(source.groupoid.clone(), target.groupoid.clone(), map)?;
    Ok(InducedGermHom { source, target, hom })
}

/// Number of partial injections of an `n`-set: `Σ_k C(n,k)² k!`.
pub fn partial_injection_count(n: u64) -> u64 {
    let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
    (0..=n).map(|k| binom(n, k) * binom(n, k) * (1..=k).product::<u64>()).sum()
}
