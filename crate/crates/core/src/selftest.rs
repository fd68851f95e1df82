//! A seeded, deterministic property suite over a standard corpus of small
//! groupoids. `selftest` runs it and reports one check per property.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::sync::Arc;

use crate::algebra::{left_regular, AlgebraElement};
use crate::autgroup::{enumerate_semidirect, faut_test, psi, sd_multiply};
use crate::cocycle::enumerate_cocycles;
use crate::decomposition::{build_phi, decompose, DecompositionData};
use crate::families::{self, FamilySpec};
use crate::group::FiniteGroup;
use crate::groupoid::{validate, FiniteGroupoid, GroupoidTables};
use crate::hom::{search_homs, GroupoidHom, HomSearch};
use crate::report::{digest, round12, Report};
use crate::semigroup::{canonical_iso, enumerate_bisections, partial_injection_count};
use crate::slice::{same_subspace, slice_of_bisection, slice_product};

/// A named member of the test corpus.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub groupoid: Arc<FiniteGroupoid>,
}

fn klein() -> FiniteGroup {
    FiniteGroup::from_table((0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect()).expect("Klein four-group")
}

/// Pair groupoids up to 3 points, cyclic groups up to order 4, group bundles
/// over up to 3 points, transformation groupoids with `|Γ|, |X| ≤ 4`, and a
/// few disjoint unions; members above `cap` arrows are left out.
pub fn corpus(cap: usize) -> Vec<CorpusEntry> {
    let z2 = FiniteGroup::cyclic(2);
    let z3 = FiniteGroup::cyclic(3);
    let z4 = FiniteGroup::cyclic(4);
    let mut out: Vec<(String, FiniteGroupoid)> = Vec::new();
    for n in 1..=3 {
        out.push((format!("pair({n})"), families::pair(n).expect("pair")));
    }
    for n in 1..=4 {
        out.push((format!("cyclic_group({n})"), families::cyclic_group(n).expect("cyclic")));
    }
    for orders in [&[1, 1][..], &[2, 1], &[2, 2], &[3, 1], &[1, 1, 1], &[2, 1, 1], &[3, 2, 1], &[4, 2, 1]] {
        out.push((format!("group_bundle({orders:?})"), families::group_bundle(orders).expect("bundle")));
    }
    let transformations: [(&str, &FiniteGroup, usize, Vec<Vec<usize>>); 7] = [
        ("Z/2 swapping 2 points", &z2, 2, vec![vec![0, 1], vec![1, 0]]),
        ("Z/2 swapping 2 of 3 points", &z2, 3, vec![vec![0, 1, 2], vec![1, 0, 2]]),
        ("Z/2 trivially on 2 points", &z2, 2, vec![vec![0, 1], vec![0, 1]]),
        ("Z/3 rotating 3 points", &z3, 3, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]),
        ("Z/4 rotating 4 points", &z4, 4, (0..4).map(|g| (0..4).map(|x| (x + g) % 4).collect()).collect()),
        ("Z/4 through Z/2 on 2 points", &z4, 2, (0..4).map(|g| (0..2).map(|x| (x + g) % 2).collect()).collect()),
        ("Klein group on 2 points", &klein(), 2, (0..4).map(|g| (0..2).map(|x| x ^ (g & 1)).collect()).collect()),
    ];
    for (name, group, points, action) in transformations {
        out.push((
            format!("transformation({name})"),
            families::transformation(group, points, &action).expect("action"),
        ));
    }
    let unions = [
        FamilySpec::DisjointUnion(vec![FamilySpec::Pair(2), FamilySpec::Pair(1)]),
        FamilySpec::DisjointUnion(vec![FamilySpec::Pair(2), FamilySpec::CyclicGroup(2)]),
        FamilySpec::DisjointUnion(vec![FamilySpec::Pair(2), FamilySpec::Pair(2)]),
        FamilySpec::DisjointUnion(vec![FamilySpec::CyclicGroup(2), FamilySpec::CyclicGroup(3)]),
    ];
    for spec in unions {
        out.push((
            format!("disjoint_union({})", serde_json::to_string(&spec).expect("json")),
            families::make_family(&spec).expect("union"),
        ));
    }
    out.into_iter()
        .filter(|(_, g)| g.arrow_count() <= cap)
        .map(|(name, g)| CorpusEntry { name, groupoid: Arc::new(g) })
        .collect()
}

/// One random single-entry change to the tables, with a description.
///
/// Kinds: toggle the unit flag of an arrow; change one `src`, `rng` or `inv`
/// entry; change the result of one composition; delete one composition.
/// The new value always differs from the old one.
pub fn mutate(t: &GroupoidTables, rng: &mut impl Rng) -> (GroupoidTables, String) {
    let mut m = t.clone();
    let n = t.arrows;
    let other = |rng: &mut dyn rand::RngCore, old: usize| {
        let v = rng.gen_range(0..n - 1);
        if v >= old {
            v + 1
        } else {
            v
        }
    };
    assert!(n >= 2, "mutations need at least two arrows");
    let description = match rng.gen_range(0..6) {
        0 => {
            let a = rng.gen_range(0..n);
            match m.units.binary_search(&a) {
                Ok(i) => {
                    m.units.remove(i);
                }
                Err(i) => m.units.insert(i, a),
            }
            format!("toggle unit flag of arrow {a}")
        }
        k @ 1..=3 => {
            let a = rng.gen_range(0..n);
            let (name, table) = match k {
                1 => ("src", &mut m.src),
                2 => ("rng", &mut m.rng),
                _ => ("inv", &mut m.inv),
            };
            let v = other(rng, table[a]);
            table[a] = v;
            format!("{name}[{a}] := {v}")
        }
        4 => {
            let i = rng.gen_range(0..m.compose.len());
            let v = other(rng, m.compose[i][2]);
            let [a, b, _] = m.compose[i];
            m.compose[i][2] = v;
            format!("compose({a},{b}) := {v}")
        }
        _ => {
            let i = rng.gen_range(0..m.compose.len());
            let [a, b, _] = m.compose.remove(i);
            format!("delete compose({a},{b})")
        }
    };
    (m, description)
}

/// Whether the validator reports anything at all for these tables.
pub fn is_rejected(t: &GroupoidTables) -> bool {
    match validate(t) {
        Err(_) => true,
        Ok(report) => !report.passed(),
    }
}

pub fn random_element(g: &Arc<FiniteGroupoid>, rng: &mut impl Rng) -> AlgebraElement {
    let coeff = g.arrows().map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    AlgebraElement::new(g.clone(), coeff).expect("finite coefficients")
}

/// Number of mutations in the negative suite.
pub const MUTATIONS: usize = 200;

/// Random elements drawn per corpus groupoid for the numerical checks.
pub const ELEMENTS_PER_GROUPOID: usize = 40;

/// Run the suite. Identical `seed` and `cap` give an identical report.
pub fn run_selftest(seed: u64, cap: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("selftest", digest(&[seed.to_string().as_bytes(), cap.to_string().as_bytes()]));
    let corpus = corpus(cap);
    let small: Vec<&CorpusEntry> = corpus.iter().filter(|e| e.groupoid.arrow_count() <= 9).collect();

    let invalid: Vec<&str> =
        corpus.iter().filter(|e| is_rejected(&e.groupoid.to_tables())).map(|e| e.name.as_str()).collect();
    report.check("axioms.corpus_valid", invalid.is_empty(), json!({ "groupoids": corpus.len(), "invalid": invalid }));

    let mutable: Vec<&CorpusEntry> = corpus.iter().filter(|e| e.groupoid.arrow_count() >= 2).collect();
    let mut misses = Vec::new();
    for _ in 0..MUTATIONS {
        let entry = mutable.choose(&mut rng).expect("nonempty corpus");
        let (tables, description) = mutate(&entry.groupoid.to_tables(), &mut rng);
        if !is_rejected(&tables) {
            misses.push(format!("{}: {description}", entry.name));
        }
    }
    let killed = MUTATIONS - misses.len();
    report.check(
        "axioms.mutation_kill",
        killed * 100 >= MUTATIONS * 99,
        json!({ "mutations": MUTATIONS, "killed": killed, "misses": misses }),
    );

    let (mut rep_residual, mut star_residual, mut cstar_error) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut elements = 0;
    for entry in &corpus {
        let g = &entry.groupoid;
        for _ in 0..ELEMENTS_PER_GROUPOID {
            let (f, h) = (random_element(g, &mut rng), random_element(g, &mut rng));
            let fh = f.convolve(&h).expect("same groupoid");
            for &x in g.units() {
                let lr = left_regular(g, x).expect("unit");
                let (rf, rh) = (lr.rep(&f), lr.rep(&h));
                rep_residual = rep_residual.max((lr.rep(&fh) - &rf * &rh).camax());
                star_residual = star_residual.max((lr.rep(&f.star()) - rf.adjoint()).camax());
            }
            let norm = f.reduced_norm();
            let err = (f.star().convolve(&f).expect("same groupoid").reduced_norm() - norm * norm).abs();
            cstar_error = cstar_error.max(err / norm.powi(2).max(1.0));
            elements += 1;
        }
    }
    report.check(
        "algebra.rep_homomorphism",
        rep_residual <= 1e-12 && star_residual <= 1e-12,
        json!({ "product_residual": round12(rep_residual), "star_residual": round12(star_residual) }),
    );
    report.check(
        "algebra.cstar_identity",
        cstar_error <= 1e-9,
        json!({ "elements": elements, "max_relative_error": round12(cstar_error) }),
    );

    let mut bisection_error = 0.0_f64;
    for entry in &small {
        let bis = enumerate_bisections(&entry.groupoid, cap).expect("under cap");
        for u in bis.bisections() {
            let mut f = AlgebraElement::zero(entry.groupoid.clone());
            for &a in u.arrows() {
                let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                f = f.add(&AlgebraElement::delta(entry.groupoid.clone(), a).scale(z)).expect("same groupoid");
            }
            bisection_error = bisection_error.max((f.reduced_norm() - f.sup_norm()).abs());
        }
    }
    report.check("algebra.bisection_norm", bisection_error <= 1e-12, json!({ "max_error": round12(bisection_error) }));

    let counts: Vec<(u64, usize, u64)> = (1..=3u64)
        .map(|n| {
            let g = Arc::new(families::pair(n as usize).expect("pair"));
            (n, enumerate_bisections(&g, cap.max(9)).expect("small").len(), partial_injection_count(n))
        })
        .collect();
    report.check(
        "semigroup.bisection_counts",
        counts.iter().all(|&(_, found, oracle)| found as u64 == oracle),
        json!(counts
            .iter()
            .map(|&(n, found, oracle)| json!({ "n": n, "found": found, "oracle": oracle }))
            .collect::<Vec<_>>()),
    );

    let failed_isos: Vec<&str> =
        corpus.iter().filter(|e| canonical_iso(&e.groupoid, cap).is_err()).map(|e| e.name.as_str()).collect();
    report.check("semigroup.canonical_iso", failed_isos.is_empty(), json!({ "failed": failed_isos }));

    let mut slice_pairs = 0;
    let mut slice_failures = Vec::new();
    for g in [families::pair(2), families::cyclic_group(3)] {
        let g = Arc::new(g.expect("family"));
        let bis = enumerate_bisections(&g, cap.max(9)).expect("small");
        for u in bis.bisections() {
            for v in bis.bisections() {
                let uv = u.product(v).expect("same groupoid");
                let prod = slice_product(&slice_of_bisection(u), &slice_of_bisection(v)).expect("same groupoid");
                if !same_subspace(&slice_of_bisection(&uv), &prod) {
                    slice_failures.push(json!([u.arrows(), v.arrows()]));
                }
                slice_pairs += 1;
            }
        }
    }
    report.check(
        "slices.multiplicative",
        slice_failures.is_empty(),
        json!({ "pairs": slice_pairs, "failures": slice_failures }),
    );

    let (mut roundtrips, mut roundtrip_failures) = (0, Vec::new());
    for ge in small.iter().filter(|e| e.groupoid.arrow_count() <= 6) {
        for he in small.iter().filter(|e| e.groupoid.is_effective() && e.groupoid.arrow_count() <= 6) {
            let (g, h) = (&ge.groupoid, &he.groupoid);
            for f in g.invariant_subsets(8).expect("few orbits") {
                let gf = Arc::new(g.restrict(&f).expect("invariant").groupoid);
                let cocycles = enumerate_cocycles(&gf, 4, cap).expect("under cap");
                for map in search_homs(&gf, h, HomSearch::InjectiveOnUnits, 4) {
                    let phi = GroupoidHom::new(gf.clone(), h.clone(), map).expect("search yields homs");
                    let c = cocycles.choose(&mut rng).expect("trivial cocycle exists").clone();
                    let data = DecompositionData::new(g.clone(), f.clone(), phi, c).expect("admissible");
                    let ok = build_phi(g, h, &data)
                        .ok()
                        .and_then(|m| decompose(&m).ok())
                        .is_some_and(|back| back.matches(&data, 1e-9));
                    if !ok {
                        roundtrip_failures.push(format!("{} → {} on {:?}", ge.name, he.name, f.members()));
                    }
                    roundtrips += 1;
                }
            }
        }
    }
    report.check(
        "decomposition.roundtrip",
        roundtrip_failures.is_empty(),
        json!({ "cases": roundtrips, "failures": roundtrip_failures }),
    );

    let r2 = Arc::new(families::pair(2).expect("pair"));
    let pairs = enumerate_semidirect(&r2, 2, cap.max(9)).expect("small");
    let mut law_failures = 0;
    let mut psi_residual = 0.0_f64;
    for a in &pairs {
        for b in &pairs {
            let ab = sd_multiply(a, b).expect("same groupoid");
            let lhs = psi(&ab);
            let rhs = psi(a).after(&psi(b)).expect("same groupoid");
            psi_residual = psi_residual.max(lhs.max_abs_diff(&rhs));
            for c in &pairs {
                let left = sd_multiply(&ab, c).expect("same groupoid");
                let right = sd_multiply(a, &sd_multiply(b, c).expect("same groupoid")).expect("same groupoid");
                if left != right {
                    law_failures += 1;
                }
            }
        }
    }
    report.check(
        "autgroup.semidirect_laws",
        law_failures == 0 && psi_residual <= 1e-12,
        json!({ "elements": pairs.len(), "associativity_failures": law_failures, "psi_residual": round12(psi_residual) }),
    );

    let faut_mismatch = pairs.iter().filter(|p| faut_test(p) != p.phi().is_identity()).count();
    report.check("autgroup.faut_identity_on_units", faut_mismatch == 0, json!({ "mismatches": faut_mismatch }));

    let failed = report.checks.iter().filter(|c| !c.pass).count();
    report.result = json!({ "seed": seed, "cap": cap, "checks": report.checks.len(), "failed": failed });
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_respects_the_cap() {
        assert!(corpus(16).len() > corpus(4).len());
        assert!(corpus(4).iter().all(|e| e.groupoid.arrow_count() <= 4));
    }

    #[test]
    fn mutations_change_exactly_one_thing() {
        let t = families::pair(2).unwrap().to_tables();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (m, _) = mutate(&t, &mut rng);
            assert_ne!(m, t);
        }
    }
}
