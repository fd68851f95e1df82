//! Finite groups given by multiplication tables.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("multiplication table must be {order}×{order}")]
    Shape { order: usize },
    #[error("table entry {value} is out of range")]
    OutOfRange { value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("multiplication is not associative on ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
}

/// A finite group on the elements `0..order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
        let order = rows.len();
        if order == 0 || rows.iter().any(|r| r.len() != order) {
            return Err(GroupError::Shape { order });
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        if let Some(&value) = table.iter().find(|&&v| v >= order) {
            return Err(GroupError::OutOfRange { value });
        }
        let m = |a: usize, b: usize| table[a * order + b];
        let identity =
            (0..order).find(|&e| (0..order).all(|a| m(e, a) == a && m(a, e) == a)).ok_or(GroupError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(order);
        for a in 0..order {
            let b = (0..order).find(|&b| m(a, b) == identity && m(b, a) == identity).ok_or(GroupError::NoInverse(a))?;
            inverse.push(b);
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup { order, table, identity, inverse })
    }

    /// `Z/n` with element `k` standing for the `k`-th power of a generator.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(rows).expect("cyclic group table")
    }

    /// The symmetric group on `n` letters, elements in lexicographic order of
    /// their one-line notation; `(p·q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> FiniteGroup {
        let perms = permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).expect("permutation");
        let rows = perms
            .iter()
            .map(|p| perms.iter().map(|q| index(&q.iter().map(|&i| p[i]).collect::<Vec<_>>())).collect())
            .collect();
        FiniteGroup::from_table(rows).expect("symmetric group table")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    /// The subgroup generated by all commutators, found by closure.
    pub fn commutator_subgroup(&self) -> BTreeSet<usize> {
        let gens: BTreeSet<usize> = self
            .elements()
            .flat_map(|a| self.elements().map(move |b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        self.closure(&gens)
    }

    pub fn closure(&self, gens: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = gens.clone();
        set.insert(self.identity);
        loop {
            let products: Vec<usize> =
                set.iter().flat_map(|&a| set.iter().map(move |&b| (a, b))).map(|(a, b)| self.mul(a, b)).collect();
            let before = set.len();
            set.extend(products);
            if set.len() == before {
                return set;
            }
        }
    }

    /// Left cosets of a normal subgroup: `coset_of[g]` numbers cosets by least member.
    pub fn cosets(&self, normal: &BTreeSet<usize>) -> Vec<usize> {
        let mut coset_of = vec![usize::MAX; self.order];
        let mut next = 0;
        for g in self.elements() {
            if coset_of[g] != usize::MAX {
                continue;
            }
            for &n in normal {
                coset_of[self.mul(g, n)] = next;
            }
            next += 1;
        }
        coset_of
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<usize>>> for FiniteGroup {
    type Error = GroupError;
    fn try_from(rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        FiniteGroup::from_table(rows)
    }
}

impl From<FiniteGroup> for Vec<Vec<usize>> {
    fn from(g: FiniteGroup) -> Self {
        g.rows()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Sign of a permutation of `S_n` given by its index in [`FiniteGroup::symmetric`].
pub fn permutation_sign(n: usize, index: usize) -> i8 {
    let p = &permutations(n)[index];
    let mut inversions = 0;
    for i in 0..n {
        for j in i + 1..n {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}
