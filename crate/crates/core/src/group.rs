// SPDX-License-Identifier: Apache-2.0

//! Finite groups given by multiplication tables, their subgroups, and left
//! coset spaces with the natural action `g · (g′H) = (gg′)H`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, C64};

/// Associativity is always checked up to this order.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 64;

/// The group families this crate can build and knows the duals of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Product(Box<GroupKind>, Box<GroupKind>),
    Quaternion,
    Dihedral8,
}

impl GroupKind {
    pub fn product(a: GroupKind, b: GroupKind) -> Self {
        GroupKind::Product(Box::new(a), Box::new(b))
    }

    /// The three abelian groups of order 8.
    pub fn abelian_order8() -> [GroupKind; 3] {
        use GroupKind::*;
        [
            Cyclic(8),
            GroupKind::product(Cyclic(2), Cyclic(4)),
            GroupKind::product(Cyclic(2), GroupKind::product(Cyclic(2), Cyclic(2))),
        ]
    }

    /// All five groups of order 8.
    pub fn all_order8() -> Vec<GroupKind> {
        let mut v = Self::abelian_order8().to_vec();
        v.push(GroupKind::Quaternion);
        v.push(GroupKind::Dihedral8);
        v
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupKind::Product(a, b) => write!(f, "{a}x{b}"),
            GroupKind::Quaternion => write!(f, "quaternion"),
            GroupKind::Dihedral8 => write!(f, "dihedral8"),
        }
    }
}

/// Parses `cyclic:N`, `quaternion`, `dihedral8`, and `x`-separated products
/// such as `cyclic:2xcyclic:4`.
impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('x').map(str::trim).collect();
        let mut kinds = parts.iter().map(|p| parse_atom(p)).collect::<Result<Vec<_>>>()?;
        let mut acc = kinds.pop().expect("split yields at least one part");
        while let Some(k) = kinds.pop() {
            acc = GroupKind::product(k, acc);
        }
        Ok(acc)
    }
}

fn parse_atom(s: &str) -> Result<GroupKind> {
    match s {
        "quaternion" | "Q" => Ok(GroupKind::Quaternion),
        "dihedral8" | "dihedral" | "D" => Ok(GroupKind::Dihedral8),
        _ => {
            let n = s
                .strip_prefix("cyclic:")
                .or_else(|| s.strip_prefix('Z'))
                .ok_or_else(|| Error::NotImplemented(format!("unsupported group '{s}'")))?;
            let n: usize = n
                .parse()
                .map_err(|_| Error::Domain(format!("bad cyclic order in '{s}'")))?;
            Ok(GroupKind::Cyclic(n))
        }
    }
}

/// A finite group as a validated multiplication table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    kind: Option<GroupKind>,
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// JSON shape `{"order": n, "names": [...], "mul": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub names: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates a multiplication table: Latin square, two-sided identity, and
    /// associativity (always for order ≤ 64, otherwise only if `check_assoc`).
    pub fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>, check_assoc: bool) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::Domain("group must have at least one element".into()));
        }
        if names.len() != n {
            return Err(Error::Dimension(format!(
                "{} names for a table of order {n}",
                names.len()
            )));
        }
        for row in &mul {
            if row.len() != n || !is_permutation(row.iter().copied(), n) {
                return Err(Error::Domain("multiplication table is not a Latin square".into()));
            }
        }
        for c in 0..n {
            if !is_permutation((0..n).map(|r| mul[r][c]), n) {
                return Err(Error::Domain("multiplication table is not a Latin square".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or_else(|| Error::Domain("no two-sided identity".into()))?;
        if check_assoc || n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                            return Err(Error::Domain(format!(
                                "not associative at ({}, {}, {})",
                                names[a], names[b], names[c]
                            )));
                        }
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|g| (0..n).find(|&h| mul[g][h] == identity).expect("Latin square"))
            .collect();
        Ok(FiniteGroup {
            kind: None,
            names,
            mul,
            identity,
            inverse,
        })
    }

    pub fn from_json(json: &GroupJson) -> Result<Self> {
        if json.order != json.mul.len() {
            return Err(Error::Dimension("order does not match table size".into()));
        }
        Self::from_table(json.names.clone(), json.mul.clone(), false)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            order: self.order(),
            names: self.names.clone(),
            mul: self.mul.clone(),
        }
    }

    pub fn kind(&self) -> Option<&GroupKind> {
        self.kind.as_ref()
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    /// First element (by index) that generates the whole group.
    pub fn cyclic_generator(&self) -> Option<usize> {
        self.elements().find(|&g| self.element_order(g) == self.order())
    }

    /// Map from element order to the number of elements with that order.
    pub fn order_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for g in self.elements() {
            *census.entry(self.element_order(g)).or_insert(0) += 1;
        }
        census
    }

    /// A greedy generating set: scan elements, keep those outside the
    /// subgroup generated so far.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current: BTreeSet<usize> = [self.identity].into();
        for g in self.elements() {
            if !current.contains(&g) {
                gens.push(g);
                current = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = [self.identity].into();
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }
}

fn is_permutation(it: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for x in it {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Canonical 2×2 matrix realization of the quaternion or dihedral group,
/// in element-index order. `None` for other kinds.
///
/// Quaternion: `±𝟙, ±iσ₁, ∓iσ₂, ±iσ₃` for `±1, ±i, ±j, ±k`.
/// Dihedral: `±𝟙, ±iσ₁, ±σ₂, ±σ₃`.
pub fn matrix_realization(kind: &GroupKind) -> Option<Vec<ComplexMatrix>> {
    let [s1, s2, s3] = pauli();
    let id = ComplexMatrix::identity(2);
    let i = C64::new(0.0, 1.0);
    let pm = |m: ComplexMatrix| [m.clone(), m.scale_real(-1.0)];
    let parts = match kind {
        GroupKind::Quaternion => [
            pm(id),
            pm(s1.scale(i)),
            pm(s2.scale(-i)),
            pm(s3.scale(i)),
        ],
        GroupKind::Dihedral8 => [pm(id), pm(s1.scale(i)), pm(s2), pm(s3)],
        _ => return None,
    };
    Some(parts.into_iter().flatten().collect())
}

fn realization_names(kind: &GroupKind) -> Vec<String> {
    let names: &[&str] = match kind {
        GroupKind::Quaternion => &["1", "-1", "i", "-i", "j", "-j", "k", "-k"],
        _ => &["1", "-1", "is1", "-is1", "s2", "-s2", "s3", "-s3"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

pub fn build_group(kind: &GroupKind) -> Result<FiniteGroup> {
    let mut g = match kind {
        GroupKind::Cyclic(0) => {
            return Err(Error::Domain("cyclic group order must be at least 1".into()))
        }
        GroupKind::Cyclic(n) => {
            let n = *n;
            let names = (0..n).map(|k| k.to_string()).collect();
            let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
            FiniteGroup::from_table(names, mul, false)?
        }
        GroupKind::Product(a, b) => {
            let ga = build_group(a)?;
            let gb = build_group(b)?;
            let (na, nb) = (ga.order(), gb.order());
            let names = (0..na * nb)
                .map(|x| format!("({},{})", ga.name(x / nb), gb.name(x % nb)))
                .collect();
            let mul = (0..na * nb)
                .map(|x| {
                    (0..na * nb)
                        .map(|y| ga.mul(x / nb, y / nb) * nb + gb.mul(x % nb, y % nb))
                        .collect()
                })
                .collect();
            FiniteGroup::from_table(names, mul, false)?
        }
        GroupKind::Quaternion | GroupKind::Dihedral8 => {
            let mats = matrix_realization(kind).expect("non-abelian order-8 kinds");
            let lookup = |m: &ComplexMatrix| {
                mats.iter()
                    .position(|x| (x - m).frobenius_norm() < 1e-12)
                    .expect("realization is closed under multiplication")
            };
            let mul = mats
                .iter()
                .map(|a| mats.iter().map(|b| lookup(&a.matmul(b))).collect())
                .collect();
            FiniteGroup::from_table(realization_names(kind), mul, false)?
        }
    };
    g.kind = Some(kind.clone());
    Ok(g)
}

/// A subgroup, stored as its sorted member indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    /// Validates closure under multiplication and inverses.
    pub fn new(g: &FiniteGroup, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if set.iter().any(|&x| x >= g.order()) {
            return Err(Error::Domain("subgroup member index out of range".into()));
        }
        if !set.contains(&g.identity()) {
            return Err(Error::Domain("subgroup must contain the identity".into()));
        }
        for &a in &set {
            if !set.contains(&g.inv(a)) {
                return Err(Error::Domain(format!(
                    "not closed under inverse at {}",
                    g.name(a)
                )));
            }
            for &b in &set {
                if !set.contains(&g.mul(a, b)) {
                    return Err(Error::Domain(format!(
                        "not closed under multiplication at ({}, {})",
                        g.name(a),
                        g.name(b)
                    )));
                }
            }
        }
        Ok(Subgroup {
            members: set.into_iter().collect(),
        })
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Subgroup {
            members: vec![g.identity()],
        }
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Subgroup {
            members: g.elements().collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Smallest subgroup containing `generators`.
pub fn subgroup_generated(g: &FiniteGroup, generators: &[usize]) -> Result<Subgroup> {
    if let Some(&bad) = generators.iter().find(|&&x| x >= g.order()) {
        return Err(Error::Domain(format!("generator index {bad} out of range")));
    }
    Ok(Subgroup {
        members: g.closure(generators).into_iter().collect(),
    })
}

/// Every subgroup of `g`, sorted by order then members. Obtained by closing
/// the set of cyclic subgroups under pairwise joins.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut found: BTreeSet<Vec<usize>> = g
        .elements()
        .map(|x| g.closure(&[x]).into_iter().collect())
        .collect();
    loop {
        let current: Vec<Vec<usize>> = found.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i + 1..] {
                let gens: Vec<usize> = a.iter().chain(b).copied().collect();
                let joined: Vec<usize> = g.closure(&gens).into_iter().collect();
                grew |= found.insert(joined);
            }
        }
        if !grew {
            break;
        }
    }
    let mut subs: Vec<Subgroup> = found.into_iter().map(|members| Subgroup { members }).collect();
    subs.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    subs
}

/// Left cosets `G/H` with the action table of `G`.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    subgroup: Subgroup,
    cosets: Vec<Vec<usize>>,
    representatives: Vec<usize>,
    coset_of: Vec<usize>,
    /// `action[g][c]` is the coset `g · c`.
    action: Vec<Vec<usize>>,
}

impl CosetSpace {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    /// Smallest element index in each coset.
    pub fn representative(&self, c: usize) -> usize {
        self.representatives[c]
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    pub fn act(&self, g: usize, c: usize) -> usize {
        self.action[g][c]
    }

    /// Whether the elements in `subset` act transitively on the cosets.
    pub fn is_transitive_under(&self, subset: &[usize]) -> bool {
        let start = self.coset_of[self.representatives[0]];
        let orbit: BTreeSet<usize> = subset.iter().map(|&g| self.act(g, start)).collect();
        orbit.len() == self.len()
    }
}

pub fn coset_space(g: &FiniteGroup, h: &Subgroup) -> Result<CosetSpace> {
    let h = Subgroup::new(g, h.members().iter().copied())?;
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut cosets = Vec::new();
    let mut representatives = Vec::new();
    for x in g.elements() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let mut coset: Vec<usize> = h.members().iter().map(|&m| g.mul(x, m)).collect();
        coset.sort_unstable();
        for &y in &coset {
            coset_of[y] = cosets.len();
        }
        representatives.push(x);
        cosets.push(coset);
    }
    let action: Vec<Vec<usize>> = g
        .elements()
        .map(|a| representatives.iter().map(|&r| coset_of[g.mul(a, r)]).collect())
        .collect();
    for a in g.elements() {
        for b in g.elements() {
            if action[a][coset_of[b]] != coset_of[g.mul(a, b)] {
                return Err(Error::Inconsistency("coset action is not well defined".into()));
            }
        }
    }
    Ok(CosetSpace {
        subgroup: h,
        cosets,
        representatives,
        coset_of,
        action,
    })
}

/// A cyclic subgroup `⟨generator⟩` acting transitively on `G/H`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTransitive {
    pub generator: usize,
    pub subgroup: Subgroup,
}

/// Scans every `g₀ ∈ G` for a cyclic subgroup `⟨g₀⟩` that acts transitively on
/// `G/H`. The scan is exhaustive, so `Ok(None)` proves that none exists.
pub fn find_cyclic_transitive_subgroup(
    g: &FiniteGroup,
    h: &Subgroup,
) -> Result<Option<CyclicTransitive>> {
    if h.order() == g.order() {
        return Err(Error::Domain("H must be a proper subgroup".into()));
    }
    let space = coset_space(g, h)?;
    for g0 in g.elements() {
        let sub = subgroup_generated(g, &[g0])?;
        if space.is_transitive_under(sub.members()) {
            return Ok(Some(CyclicTransitive {
                generator: g0,
                subgroup: sub,
            }));
        }
    }
    Ok(None)
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}
