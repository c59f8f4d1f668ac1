//! Finite abelian groups ℤ/n₁ × … × ℤ/n_k, their subgroups, and the
//! subgroup lattice that indexes every diagram.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{factorize, gcd, is_prime};

/// Default bound on |G| for subgroup enumeration.
pub const DEFAULT_GROUP_BOUND: u64 = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cannot parse group {0:?}: expected C<n> or C<n1>xC<n2>x...")]
    Parse(String),
    #[error("group order {order} exceeds the bound {bound}")]
    TooLarge { order: u64, bound: u64 },
    #[error("lattice verification failed: {0}")]
    Lattice(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    cyclic_orders: Vec<u64>,
}

impl AbelianGroup {
    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self, GroupError> {
        if cyclic_orders.is_empty() || cyclic_orders.iter().any(|&n| n == 0) {
            return Err(GroupError::Parse(format!("{cyclic_orders:?}")));
        }
        Ok(AbelianGroup { cyclic_orders })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(vec![n]).expect("positive order")
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    /// Residue tuple of the element with mixed-radix index `i` (first
    /// coordinate most significant, so index order is tuple order).
    pub fn element(&self, mut i: usize) -> Vec<u64> {
        let mut out = vec![0; self.cyclic_orders.len()];
        for (k, &n) in self.cyclic_orders.iter().enumerate().rev() {
            out[k] = (i as u64) % n;
            i /= n as usize;
        }
        out
    }

    pub fn index_of(&self, e: &[u64]) -> usize {
        e.iter()
            .zip(&self.cyclic_orders)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + (x % n) as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.element(a), self.element(b));
        let sum: Vec<u64> = x
            .iter()
            .zip(&y)
            .zip(&self.cyclic_orders)
            .map(|((p, q), n)| (p + q) % n)
            .collect();
        self.index_of(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let x = self.element(a);
        let neg: Vec<u64> = x
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(p, n)| (n - p) % n)
            .collect();
        self.index_of(&neg)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.element(a)
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &n)| n / gcd(x, n))
            .fold(1, |acc, o| acc / gcd(acc, o) * o)
    }

    /// Cyclic subgroup ⟨a⟩ as sorted element indices.
    fn generated(&self, a: usize) -> Vec<usize> {
        let mut out = vec![0usize];
        let mut cur = a;
        while cur != 0 {
            out.push(cur);
            cur = self.add(cur, a);
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cyclic_orders.iter().map(|n| format!("C{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for AbelianGroup {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupError::Parse(s.to_string());
        let orders = s
            .trim()
            .split(['x', 'X'])
            .map(|part| {
                let digits = part
                    .strip_prefix('C')
                    .or_else(|| part.strip_prefix('c'))
                    .ok_or_else(err)?;
                if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                    return Err(err());
                }
                digits.parse::<u64>().map_err(|_| err())
            })
            .collect::<Result<Vec<_>, _>>()?;
        AbelianGroup::new(orders).map_err(|_| err())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<usize>,
    elements: Vec<Vec<u64>>,
    is_cyclic: bool,
    cyclic_order: Option<u64>,
}

impl Subgroup {
    fn from_members(group: &AbelianGroup, members: Vec<usize>) -> Self {
        let order = members.len() as u64;
        let is_cyclic = members.iter().any(|&a| group.element_order(a) == order);
        Subgroup {
            elements: members.iter().map(|&i| group.element(i)).collect(),
            members,
            is_cyclic,
            cyclic_order: is_cyclic.then_some(order),
        }
    }

    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }

    pub fn is_cyclic(&self) -> bool {
        self.is_cyclic
    }

    pub fn cyclic_order(&self) -> Option<u64> {
        self.cyclic_order
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Subset test on sorted member lists.
    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        let mut it = other.members.iter();
        self.members.iter().all(|a| it.any(|b| b == a))
    }

    /// Closure check: identity, sums and negatives stay inside.
    pub fn verify_closed(&self, group: &AbelianGroup) -> bool {
        let set: BTreeSet<usize> = self.members.iter().copied().collect();
        set.contains(&0)
            && self.members.iter().all(|&a| {
                set.contains(&group.neg(a))
                    && self.members.iter().all(|&b| set.contains(&group.add(a, b)))
            })
    }

    /// If this subgroup is a nontrivial cyclic p-group, `(p, r)` with order p^r.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        if !self.is_cyclic || self.is_trivial() {
            return None;
        }
        match factorize(self.order()).as_slice() {
            [(p, r)] => Some((*p, *r)),
            _ => None,
        }
    }
}

/// Every subgroup of `group`, each exactly once, in canonical order
/// (by order, then by sorted element list).
pub fn enumerate_subgroups(group: &AbelianGroup, bound: u64) -> Result<Vec<Subgroup>, GroupError> {
    let order = group.order();
    if order > bound {
        return Err(GroupError::TooLarge { order, bound });
    }
    let mut found: BTreeSet<Vec<usize>> = (0..order as usize).map(|a| group.generated(a)).collect();
    loop {
        let current: Vec<Vec<usize>> = found.iter().cloned().collect();
        let mut added = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i + 1..] {
                let join = join(group, a, b);
                if found.insert(join) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut subs: Vec<Subgroup> = found
        .into_iter()
        .map(|m| Subgroup::from_members(group, m))
        .collect();
    subs.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    for s in &subs {
        if !s.verify_closed(group) {
            return Err(GroupError::Lattice(format!("non-closed set {:?}", s.elements)));
        }
    }
    Ok(subs)
}

/// A + B for subgroups of an abelian group.
fn join(group: &AbelianGroup, a: &[usize], b: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .map(|(x, y)| group.add(x, y))
        .collect();
    set.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    group: AbelianGroup,
    nodes: Vec<Subgroup>,
    ids: Vec<String>,
    contains: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
}

/// A nontrivial cyclic p-subgroup together with its position in the tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicPSubgroup {
    pub node: usize,
    pub prime: u64,
    pub exponent: u32,
    /// Maximal proper subgroup, when the exponent exceeds one.
    pub parent: Option<usize>,
}

impl SubgroupLattice {
    pub fn build(group: &AbelianGroup, bound: u64) -> Result<Self, GroupError> {
        let nodes = enumerate_subgroups(group, bound)?;
        let n = nodes.len();
        let contains: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| nodes[i].is_subgroup_of(&nodes[j])).collect())
            .collect();
        let mut covers = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && contains[i][j]
                    && !(0..n).any(|k| k != i && k != j && contains[i][k] && contains[k][j])
                {
                    covers.push((i, j));
                }
            }
        }
        covers.sort_unstable();
        let ids = assign_ids(&nodes);
        let lattice = SubgroupLattice {
            group: group.clone(),
            nodes,
            ids,
            contains,
            covers,
        };
        lattice.verify()?;
        Ok(lattice)
    }

    fn verify(&self) -> Result<(), GroupError> {
        let n = self.nodes.len();
        let c = &self.contains;
        for i in 0..n {
            if !c[i][i] {
                return Err(GroupError::Lattice("containment not reflexive".into()));
            }
            for j in 0..n {
                if i != j && c[i][j] && c[j][i] {
                    return Err(GroupError::Lattice("containment not antisymmetric".into()));
                }
                for k in 0..n {
                    if c[i][j] && c[j][k] && !c[i][k] {
                        return Err(GroupError::Lattice("containment not transitive".into()));
                    }
                }
            }
        }
        if !(0..n).all(|j| c[self.bottom()][j]) || !(0..n).all(|i| c[i][self.top()]) {
            return Err(GroupError::Lattice("missing unique minimum or maximum".into()));
        }
        // Transitive closure of covers must equal containment.
        let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for &(a, b) in &self.covers {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        if reach != *c {
            return Err(GroupError::Lattice("covers do not generate containment".into()));
        }
        for &(a, b) in &self.covers {
            let index = self.nodes[b].order() / self.nodes[a].order();
            if !is_prime(index) {
                return Err(GroupError::Lattice(format!("cover of non-prime index {index}")));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn nodes(&self) -> &[Subgroup] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Subgroup {
        &self.nodes[i]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of_id(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn contains(&self, small: usize, big: usize) -> bool {
        self.contains[small][big]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn upper_covers(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers.iter().filter(move |c| c.0 == i).map(|c| c.1)
    }

    pub fn lower_covers(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers.iter().filter(move |c| c.1 == i).map(|c| c.0)
    }

    /// All maximal chains of covering edges from `low` up to `high`.
    pub fn maximal_chains(&self, low: usize, high: usize) -> Vec<Vec<usize>> {
        if low == high {
            return vec![vec![low]];
        }
        if !self.contains(low, high) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for next in self.upper_covers(low).filter(|&k| self.contains(k, high)) {
            for mut tail in self.maximal_chains(next, high) {
                tail.insert(0, low);
                out.push(tail);
            }
        }
        out
    }

    /// Nontrivial cyclic subgroups of prime-power order contained in `k`,
    /// ordered by (prime, exponent, id).
    pub fn cyclic_p_subgroups(&self, k: usize) -> Vec<CyclicPSubgroup> {
        let mut out: Vec<CyclicPSubgroup> = (0..self.len())
            .filter(|&l| self.contains(l, k))
            .filter_map(|l| {
                let (prime, exponent) = self.nodes[l].prime_power()?;
                let parent = (exponent > 1).then(|| {
                    self.lower_covers(l)
                        .next()
                        .expect("a cyclic p-group has a maximal proper subgroup")
                });
                Some(CyclicPSubgroup {
                    node: l,
                    prime,
                    exponent,
                    parent,
                })
            })
            .collect();
        out.sort_by(|a, b| {
            (a.prime, a.exponent, &self.ids[a.node]).cmp(&(b.prime, b.exponent, &self.ids[b.node]))
        });
        out
    }

    /// Canonical JSON-ready listing.
    pub fn to_json(&self) -> serde_json::Value {
        let subgroups: Vec<serde_json::Value> = (0..self.len())
            .map(|i| {
                serde_json::json!({
                    "id": self.ids[i],
                    "order": self.nodes[i].order(),
                    "cyclic": self.nodes[i].is_cyclic(),
                    "elements": self.nodes[i].elements(),
                })
            })
            .collect();
        let covers: Vec<serde_json::Value> = self
            .covers
            .iter()
            .map(|&(a, b)| serde_json::json!({"from": self.ids[a], "to": self.ids[b]}))
            .collect();
        serde_json::json!({
            "group": self.group.to_string(),
            "subgroups": subgroups,
            "covers": covers,
        })
    }
}

/// Identifiers: `e` for the trivial subgroup, `C<n>` for a cyclic subgroup
/// that is the only one of its order, `C<n>_<k>` otherwise, and `H<n>` /
/// `H<n>_<k>` for non-cyclic subgroups.
fn assign_ids(nodes: &[Subgroup]) -> Vec<String> {
    nodes
        .iter()
        .map(|s| {
            if s.is_trivial() {
                return "e".to_string();
            }
            let prefix = if s.is_cyclic() { "C" } else { "H" };
            let peers: Vec<&Subgroup> = nodes
                .iter()
                .filter(|t| t.order() == s.order() && t.is_cyclic() == s.is_cyclic())
                .collect();
            if peers.len() == 1 {
                format!("{prefix}{}", s.order())
            } else {
                let k = peers.iter().position(|t| *t == s).unwrap() + 1;
                format!("{prefix}{}_{k}", s.order())
            }
        })
        .collect()
}
