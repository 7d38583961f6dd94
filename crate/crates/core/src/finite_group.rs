//! Finite groups given by their multiplication.
//!
//! Explicit groups carry a full Cayley table. Direct products of cyclic
//! groups multiply by residue arithmetic instead, so their order can go
//! far past what a table could hold; every other operation treats the two
//! representations alike. Elements are indices `0..order`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER_LIMIT: u64 = 1_000_000;
const ASSOCIATIVITY_CHECK_LIMIT: usize = 512;

/// An element of a finite group, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
enum Multiplication {
    Table(Vec<u32>),
    /// `Z_{m1} x ... x Z_{mk}`; index `sum a_i * stride_i`, last factor fastest.
    Residues { moduli: Vec<u64>, strides: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mult: Multiplication,
    labels: Vec<String>,
    identity: usize,
    inverses: Vec<usize>,
}

pub type GroupRef = Arc<FiniteGroup>;

impl FiniteGroup {
    /// Group from a Cayley table `table[x][y] = x·y`.
    ///
    /// Checks the Latin-square property, the identity, and associativity
    /// for orders up to 512.
    pub fn from_table(table: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidGroup(format!("{} labels for {n} elements", labels.len())));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != n {
            return Err(Error::InvalidGroup("repeated element label".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has length {}", row.len())));
            }
            let mut seen = vec![false; n];
            for &v in row {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidGroup(format!("row {i} is not a permutation")));
                }
                flat.push(v as u32);
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for i in 0..n {
                if std::mem::replace(&mut seen[flat[i * n + j] as usize], true) {
                    return Err(Error::InvalidGroup(format!("column {j} is not a permutation")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| flat[e * n + x] as usize == x && flat[x * n + e] as usize == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = flat[a * n + b] as usize;
                    for c in 0..n {
                        let bc = flat[b * n + c] as usize;
                        if flat[ab * n + c] != flat[a * n + bc] {
                            return Err(Error::InvalidGroup(format!(
                                "not associative at ({}, {}, {})",
                                labels[a], labels[b], labels[c]
                            )));
                        }
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|x| (0..n).find(|&y| flat[x * n + y] as usize == identity).expect("Latin square has inverses"))
            .collect();
        Ok(FiniteGroup { order: n, mult: Multiplication::Table(flat), labels, identity, inverses })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(self.identity)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order).map(GroupElement)
    }

    #[inline]
    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        match &self.mult {
            Multiplication::Table(t) => GroupElement(t[a.0 * self.order + b.0] as usize),
            Multiplication::Residues { moduli, strides } => {
                let mut idx = 0u64;
                for (m, s) in moduli.iter().zip(strides) {
                    let x = (a.0 as u64 / s) % m;
                    let y = (b.0 as u64 / s) % m;
                    idx += ((x + y) % m) * s;
                }
                GroupElement(idx as usize)
            }
        }
    }

    #[inline]
    pub fn inverse(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.inverses[a.0])
    }

    pub fn pow(&self, a: GroupElement, e: i64) -> GroupElement {
        let base = if e < 0 { self.inverse(a) } else { a };
        let mut acc = self.identity();
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// `a b a^-1 b^-1`
    pub fn commutator(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        let ab = self.mul(a, b);
        self.mul(self.mul(ab, self.inverse(a)), self.inverse(b))
    }

    /// `g x g^-1`
    pub fn conjugate(&self, x: GroupElement, g: GroupElement) -> GroupElement {
        self.mul(self.mul(g, x), self.inverse(g))
    }

    pub fn element_order(&self, a: GroupElement) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != self.identity() {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn label(&self, a: GroupElement) -> &str {
        &self.labels[a.0]
    }

    /// Looks an element up by label; whitespace is ignored.
    pub fn element_by_label(&self, label: &str) -> Result<GroupElement> {
        let key: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        self.labels
            .iter()
            .position(|l| *l == key)
            .map(GroupElement)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn is_abelian(&self) -> bool {
        match self.mult {
            Multiplication::Residues { .. } => true,
            Multiplication::Table(_) => self
                .elements()
                .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a))),
        }
    }

    /// The moduli `[m1, ..., mk]` if built by [`make_abelian_group`].
    pub fn residue_moduli(&self) -> Option<&[u64]> {
        match &self.mult {
            Multiplication::Residues { moduli, .. } => Some(moduli),
            Multiplication::Table(_) => None,
        }
    }

    /// Residue tuple of an element of a group built by [`make_abelian_group`].
    pub fn residues(&self, a: GroupElement) -> Option<Vec<u64>> {
        match &self.mult {
            Multiplication::Residues { moduli, strides } => {
                Some(moduli.iter().zip(strides).map(|(m, s)| (a.0 as u64 / s) % m).collect())
            }
            Multiplication::Table(_) => None,
        }
    }

    pub fn from_residues(&self, r: &[u64]) -> Option<GroupElement> {
        match &self.mult {
            Multiplication::Residues { moduli, strides } if r.len() == moduli.len() => Some(GroupElement(
                r.iter().zip(moduli).zip(strides).map(|((x, m), s)| (x % m) * s).sum::<u64>() as usize,
            )),
            _ => None,
        }
    }

    /// Elements of the subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity()]);
        let mut out = vec![self.identity()];
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y.0] {
                    seen[y.0] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort();
        out
    }

    /// Explicit Cayley table of this group (for re-embedding subsets).
    fn table_on(&self, elements: &[GroupElement]) -> Result<FiniteGroup> {
        let pos = |x: GroupElement| elements.binary_search(&x).ok();
        let mut table = Vec::with_capacity(elements.len());
        for &a in elements {
            let row: Option<Vec<usize>> = elements.iter().map(|&b| pos(self.mul(a, b))).collect();
            table.push(row.ok_or_else(|| Error::InvalidGroup("subset is not closed".into()))?);
        }
        FiniteGroup::from_table(table, elements.iter().map(|&e| self.label(e).to_string()).collect())
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mult {
            Multiplication::Residues { moduli, .. } => {
                let parts: Vec<String> = moduli.iter().map(|m| format!("Z{m}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            Multiplication::Table(_) => write!(f, "group of order {}", self.order),
        }
    }
}

/// Direct product of cyclic groups `Z_{f1} x ... x Z_{fk}`, elements
/// labelled by residue tuples such as `(1,3)`.
pub fn make_abelian_group(invariant_factors: &[u64]) -> Result<FiniteGroup> {
    make_abelian_group_with_limit(invariant_factors, DEFAULT_ORDER_LIMIT)
}

pub fn make_abelian_group_with_limit(invariant_factors: &[u64], limit: u64) -> Result<FiniteGroup> {
    if invariant_factors.contains(&0) {
        return Err(Error::InvalidGroup("cyclic factor of order 0".into()));
    }
    let order = invariant_factors.iter().try_fold(1u128, |acc, &f| acc.checked_mul(f as u128));
    let order = match order {
        Some(o) if o <= limit as u128 => o as usize,
        Some(o) => return Err(Error::OrderLimit { order: o, limit }),
        None => return Err(Error::OrderLimit { order: u128::MAX, limit }),
    };
    let moduli: Vec<u64> = if invariant_factors.is_empty() { vec![1] } else { invariant_factors.to_vec() };
    let mut strides = vec![1u64; moduli.len()];
    for i in (0..moduli.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * moduli[i + 1];
    }
    let labels = (0..order)
        .map(|idx| {
            let parts: Vec<String> =
                moduli.iter().zip(&strides).map(|(m, s)| ((idx as u64 / s) % m).to_string()).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let inverses = (0..order)
        .map(|idx| {
            moduli
                .iter()
                .zip(&strides)
                .map(|(m, s)| ((m - (idx as u64 / s) % m) % m) * s)
                .sum::<u64>() as usize
        })
        .collect();
    Ok(FiniteGroup { order, mult: Multiplication::Residues { moduli, strides }, labels, identity: 0, inverses })
}

/// A homomorphism between finite groups, stored by the image of every
/// element.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    pub source: GroupRef,
    pub target: GroupRef,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    /// Checks `f(xy) = f(x) f(y)` on every pair.
    pub fn new(source: GroupRef, target: GroupRef, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.order() {
            return Err(Error::NotHomomorphism(format!(
                "{} images for a group of order {}",
                images.len(),
                source.order()
            )));
        }
        if images.iter().any(|x| x.0 >= target.order()) {
            return Err(Error::NotHomomorphism("image index out of range".into()));
        }
        for x in source.elements() {
            for y in source.elements() {
                if images[source.mul(x, y).0] != target.mul(images[x.0], images[y.0]) {
                    return Err(Error::NotHomomorphism(format!(
                        "f({}·{}) != f({})·f({})",
                        source.label(x),
                        source.label(y),
                        source.label(x),
                        source.label(y)
                    )));
                }
            }
        }
        Ok(Homomorphism { source, target, images })
    }

    pub fn identity(group: GroupRef) -> Self {
        let images = group.elements().collect();
        Homomorphism { source: group.clone(), target: group, images }
    }

    #[inline]
    pub fn apply(&self, x: GroupElement) -> GroupElement {
        self.images[x.0]
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if *other.target != *self.source {
            return Err(Error::NotHomomorphism("composition of mismatched groups".into()));
        }
        let images = other.images.iter().map(|&x| self.apply(x)).collect();
        Ok(Homomorphism { source: other.source.clone(), target: self.target.clone(), images })
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && {
            let mut seen = vec![false; self.target.order()];
            self.images.iter().all(|x| !std::mem::replace(&mut seen[x.0], true))
        }
    }

    pub fn inverse(&self) -> Result<Homomorphism> {
        if !self.is_bijective() {
            return Err(Error::NotHomomorphism("not bijective".into()));
        }
        let mut images = vec![GroupElement(0); self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y.0] = GroupElement(x);
        }
        Ok(Homomorphism { source: self.target.clone(), target: self.source.clone(), images })
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.images == other.images
    }
}

/// The automorphism `v ↦ M v (mod m)` of `Z_m^k`.
pub fn automorphism_from_matrix(group: &GroupRef, matrix: &[Vec<i64>]) -> Result<Homomorphism> {
    let moduli = group.residue_moduli().ok_or(Error::NotHomocyclic)?;
    let m = moduli[0];
    if moduli.iter().any(|&x| x != m) {
        return Err(Error::NotHomocyclic);
    }
    let k = moduli.len();
    if matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidGroup(format!("matrix must be {k}x{k}")));
    }
    let md = m as i64;
    let reduced: Vec<Vec<u64>> =
        matrix.iter().map(|row| row.iter().map(|&v| v.rem_euclid(md) as u64).collect()).collect();
    if gcd(det_mod(&reduced, m), m) != 1 {
        return Err(Error::NotInvertible { modulus: m });
    }
    let images = group
        .elements()
        .map(|x| {
            let v = group.residues(x).expect("residue group");
            let w: Vec<u64> = reduced
                .iter()
                .map(|row| row.iter().zip(&v).map(|(a, b)| a * b % m).sum::<u64>() % m)
                .collect();
            group.from_residues(&w).expect("residue tuple in range")
        })
        .collect();
    let f = Homomorphism::new(group.clone(), group.clone(), images)?;
    if !f.is_bijective() {
        return Err(Error::NotInvertible { modulus: m });
    }
    Ok(f)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Determinant mod `m` by cofactor expansion (matrices here are tiny).
fn det_mod(a: &[Vec<u64>], m: u64) -> u64 {
    let n = a.len();
    if n == 0 {
        return 1 % m;
    }
    if n == 1 {
        return a[0][0] % m;
    }
    let mut total = 0u64;
    for j in 0..n {
        let minor: Vec<Vec<u64>> =
            a[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
        let term = a[0][j] % m * det_mod(&minor, m) % m;
        total = if j % 2 == 0 { (total + term) % m } else { (total + m - term) % m };
    }
    total
}

/// A subgroup: sorted element set, its own group structure (labels kept
/// from the ambient group) and the embedding.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub elements: Vec<GroupElement>,
    pub group: GroupRef,
    /// `embedding[i]` is the ambient element of subgroup element `i`.
    pub embedding: Vec<GroupElement>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: GroupElement) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Subgroup element corresponding to an ambient element.
    pub fn restrict(&self, x: GroupElement) -> Option<GroupElement> {
        self.elements.binary_search(&x).ok().map(GroupElement)
    }

    pub fn is_normal_in(&self, ambient: &FiniteGroup) -> bool {
        ambient
            .elements()
            .all(|g| self.elements.iter().all(|&h| self.contains(ambient.conjugate(h, g))))
    }

    pub fn index_in(&self, ambient: &FiniteGroup) -> usize {
        ambient.order() / self.order()
    }
}

pub fn subgroup_generated(group: &FiniteGroup, generators: &[GroupElement]) -> Result<Subgroup> {
    if let Some(g) = generators.iter().find(|g| g.0 >= group.order()) {
        return Err(Error::InvalidGroup(format!("element index {} out of range", g.0)));
    }
    let elements = group.closure(generators);
    let sub = group.table_on(&elements)?;
    Ok(Subgroup { embedding: elements.clone(), elements, group: Arc::new(sub) })
}

/// One orbit of a finite action, with the stabilizer of each of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub points: Vec<usize>,
    pub stabilizers: Vec<Vec<GroupElement>>,
}

/// Orbits and point stabilizers of `group` acting on `0..n_points` by
/// `act(g, p)`. The action axioms are checked exhaustively when
/// `n_points · order² ≤ 10^6`, and the identity axiom always.
pub fn orbits_and_stabilizers(
    group: &FiniteGroup,
    n_points: usize,
    act: impl Fn(GroupElement, usize) -> usize,
) -> Result<Vec<Orbit>> {
    let o = group.order();
    for p in 0..n_points {
        if act(group.identity(), p) != p {
            return Err(Error::InvalidAction(format!("identity moves point {p}")));
        }
    }
    let image = |g: GroupElement, p: usize| -> Result<usize> {
        let q = act(g, p);
        if q >= n_points {
            return Err(Error::InvalidAction(format!("point {p} mapped out of range")));
        }
        Ok(q)
    };
    if (n_points as u128) * (o as u128) * (o as u128) <= 1_000_000 {
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                for p in 0..n_points {
                    if image(gh, p)? != image(g, image(h, p)?)? {
                        return Err(Error::InvalidAction(format!(
                            "({})·(({})·{p}) differs from ({}·{})·{p}",
                            group.label(g),
                            group.label(h),
                            group.label(g),
                            group.label(h)
                        )));
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n_points];
    let mut orbits = Vec::new();
    for start in 0..n_points {
        if assigned[start] {
            continue;
        }
        let mut points = Vec::new();
        for g in group.elements() {
            let q = image(g, start)?;
            if !assigned[q] {
                assigned[q] = true;
                points.push(q);
            }
        }
        points.sort_unstable();
        let stabilizers: Vec<Vec<GroupElement>> = points
            .iter()
            .map(|&p| group.elements().filter(|&g| act(g, p) == p).collect())
            .collect();
        for s in &stabilizers {
            if points.len() * s.len() != o {
                return Err(Error::InvalidAction("orbit-stabilizer count fails".into()));
            }
        }
        orbits.push(Orbit { points, stabilizers });
    }
    Ok(orbits)
}
