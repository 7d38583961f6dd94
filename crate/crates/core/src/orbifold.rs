//! Orbifold surface groups and generating vectors.

use std::fmt;
use std::str::FromStr;

use pqw_fpgroup::{Presentation, Word};

use crate::error::{Error, Result};
use crate::finite_group::{GroupElement, GroupRef};

/// `[g'; m1,...,mr]`, indices kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchData {
    pub base_genus: u32,
    indices: Vec<u32>,
}

impl BranchData {
    pub fn new(base_genus: u32, mut indices: Vec<u32>) -> Result<Self> {
        if let Some(m) = indices.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidBranchData(format!("branch index {m} < 2")));
        }
        indices.sort_unstable();
        Ok(BranchData { base_genus, indices })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn branch_count(&self) -> usize {
        self.indices.len()
    }

    /// `2g' + r`
    pub fn generator_count(&self) -> usize {
        2 * self.base_genus as usize + self.indices.len()
    }
}

impl fmt::Display for BranchData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|m| m.to_string()).collect();
        write!(f, "[{}; {}]", self.base_genus, parts.join(","))
    }
}

impl FromStr for BranchData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidBranchData(format!("expected `[g'; m1,...,mr]`, got `{s}`"));
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let (g, ms) = inner.split_once(';').ok_or_else(bad)?;
        let g: u32 = g.trim().parse().map_err(|_| bad())?;
        let indices = ms
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        BranchData::new(g, indices)
    }
}

/// `T(g'; m1..mr)` with generators `a1 b1 ... c1 ... cr`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldGroup {
    pub branch: BranchData,
    pub presentation: Presentation,
}

impl OrbifoldGroup {
    /// Index of `a_i` (0-based `i`).
    pub fn a(&self, i: usize) -> usize {
        2 * i
    }

    pub fn b(&self, i: usize) -> usize {
        2 * i + 1
    }

    /// Index of `c_k` (0-based `k`).
    pub fn c(&self, k: usize) -> usize {
        2 * self.branch.base_genus as usize + k
    }

    /// `Π[a_i,b_i]·c1⋯cr`
    pub fn long_relator(&self) -> Word {
        let mut w = Word::empty();
        for i in 0..self.branch.base_genus as usize {
            w = w.mul(&Word::commutator(&Word::generator(self.a(i)), &Word::generator(self.b(i))));
        }
        for k in 0..self.branch.branch_count() {
            w = w.mul(&Word::generator(self.c(k)));
        }
        w
    }
}

pub fn make_orbifold_group(branch: &BranchData) -> OrbifoldGroup {
    let g = branch.base_genus as usize;
    let mut names = Vec::new();
    for i in 1..=g {
        names.push(format!("a{i}"));
        names.push(format!("b{i}"));
    }
    for k in 1..=branch.branch_count() {
        names.push(format!("c{k}"));
    }
    let mut og = OrbifoldGroup {
        branch: branch.clone(),
        presentation: Presentation::new(names.clone(), vec![]).expect("names are valid"),
    };
    let mut relators: Vec<Word> = branch
        .indices()
        .iter()
        .enumerate()
        .map(|(k, &m)| Word::power_of_generator(og.c(k), m as i64))
        .collect();
    relators.push(og.long_relator());
    og.presentation = Presentation::new(names, relators)
        .expect("orbifold relators are in range")
        .with_label(format!("T{branch}"));
    og
}

/// Images in a finite group of the orbifold generators, in presentation order.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingVector {
    pub target: GroupRef,
    pub images: Vec<GroupElement>,
}

impl GeneratingVector {
    pub fn new(target: GroupRef, images: Vec<GroupElement>) -> Self {
        GeneratingVector { target, images }
    }

    /// Images from element labels.
    pub fn from_labels<S: AsRef<str>>(target: GroupRef, labels: &[S]) -> Result<Self> {
        let images = labels.iter().map(|l| target.element_by_label(l.as_ref())).collect::<Result<_>>()?;
        Ok(GeneratingVector { target, images })
    }

    pub fn labels(&self) -> Vec<String> {
        self.images.iter().map(|&x| self.target.label(x).to_string()).collect()
    }

    /// Post-composes with an automorphism (or any map) of the target.
    pub fn map(&self, f: impl Fn(GroupElement) -> GroupElement) -> Self {
        GeneratingVector { target: self.target.clone(), images: self.images.iter().map(|&x| f(x)).collect() }
    }
}

/// A validated epimorphism `T -> G`; evaluates words.
#[derive(Clone, Debug)]
pub struct Epimorphism {
    pub orbifold: OrbifoldGroup,
    pub vector: GeneratingVector,
}

impl Epimorphism {
    pub fn target(&self) -> &GroupRef {
        &self.vector.target
    }

    pub fn image(&self, generator: usize) -> GroupElement {
        self.vector.images[generator]
    }

    /// Image of `c_k` (0-based).
    pub fn c_image(&self, k: usize) -> GroupElement {
        self.vector.images[self.orbifold.c(k)]
    }

    pub fn evaluate(&self, w: &Word) -> GroupElement {
        let g = self.target();
        w.letters().iter().fold(g.identity(), |acc, &l| {
            let x = self.vector.images[l.unsigned_abs() as usize - 1];
            g.mul(acc, if l > 0 { x } else { g.inverse(x) })
        })
    }
}

pub fn validate_generating_vector(ogroup: &OrbifoldGroup, vector: &GeneratingVector) -> Result<Epimorphism> {
    let expected = ogroup.branch.generator_count();
    if vector.images.len() != expected {
        return Err(Error::VectorLength { expected, found: vector.images.len() });
    }
    let g = &vector.target;
    if let Some(x) = vector.images.iter().find(|x| x.0 >= g.order()) {
        return Err(Error::InvalidGroup(format!("element index {} out of range", x.0)));
    }
    let epi = Epimorphism { orbifold: ogroup.clone(), vector: vector.clone() };
    let long = epi.evaluate(&ogroup.long_relator());
    if long != g.identity() {
        return Err(Error::LongRelatorFails { value: g.label(long).to_string() });
    }
    for (k, &m) in ogroup.branch.indices().iter().enumerate() {
        let found = g.element_order(epi.c_image(k));
        if found != m as u64 {
            return Err(Error::BranchOrderFails { k: k + 1, expected: m, found });
        }
    }
    let generated = g.closure(&vector.images).len();
    if generated != g.order() {
        return Err(Error::NotSurjective { generated, order: g.order() });
    }
    Ok(epi)
}

/// Genus of the `G`-cover with `|G| = N` branched as `branch`.
pub fn riemann_hurwitz_genus(group_order: u64, branch: &BranchData) -> Result<u64> {
    if group_order == 0 {
        return Err(Error::InconsistentBranching("group order 0".into()));
    }
    let n = group_order as i128;
    let mut two_g_minus_2 = n * (2 * branch.base_genus as i128 - 2);
    for &m in branch.indices() {
        let m = m as i128;
        if n % m != 0 {
            return Err(Error::InconsistentBranching(format!("branch index {m} does not divide {n}")));
        }
        two_g_minus_2 += n - n / m;
    }
    let twice = two_g_minus_2 + 2;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::InconsistentBranching(format!("2g = {twice}")));
    }
    Ok((twice / 2) as u64)
}

/// `dim H^1(C, Θ_C)^G`, the invariant part computed on the base curve.
pub fn invariant_deformation_dim(branch: &BranchData) -> Result<u64> {
    let g = branch.base_genus as i64;
    // ⌊2(1 - 1/m)⌋ = 1 for every m ≥ 2.
    let d = 4 * g - 4 + branch.indices().iter().map(|&m| (2 * (m as i64 - 1)) / m as i64).sum::<i64>();
    if d < 0 {
        Ok(0)
    } else if d > 2 * g - 2 {
        Ok((d - g + 1) as u64)
    } else {
        Err(Error::Unsupported(format!(
            "h^0 of a degree {d} divisor on a genus {g} base depends on the divisor"
        )))
    }
}

/// `dim H^1(C, C)^G = 2g'`.
pub fn invariant_b1_contribution(branch: &BranchData) -> u64 {
    2 * branch.base_genus as u64
}
