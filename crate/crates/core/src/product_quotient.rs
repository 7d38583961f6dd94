//! Diagonal actions of a finite group on a product of curves.
//!
//! Points with nontrivial stabilizer are never given coordinates: on each
//! factor such a point is a pair `(k, g⟨x_k⟩)` of a branch point and a coset
//! of the cyclic group generated by the image `x_k` of `c_k`, with stabilizer
//! `g⟨x_k⟩g⁻¹`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finite_group::{
    automorphism_from_matrix, make_abelian_group, subgroup_generated, FiniteGroup, GroupElement, GroupRef,
    Homomorphism, Subgroup,
};
use crate::orbifold::{
    invariant_b1_contribution, invariant_deformation_dim, make_orbifold_group, riemann_hurwitz_genus,
    validate_generating_vector, BranchData, Epimorphism, GeneratingVector,
};

pub const DEFAULT_CENSUS_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct Factor {
    pub branch: BranchData,
    pub epimorphism: Epimorphism,
    /// Genus of the curve, by Riemann-Hurwitz.
    pub genus: u64,
}

impl Factor {
    pub fn vector(&self) -> &GeneratingVector {
        &self.epimorphism.vector
    }
}

#[derive(Clone, Debug)]
pub struct ProductQuotientSpec {
    pub group: GroupRef,
    pub factors: Vec<Factor>,
    pub label: String,
}

impl ProductQuotientSpec {
    /// Validates every generating vector and requires each curve to have
    /// genus at least two.
    pub fn new(group: GroupRef, factors: Vec<(BranchData, GeneratingVector)>, label: impl Into<String>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("a product needs at least one factor".into()));
        }
        let mut out = Vec::with_capacity(factors.len());
        for (i, (branch, vector)) in factors.into_iter().enumerate() {
            if *vector.target != *group {
                return Err(Error::InvalidGroup(format!("factor {} maps to a different group", i + 1)));
            }
            let og = make_orbifold_group(&branch);
            let epimorphism = validate_generating_vector(&og, &vector)?;
            let genus = riemann_hurwitz_genus(group.order() as u64, &branch)?;
            if genus < 2 {
                return Err(Error::SmallGenus { factor: i + 1, genus });
            }
            out.push(Factor { branch, epimorphism, genus });
        }
        Ok(ProductQuotientSpec { group, factors: out, label: label.into() })
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    fn parts(&self) -> Vec<(BranchData, GeneratingVector)> {
        self.factors.iter().map(|f| (f.branch.clone(), f.vector().clone())).collect()
    }

    /// Factors reordered: factor `i` of the result is factor `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let parts = self.parts();
        let mut seen = vec![false; parts.len()];
        if perm.len() != parts.len() || perm.iter().any(|&p| p >= parts.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidGroup("not a permutation of the factors".into()));
        }
        ProductQuotientSpec::new(self.group.clone(), perm.iter().map(|&p| parts[p].clone()).collect(), self.label.clone())
    }

    /// Every generating vector post-composed with the same automorphism.
    pub fn twisted_by(&self, aut: &Homomorphism) -> Result<Self> {
        if !aut.is_bijective() || *aut.source != *self.group {
            return Err(Error::NotHomomorphism("not an automorphism of the spec group".into()));
        }
        let parts = self.parts().into_iter().map(|(b, v)| (b, v.map(|x| aut.apply(x)))).collect();
        ProductQuotientSpec::new(self.group.clone(), parts, self.label.clone())
    }
}

/// A point of one curve with nontrivial stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPoint {
    pub factor: usize,
    /// Branch point (0-based) the point lies over.
    pub branch_index: usize,
    /// Least element of the coset `g⟨x_k⟩`.
    pub representative: GroupElement,
    pub stabilizer: Vec<GroupElement>,
}

pub fn marked_points(spec: &ProductQuotientSpec, factor: usize) -> Vec<MarkedPoint> {
    FactorPoints::new(spec, factor).points
}

/// Marked points of one factor with the action of `G` on them.
struct FactorPoints {
    points: Vec<MarkedPoint>,
    /// `coset_of[k][g]`: point id of `(k, g⟨x_k⟩)`.
    coset_of: Vec<Vec<usize>>,
    stabilizer_bits: Vec<Bits>,
}

impl FactorPoints {
    fn new(spec: &ProductQuotientSpec, factor: usize) -> Self {
        let g = &spec.group;
        let epi = &spec.factors[factor].epimorphism;
        let mut points = Vec::new();
        let mut coset_of = Vec::new();
        let mut stabilizer_bits = Vec::new();
        for k in 0..spec.factors[factor].branch.branch_count() {
            let x = epi.c_image(k);
            let cyclic = g.closure(&[x]);
            let mut ids = vec![usize::MAX; g.order()];
            for h in g.elements() {
                if ids[h.0] != usize::MAX {
                    continue;
                }
                let id = points.len();
                for &c in &cyclic {
                    ids[g.mul(h, c).0] = id;
                }
                let mut stabilizer: Vec<GroupElement> = cyclic.iter().map(|&c| g.conjugate(c, h)).collect();
                stabilizer.sort();
                stabilizer_bits.push(Bits::from_elements(g.order(), &stabilizer));
                points.push(MarkedPoint { factor, branch_index: k, representative: h, stabilizer });
            }
            coset_of.push(ids);
        }
        FactorPoints { points, coset_of, stabilizer_bits }
    }

    fn act(&self, g: &FiniteGroup, h: GroupElement, p: usize) -> usize {
        let pt = &self.points[p];
        self.coset_of[pt.branch_index][g.mul(h, pt.representative).0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn from_elements(order: usize, xs: &[GroupElement]) -> Self {
        let mut b = vec![0u64; order.div_ceil(64)];
        for x in xs {
            b[x.0 / 64] |= 1 << (x.0 % 64);
        }
        Bits(b)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn elements(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            for j in 0..64 {
                if w >> j & 1 == 1 {
                    out.push(GroupElement(i * 64 + j));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SingularityType {
    /// `1/2(1,...,1)` in dimension `n`.
    HalfOnes(usize),
    /// A point of a curve quotient, which is always smooth.
    Smooth,
    Undetermined { order: usize },
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityType::HalfOnes(n) => write!(f, "1/2({})", vec!["1"; *n].join(",")),
            SingularityType::Smooth => write!(f, "smooth (dimension one)"),
            SingularityType::Undetermined { order } => write!(f, "undetermined(order {order})"),
        }
    }
}

/// One `G`-orbit of points of the product with nontrivial stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityRecord {
    /// Least tuple of marked-point ids in the orbit.
    pub representative: Vec<usize>,
    pub points: Vec<MarkedPoint>,
    pub stabilizer: Vec<GroupElement>,
    pub orbit_size: usize,
    pub kind: SingularityType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    pub records: Vec<SingularityRecord>,
    /// Points of the product with nontrivial stabilizer.
    pub stabilized_tuples: u64,
    /// Image points in the quotient that are singular.
    pub singular_points: u64,
    /// Every nontrivial element fixing some point of the product.
    pub stabilizer_elements: Vec<GroupElement>,
}

impl Census {
    pub fn all_half_ones(&self) -> bool {
        self.records.iter().all(|r| matches!(r.kind, SingularityType::HalfOnes(_)))
    }
}

pub fn singular_census(spec: &ProductQuotientSpec) -> Result<Census> {
    singular_census_with_budget(spec, DEFAULT_CENSUS_BUDGET)
}

pub fn singular_census_with_budget(spec: &ProductQuotientSpec, budget: u64) -> Result<Census> {
    let g = &spec.group;
    let n = spec.n();
    let factors: Vec<FactorPoints> = (0..n).map(|i| FactorPoints::new(spec, i)).collect();
    let needed = factors.iter().try_fold(1u128, |acc, f| acc.checked_mul(f.points.len() as u128)).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    let full = Bits(vec![u64::MAX; g.order().div_ceil(64)]);
    let mut tuples: Vec<(Vec<usize>, Bits)> = Vec::new();
    let mut current = Vec::with_capacity(n);
    collect_tuples(&factors, 0, &full, &mut current, &mut tuples);

    let index: HashMap<Vec<usize>, usize> = tuples.iter().enumerate().map(|(i, (t, _))| (t.clone(), i)).collect();
    let mut seen = vec![false; tuples.len()];
    let mut records = Vec::new();
    let mut union = BTreeSet::new();
    for i in 0..tuples.len() {
        if seen[i] {
            continue;
        }
        let (rep, stab) = &tuples[i];
        let mut orbit_size = 0;
        for h in g.elements() {
            let image: Vec<usize> = rep.iter().enumerate().map(|(f, &p)| factors[f].act(g, h, p)).collect();
            let j = index[&image];
            if !seen[j] {
                seen[j] = true;
                orbit_size += 1;
            }
        }
        let stabilizer: Vec<GroupElement> = stab.elements();
        union.extend(stabilizer.iter().copied().filter(|&x| x != g.identity()));
        let kind = if n == 1 {
            SingularityType::Smooth
        } else if stabilizer.len() == 2 {
            SingularityType::HalfOnes(n)
        } else {
            SingularityType::Undetermined { order: stabilizer.len() }
        };
        debug_assert_eq!(orbit_size * stabilizer.len(), g.order());
        let points = rep.iter().enumerate().map(|(f, &p)| factors[f].points[p].clone()).collect();
        records.push(SingularityRecord { representative: rep.clone(), points, stabilizer, orbit_size, kind });
    }
    let singular_points = records.iter().filter(|r| r.kind != SingularityType::Smooth).count() as u64;
    Ok(Census {
        n,
        stabilized_tuples: tuples.len() as u64,
        singular_points,
        records,
        stabilizer_elements: union.into_iter().collect(),
    })
}

/// Depth-first over factors, keeping only tuples whose common stabilizer
/// stays nontrivial. Tuples come out in lexicographic order.
fn collect_tuples(
    factors: &[FactorPoints],
    depth: usize,
    common: &Bits,
    current: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Bits)>,
) {
    if depth == factors.len() {
        out.push((current.clone(), common.clone()));
        return;
    }
    for (p, bits) in factors[depth].stabilizer_bits.iter().enumerate() {
        let next = common.and(bits);
        if next.count() > 1 {
            current.push(p);
            collect_tuples(factors, depth + 1, &next, current, out);
            current.pop();
        }
    }
}

/// `h^1(Θ)` of the quotient: the sum of the invariant deformation spaces
/// of the factors.
pub fn h1_theta(spec: &ProductQuotientSpec) -> Result<u64> {
    let mut total = 0;
    for (i, f) in spec.factors.iter().enumerate() {
        if f.genus < 2 {
            return Err(Error::SmallGenus { factor: i + 1, genus: f.genus });
        }
        total += invariant_deformation_dim(&f.branch)?;
    }
    Ok(total)
}

pub fn betti_b1(spec: &ProductQuotientSpec) -> u64 {
    spec.factors.iter().map(|f| invariant_b1_contribution(&f.branch)).sum()
}

#[derive(Clone, Debug)]
pub struct EtaleCover {
    pub degree: usize,
    pub unramified: bool,
    /// Stabilizer elements of the diagonal action lying outside the subgroup.
    pub outside: Vec<GroupElement>,
    /// The action restricted to the subgroup, when it can be written down.
    pub restricted: Option<ProductQuotientSpec>,
    /// Why `restricted` is missing.
    pub note: Option<String>,
}

/// The intermediate cover `C^n/H -> C^n/G` for a normal subgroup `H`.
pub fn etale_intermediate_cover(spec: &ProductQuotientSpec, h: &Subgroup) -> Result<EtaleCover> {
    let g = &spec.group;
    if !h.is_normal_in(g) {
        return Err(Error::NotNormal);
    }
    let census = singular_census(spec)?;
    let outside: Vec<GroupElement> = census.stabilizer_elements.iter().copied().filter(|&x| !h.contains(x)).collect();
    let (restricted, note) = match restrict_to_subgroup(spec, h) {
        Ok(s) => (Some(s), None),
        Err(Error::Unsupported(why)) => (None, Some(why)),
        Err(e) => return Err(e),
    };
    Ok(EtaleCover { degree: h.index_in(g), unramified: outside.is_empty(), outside, restricted, note })
}

/// Each branch point `k` of `C/G` with `x = φ(c_k)` splits into
/// `[G : H⟨x⟩]` branch points of `C/H` of index `m_k / ℓ`, where `ℓ` is the
/// order of `x` modulo `H`; for abelian `G` all of them have image `x^ℓ`.
fn restrict_to_subgroup(spec: &ProductQuotientSpec, h: &Subgroup) -> Result<ProductQuotientSpec> {
    let g = &spec.group;
    if !g.is_abelian() {
        return Err(Error::Unsupported("restriction is implemented for abelian groups only".into()));
    }
    let mut parts = Vec::new();
    for (i, f) in spec.factors.iter().enumerate() {
        if f.branch.base_genus != 0 {
            return Err(Error::Unsupported(format!("factor {} has a base of positive genus", i + 1)));
        }
        let mut pairs: Vec<(u32, GroupElement)> = Vec::new();
        for (k, &m) in f.branch.indices().iter().enumerate() {
            let x = f.epimorphism.c_image(k);
            let mut ell = 1u32;
            let mut y = x;
            while !h.contains(y) {
                y = g.mul(y, x);
                ell += 1;
            }
            let copies = g.order() / (h.order() * ell as usize);
            if m / ell >= 2 {
                let restricted = h.restrict(y).expect("x^ℓ lies in H");
                pairs.extend(std::iter::repeat_n((m / ell, restricted), copies));
            }
        }
        pairs.sort_by_key(|p| p.0);
        let branch = BranchData::new(0, pairs.iter().map(|p| p.0).collect())?;
        // Riemann-Hurwitz for C -> C/H gives the genus of C/H.
        let ho = h.order() as i64;
        let lhs = 2 * f.genus as i64 - 2 - branch.indices().iter().map(|&m| ho - ho / m as i64).sum::<i64>();
        if lhs != -2 * ho {
            let base = (lhs / ho + 2) / 2;
            return Err(Error::Unsupported(format!(
                "C/H has genus {base} on factor {}; only rational quotients are built",
                i + 1
            )));
        }
        parts.push((branch, GeneratingVector::new(h.group.clone(), pairs.iter().map(|p| p.1).collect())));
    }
    ProductQuotientSpec::new(h.group.clone(), parts, format!("{} restricted to a subgroup of order {}", spec.label, h.order()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KodairaReport {
    pub genera: Vec<u64>,
    pub all_genera_at_least_two: bool,
    /// No point of the product is fixed by a reflection, to the effect that
    /// `C^n -> X` is unramified in codimension one.
    pub quasi_etale: bool,
    pub terminal: bool,
    pub terminal_note: String,
    /// `κ = n`, when the conditions above hold.
    pub kappa: Option<usize>,
}

pub fn kodaira_report(spec: &ProductQuotientSpec, census: &Census) -> KodairaReport {
    let n = spec.n();
    let genera: Vec<u64> = spec.factors.iter().map(|f| f.genus).collect();
    let all_genera_at_least_two = genera.iter().all(|&g| g >= 2);
    // Fixed loci on a product of curves are products of finite sets.
    let quasi_etale = n >= 2;
    let (terminal, terminal_note) = if n < 3 {
        (false, format!("n = {n} < 3"))
    } else if !census.all_half_ones() {
        (false, "singularities of undetermined type".to_string())
    } else {
        (true, format!("all singularities 1/2(1,...,1) with n = {n} >= 3 (cited criterion)"))
    };
    let kappa = (all_genera_at_least_two && quasi_etale && terminal).then_some(n);
    KodairaReport { genera, all_genera_at_least_two, quasi_etale, terminal, terminal_note, kappa }
}

/// The involution relating the two actions on the Fermat quartic.
pub const TWIST: [[i64; 2]; 2] = [[1, 2], [2, 3]];

/// Generating vector of the first factor: `c1, c2, c3 ↦ (1,0), (0,1), (3,3)`.
pub const X_VECTOR: [&str; 3] = ["(1,0)", "(0,1)", "(3,3)"];

pub fn z4_squared() -> GroupRef {
    Arc::new(make_abelian_group(&[4, 4]).expect("Z4^2 is small"))
}

/// `H = ⟨(2,0), (0,2)⟩`.
pub fn subgroup_h(group: &GroupRef) -> Result<Subgroup> {
    subgroup_generated(group, &[group.element_by_label("(2,0)")?, group.element_by_label("(0,2)")?])
}

/// `Z4^2` acting on `C^n`, `C` the Fermat quartic: the first factor by the
/// standard action, every other factor through the involution.
pub fn x_family(n: usize) -> Result<ProductQuotientSpec> {
    x_family_with_vector(n, &X_VECTOR)
}

pub fn x_family_with_vector<S: AsRef<str>>(n: usize, labels: &[S]) -> Result<ProductQuotientSpec> {
    let g = z4_squared();
    let branch: BranchData = BranchData::new(0, vec![4, 4, 4])?;
    let first = GeneratingVector::from_labels(g.clone(), labels)?;
    let a = automorphism_from_matrix(&g, &TWIST.map(|r| r.to_vec()))?;
    // z ↦ φ1(A g)·z has epimorphism A^-1 ∘ ψ1; A is an involution.
    let twisted = first.map(|x| a.inverse().expect("automorphism").apply(x));
    let mut factors = vec![(branch.clone(), first)];
    factors.extend((1..n).map(|_| (branch.clone(), twisted.clone())));
    ProductQuotientSpec::new(g, factors, format!("X_{n}"))
}

/// The Galois cover of `X_n` with group `Z4^2/H`.
pub fn y_family(n: usize) -> Result<ProductQuotientSpec> {
    let x = x_family(n)?;
    let h = subgroup_h(&x.group)?;
    let mut y = restrict_to_subgroup(&x, &h)?;
    y.label = format!("Y_{n}");
    Ok(y)
}
