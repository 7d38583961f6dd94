//! Fundamental groups of quotients `C1 x ... x Cn / G`.
//!
//! Let `T_i` be the orbifold group of `C_i -> C_i/G` with epimorphism
//! `φ_i: T_i -> G`. The group `𝔾 = {(x_i) ∈ T_1 x ... x T_n : φ_1(x_1) = ... = φ_n(x_n)}`
//! acts on the product of universal covers with quotient `X`, and `π1(X)`
//! is `𝔾` modulo the normal subgroup generated by elements with a fixed
//! point (Armstrong).
//!
//! Fixed points: `x_i` fixes a point of the disc iff it is trivial or
//! conjugate to a power `c_k^a`. A trivial coordinate forces the common
//! value to be the identity, and then every coordinate lies in the
//! torsion-free kernel of `φ_j`, so apart from the identity each fixing
//! element has all coordinates of the form `δ c_k^a δ⁻¹`. Modulo conjugation
//! by `(1,..,u_j,..,1)` with `u_j ∈ ker φ_j`, which lies in `𝔾`, only the
//! class of `δ` in `G` matters, and conjugating by a diagonal element makes
//! the first conjugator trivial. With [`FixMode::Reduced`] the conjugators
//! are further taken modulo `⟨φ(c_k)⟩` and tuples modulo the remaining
//! diagonal symmetry.

use std::collections::{HashSet, VecDeque};

use pqw_fpgroup::{
    abelianization, coset_table_from_action, reidemeister_schreier_capped, simplify, todd_coxeter,
    AbelianInvariants, CosetTable, Enumeration, EnumerationLimits, EnumerationStats, FpError, Letter,
    Presentation, SchreierPresentation, TransversalOrder, Word,
};

use crate::error::{Error, Result};
use crate::finite_group::GroupElement;
use crate::product_quotient::{Census, ProductQuotientSpec};

/// Products with this many factors or more are outside the range where
/// reference values are known.
pub const VERIFIED_RANGE_END: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pi1Limits {
    pub max_cosets: usize,
    pub max_relators: usize,
    pub max_deductions: usize,
}

impl Default for Pi1Limits {
    fn default() -> Self {
        Pi1Limits { max_cosets: 2_000_000, max_relators: 1_000_000, max_deductions: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FixMode {
    /// Conjugators over a full transversal of each kernel, first one trivial.
    #[default]
    Normalized,
    /// Conjugators modulo `⟨φ(c_k)⟩`, one tuple per diagonal orbit.
    Reduced,
    /// Every conjugator tuple, nothing normalized.
    Saturated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pi1Options {
    pub limits: Pi1Limits,
    pub transversal: TransversalOrder,
    pub fix_mode: FixMode,
}

pub struct FiberProductGroup {
    /// `T_1 x ... x T_n`; generator `c1.2` is `c1` of the second factor.
    pub ambient: Presentation,
    /// Ambient index of the first generator of each factor.
    pub offsets: Vec<usize>,
    pub table: CosetTable,
    pub schreier: SchreierPresentation,
}

impl FiberProductGroup {
    pub fn index(&self) -> usize {
        self.table.len()
    }

    /// The Schreier presentation after Tietze simplification.
    pub fn simplified(&self) -> Presentation {
        simplify(&self.schreier.presentation)
    }
}

fn ambient_presentation(spec: &ProductQuotientSpec) -> (Presentation, Vec<usize>) {
    let mut names = Vec::new();
    let mut relators = Vec::new();
    let mut offsets = Vec::new();
    for (i, f) in spec.factors.iter().enumerate() {
        let og = &f.epimorphism.orbifold;
        let off = names.len();
        offsets.push(off);
        names.extend(og.presentation.generator_names().iter().map(|s| format!("{s}.{}", i + 1)));
        relators.extend(og.presentation.relators().iter().map(|r| r.shifted(off)));
    }
    for i in 0..offsets.len() {
        for j in i + 1..offsets.len() {
            let end_i = offsets[i] + spec.factors[i].branch.generator_count();
            let end_j = offsets[j] + spec.factors[j].branch.generator_count();
            for x in offsets[i]..end_i {
                for y in offsets[j]..end_j {
                    relators.push(Word::commutator(&Word::generator(x), &Word::generator(y)));
                }
            }
        }
    }
    let p = Presentation::new(names, relators).expect("generators in range").with_label("T_1 x ... x T_n");
    (p, offsets)
}

/// `(factor, local generator)` of each ambient generator.
fn factor_of(offsets: &[usize], total: usize) -> Vec<(usize, usize)> {
    (0..total)
        .map(|g| {
            let f = offsets.iter().rposition(|&o| o <= g).expect("offset 0 exists");
            (f, g - offsets[f])
        })
        .collect()
}

pub fn build_fiber_product(spec: &ProductQuotientSpec, options: &Pi1Options) -> Result<FiberProductGroup> {
    let g = &spec.group;
    let n = spec.n();
    let order = g.order() as u128;
    let index = order.checked_pow(n as u32 - 1).unwrap_or(u128::MAX);
    if index > options.limits.max_cosets as u128 {
        return Err(Error::Budget { needed: index, budget: options.limits.max_cosets as u64 });
    }
    let (ambient, offsets) = ambient_presentation(spec);
    let owner = factor_of(&offsets, ambient.generator_count());
    // A coset of 𝔾 is a diagonal coset Δ(g_1..g_n), stored as (g_1⁻¹g_i)_{i≥2}.
    let act = |s: &Vec<u32>, l: Letter| -> Vec<u32> {
        let (f, local) = owner[l.unsigned_abs() as usize - 1];
        let x = spec.factors[f].epimorphism.image(local);
        let x = if l > 0 { x } else { g.inverse(x) };
        let mut t = s.clone();
        if f == 0 {
            let xi = g.inverse(x);
            for v in &mut t {
                *v = g.mul(xi, GroupElement(*v as usize)).0 as u32;
            }
        } else {
            t[f - 1] = g.mul(GroupElement(t[f - 1] as usize), x).0 as u32;
        }
        t
    };
    let start = vec![g.identity().0 as u32; n - 1];
    let columns = options.transversal.columns(2 * ambient.generator_count());
    let table = coset_table_from_action(
        &ambient,
        start,
        act,
        "preimage of the diagonal",
        Some(&columns),
        options.limits.max_cosets,
    )?;
    if table.len() as u128 != index {
        return Err(Error::Verification(format!("index {} instead of {index}", table.len())));
    }
    let schreier = reidemeister_schreier_capped(&table, options.limits.max_relators)?;
    let fp = FiberProductGroup { ambient, offsets, table, schreier };
    check_consistency(spec, &fp)?;
    Ok(fp)
}

/// Every Schreier generator has equal images under all `φ_i`.
fn check_consistency(spec: &ProductQuotientSpec, fp: &FiberProductGroup) -> Result<()> {
    let owner = factor_of(&fp.offsets, fp.ambient.generator_count());
    let g = &spec.group;
    for s in 0..fp.schreier.rewriter.generator_count() {
        let w = fp.schreier.generator_word(&fp.table, s);
        let mut values = vec![g.identity(); spec.n()];
        for &l in w.letters() {
            let (f, local) = owner[l.unsigned_abs() as usize - 1];
            let x = spec.factors[f].epimorphism.image(local);
            values[f] = g.mul(values[f], if l > 0 { x } else { g.inverse(x) });
        }
        if values.iter().any(|&v| v != values[0]) {
            return Err(Error::InconsistentEpimorphisms(format!(
                "Schreier generator {} has images {:?}",
                fp.schreier.presentation.generator_names()[s],
                values.iter().map(|&v| g.label(v)).collect::<Vec<_>>()
            )));
        }
    }
    Ok(())
}

/// One coordinate `δ c_k^a δ⁻¹` of a fixing element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixCoordinate {
    pub branch_index: usize,
    pub exponent: u32,
    /// `φ(δ)`; `δ` is the transversal word of this element.
    pub conjugator: GroupElement,
}

#[derive(Clone, Debug)]
pub struct FixGenerator {
    /// `None` is a trivial coordinate.
    pub coordinates: Vec<Option<FixCoordinate>>,
    pub value: GroupElement,
    /// The element as a word in `T_1 x ... x T_n`.
    pub word: Word,
    /// The element rewritten over the Schreier generators of `𝔾`.
    pub rewritten: Word,
}

/// Shortest words `δ_g` in the orbifold generators of one factor with
/// `φ(δ_g) = g`.
fn kernel_transversal(spec: &ProductQuotientSpec, factor: usize) -> Vec<Word> {
    let g = &spec.group;
    let epi = &spec.factors[factor].epimorphism;
    let rank = spec.factors[factor].branch.generator_count();
    let mut words: Vec<Option<Word>> = vec![None; g.order()];
    words[g.identity().0] = Some(Word::empty());
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for gen in 0..rank {
            for inverse in [false, true] {
                let im = epi.image(gen);
                let y = g.mul(x, if inverse { g.inverse(im) } else { im });
                if words[y.0].is_none() {
                    let step = Word::new([if inverse { -(gen as Letter + 1) } else { gen as Letter + 1 }]);
                    words[y.0] = Some(words[x.0].as_ref().expect("visited").mul(&step));
                    queue.push_back(y);
                }
            }
        }
    }
    words.into_iter().map(|w| w.expect("generating vector is surjective")).collect()
}

pub fn enumerate_fix_generators(
    spec: &ProductQuotientSpec,
    fp: &FiberProductGroup,
    mode: FixMode,
) -> Result<Vec<FixGenerator>> {
    let g = &spec.group;
    let n = spec.n();
    let transversals: Vec<Vec<Word>> = (0..n).map(|f| kernel_transversal(spec, f)).collect();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for value in g.elements().filter(|&v| v != g.identity()) {
        // choices[f]: coordinates of factor f with value `value`.
        let mut choices: Vec<Vec<FixCoordinate>> = Vec::with_capacity(n);
        for f in &spec.factors {
            let epi = &f.epimorphism;
            let mut list = Vec::new();
            for (k, &m) in f.branch.indices().iter().enumerate() {
                let x = epi.c_image(k);
                let cyclic = g.closure(&[x]);
                for a in 1..m {
                    let xa = g.pow(x, a as i64);
                    for d in g.elements() {
                        if mode == FixMode::Reduced && cyclic.iter().any(|&c| g.mul(d, c) < d) {
                            continue;
                        }
                        if g.conjugate(xa, d) == value {
                            list.push(FixCoordinate { branch_index: k, exponent: a, conjugator: d });
                        }
                    }
                }
            }
            choices.push(list);
        }
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        if mode != FixMode::Saturated {
            choices[0].retain(|c| c.conjugator == g.identity());
        }
        let mut odometer = vec![0usize; n];
        'tuples: loop {
            let coords: Vec<&FixCoordinate> = (0..n).map(|f| &choices[f][odometer[f]]).collect();
            let keep = mode != FixMode::Reduced || is_orbit_minimum(spec, &coords);
            if keep {
                let mut word = Word::empty();
                for (f, c) in coords.iter().enumerate() {
                    let epi = &spec.factors[f].epimorphism;
                    let ck = Word::power_of_generator(epi.orbifold.c(c.branch_index), c.exponent as i64);
                    let local = ck.conjugate_by(&transversals[f][c.conjugator.0]);
                    word = word.mul(&local.shifted(fp.offsets[f]));
                }
                let rewritten = fp.schreier.rewriter.rewrite(&word)?;
                if seen.insert(rewritten.canonical_relator()) {
                    out.push(FixGenerator {
                        coordinates: coords.into_iter().cloned().map(Some).collect(),
                        value,
                        word,
                        rewritten,
                    });
                }
            }
            for f in (0..n).rev() {
                odometer[f] += 1;
                if odometer[f] < choices[f].len() {
                    continue 'tuples;
                }
                odometer[f] = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// Whether the tuple is least among its images under left multiplication
/// of all conjugators by `⟨φ(c_k)⟩` of the first coordinate.
fn is_orbit_minimum(spec: &ProductQuotientSpec, coords: &[&FixCoordinate]) -> bool {
    let g = &spec.group;
    let first = &spec.factors[0].epimorphism;
    let cyclic = g.closure(&[first.c_image(coords[0].branch_index)]);
    let reduce = |f: usize, c: &FixCoordinate, h: GroupElement| -> GroupElement {
        let x = spec.factors[f].epimorphism.c_image(c.branch_index);
        let d = g.mul(h, c.conjugator);
        g.closure(&[x]).into_iter().map(|y| g.mul(d, y)).min().expect("nonempty coset")
    };
    let key: Vec<GroupElement> = coords.iter().skip(1).map(|c| c.conjugator).collect();
    cyclic.iter().all(|&h| {
        let image: Vec<GroupElement> = coords.iter().enumerate().skip(1).map(|(f, c)| reduce(f, c, h)).collect();
        key <= image
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pi1Order {
    Certified(u64),
    /// The abelianization has positive rank.
    Infinite { free_rank: usize },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pi1Diagnostics {
    pub index: usize,
    pub ambient_generators: usize,
    pub schreier_generators: usize,
    pub schreier_relators: usize,
    pub raw_relators: usize,
    pub fix_generators: usize,
    pub simplified_generators: usize,
    pub simplified_relators: usize,
    pub enumeration: Option<EnumerationStats>,
}

#[derive(Clone, Debug)]
pub struct Pi1Result {
    /// Simplified presentation of `π1` (absent when the fiber product
    /// could not be built within limits).
    pub presentation: Option<Presentation>,
    pub abelian: Option<AbelianInvariants>,
    pub order: Pi1Order,
    /// Isomorphism type, only when the order is certified and equals the
    /// order of the abelianization.
    pub tag: Option<String>,
    /// Regular representation from the completed enumeration.
    pub table: Option<CosetTable>,
    pub diagnostics: Pi1Diagnostics,
    pub beyond_verified_range: bool,
}

impl Pi1Result {
    pub fn certified_order(&self) -> Option<u64> {
        match self.order {
            Pi1Order::Certified(o) => Some(o),
            _ => None,
        }
    }

    /// Whether every generator of the presentation squares to the identity
    /// in the regular representation. `None` without a completed table.
    pub fn generators_are_involutions(&self) -> Option<bool> {
        let t = self.table.as_ref()?;
        let gens = t.presentation().generator_count();
        Some((0..gens).all(|x| {
            let sq = Word::power_of_generator(x, 2);
            (0..t.len()).all(|c| t.trace(c, &sq) == c)
        }))
    }
}

fn undetermined(reason: String, diagnostics: Pi1Diagnostics, n: usize) -> Pi1Result {
    Pi1Result {
        presentation: None,
        abelian: None,
        order: Pi1Order::Undetermined { reason },
        tag: None,
        table: None,
        diagnostics,
        beyond_verified_range: n >= VERIFIED_RANGE_END,
    }
}

pub fn armstrong_pi1(spec: &ProductQuotientSpec, options: &Pi1Options) -> Result<Pi1Result> {
    let n = spec.n();
    let index = (spec.group.order() as u128).checked_pow(n as u32 - 1).map_or(usize::MAX, |i| i.min(usize::MAX as u128) as usize);
    let mut diag = Pi1Diagnostics { index, ..Default::default() };
    let fp = match build_fiber_product(spec, options) {
        Ok(fp) => fp,
        Err(Error::Budget { needed, budget }) => {
            return Ok(undetermined(format!("index {needed} of the fiber product exceeds {budget} cosets"), diag, n));
        }
        Err(Error::Fp(FpError::TooManyRelators { limit })) => {
            return Ok(undetermined(format!("more than {limit} Schreier relators"), diag, n));
        }
        Err(e) => return Err(e),
    };
    diag.index = fp.index();
    diag.ambient_generators = fp.ambient.generator_count();
    diag.schreier_generators = fp.schreier.presentation.generator_count();
    diag.schreier_relators = fp.schreier.presentation.relators().len();
    diag.raw_relators = fp.schreier.raw_relator_count;

    let fix = enumerate_fix_generators(spec, &fp, options.fix_mode)?;
    diag.fix_generators = fix.len();
    if diag.schreier_relators + fix.len() > options.limits.max_relators {
        return Ok(undetermined(format!("more than {} relators", options.limits.max_relators), diag, n));
    }
    let mut p = fp.schreier.presentation.clone();
    p.add_relators(fix.into_iter().map(|f| f.rewritten))?;
    drop(fp);
    let p = simplify(&p).with_label(format!("pi1({})", spec.label));
    diag.simplified_generators = p.generator_count();
    diag.simplified_relators = p.relators().len();
    let abelian = abelianization(&p);

    let limits = EnumerationLimits { max_cosets: options.limits.max_cosets, max_deductions: options.limits.max_deductions };
    let (order, table) = if abelian.free_rank > 0 {
        (Pi1Order::Infinite { free_rank: abelian.free_rank }, None)
    } else {
        match todd_coxeter(&p, &[], limits)? {
            Enumeration::Complete(t, stats) => {
                diag.enumeration = Some(stats);
                (Pi1Order::Certified(t.len() as u64), Some(t))
            }
            Enumeration::Undetermined(stats) => {
                diag.enumeration = Some(stats);
                (Pi1Order::Undetermined { reason: format!("coset enumeration exceeded {} cosets", limits.max_cosets) }, None)
            }
        }
    };
    let tag = match (&order, abelian.order()) {
        (Pi1Order::Certified(o), Some(ab)) if ab == (*o).into() => Some(abelian.to_string()),
        _ => None,
    };
    Ok(Pi1Result {
        presentation: Some(p),
        abelian: Some(abelian),
        order,
        tag,
        table,
        diagnostics: diag,
        beyond_verified_range: n >= VERIFIED_RANGE_END,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalCoverReport {
    pub pi1_order: u64,
    pub quotient_singularities: u64,
    /// Singular points of the universal cover: `|π1|` times those of the quotient.
    pub cover_singularities: u64,
    pub simply_connected: bool,
    /// A finite `π1` makes the universal cover projective, hence not contractible.
    pub non_contractible: bool,
}

pub fn universal_cover_report(pi1: &Pi1Result, census: &Census) -> Result<UniversalCoverReport> {
    let o = pi1.certified_order().ok_or(Error::Uncertified)?;
    Ok(UniversalCoverReport {
        pi1_order: o,
        quotient_singularities: census.singular_points,
        cover_singularities: o * census.singular_points,
        simply_connected: o == 1,
        non_contractible: census.n >= 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_quotient::{x_family, y_family};

    #[test]
    fn single_factor_is_simply_connected() {
        let x1 = x_family(1).unwrap();
        let r = armstrong_pi1(&x1, &Pi1Options::default()).unwrap();
        assert_eq!(r.order, Pi1Order::Certified(1));
        assert_eq!(r.tag.as_deref(), Some("1"));
        assert_eq!(r.diagnostics.index, 1);
    }

    #[test]
    fn fiber_product_index() {
        let fp = build_fiber_product(&x_family(2).unwrap(), &Pi1Options::default()).unwrap();
        assert_eq!(fp.index(), 16);
        assert!(fp.schreier.presentation.generator_count() > 0);
    }

    #[test]
    fn y2() {
        let r = armstrong_pi1(&y_family(2).unwrap(), &Pi1Options::default()).unwrap();
        assert_eq!(r.order, Pi1Order::Certified(2));
        assert_eq!(r.tag.as_deref(), Some("Z2"));
        assert_eq!(r.generators_are_involutions(), Some(true));
    }

    #[test]
    fn x2() {
        let r = armstrong_pi1(&x_family(2).unwrap(), &Pi1Options::default()).unwrap();
        assert_eq!(r.order, Pi1Order::Certified(8));
        assert_eq!(r.tag.as_deref(), Some("Z2^3"));
    }
}
