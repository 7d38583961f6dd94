//! The Fermat quartic `x0^4 + x1^4 + x2^4 = 0` with `Z4^2` acting by
//! `(a,b)·(x0:x1:x2) = (i^a x0 : i^b x1 : x2)`, in exact arithmetic over
//! `Q(ζ8)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::finite_group::{orbits_and_stabilizers, FiniteGroup, GroupElement, Subgroup};
use crate::product_quotient::{marked_points, ProductQuotientSpec};

/// `a0 + a1 ζ + a2 ζ^2 + a3 ζ^3` with `ζ = ζ8`, so `ζ^4 = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic([BigRational; 4]);

impl Cyclotomic {
    pub fn new(coefficients: [BigRational; 4]) -> Self {
        Cyclotomic(coefficients)
    }

    pub fn from_integers(c: [i64; 4]) -> Self {
        Cyclotomic(c.map(|x| BigRational::from_integer(x.into())))
    }

    pub fn zero() -> Self {
        Cyclotomic::from_integers([0; 4])
    }

    pub fn one() -> Self {
        Cyclotomic::from_integers([1, 0, 0, 0])
    }

    /// `ζ8^k`
    pub fn zeta(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut c = [0i64; 4];
        c[k % 4] = if k < 4 { 1 } else { -1 };
        Cyclotomic::from_integers(c)
    }

    pub fn coefficients(&self) -> &[BigRational; 4] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// The automorphism `ζ ↦ ζ^j`, `j` odd.
    pub fn galois(&self, j: i64) -> Self {
        let mut out = Cyclotomic::zero();
        for (k, c) in self.0.iter().enumerate() {
            out = out + Cyclotomic::zeta(j * k as i64).scale(c);
        }
        out
    }

    fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic(self.0.clone().map(|c| c * r))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Verification("inverse of zero".into()));
        }
        let others = self.galois(3) * self.galois(5) * self.galois(7);
        let norm = self.clone() * others.clone();
        debug_assert!(norm.0[1..].iter().all(Zero::is_zero), "the norm is rational");
        Ok(others.scale(&norm.0[0].recip()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(Cyclotomic::one(), |acc, _| acc * base.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.inv()?)
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: Cyclotomic) -> Cyclotomic {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        Cyclotomic([a0 + b0, a1 + b1, a2 + b2, a3 + b3])
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic(self.0.map(|c| -c))
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: Cyclotomic) -> Cyclotomic {
        self + (-o)
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: Cyclotomic) -> Cyclotomic {
        let mut c: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                let p = a * b;
                if i + j < 4 {
                    c[i + j] += p;
                } else {
                    c[i + j - 4] -= p;
                }
            }
        }
        Cyclotomic(c)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (_, true) => if k == 1 { "z".to_string() } else { format!("z^{k}") },
                (_, false) => if k == 1 { format!("{mag}*z") } else { format!("{mag}*z^{k}") },
            };
            terms.push((c.is_negative(), body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// A point of projective space over `Q(ζ8)`, kept with its last nonzero
/// coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint(Vec<Cyclotomic>);

impl ProjectivePoint {
    pub fn new(coords: Vec<Cyclotomic>) -> Result<Self> {
        let last = coords
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or_else(|| Error::Verification("all coordinates zero".into()))?;
        let s = coords[last].inv()?;
        Ok(ProjectivePoint(coords.into_iter().map(|c| c * s.clone()).collect()))
    }

    pub fn coords(&self) -> &[Cyclotomic] {
        &self.0
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

pub fn on_curve(p: &ProjectivePoint) -> bool {
    p.0.len() == 3 && p.0.iter().fold(Cyclotomic::zero(), |acc, x| acc + x.pow(4).expect("positive power")).is_zero()
}

fn exponents(group: &FiniteGroup, g: GroupElement) -> Result<(i64, i64)> {
    match (group.residue_moduli(), group.residues(g)) {
        (Some([4, 4]), Some(r)) => Ok((r[0] as i64, r[1] as i64)),
        _ => Err(Error::InvalidGroup("the Fermat action needs Z4^2".into())),
    }
}

pub fn act(group: &FiniteGroup, g: GroupElement, p: &ProjectivePoint) -> Result<ProjectivePoint> {
    let (a, b) = exponents(group, g)?;
    let c = &p.0;
    if c.len() != 3 {
        return Err(Error::Verification("not a point of the plane".into()));
    }
    ProjectivePoint::new(vec![
        Cyclotomic::zeta(2 * a) * c[0].clone(),
        Cyclotomic::zeta(2 * b) * c[1].clone(),
        c[2].clone(),
    ])
}

/// Points of the curve fixed by `g ≠ 1`.
///
/// The fixed locus of `diag(i^a, i^b, 1)` is the union of its eigenspaces:
/// a coordinate point for a simple eigenvalue, a coordinate line where two
/// eigenvalues agree. A coordinate point is never on the curve; the line
/// with `x_j = 0` meets it where `x_s^4 = -x_t^4`, at `(1 : ζ8 i^k)`.
pub fn fixed_points(group: &FiniteGroup, g: GroupElement) -> Result<Vec<ProjectivePoint>> {
    let (a, b) = exponents(group, g)?;
    let eig = [a.rem_euclid(4), b.rem_euclid(4), 0];
    if eig.iter().all(|&e| e == eig[0]) {
        return Err(Error::Verification("the identity fixes every point".into()));
    }
    let mut out = Vec::new();
    for s in 0..3 {
        let same: Vec<usize> = (0..3).filter(|&t| eig[t] == eig[s]).collect();
        if same[0] != s {
            continue;
        }
        match same.as_slice() {
            [j] => {
                let mut c = vec![Cyclotomic::zero(); 3];
                c[*j] = Cyclotomic::one();
                let p = ProjectivePoint::new(c)?;
                if on_curve(&p) {
                    out.push(p);
                }
            }
            [s, t] => {
                for k in 0..4 {
                    let mut c = vec![Cyclotomic::zero(); 3];
                    c[*s] = Cyclotomic::one();
                    c[*t] = Cyclotomic::zeta(1 + 2 * k);
                    let p = ProjectivePoint::new(c)?;
                    debug_assert!(on_curve(&p));
                    out.push(p);
                }
            }
            _ => unreachable!("some eigenvalue differs"),
        }
    }
    Ok(out)
}

/// `f(x) = (x0^4 : x1^4)`
pub fn quotient_map(p: &ProjectivePoint) -> Result<ProjectivePoint> {
    ProjectivePoint::new(vec![p.0[0].pow(4)?, p.0[1].pow(4)?])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct MarkedOrbit {
    pub points: Vec<ProjectivePoint>,
    /// Labels of the stabilizer of the first point.
    pub stabilizer: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FermatReport {
    pub marked_points: Vec<ProjectivePoint>,
    pub orbits: Vec<MarkedOrbit>,
    pub branch_points: Vec<ProjectivePoint>,
    pub checks: Vec<Check>,
}

impl FermatReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(checks: &mut Vec<Check>, name: &str, passed: bool, detail: impl Into<String>) {
    checks.push(Check { name: name.into(), passed, detail: detail.into() });
}

fn point(c: [Cyclotomic; 3]) -> ProjectivePoint {
    ProjectivePoint::new(c.to_vec()).expect("nonzero point")
}

/// The three rows of the stabilizer table: point and stabilizer generator.
pub fn table_rows() -> [(ProjectivePoint, &'static str); 3] {
    let (o, z, e) = (Cyclotomic::one(), Cyclotomic::zero(), Cyclotomic::zeta(1));
    [
        (point([z.clone(), o.clone(), e.clone()]), "(1,0)"),
        (point([o.clone(), z.clone(), e.clone()]), "(0,1)"),
        (point([o, e, z]), "(1,1)"),
    ]
}

/// Marked points sorted by their text form.
pub fn marked_set(group: &FiniteGroup) -> Result<Vec<ProjectivePoint>> {
    let mut pts: Vec<ProjectivePoint> = Vec::new();
    for g in group.elements().filter(|&g| g != group.identity()) {
        for p in fixed_points(group, g)? {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
    }
    pts.sort_by_key(|p| p.to_string());
    Ok(pts)
}

fn index_action<'a>(
    group: &'a FiniteGroup,
    pts: &'a [ProjectivePoint],
) -> impl Fn(GroupElement, usize) -> usize + 'a {
    move |g, i| {
        let q = act(group, g, &pts[i]).expect("Z4^2 acts");
        pts.iter().position(|p| *p == q).unwrap_or(usize::MAX)
    }
}

/// Recomputes the stabilizer table from scratch.
pub fn verify_paper_table(group: &FiniteGroup) -> Result<FermatReport> {
    let mut checks = Vec::new();
    let pts = marked_set(group)?;
    check(&mut checks, "marked points", pts.len() == 12, format!("{} points", pts.len()));
    check(&mut checks, "on curve", pts.iter().all(on_curve), "every fixed point satisfies the quartic");

    let action = index_action(group, &pts);
    let orbits = orbits_and_stabilizers(group, pts.len(), &action)?;
    let sizes: Vec<usize> = orbits.iter().map(|o| o.points.len()).collect();
    check(&mut checks, "orbits", sizes == [4, 4, 4], format!("orbit sizes {sizes:?}"));

    for (p, gen) in table_rows() {
        let idx = pts.iter().position(|q| *q == p);
        let Some(idx) = idx else {
            check(&mut checks, &format!("table row {p}"), false, "point not in the marked set");
            continue;
        };
        let g = group.element_by_label(gen)?;
        let expected = group.closure(&[g]);
        let stab: Vec<GroupElement> = group.elements().filter(|&h| action(h, idx) == idx).collect();
        let generators: Vec<&str> =
            stab.iter().filter(|&&h| group.element_order(h) == 4).map(|&h| group.label(h)).collect();
        check(
            &mut checks,
            &format!("stabilizer of {p}"),
            stab == expected && group.element_order(g) == 4,
            format!("cyclic of order {}, generated by {}", stab.len(), generators.join(" or ")),
        );
    }

    let mut invariant = true;
    for p in &pts {
        let fp = quotient_map(p)?;
        for g in group.elements() {
            invariant &= quotient_map(&act(group, g, p)?)? == fp;
        }
    }
    check(&mut checks, "f is invariant", invariant, "f(g·p) = f(p) on the marked set");

    let mut branch_points: Vec<ProjectivePoint> = Vec::new();
    let mut fibre_sizes = Vec::new();
    for p in &pts {
        let b = quotient_map(p)?;
        match branch_points.iter().position(|q| *q == b) {
            Some(i) => fibre_sizes[i] += 1,
            None => {
                branch_points.push(b);
                fibre_sizes.push(1);
            }
        }
    }
    let (o, z) = (Cyclotomic::one(), Cyclotomic::zero());
    let expected = [
        ProjectivePoint::new(vec![z.clone(), o.clone()])?,
        ProjectivePoint::new(vec![o.clone(), z])?,
        ProjectivePoint::new(vec![o.clone(), -o])?,
    ];
    let mut matches = branch_points.len() == 3;
    for e in &expected {
        matches &= branch_points.contains(e);
    }
    check(
        &mut checks,
        "branch points",
        matches,
        branch_points.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "),
    );
    // A fibre over a branch point has |G| / index points.
    let indices: Vec<usize> = fibre_sizes.iter().map(|&s| group.order() / s).collect();
    check(&mut checks, "branch indices", indices == [4, 4, 4], format!("{indices:?}"));

    drop(action);
    let orbits = orbits
        .iter()
        .map(|o| MarkedOrbit {
            points: o.points.iter().map(|&i| pts[i].clone()).collect(),
            stabilizer: o.stabilizers[0].iter().map(|&h| group.label(h).to_string()).collect(),
        })
        .collect();
    Ok(FermatReport { marked_points: pts, orbits, branch_points, checks })
}

/// Orbit sizes of a subgroup on the marked set.
pub fn subgroup_orbits(group: &FiniteGroup, h: &Subgroup) -> Result<Vec<usize>> {
    let pts = marked_set(group)?;
    let action = index_action(group, &pts);
    let sub = &h.group;
    let orbits = orbits_and_stabilizers(sub, pts.len(), |x, i| action(h.embedding[x.0], i))?;
    Ok(orbits.iter().map(|o| o.points.len()).collect())
}

/// Matches the abstract marked points `(k, g⟨x_k⟩)` of the first factor of
/// `spec` with the coordinate points via `(k, g⟨x_k⟩) ↦ g·p_k`, where `p_k`
/// is the table point with stabilizer `⟨x_k⟩`, and checks that this is a
/// stabilizer-preserving equivariant bijection.
pub fn verify_against_abstract(spec: &ProductQuotientSpec) -> Result<Check> {
    let group = &spec.group;
    let pts = marked_set(group)?;
    let action = index_action(group, &pts);
    let abstract_points = marked_points(spec, 0);
    let epi = &spec.factors[0].epimorphism;
    let mut image = Vec::new();
    for mp in &abstract_points {
        let x = epi.c_image(mp.branch_index);
        let cyclic = group.closure(&[x]);
        let base = (0..pts.len())
            .find(|&i| group.elements().filter(|&h| action(h, i) == i).collect::<Vec<_>>() == cyclic)
            .ok_or_else(|| Error::Verification(format!("no coordinate point with stabilizer ⟨{}⟩", group.label(x))))?;
        let q = action(mp.representative, base);
        let stab: Vec<GroupElement> = group.elements().filter(|&h| action(h, q) == q).collect();
        if stab != mp.stabilizer {
            return Ok(Check {
                name: "abstract marked points".into(),
                passed: false,
                detail: format!("stabilizer mismatch at {}", pts[q]),
            });
        }
        image.push(q);
    }
    let mut sorted = image.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let bijective = abstract_points.len() == pts.len() && sorted.len() == pts.len();
    Ok(Check {
        name: "abstract marked points".into(),
        passed: bijective,
        detail: format!("{} abstract points onto {} coordinate points", abstract_points.len(), sorted.len()),
    })
}
