//! Report documents. Field order is fixed, so equal inputs give equal bytes
//! once timing is dropped.

use std::time::Instant;

use serde::Serialize;

use pqw_core::fermat::FermatReport;
use pqw_core::finite_group::{GroupElement, Subgroup};
use pqw_core::pi1::{universal_cover_report, Pi1Limits, Pi1Order, Pi1Result};
use pqw_core::product_quotient::{
    betti_b1, etale_intermediate_cover, h1_theta, kodaira_report, singular_census, Census, ProductQuotientSpec,
};

use crate::document::SpecDocument;
use crate::CliError;

pub const SCHEMA_ID: &str = "pqw-report/v1";

/// Where a value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Computed,
    /// Taken from a published criterion rather than computed here.
    Cited,
    Uncertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tagged<T> {
    pub value: T,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn computed<T>(value: T) -> Tagged<T> {
    Tagged { value, status: Status::Computed, note: None }
}

fn cited<T>(value: T, note: impl Into<String>) -> Tagged<T> {
    Tagged { value, status: Status::Cited, note: Some(note.into()) }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub spec: Option<SpecDocument>,
    pub verdict: Verdict,
    pub flags: Vec<String>,
    pub invariants: Option<InvariantsBlock>,
    pub pi1: Option<Pi1Block>,
    pub fermat: Option<FermatBlock>,
    pub checks: Vec<CheckEntry>,
    pub limits: LimitsEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<Stage>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckEntry {
    pub fn compare(name: &str, expected: impl ToString, found: Option<String>) -> Self {
        let expected = expected.to_string();
        let status = match &found {
            None => CheckStatus::Undetermined,
            Some(f) if *f == expected => CheckStatus::Pass,
            Some(_) => CheckStatus::Fail,
        };
        CheckEntry { name: name.into(), status, expected: Some(expected), found, detail: None }
    }

    pub fn boolean(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckEntry {
            name: name.into(),
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            expected: None,
            found: None,
            detail: Some(detail.into()),
        }
    }
}

pub fn verdict(checks: &[CheckEntry]) -> Verdict {
    if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        Verdict::Fail
    } else if checks.iter().any(|c| c.status == CheckStatus::Undetermined) {
        Verdict::Undetermined
    } else {
        Verdict::Pass
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitsEcho {
    pub max_cosets: usize,
    pub max_relators: usize,
    pub max_deductions: usize,
}

impl From<Pi1Limits> for LimitsEcho {
    fn from(l: Pi1Limits) -> Self {
        LimitsEcho { max_cosets: l.max_cosets, max_relators: l.max_relators, max_deductions: l.max_deductions }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub wall_clock_ms: u64,
}

/// Records stage durations.
pub struct Clock(Vec<Stage>);

impl Clock {
    pub fn new() -> Self {
        Clock(Vec::new())
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push(Stage { name: name.into(), wall_clock_ms: start.elapsed().as_millis() as u64 });
        out
    }

    pub fn stages(self) -> Vec<Stage> {
        self.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeCount {
    #[serde(rename = "type")]
    pub kind: String,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusBlock {
    pub status: Status,
    pub stabilized_tuples: u64,
    pub singular_points: u64,
    pub types: Vec<TypeCount>,
    pub stabilizer_elements: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverBlock {
    pub subgroup: Vec<String>,
    pub degree: usize,
    pub unramified: Tagged<bool>,
    pub stabilizers_outside: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted_factors: Option<Vec<RestrictedFactor>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictedFactor {
    pub branch: String,
    pub vector: Vec<String>,
    pub genus: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantsBlock {
    pub genera: Tagged<Vec<u64>>,
    pub h1_theta: Tagged<Option<u64>>,
    pub b1: Tagged<u64>,
    pub census: CensusBlock,
    pub quasi_etale: Tagged<bool>,
    pub terminal: Tagged<bool>,
    pub kodaira_dimension: Tagged<Option<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub etale_cover: Option<CoverBlock>,
}

pub struct Invariants {
    pub block: InvariantsBlock,
    pub census: Census,
}

fn labels(spec: &ProductQuotientSpec, xs: &[GroupElement]) -> Vec<String> {
    xs.iter().map(|&x| spec.group.label(x).to_string()).collect()
}

pub fn invariants(spec: &ProductQuotientSpec, subgroup: Option<&Subgroup>) -> Result<Invariants, CliError> {
    let census = singular_census(spec)?;
    let h1 = match h1_theta(spec) {
        Ok(v) => computed(Some(v)),
        Err(e) => Tagged { value: None, status: Status::Uncertified, note: Some(e.to_string()) },
    };
    let mut types: Vec<TypeCount> = Vec::new();
    for r in &census.records {
        let kind = r.kind.to_string();
        match types.iter_mut().find(|t| t.kind == kind) {
            Some(t) => t.count += 1,
            None => types.push(TypeCount { kind, count: 1 }),
        }
    }
    let k = kodaira_report(spec, &census);
    let kappa_note = match k.kappa {
        Some(_) => "quasi-etale quotient of a product of curves of genus >= 2 with terminal singularities".to_string(),
        None => "criterion not met; kappa not reported".to_string(),
    };
    let etale_cover = match subgroup {
        Some(h) => {
            let c = etale_intermediate_cover(spec, h)?;
            Some(CoverBlock {
                subgroup: labels(spec, &h.elements),
                degree: c.degree,
                unramified: computed(c.unramified),
                stabilizers_outside: labels(spec, &c.outside),
                restricted_factors: c.restricted.as_ref().map(|r| {
                    r.factors
                        .iter()
                        .map(|f| RestrictedFactor { branch: f.branch.to_string(), vector: f.vector().labels(), genus: f.genus })
                        .collect()
                }),
                note: c.note.clone(),
            })
        }
        None => None,
    };
    let block = InvariantsBlock {
        genera: computed(k.genera.clone()),
        h1_theta: h1,
        b1: computed(betti_b1(spec)),
        census: CensusBlock {
            status: Status::Computed,
            stabilized_tuples: census.stabilized_tuples,
            singular_points: census.singular_points,
            types,
            stabilizer_elements: labels(spec, &census.stabilizer_elements),
        },
        quasi_etale: computed(k.quasi_etale),
        terminal: cited(k.terminal, k.terminal_note.clone()),
        kodaira_dimension: cited(k.kappa, kappa_note),
        etale_cover,
    };
    Ok(Invariants { block, census })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pi1Status {
    Certified,
    Infinite,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbelianBlock {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pi1Block {
    pub status: Pi1Status,
    pub order: Option<u64>,
    pub isomorphism_type: Option<String>,
    pub abelianization: Option<AbelianBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub generators_are_involutions: Option<bool>,
    pub beyond_verified_range: bool,
    pub diagnostics: DiagnosticsBlock,
    pub universal_cover: Option<UniversalCoverBlock>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsBlock {
    pub index: usize,
    pub ambient_generators: usize,
    pub schreier_generators: usize,
    pub schreier_relators: usize,
    pub raw_relators: usize,
    pub fix_generators: usize,
    pub simplified_generators: usize,
    pub simplified_relators: usize,
    pub cosets_defined: Option<usize>,
    pub max_live_cosets: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalCoverBlock {
    pub singular_points: u64,
    pub simply_connected: bool,
    pub non_contractible: Tagged<bool>,
}

pub fn pi1_block(r: &Pi1Result, census: &Census) -> Pi1Block {
    let (status, reason) = match &r.order {
        Pi1Order::Certified(_) => (Pi1Status::Certified, None),
        Pi1Order::Infinite { free_rank } => {
            (Pi1Status::Infinite, Some(format!("abelianization has free rank {free_rank}")))
        }
        Pi1Order::Undetermined { reason } => (Pi1Status::Undetermined, Some(reason.clone())),
    };
    let d = &r.diagnostics;
    Pi1Block {
        status,
        order: r.certified_order(),
        isomorphism_type: r.tag.clone(),
        abelianization: r.abelian.as_ref().map(|a| AbelianBlock {
            free_rank: a.free_rank,
            torsion: a.torsion_u64(),
            text: a.to_string(),
        }),
        reason,
        generators_are_involutions: r.generators_are_involutions(),
        beyond_verified_range: r.beyond_verified_range,
        diagnostics: DiagnosticsBlock {
            index: d.index,
            ambient_generators: d.ambient_generators,
            schreier_generators: d.schreier_generators,
            schreier_relators: d.schreier_relators,
            raw_relators: d.raw_relators,
            fix_generators: d.fix_generators,
            simplified_generators: d.simplified_generators,
            simplified_relators: d.simplified_relators,
            cosets_defined: d.enumeration.as_ref().map(|e| e.total_defined),
            max_live_cosets: d.enumeration.as_ref().map(|e| e.max_live),
        },
        universal_cover: universal_cover_report(r, census).ok().map(|u| UniversalCoverBlock {
            singular_points: u.cover_singularities,
            simply_connected: u.simply_connected,
            non_contractible: cited(u.non_contractible, "finite fundamental group, so the universal cover is projective"),
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitEntry {
    pub points: Vec<String>,
    pub stabilizer: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FermatBlock {
    pub marked_points: Vec<String>,
    pub orbits: Vec<OrbitEntry>,
    pub branch_points: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupOrbits>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupOrbits {
    pub elements: Vec<String>,
    pub orbit_sizes: Vec<usize>,
}

pub fn fermat_block(r: &FermatReport, subgroup: Option<SubgroupOrbits>) -> FermatBlock {
    FermatBlock {
        marked_points: r.marked_points.iter().map(|p| p.to_string()).collect(),
        orbits: r
            .orbits
            .iter()
            .map(|o| OrbitEntry { points: o.points.iter().map(|p| p.to_string()).collect(), stabilizer: o.stabilizer.clone() })
            .collect(),
        branch_points: r.branch_points.iter().map(|p| p.to_string()).collect(),
        subgroup,
    }
}

fn tagged_text<T>(name: &str, t: &Tagged<T>, show: impl Fn(&T) -> String) -> String {
    let status = match t.status {
        Status::Computed => "",
        Status::Cited => " [cited]",
        Status::Uncertified => " [uncertified]",
    };
    format!("  {name}: {}{status}", show(&t.value))
}

/// Plain-text rendering for the terminal.
pub fn render_text(r: &Report) -> String {
    let mut out = Vec::new();
    out.push(format!("pqw {}", r.command));
    if let Some(s) = &r.spec {
        let label = s.label.as_deref().unwrap_or("(unlabelled)");
        out.push(format!("spec: {label}, n = {}", s.factors.len()));
    }
    for f in &r.flags {
        out.push(format!("flag: {f}"));
    }
    if let Some(i) = &r.invariants {
        out.push("invariants".into());
        out.push(tagged_text("genera", &i.genera, |g| {
            g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }));
        out.push(match i.h1_theta.value {
            Some(v) => format!("  h1(Theta): {v}"),
            None => format!("  h1(Theta): unknown [uncertified] {}", i.h1_theta.note.as_deref().unwrap_or("")),
        });
        out.push(format!("  b1: {}", i.b1.value));
        out.push(format!(
            "  census: {} singular points from {} stabilized points",
            i.census.singular_points, i.census.stabilized_tuples
        ));
        for t in &i.census.types {
            out.push(format!("    {} x {}", t.count, t.kind));
        }
        out.push(tagged_text("quasi-etale", &i.quasi_etale, bool::to_string));
        out.push(tagged_text("terminal", &i.terminal, bool::to_string));
        out.push(tagged_text("kodaira dimension", &i.kodaira_dimension, |k| {
            k.map_or("not reported".to_string(), |k| k.to_string())
        }));
        if let Some(c) = &i.etale_cover {
            out.push(format!(
                "  cover by subgroup {{{}}}: degree {}, {}",
                c.subgroup.join(", "),
                c.degree,
                if c.unramified.value { "unramified".to_string() } else { format!("ramified ({})", c.stabilizers_outside.join(", ")) }
            ));
        }
    }
    if let Some(p) = &r.pi1 {
        out.push("pi1".into());
        match p.status {
            Pi1Status::Certified => out.push(format!(
                "  order {} ({})",
                p.order.unwrap_or(0),
                p.isomorphism_type.as_deref().unwrap_or("non-abelian or unidentified")
            )),
            Pi1Status::Infinite => out.push(format!("  infinite: {}", p.reason.as_deref().unwrap_or(""))),
            Pi1Status::Undetermined => out.push(format!("  UNDETERMINED: {}", p.reason.as_deref().unwrap_or(""))),
        }
        if let Some(a) = &p.abelianization {
            out.push(format!("  abelianization: {}", a.text));
        }
        let d = &p.diagnostics;
        out.push(format!(
            "  index {}, {} Schreier generators, {} relators, {} Fix generators, simplified to {} generators",
            d.index, d.schreier_generators, d.schreier_relators, d.fix_generators, d.simplified_generators
        ));
        if let Some(u) = &p.universal_cover {
            out.push(format!("  universal cover: {} singular points", u.singular_points));
        }
    }
    if let Some(f) = &r.fermat {
        out.push("fermat".into());
        out.push(format!("  {} marked points in {} orbits", f.marked_points.len(), f.orbits.len()));
        for o in &f.orbits {
            out.push(format!("    stabilizer {{{}}}: {}", o.stabilizer.join(", "), o.points.join(" ")));
        }
        out.push(format!("  branch points: {}", f.branch_points.join(", ")));
        if let Some(s) = &f.subgroup {
            out.push(format!("  subgroup {{{}}}: orbit sizes {:?}", s.elements.join(", "), s.orbit_sizes));
        }
    }
    if !r.checks.is_empty() {
        out.push("checks".into());
        for c in &r.checks {
            let status = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Undetermined => "UNDETERMINED",
            };
            let mut line = format!("  {status:<12} {}", c.name);
            if let (Some(e), Some(f)) = (&c.expected, &c.found) {
                line.push_str(&format!(": expected {e}, found {f}"));
            } else if let Some(e) = &c.expected {
                line.push_str(&format!(": expected {e}"));
            }
            if let Some(d) = &c.detail {
                line.push_str(&format!(" ({d})"));
            }
            out.push(line);
        }
    }
    out.push(format!(
        "limits: max-cosets={}, max-relators={}, max-deductions={}",
        r.limits.max_cosets, r.limits.max_relators, r.limits.max_deductions
    ));
    if let Some(t) = &r.timing {
        let parts: Vec<String> = t.iter().map(|s| format!("{} {} ms", s.name, s.wall_clock_ms)).collect();
        out.push(format!("timing: {}", parts.join(", ")));
    }
    out.push(format!("verdict: {:?}", r.verdict).to_uppercase());
    out.join("\n") + "\n"
}
