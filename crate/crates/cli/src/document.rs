//! Spec documents: the JSON input format and its validation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use pqw_core::finite_group::{make_abelian_group, subgroup_generated, FiniteGroup, GroupRef, Subgroup};
use pqw_core::orbifold::{make_orbifold_group, riemann_hurwitz_genus, validate_generating_vector, BranchData, GeneratingVector};
use pqw_core::product_quotient::{subgroup_h, ProductQuotientSpec};

use crate::limits::LimitOverrides;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub group: GroupDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub factors: Vec<FactorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitOverrides>,
}

/// Either `{"abelian": [4, 4]}` or `{"labels": [...], "table": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDocument {
    /// `[g'; m1,...,mr]`
    pub branch: String,
    /// Labels of the images of `a1 b1 ... c1 ... cr`.
    pub vector: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupDocument {
    pub generators: Vec<String>,
}

/// A validated document.
pub struct Loaded {
    pub document: SpecDocument,
    pub spec: ProductQuotientSpec,
    pub subgroup: Option<Subgroup>,
}

fn invalid(field: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Validation { field: field.into(), message: message.to_string() }
}

pub fn parse(text: &str) -> Result<SpecDocument, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse { line: inner.line(), column: inner.column(), path, message: inner.to_string() }
    })
}

fn build_group(g: &GroupDocument) -> Result<GroupRef, CliError> {
    match (&g.abelian, &g.table, &g.labels) {
        (Some(f), None, None) => {
            make_abelian_group(f).map(Arc::new).map_err(|e| invalid("group.abelian", e))
        }
        (None, Some(t), Some(l)) => {
            FiniteGroup::from_table(t.clone(), l.clone()).map(Arc::new).map_err(|e| invalid("group.table", e))
        }
        (None, Some(_), None) => Err(invalid("group.labels", "a Cayley table needs element labels")),
        _ => Err(invalid("group", "give either `abelian` or `table` with `labels`")),
    }
}

/// Subgroup from generator labels; the single label `H` names `⟨(2,0),(0,2)⟩`.
pub fn build_subgroup(group: &GroupRef, generators: &[String], field: &str) -> Result<Subgroup, CliError> {
    if let [h] = generators {
        if h.trim() == "H" {
            return subgroup_h(group).map_err(|e| invalid(field, e));
        }
    }
    let mut gens = Vec::new();
    for (j, l) in generators.iter().enumerate() {
        gens.push(group.element_by_label(l).map_err(|e| invalid(format!("{field}[{j}]"), e))?);
    }
    subgroup_generated(group, &gens).map_err(|e| invalid(field, e))
}

pub fn validate(document: SpecDocument) -> Result<Loaded, CliError> {
    let group = build_group(&document.group)?;
    if document.factors.is_empty() {
        return Err(invalid("factors", "at least one factor is needed"));
    }
    if let Some(n) = document.n {
        if n != document.factors.len() {
            return Err(invalid("n", format!("n = {n} but {} factors are given", document.factors.len())));
        }
    }
    let mut parts = Vec::new();
    for (k, f) in document.factors.iter().enumerate() {
        let branch: BranchData = f.branch.parse().map_err(|e| invalid(format!("factors[{k}].branch"), e))?;
        // Indices are matched positionally with the vector, so no silent reordering.
        if !is_sorted_as_written(&f.branch) {
            return Err(invalid(format!("factors[{k}].branch"), "branch indices must be listed in nondecreasing order"));
        }
        let mut images = Vec::new();
        for (j, l) in f.vector.iter().enumerate() {
            images.push(group.element_by_label(l).map_err(|e| invalid(format!("factors[{k}].vector[{j}]"), e))?);
        }
        let vector = GeneratingVector::new(group.clone(), images);
        validate_generating_vector(&make_orbifold_group(&branch), &vector)
            .map_err(|e| invalid(format!("factors[{k}].vector"), e))?;
        let genus = riemann_hurwitz_genus(group.order() as u64, &branch).map_err(|e| invalid(format!("factors[{k}]"), e))?;
        if genus < 2 {
            return Err(invalid(format!("factors[{k}]"), format!("curve genus {genus} < 2")));
        }
        parts.push((branch, vector));
    }
    let label = document.label.clone().unwrap_or_else(|| "X".to_string());
    let spec = ProductQuotientSpec::new(group.clone(), parts, label).map_err(|e| invalid("factors", e))?;
    let subgroup = match &document.subgroup {
        Some(s) => Some(build_subgroup(&group, &s.generators, "subgroup.generators")?),
        None => None,
    };
    Ok(Loaded { document, spec, subgroup })
}

fn is_sorted_as_written(branch: &str) -> bool {
    let Some((_, ms)) = branch.split_once(';') else { return true };
    let ms: Vec<u32> = ms
        .trim_end_matches(|c: char| c == ']' || c.is_whitespace())
        .split(',')
        .filter_map(|t| t.trim().parse().ok())
        .collect();
    ms.windows(2).all(|w| w[0] <= w[1])
}

pub fn load(text: &str) -> Result<Loaded, CliError> {
    validate(parse(text)?)
}

/// Abelian groups with their standard labels by invariant factors, any
/// other group by its table.
fn group_document(g: &FiniteGroup) -> GroupDocument {
    if let Some(m) = g.residue_moduli() {
        if let Ok(std) = make_abelian_group(m) {
            if g.elements().all(|x| std.label(x) == g.label(x)) {
                return GroupDocument { abelian: Some(m.to_vec()), labels: None, table: None };
            }
        }
    }
    GroupDocument {
        abelian: None,
        labels: Some(g.elements().map(|x| g.label(x).to_string()).collect()),
        table: Some(g.elements().map(|x| g.elements().map(|y| g.mul(x, y).0).collect()).collect()),
    }
}

/// The document describing a built spec.
pub fn document_of(spec: &ProductQuotientSpec, subgroup: Option<Vec<String>>) -> SpecDocument {
    SpecDocument {
        label: Some(spec.label.clone()),
        group: group_document(&spec.group),
        n: Some(spec.n()),
        factors: spec
            .factors
            .iter()
            .map(|f| FactorDocument { branch: f.branch.to_string(), vector: f.vector().labels() })
            .collect(),
        subgroup: subgroup.map(|generators| SubgroupDocument { generators }),
        limits: None,
    }
}
