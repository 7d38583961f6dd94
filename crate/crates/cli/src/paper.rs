//! The two reference families and their expected invariants.

use clap::ValueEnum;

use pqw_core::fermat::verify_against_abstract;
use pqw_core::finite_group::subgroup_generated;
use pqw_core::pi1::{armstrong_pi1, Pi1Options, VERIFIED_RANGE_END};
use pqw_core::product_quotient::{etale_intermediate_cover, singular_census, subgroup_h, x_family, y_family};

use crate::document::document_of;
use crate::report::{self, CheckEntry, Clock, Report};
use crate::CliError;

pub const BEYOND_RANGE: &str = "beyond paper-verified range";

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    #[value(name = "X", alias = "x")]
    X,
    #[value(name = "Y", alias = "y")]
    Y,
}

/// `Z2^k` in the form abelian invariants print.
fn z2_power(k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => "Z2".into(),
        _ => format!("Z2^{k}"),
    }
}

pub struct Expected {
    pub h1: u64,
    pub singular_points: u64,
    pub stabilized_points: Option<u64>,
    pub pi1: String,
    pub cover_singularities: Option<u64>,
}

pub fn expected(family: Family, n: usize) -> Expected {
    let x_sing = if n >= 2 { 3 << (2 * n - 3) } else { 0 };
    let cover = (n >= 2).then(|| 3u64 << (3 * n - 2));
    match family {
        Family::X => Expected {
            h1: 0,
            singular_points: x_sing,
            stabilized_points: Some(3 * 4u64.pow(n as u32)),
            pi1: z2_power(if n >= 2 { n + 1 } else { 0 }),
            cover_singularities: cover,
        },
        Family::Y => Expected {
            h1: 3 * n as u64,
            singular_points: 4 * x_sing,
            stabilized_points: None,
            pi1: z2_power(n - 1),
            cover_singularities: cover,
        },
    }
}

pub fn run(family: Family, n: usize, options: Pi1Options, clock: &mut Clock) -> Result<Report, CliError> {
    if n == 0 {
        return Err(CliError::Validation { field: "--n".into(), message: "n must be at least 1".into() });
    }
    let spec = match family {
        Family::X => x_family(n)?,
        Family::Y => y_family(n)?,
    };
    let subgroup = match family {
        Family::X => Some(subgroup_h(&spec.group)?),
        Family::Y => None,
    };
    let doc = document_of(&spec, subgroup.as_ref().map(|_| vec!["(2,0)".into(), "(0,2)".into()]));
    let inv = clock.time("invariants", || report::invariants(&spec, subgroup.as_ref()))?;
    let pi1 = clock.time("pi1", || armstrong_pi1(&spec, &options))?;
    let block = report::pi1_block(&pi1, &inv.census);
    let want = expected(family, n);

    let mut checks = vec![
        CheckEntry::compare("h1(Theta)", want.h1, inv.block.h1_theta.value.map(|v| v.to_string())),
        CheckEntry::compare("b1", 0, Some(inv.block.b1.value.to_string())),
        CheckEntry::compare("singular points", want.singular_points, Some(inv.census.singular_points.to_string())),
    ];
    if let Some(s) = want.stabilized_points {
        checks.push(CheckEntry::compare("stabilized points of the product", s, Some(inv.census.stabilized_tuples.to_string())));
    }
    if n >= 2 {
        let kind = format!("1/2({})", vec!["1"; n].join(","));
        let kinds: Vec<String> = inv.block.census.types.iter().map(|t| t.kind.clone()).collect();
        checks.push(CheckEntry::compare("singularity types", &kind, Some(kinds.join(" "))));
    }
    let found_pi1 = match (&block.isomorphism_type, block.order) {
        (Some(t), _) => Some(t.clone()),
        (None, Some(o)) => Some(format!("non-abelian of order {o}")),
        (None, None) => None,
    };
    checks.push(CheckEntry::compare("pi1", &want.pi1, found_pi1));
    if family == Family::Y && n >= 2 {
        checks.push(CheckEntry::compare(
            "pi1 generators are involutions",
            true,
            block.generators_are_involutions.map(|b| b.to_string()),
        ));
    }
    if let Some(c) = want.cover_singularities {
        checks.push(CheckEntry::compare(
            "universal cover singular points",
            c,
            block.universal_cover.as_ref().map(|u| u.singular_points.to_string()),
        ));
    }
    if family == Family::X && n >= 2 {
        let cover = inv.block.etale_cover.as_ref().expect("X reports carry the cover by H");
        checks.push(CheckEntry::compare(
            "cover by H",
            "unramified of degree 4",
            Some(format!("{} of degree {}", if cover.unramified.value { "unramified" } else { "ramified" }, cover.degree)),
        ));
        let diagonal = subgroup_generated(&spec.group, &[spec.group.element_by_label("(2,2)")?])?;
        let c = etale_intermediate_cover(&spec, &diagonal)?;
        checks.push(CheckEntry::compare(
            "cover by <(2,2)>",
            "ramified",
            Some(if c.unramified { "unramified" } else { "ramified" }.to_string()),
        ));
        if let Some(h) = &subgroup {
            let y = etale_intermediate_cover(&spec, h)?.restricted;
            let found = match y {
                Some(y) => Some(singular_census(&y)?.singular_points.to_string()),
                None => None,
            };
            checks.push(CheckEntry::compare("singular points of the cover by H", 4 * want.singular_points, found));
        }
    }
    if family == Family::X {
        let a = clock.time("fermat", || verify_against_abstract(&spec))?;
        checks.push(CheckEntry::boolean("marked points match the Fermat quartic", a.passed, a.detail));
    }

    let mut flags = Vec::new();
    if n >= VERIFIED_RANGE_END {
        flags.push(BEYOND_RANGE.to_string());
    }
    if n == 1 {
        flags.push("single factor: the quotient is a curve".to_string());
    }
    Ok(Report {
        schema: report::SCHEMA_ID,
        command: "paper".into(),
        spec: Some(doc),
        verdict: report::verdict(&checks),
        flags,
        invariants: Some(inv.block),
        pi1: Some(block),
        fermat: None,
        checks,
        limits: options.limits.into(),
        timing: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let x3 = expected(Family::X, 3);
        assert_eq!((x3.h1, x3.singular_points, x3.pi1.as_str(), x3.cover_singularities), (0, 24, "Z2^4", Some(384)));
        let y2 = expected(Family::Y, 2);
        assert_eq!((y2.h1, y2.pi1.as_str()), (6, "Z2"));
        assert_eq!(expected(Family::X, 5).singular_points, 384);
        assert_eq!(expected(Family::X, 4).cover_singularities, Some(3072));
        assert_eq!(expected(Family::X, 1).pi1, "1");
        assert_eq!(expected(Family::Y, 1).pi1, "1");
    }
}
