//! `pqw`: invariants and fundamental groups of product-quotient varieties.

mod document;
mod limits;
mod paper;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pqw_core::fermat::{subgroup_orbits, verify_against_abstract, verify_paper_table};
use pqw_core::pi1::{armstrong_pi1, FixMode, Pi1Limits, Pi1Options};
use pqw_core::product_quotient::{x_family, z4_squared};
use pqw_fpgroup::TransversalOrder;

use report::{CheckEntry, Clock, Report, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column} (at `{path}`): {message}")]
    Parse { line: usize, column: usize, path: String, message: String },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<pqw_core::Error> for CliError {
    fn from(e: pqw_core::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 2;
    pub const UNDETERMINED: u8 = 3;
    pub const INTERNAL: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "pqw", version, about = "Invariants and fundamental groups of product-quotient varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Resource limits, e.g. `max-cosets=2000000,max-relators=1000000`.
    #[arg(long, global = true)]
    limits: Option<String>,
    /// Write the JSON report to this file (`-` for standard output).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Leave wall-clock times out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a spec file: group, generating vectors and genera.
    Validate { path: PathBuf },
    /// Census, h1(Theta), b1 and Kodaira dimension flags.
    Invariants { path: PathBuf },
    /// Fundamental group of the quotient.
    Pi1 {
        path: PathBuf,
        #[command(flatten)]
        pi1: Pi1Args,
    },
    /// Build one of the two families and compare with the expected values.
    Paper {
        #[arg(long, value_enum)]
        family: paper::Family,
        #[arg(long)]
        n: usize,
        /// Also write the generated spec document here.
        #[arg(long)]
        spec_out: Option<PathBuf>,
        #[command(flatten)]
        pi1: Pi1Args,
    },
    /// Recompute the marked points of the Fermat quartic.
    FermatVerify {
        /// Orbits of a subgroup: `H`, or generator labels such as `(2,2)`.
        #[arg(long)]
        subgroup: Option<String>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Pi1Args {
    #[arg(long, value_enum, default_value_t = FixModeArg::Normalized)]
    fix_mode: FixModeArg,
    /// Shuffle the Schreier transversal with this seed.
    #[arg(long)]
    transversal_seed: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FixModeArg {
    Normalized,
    Reduced,
    Saturated,
}

impl Pi1Args {
    fn options(self, limits: Pi1Limits) -> Pi1Options {
        Pi1Options {
            limits,
            transversal: self.transversal_seed.map_or(TransversalOrder::Natural, TransversalOrder::Shuffled),
            fix_mode: match self.fix_mode {
                FixModeArg::Normalized => FixMode::Normalized,
                FixModeArg::Reduced => FixMode::Reduced,
                FixModeArg::Saturated => FixMode::Saturated,
            },
        }
    }
}

fn read(path: &Path) -> Result<document::Loaded, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    document::load(&text)
}

fn resolve_limits(cli: &Cli, doc: Option<&limits::LimitOverrides>) -> Result<Pi1Limits, CliError> {
    let env = std::env::var(limits::ENV_VAR).ok();
    limits::resolve(env.as_deref(), doc, cli.limits.as_deref())
}

/// Labels in a subgroup argument: `H`, or parenthesized tuples.
fn subgroup_labels(arg: &str) -> Vec<String> {
    if arg.trim() == "H" {
        return vec!["H".into()];
    }
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in arg.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
                if depth == 0 {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if depth > 0 => cur.push(c),
            c if c.is_whitespace() || c == ',' || c == ';' => {}
            c => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

struct Outcome {
    report: Report,
    code: u8,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut clock = Clock::new();
    let (mut report, code) = match &cli.command {
        Command::Validate { path } => {
            let l = clock.time("validate", || read(path))?;
            let limits = resolve_limits(cli, l.document.limits.as_ref())?;
            let genera: Vec<String> = l.spec.factors.iter().map(|f| f.genus.to_string()).collect();
            let checks = vec![
                CheckEntry::boolean("group", true, format!("order {}", l.spec.group.order())),
                CheckEntry::boolean("generating vectors", true, format!("{} factors", l.spec.n())),
                CheckEntry::boolean("genera at least 2", true, genera.join(", ")),
            ];
            (base("validate", Some(l.document), limits, checks), exit::OK)
        }
        Command::Invariants { path } => {
            let l = read(path)?;
            let limits = resolve_limits(cli, l.document.limits.as_ref())?;
            let inv = clock.time("invariants", || report::invariants(&l.spec, l.subgroup.as_ref()))?;
            let mut r = base("invariants", Some(l.document), limits, vec![]);
            r.invariants = Some(inv.block);
            (r, exit::OK)
        }
        Command::Pi1 { path, pi1 } => {
            let l = read(path)?;
            let limits = resolve_limits(cli, l.document.limits.as_ref())?;
            let census = clock.time("census", || pqw_core::product_quotient::singular_census(&l.spec))?;
            let result = clock.time("pi1", || armstrong_pi1(&l.spec, &pi1.options(limits)))?;
            let block = report::pi1_block(&result, &census);
            let code = if block.status == report::Pi1Status::Undetermined { exit::UNDETERMINED } else { exit::OK };
            let mut r = base("pi1", Some(l.document), limits, vec![]);
            if result.beyond_verified_range {
                r.flags.push(paper::BEYOND_RANGE.into());
            }
            r.pi1 = Some(block);
            if code == exit::UNDETERMINED {
                r.verdict = Verdict::Undetermined;
            }
            (r, code)
        }
        Command::Paper { family, n, spec_out, pi1 } => {
            let limits = resolve_limits(cli, None)?;
            let r = paper::run(*family, *n, pi1.options(limits), &mut clock)?;
            if let Some(p) = spec_out {
                let text = serde_json::to_string_pretty(r.spec.as_ref().expect("family reports carry their spec document"))
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                fs::write(p, text + "\n").map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
            }
            let code = match r.verdict {
                Verdict::Pass => exit::OK,
                Verdict::Undetermined => exit::UNDETERMINED,
                Verdict::Fail => exit::INTERNAL,
            };
            (r, code)
        }
        Command::FermatVerify { subgroup } => {
            let limits = resolve_limits(cli, None)?;
            let g = z4_squared();
            let h = match subgroup {
                Some(s) => Some(document::build_subgroup(&g, &subgroup_labels(s), "--subgroup")?),
                None => None,
            };
            let (table, abstract_check, orbits) = clock.time("fermat", || -> Result<_, CliError> {
                let table = verify_paper_table(&g)?;
                let abstract_check = verify_against_abstract(&x_family(1)?)?;
                let orbits = match &h {
                    Some(h) => Some(subgroup_orbits(&g, h)?),
                    None => None,
                };
                Ok((table, abstract_check, orbits))
            })?;
            let mut checks: Vec<CheckEntry> =
                table.checks.iter().map(|c| CheckEntry::boolean(&c.name, c.passed, c.detail.clone())).collect();
            checks.push(CheckEntry::boolean(&abstract_check.name, abstract_check.passed, abstract_check.detail.clone()));
            let sub = match (&h, orbits) {
                (Some(h), Some(sizes)) => {
                    if subgroup.as_deref().map(str::trim) == Some("H") {
                        checks.push(CheckEntry::compare("H-orbits", "[2, 2, 2, 2, 2, 2]", Some(format!("{sizes:?}"))));
                    }
                    Some(report::SubgroupOrbits {
                        elements: h.elements.iter().map(|&x| g.label(x).to_string()).collect(),
                        orbit_sizes: sizes,
                    })
                }
                _ => None,
            };
            let mut r = base("fermat-verify", None, limits, checks);
            r.fermat = Some(report::fermat_block(&table, sub));
            let code = if r.verdict == Verdict::Pass { exit::OK } else { exit::INTERNAL };
            (r, code)
        }
    };
    if !cli.no_timing {
        report.timing = Some(clock.stages());
    }
    Ok(Outcome { report, code })
}

fn base(command: &str, spec: Option<document::SpecDocument>, limits: Pi1Limits, checks: Vec<CheckEntry>) -> Report {
    Report {
        schema: report::SCHEMA_ID,
        command: command.into(),
        spec: spec.map(|mut s| {
            s.limits = None;
            s
        }),
        verdict: report::verdict(&checks),
        flags: vec![],
        invariants: None,
        pi1: None,
        fermat: None,
        checks,
        limits: limits.into(),
        timing: None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome { report, code }) => {
            let json_to_stdout = cli.json.as_deref() == Some(Path::new("-"));
            if !json_to_stdout {
                print!("{}", report::render_text(&report));
            }
            if let Some(p) = &cli.json {
                let text = match serde_json::to_string_pretty(&report) {
                    Ok(t) => t + "\n",
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(exit::INTERNAL);
                    }
                };
                if json_to_stdout {
                    print!("{text}");
                } else if let Err(e) = fs::write(p, text) {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return ExitCode::from(exit::INTERNAL);
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Internal(_) => exit::INTERNAL,
                _ => exit::VALIDATION,
            })
        }
    }
}
