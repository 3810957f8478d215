//! `cosetope`: build finite quotients, run separability checks and emit
//! replayable JSON reports.
//!
//! Exit status: 0 when the command completed (inconclusive searches
//! included), 2 on invalid input or a failed precondition, 3 when a budget
//! was exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cosetope::gs::{h_generators, hk_target, hpk_target, k_generators};
use cosetope::modular::{PermRep, DEFAULT_SEARCHES};
use cosetope::profinite::{
    default_tower, load_tower, FilterSpec, GroupWord, QuotientSpec, SubgroupSpec,
};
use cosetope::report::{self, Report};
use cosetope::{Budget, Error, Result};

#[derive(Parser)]
#[command(
    name = "cosetope",
    version,
    about = "Finite-quotient workbench for double cosets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for commands that sample elements.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Budget overrides, e.g. `closure=100000,modulus=64`; applied on top of
    /// COSETOPE_BUDGET.
    #[arg(long, global = true)]
    budget: Option<String>,

    /// Record wall-clock time in the report (outside the replayed content).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Modulus of the quotient.
    #[arg(long)]
    m: u64,
    /// Permutation representation file attached to the quotient.
    #[arg(long)]
    rep: Option<PathBuf>,
    /// Formation filter: `all` or `pro-p`.
    #[arg(long, default_value = "all")]
    filter: String,
    /// Prime for the `pro-p` filter.
    #[arg(long)]
    p: Option<u64>,
}

impl SpecArgs {
    fn spec(&self) -> Result<QuotientSpec> {
        Ok(QuotientSpec {
            m: self.m,
            rep: self.rep.as_deref().map(PermRep::load).transpose()?,
            filter: FilterSpec {
                kind: self.filter.clone(),
                p: self.p,
            },
        })
    }
}

/// Subgroups `H`, `K` by generators, or the standard pair.
#[derive(Args, Clone)]
struct PairArgs {
    /// Generator of H, as `a,b,c,d:WORD` (either side optional).
    #[arg(long = "h")]
    h: Vec<String>,
    /// Generator of K.
    #[arg(long = "k")]
    k: Vec<String>,
    /// Use H = SL2(Z) and K = iHi⁻¹ with i = (I, 1).
    #[arg(long)]
    standard: bool,
}

impl PairArgs {
    fn pair(&self) -> Result<(Vec<GroupWord>, Vec<GroupWord>)> {
        if self.standard {
            if !self.h.is_empty() || !self.k.is_empty() {
                return Err(Error::Invalid("--standard excludes --h and --k".into()));
            }
            return Ok((h_generators(), k_generators()));
        }
        Ok((words(&self.h)?, words(&self.k)?))
    }
}

fn words(texts: &[String]) -> Result<Vec<GroupWord>> {
    texts.iter().map(|t| t.parse()).collect()
}

#[derive(Subcommand)]
enum Command {
    /// Order of a finite quotient.
    Quotient {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Image of a subgroup in a quotient.
    Image {
        #[command(flatten)]
        spec: SpecArgs,
        /// Generator, as `a,b,c,d:WORD`.
        #[arg(long = "gen")]
        gens: Vec<String>,
    },
    /// Intersection of the images of H and K.
    Intersect {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Is the image of g in the image of HK (or H'K)?
    DcosetMember {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        g: String,
        /// Restrict the left factor to H ∩ (A ⋊ H') for H' given by this file.
        #[arg(long)]
        l_rep: Option<PathBuf>,
        /// `scan` or `brute`.
        #[arg(long, default_value = "scan")]
        method: String,
    },
    /// Search candidate quotients N for φ(H) ∩ φ(K) ⊆ φ(H∩K)·φ(M).
    Tractable {
        #[command(flatten)]
        pair: PairArgs,
        /// Generator of H ∩ K.
        #[arg(long = "cap")]
        cap: Vec<String>,
        /// Modulus of the coarse quotient M.
        #[arg(long)]
        m_spec: u64,
        /// Representation attached to M.
        #[arg(long)]
        m_spec_rep: Option<PathBuf>,
        /// Candidate quotients; defaults to the standard congruence tower.
        #[arg(long)]
        tower: Option<PathBuf>,
    },
    /// Look for a quotient separating g from (H ∩ L)K.
    ThmBProbe {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        g: String,
        /// L = A ⋊ H' for H' given by this file (default: L = G).
        #[arg(long)]
        l_rep: Option<PathBuf>,
        /// Generator of L, instead of --l-rep.
        #[arg(long = "l-gen")]
        l_gens: Vec<String>,
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(long, default_value = "scan")]
        method: String,
    },
    /// Subgroups of the modular group of small index.
    Lowindex {
        #[arg(long, default_value_t = 7)]
        max_degree: usize,
    },
    /// Level and congruence verdict of a subgroup.
    Congruence {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Element of a principal congruence subgroup outside a non-congruence subgroup.
    GapWitness {
        #[arg(long)]
        rep: PathBuf,
        /// Search level; defaults to a multiple of the subgroup's level that
        /// covers every modulus up to --max-level.
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, default_value_t = 24)]
        max_level: u64,
        /// Search strategy, repeatable: seeds, small-entries, principal-schreier.
        #[arg(long = "strategy")]
        strategies: Vec<String>,
    },
    /// Intersection table, HK certificates and H'K evidence for the standard pair.
    GsDemo {
        #[arg(long, default_value_t = 12)]
        max_level: u64,
        #[arg(long = "strategy")]
        strategies: Vec<String>,
    },
    /// Replay a report and compare it byte for byte.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

fn strategies(given: Vec<String>) -> Vec<String> {
    if given.is_empty() {
        DEFAULT_SEARCHES.iter().map(|s| s.to_string()).collect()
    } else {
        given
    }
}

fn tower_or_default(path: Option<&Path>) -> Result<Vec<QuotientSpec>> {
    match path {
        Some(p) => load_tower(p),
        None => Ok(default_tower()),
    }
}

/// Command name and decoded input for the report.
fn input_for(command: Command, seed: u64) -> Result<(&'static str, Value)> {
    Ok(match command {
        Command::Quotient { spec } => ("quotient", json!({ "spec": spec.spec()? })),
        Command::Image { spec, gens } => (
            "image",
            json!({ "spec": spec.spec()?, "gens": words(&gens)? }),
        ),
        Command::Intersect { spec, pair } => {
            let (u, v) = pair.pair()?;
            ("intersect", json!({ "spec": spec.spec()?, "u": u, "v": v }))
        }
        Command::DcosetMember {
            spec,
            pair,
            g,
            l_rep,
            method,
        } => {
            let target = match (&l_rep, pair.standard) {
                (None, true) => hk_target(),
                (Some(p), true) => hpk_target(&PermRep::load(p)?),
                (l, false) => {
                    let (h, k) = pair.pair()?;
                    let l = l
                        .as_deref()
                        .map(|p| PermRep::load(p).map(|rep| SubgroupSpec::AdditiveBy { rep }))
                        .transpose()?;
                    cosetope::profinite::DoubleCosetTarget {
                        name: if l.is_some() { "H'K" } else { "HK" }.into(),
                        h,
                        k,
                        l,
                    }
                }
            };
            let g: GroupWord = g.parse()?;
            (
                "dcoset-member",
                json!({ "target": target, "g": g, "spec": spec.spec()?, "method": method }),
            )
        }
        Command::Tractable {
            pair,
            cap,
            m_spec,
            m_spec_rep,
            tower,
        } => {
            let (h, k) = pair.pair()?;
            let m_spec = QuotientSpec {
                m: m_spec,
                rep: m_spec_rep.as_deref().map(PermRep::load).transpose()?,
                filter: FilterSpec::default(),
            };
            (
                "tractable",
                json!({
                    "h": h,
                    "k": k,
                    "cap": words(&cap)?,
                    "m_spec": m_spec,
                    "candidates": tower_or_default(tower.as_deref())?,
                }),
            )
        }
        Command::ThmBProbe {
            pair,
            g,
            l_rep,
            l_gens,
            tower,
            method,
        } => {
            let (h, k) = pair.pair()?;
            let l = match (l_rep, l_gens.is_empty()) {
                (Some(_), false) => {
                    return Err(Error::Invalid("--l-rep excludes --l-gen".into()));
                }
                (Some(p), true) => SubgroupSpec::AdditiveBy {
                    rep: PermRep::load(&p)?,
                },
                (None, false) => SubgroupSpec::Generated {
                    gens: words(&l_gens)?,
                },
                (None, true) => SubgroupSpec::AdditiveBy {
                    rep: PermRep::trivial(),
                },
            };
            let g: GroupWord = g.parse()?;
            (
                "thm-b-probe",
                json!({
                    "h": h,
                    "k": k,
                    "l": l,
                    "g": g,
                    "tower": tower_or_default(tower.as_deref())?,
                    "method": method,
                }),
            )
        }
        Command::Lowindex { max_degree } => ("lowindex", json!({ "max_degree": max_degree })),
        Command::Congruence { rep } => ("congruence", json!({ "rep": PermRep::load(&rep)? })),
        Command::GapWitness {
            rep,
            level,
            max_level,
            strategies: s,
        } => (
            "gap-witness",
            json!({
                "rep": PermRep::load(&rep)?,
                "level": level,
                "m_max": max_level,
                "strategies": strategies(s),
            }),
        ),
        Command::GsDemo {
            max_level,
            strategies: s,
        } => (
            "gs-demo",
            json!({ "max_level": max_level, "seed": seed, "strategies": strategies(s) }),
        ),
        Command::Verify { .. } => unreachable!("handled before dispatch"),
    })
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    let mut budget = Budget::from_env()?;
    if let Some(extra) = &cli.budget {
        budget = budget.with_overrides(extra)?;
    }
    let output = cli.output.clone();
    if let Command::Verify { report: path } = &cli.command {
        let text = std::fs::read_to_string(path)?;
        let outcome = report::verify_text(&text, &budget)?;
        let mut rendered = serde_json::to_string_pretty(&outcome)?;
        rendered.push('\n');
        emit(&rendered, output.as_deref())?;
        return Ok(if outcome.identical {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(2)
        });
    }
    let start = Instant::now();
    let (name, input) = input_for(cli.command, cli.seed)?;
    let mut rep: Report = report::run(name, &input, &budget)?;
    if cli.timing {
        rep.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    emit(&rep.render(), output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_budget() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
