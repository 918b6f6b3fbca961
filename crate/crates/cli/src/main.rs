//! `ncwire`: build behaviors on cycle scenarios, test them, and decide
//! convertibility under noncontextual wirings.
//!
//! Exit codes: 0 on success, 1 when a boolean query resolves negatively
//! (a disturbing or contextual behavior under `check`, an infeasible
//! `convert`), 2 on input or usage errors. All artifacts are deterministic:
//! identical invocations produce byte-identical output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncwire::rat::{fmt_rat, parse_rat, Rat};
use ncwire::{
    can_convert, classify, demo_antichain, demo_chain, demo_locally_infinite, demo_not_total,
    demo_not_weak, embed_cycle_behavior, enumerate_deterministic, enumerate_facets,
    enumerate_symmetries, m_npr, m_omega, make_b_alpha_gamma, make_cycle_scenario, make_f_alpha,
    make_maximally_mixed, make_npr, make_pr, max_omega, Behavior, DeterministicWiring,
    OmegaFunctional, Scenario,
};

#[derive(Parser)]
#[command(
    name = "ncwire",
    version,
    about = "Contextuality as a resource: cycle-scenario behaviors, facet inequalities, \
             noncontextual wirings, convertibility, and monotones"
)]
struct Cli {
    /// Write the artifact to this path instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scenario constructions.
    Scenario {
        #[command(subcommand)]
        which: ScenarioCmd,
    },
    /// Construct named behaviors.
    Behavior {
        #[command(subcommand)]
        which: BehaviorCmd,
    },
    /// Check a behavior file; the negative verdict exits 1.
    Check {
        #[arg(value_enum)]
        what: CheckKind,
        file: PathBuf,
    },
    /// Facet functional values of a cycle behavior.
    Omega {
        file: PathBuf,
        /// Report every facet instead of the maximizer.
        #[arg(long)]
        all: bool,
    },
    /// Classical, quantum, and algebraic facet bounds as CSV.
    Bounds {
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Closed-form monotone values.
    Monotone {
        #[arg(value_enum)]
        which: MonotoneKind,
        file: PathBuf,
    },
    /// Decide convertibility A -> B; infeasibility exits 1.
    Convert {
        a: PathBuf,
        b: PathBuf,
    },
    /// Classify a pair under mutual convertibility.
    Classify {
        a: PathBuf,
        b: PathBuf,
    },
    /// Enumerate deterministic wirings or wiring symmetries.
    Wirings {
        #[arg(value_enum)]
        which: WiringsKind,
        #[arg(long)]
        n: usize,
        /// Emit only the count.
        #[arg(long)]
        count_only: bool,
    },
    /// Pre-order property demonstrations.
    Preorder {
        #[command(subcommand)]
        which: PreorderCmd,
    },
    /// Embed a cycle behavior into a larger dichotomic scenario.
    Embed {
        behavior: PathBuf,
        scenario: PathBuf,
        /// Induced-cycle vertices in order, e.g. 0,1,2,3.
        #[arg(long, value_delimiter = ',', required = true)]
        cycle: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// The n-cycle scenario: dichotomic X0..X{n-1}, contexts {Xi, Xi+1}.
    Cycle {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum BehaviorCmd {
    /// pr | mixed | npr | f | b, on the facet selected by --k.
    Make {
        #[arg(value_enum)]
        which: BehaviorKind,
        #[arg(long)]
        n: usize,
        /// Facet index (defaults to the facet with signs -1, +1, ..., +1).
        #[arg(long)]
        k: Option<usize>,
        /// Chain parameter in [0, 1], for `f` and `b`.
        #[arg(long)]
        alpha: Option<String>,
        /// Deterministic-part weight in [0, 1], for `b`.
        #[arg(long)]
        gamma: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BehaviorKind {
    /// Algebraically maximal box of the facet.
    Pr,
    /// Maximally mixed box.
    Mixed,
    /// Noncontextual boundary point of the facet.
    Npr,
    /// F(alpha) = alpha PR + (1 - alpha) NPR.
    F,
    /// B(alpha, gamma) = gamma B*_bb + (1 - gamma) F(alpha).
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    /// Non-disturbance.
    Nd,
    /// Noncontextuality (existence of a global section).
    Nc,
}

#[derive(Clone, Copy, ValueEnum)]
enum MonotoneKind {
    Momega,
    Mnpr,
}

#[derive(Clone, Copy, ValueEnum)]
enum WiringsKind {
    /// Deterministic wirings, deduplicated by behavioral equality.
    Enumerate,
    /// The invertible wirings (dihedral relabelings with outcome flips).
    Symmetries,
}

#[derive(Subcommand)]
enum PreorderCmd {
    /// Emit a machine-checkable demonstration of a pre-order property.
    Demo {
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long)]
        n: usize,
        /// Comma-separated rational grid, for chain and antichain.
        #[arg(long)]
        grid: Option<String>,
        /// Sample seed, for locally-infinite.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    NotTotal,
    NotWeak,
    Chain,
    Antichain,
    LocallyInfinite,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli.command) {
        Ok((artifact, code)) => {
            if let Err(e) = emit(output.as_deref(), &artifact) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: Option<&Path>, artifact: &str) -> Result<()> {
    let artifact = artifact.trim_end_matches('\n');
    match output {
        Some(path) => {
            let mut f = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            writeln!(f, "{artifact}")?;
        }
        None => println!("{artifact}"),
    }
    Ok(())
}

fn load_behavior(path: &Path) -> Result<Behavior> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Behavior::from_json_with_base(&s, path.parent())
        .with_context(|| format!("parsing behavior {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scenario::from_json(&s).with_context(|| format!("parsing scenario {}", path.display()))
}

fn parse_rat_arg(name: &str, value: &str) -> Result<Rat> {
    parse_rat(value).with_context(|| format!("parsing --{name} {value}"))
}

fn parse_grid(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(|t| parse_rat(t.trim()).with_context(|| format!("parsing grid entry {t}")))
        .collect()
}

/// Resolve `--k` against the facet enumeration; the default is the facet
/// with signs `(-1, +1, ..., +1)`.
fn facet_for(n: usize, k: Option<usize>) -> Result<OmegaFunctional> {
    match k {
        Some(k) => {
            let facets = enumerate_facets(n)?;
            facets
                .get(k)
                .cloned()
                .ok_or_else(|| anyhow!("facet index {k} out of range (0..{})", facets.len()))
        }
        None => {
            let mut signs = vec![1i8; n];
            signs[0] = -1;
            Ok(OmegaFunctional::new(signs)?)
        }
    }
}

fn run(command: Command) -> Result<(String, u8)> {
    match command {
        Command::Scenario { which } => {
            let ScenarioCmd::Cycle { n } = which;
            Ok((make_cycle_scenario(n)?.to_json(), 0))
        }
        Command::Behavior { which } => behavior_make(which),
        Command::Check { what, file } => check(what, &file),
        Command::Omega { file, all } => omega(&file, all),
        Command::Bounds { n_min, n_max } => {
            if n_min > n_max {
                bail!("--n-min {n_min} exceeds --n-max {n_max}");
            }
            Ok((ncwire::bounds_csv(n_min, n_max)?, 0))
        }
        Command::Monotone { which, file } => {
            let b = load_behavior(&file)?;
            let report = match which {
                MonotoneKind::Momega => m_omega(&b)?.report_json("M_Omega"),
                MonotoneKind::Mnpr => m_npr(&b)?.report_json("M_NPR"),
            };
            Ok((report, 0))
        }
        Command::Convert { a, b } => {
            let lhs = load_behavior(&a)?;
            let rhs = load_behavior(&b)?;
            let cert = can_convert(&lhs, &rhs)?;
            let code = if cert.is_convertible() { 0 } else { 1 };
            Ok((cert.to_json(), code))
        }
        Command::Classify { a, b } => {
            let lhs = load_behavior(&a)?;
            let rhs = load_behavior(&b)?;
            Ok((classify(&lhs, &rhs)?.to_json(), 0))
        }
        Command::Wirings {
            which,
            n,
            count_only,
        } => wirings(which, n, count_only),
        Command::Preorder { which } => preorder_demo(which),
        Command::Embed {
            behavior,
            scenario,
            cycle,
        } => {
            let b = load_behavior(&behavior)?;
            let target = load_scenario(&scenario)?;
            let embedded = embed_cycle_behavior(&b, &target, &cycle)?;
            Ok((embedded.to_json(), 0))
        }
    }
}

fn behavior_make(cmd: BehaviorCmd) -> Result<(String, u8)> {
    let BehaviorCmd::Make {
        which,
        n,
        k,
        alpha,
        gamma,
    } = cmd;
    let need = |flag: Option<String>, name: &str| -> Result<Rat> {
        let value = flag.ok_or_else(|| anyhow!("--{name} is required for this behavior"))?;
        parse_rat_arg(name, &value)
    };
    let none = |flag: &Option<String>, name: &str| -> Result<()> {
        if flag.is_some() {
            bail!("--{name} does not apply to this behavior");
        }
        Ok(())
    };
    let b = match which {
        BehaviorKind::Pr => {
            none(&alpha, "alpha")?;
            none(&gamma, "gamma")?;
            make_pr(&facet_for(n, k)?)?
        }
        BehaviorKind::Mixed => {
            none(&alpha, "alpha")?;
            none(&gamma, "gamma")?;
            if k.is_some() {
                bail!("--k does not apply to the maximally mixed behavior");
            }
            make_maximally_mixed(n)?
        }
        BehaviorKind::Npr => {
            none(&alpha, "alpha")?;
            none(&gamma, "gamma")?;
            make_npr(&facet_for(n, k)?)?
        }
        BehaviorKind::F => {
            none(&gamma, "gamma")?;
            make_f_alpha(&facet_for(n, k)?, &need(alpha, "alpha")?)?
        }
        BehaviorKind::B => make_b_alpha_gamma(
            &facet_for(n, k)?,
            &need(alpha, "alpha")?,
            &need(gamma, "gamma")?,
        )?,
    };
    Ok((b.to_json(), 0))
}

fn check(what: CheckKind, file: &Path) -> Result<(String, u8)> {
    let b = load_behavior(file)?;
    match what {
        CheckKind::Nd => match b.nd_violation()? {
            None => Ok((
                serde_json::to_string_pretty(&json!({
                    "check": "nd",
                    "verdict": "non-disturbing",
                }))?,
                0,
            )),
            Some(v) => Ok((
                serde_json::to_string_pretty(&json!({
                    "check": "nd",
                    "verdict": "disturbing",
                    "detail": {
                        "context_a": v.context_a,
                        "context_b": v.context_b,
                        "overlap": v.overlap,
                    },
                }))?,
                1,
            )),
        },
        CheckKind::Nc => match b.global_section()? {
            Some(section) => Ok((
                serde_json::to_string_pretty(&json!({
                    "check": "nc",
                    "verdict": "noncontextual",
                    "support": section.weights.len(),
                }))?,
                0,
            )),
            None => {
                let mut doc = json!({
                    "check": "nc",
                    "verdict": "contextual",
                });
                if b.scenario().cycle_n().is_some() {
                    let (f, v) = max_omega(&b)?;
                    doc["facet_k"] = json!(f.index());
                    doc["omega"] = json!(fmt_rat(&v));
                    doc["classical_bound"] = json!(fmt_rat(&f.classical_bound()));
                }
                Ok((serde_json::to_string_pretty(&doc)?, 1))
            }
        },
    }
}

fn omega(file: &Path, all: bool) -> Result<(String, u8)> {
    let b = load_behavior(file)?;
    let n = b
        .scenario()
        .cycle_n()
        .ok_or_else(|| anyhow!("facet values are defined on cycle scenarios"))?;
    let facets = enumerate_facets(n)?;
    let doc = if all {
        let rows: Vec<Value> = facets
            .iter()
            .enumerate()
            .map(|(k, f)| {
                Ok(json!({
                    "facet_k": k,
                    "signs": f.signs(),
                    "omega": fmt_rat(&f.value(&b)?),
                }))
            })
            .collect::<Result<_>>()?;
        json!({
            "n": n,
            "classical_bound": fmt_rat(&facets[0].classical_bound()),
            "facets": rows,
        })
    } else {
        let (f, v) = max_omega(&b)?;
        json!({
            "n": n,
            "facet_k": f.index(),
            "signs": f.signs(),
            "omega": fmt_rat(&v),
            "classical_bound": fmt_rat(&f.classical_bound()),
        })
    };
    Ok((serde_json::to_string_pretty(&doc)?, 0))
}

fn wirings(which: WiringsKind, n: usize, count_only: bool) -> Result<(String, u8)> {
    let list: Vec<DeterministicWiring> = match which {
        WiringsKind::Enumerate => enumerate_deterministic(n)?,
        WiringsKind::Symmetries => enumerate_symmetries(n)?,
    };
    let doc = if count_only {
        json!({"n": n, "count": list.len()})
    } else {
        let rows: Vec<Value> = list
            .iter()
            .map(|w| serde_json::from_str(&w.to_json()).expect("wiring serializes"))
            .collect();
        json!({"n": n, "count": list.len(), "wirings": rows})
    };
    Ok((serde_json::to_string_pretty(&doc)?, 0))
}

fn preorder_demo(cmd: PreorderCmd) -> Result<(String, u8)> {
    let PreorderCmd::Demo {
        property,
        n,
        grid,
        seed,
    } = cmd;
    let parsed_grid = grid.as_deref().map(parse_grid).transpose()?;
    let grid_slice = parsed_grid.as_deref();
    if grid_slice.is_some()
        && !matches!(property, Property::Chain | Property::Antichain)
    {
        bail!("--grid applies only to the chain and antichain properties");
    }
    if seed.is_some() && !matches!(property, Property::LocallyInfinite) {
        bail!("--seed applies only to the locally-infinite property");
    }
    let demo = match property {
        Property::NotTotal => demo_not_total(n)?,
        Property::NotWeak => demo_not_weak(n)?,
        Property::Chain => demo_chain(n, grid_slice)?,
        Property::Antichain => demo_antichain(n, grid_slice)?,
        Property::LocallyInfinite => demo_locally_infinite(n, seed.unwrap_or(0))?,
    };
    Ok((demo.to_json(), 0))
}
