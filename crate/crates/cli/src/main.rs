//! `wonderful`: command-line access to the blowup engine, stable trees, GIT
//! frames and toric fans. Exit status 0 on success, 1 when the input is
//! rejected by a domain check (the report is still printed), 2 on malformed
//! input, 64 on usage errors.

mod render;

use clap::{Args, Parser, Subcommand};
use render::{render, Format};
use serde::Serialize;
use serde_json::{json, Value};
use std::process::ExitCode;
use wonderful_core::arrangements::{self, AmbientDescriptor, AmbientKind, OrderSpec};
use wonderful_core::git::{self, GitError, PointConfiguration, QuotientPoint};
use wonderful_core::rational::{self, Rational};
use wonderful_core::toric::{self, Fan, FanKind};
use wonderful_core::trees::{self, StableTree, TreeError};
use wonderful_core::weights::{self, DomainKind, WeightVector};
use wonderful_core::{engine, oracle, IndexSet};

#[derive(Parser, Debug)]
#[command(name = "wonderful", version, about = "Wonderful compactifications of point configurations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Value of `e` in weight literals such as `1/3+e`.
    #[arg(long, global = true, default_value = "1/1000")]
    epsilon: String,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weight vectors and their domains.
    #[command(subcommand)]
    Weights(WeightsCmd),
    /// Heavy index sets and their orders.
    #[command(subcommand, name = "building-set")]
    BuildingSet(BuildingSetCmd),
    /// Poincaré polynomial of the iterated blowup.
    Betti {
        #[command(flatten)]
        inst: Instance,
        /// Blow up in the order relative to this index set.
        #[arg(long)]
        relative: Option<IndexSet>,
    },
    /// Poincaré polynomial of a boundary divisor.
    Divisor {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        set: IndexSet,
    },
    /// Euler characteristic for all-ones T-space weights.
    Euler {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        n: usize,
        /// Use the stratification count instead of the engine.
        #[arg(long)]
        oracle: bool,
    },
    /// Normal bundle twist of a boundary divisor.
    Twist {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        set: IndexSet,
    },
    /// Weighted stable trees.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Point configurations and the GIT quotient.
    #[command(subcommand)]
    Git(GitCmd),
    /// Losev-Manin fans.
    #[command(subcommand)]
    Toric(ToricCmd),
    /// Dimension comparison for the pair-of-points locus.
    ShaDims {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
    },
}

#[derive(Subcommand, Debug)]
enum WeightsCmd {
    /// Test membership in the FM, T or P domain.
    Check(Instance),
    /// The GIT weights for `(P^d)^n`.
    Git {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BuildingSetCmd {
    List(Instance),
    Order {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        relative: IndexSet,
    },
}

#[derive(Subcommand, Debug)]
enum TreeCmd {
    Validate(TreeInput),
    Canon(TreeInput),
    Reduce {
        #[command(flatten)]
        input: TreeInput,
        /// Smaller weights, comma separated.
        #[arg(long)]
        to: String,
    },
    Forget {
        #[command(flatten)]
        input: TreeInput,
        /// Labels to keep.
        #[arg(long)]
        keep: IndexSet,
    },
    Profile {
        #[command(flatten)]
        input: TreeInput,
        #[arg(short)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum GitCmd {
    /// Stability of a configuration, with the direct frame conditions.
    Check {
        #[command(flatten)]
        input: FileInput,
        /// Linearization weights; defaults to the GIT weights.
        #[arg(long)]
        weights: Option<String>,
    },
    /// Quotient coordinates of a stable configuration.
    Normalize(FileInput),
    /// Index sets forced to coincide at a quotient point.
    Classify {
        #[command(flatten)]
        input: FileInput,
        #[arg(long)]
        weights: String,
    },
}

#[derive(Subcommand, Debug)]
enum ToricCmd {
    Rays(FanSpec),
    Fan(FanSpec),
    Check(FanSource),
    HPoly(FanSource),
}

#[derive(Args, Debug)]
struct Instance {
    /// Ambient: T, P or FM.
    #[arg(long, default_value = "T")]
    kind: DomainKind,
    #[arg(short)]
    d: usize,
    /// Number of points; implied by `--weights` when omitted.
    #[arg(short)]
    n: Option<usize>,
    /// Comma-separated weights; all ones when omitted.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Args, Debug)]
struct TreeInput {
    /// Tree JSON, or `-` for stdin.
    #[arg(long = "in")]
    path: String,
}

#[derive(Args, Debug)]
struct FileInput {
    /// JSON file, or `-` for stdin.
    #[arg(long = "in")]
    path: String,
}

#[derive(Args, Debug)]
struct FanSpec {
    #[arg(long)]
    kind: FanKind,
    #[arg(short)]
    d: usize,
    #[arg(short)]
    n: usize,
}

#[derive(Args, Debug)]
struct FanSource {
    #[arg(long, requires_all = ["d", "n"], conflicts_with = "path")]
    kind: Option<FanKind>,
    #[arg(short)]
    d: Option<usize>,
    #[arg(short)]
    n: Option<usize>,
    /// Fan as JSON or in the `RAYS`/`CONES` text form.
    #[arg(long = "in")]
    path: Option<String>,
}

enum Failure {
    /// Printed like a success, exit 1.
    Rejected(Value),
    /// Message on stderr, exit 2.
    Structural(String),
}

type Outcome = Result<Value, Failure>;

fn structural(e: impl std::fmt::Display) -> Failure {
    Failure::Structural(e.to_string())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize")
}

struct Ctx {
    epsilon: Rational,
    seed: u64,
    format: Format,
}

impl Ctx {
    fn weights(&self, d: usize, raw: &str) -> Result<WeightVector, Failure> {
        let entries = raw
            .split(',')
            .map(|s| rational::parse_with_epsilon(s.trim(), &self.epsilon))
            .collect::<Result<Vec<_>, _>>()
            .map_err(structural)?;
        WeightVector::new(d, entries).map_err(structural)
    }

    fn instance(&self, inst: &Instance) -> Result<(AmbientDescriptor, WeightVector), Failure> {
        let w = match (&inst.weights, inst.n) {
            (Some(raw), n) => {
                let w = self.weights(inst.d, raw)?;
                if n.is_some_and(|n| n != w.n()) {
                    return Err(Failure::Structural(format!("-n {} but {} weights", n.unwrap(), w.n())));
                }
                w
            }
            (None, Some(n)) => WeightVector::ones(inst.d, n),
            (None, None) => return Err(Failure::Structural("give -n or --weights".into())),
        };
        let kind = match inst.kind {
            DomainKind::T => AmbientKind::TSpace,
            DomainKind::P => AmbientKind::PSpace,
            DomainKind::FM => AmbientKind::FMSpace,
        };
        let amb = AmbientDescriptor::new(kind, inst.d, w.n()).map_err(structural)?;
        Ok((amb, w))
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(structural)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Structural(format!("{path}: {e}")))
    }
}

fn read_json(path: &str) -> Result<Value, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Structural(format!("{path}: {e}")))
}

fn tree_failure(e: TreeError) -> Failure {
    match e {
        TreeError::Domain { .. } | TreeError::UnstableResult(_) => Failure::Rejected(json!({
            "accepted": false,
            "reason": e.to_string(),
        })),
        other => structural(other),
    }
}

fn git_failure(e: GitError) -> Failure {
    match e {
        GitError::Unstable(_) | GitError::DomainMismatch(_) => Failure::Rejected(json!({
            "accepted": false,
            "reason": e.to_string(),
        })),
        other => structural(other),
    }
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Outcome {
    match cmd {
        Command::Weights(WeightsCmd::Check(inst)) => {
            let (_, w) = ctx.instance(inst)?;
            let report = weights::validate_domain(&w, inst.kind).map_err(structural)?;
            let v = json!({ "d": w.d(), "weights": w, "report": report });
            if report.accepted {
                Ok(v)
            } else {
                Err(Failure::Rejected(v))
            }
        }
        Command::Weights(WeightsCmd::Git { d, n }) => {
            Ok(to_value(&weights::git_weights(*d, *n).map_err(structural)?))
        }
        Command::BuildingSet(BuildingSetCmd::List(inst)) => {
            let (amb, w) = ctx.instance(inst)?;
            let b = arrangements::heavy_sets(&w, amb).map_err(structural)?;
            let codims: Vec<i64> = b.heavy_sets().iter().map(|h| h.codim()).collect();
            Ok(json!({ "ambient": amb, "elements": b.elements, "codims": codims }))
        }
        Command::BuildingSet(BuildingSetCmd::Order { inst, relative }) => {
            let (amb, w) = ctx.instance(inst)?;
            let b = arrangements::heavy_sets(&w, amb).map_err(structural)?;
            let classes = arrangements::relative_order(&b, *relative).map_err(structural)?;
            Ok(json!({ "ambient": amb, "classes": classes, "order": classes.flatten() }))
        }
        Command::Betti { inst, relative } => {
            let (amb, w) = ctx.instance(inst)?;
            let order = relative.map_or(OrderSpec::AscendingDimension, OrderSpec::Relative);
            let r = engine::run(amb, &w, &order).map_err(structural)?;
            let mut v = to_value(&r);
            v["ambient"] = to_value(&amb);
            v["order"] = to_value(&order);
            Ok(v)
        }
        Command::Divisor { inst, set } => {
            let (amb, w) = ctx.instance(inst)?;
            let (l, r) = engine::divisor_factors(amb, &w, *set).map_err(structural)?;
            let total = &l * &r;
            Ok(json!({ "I": set, "factors": [l, r], "poincare": total }))
        }
        Command::Euler { d, n, oracle: use_oracle } => {
            if *use_oracle {
                let e = oracle::euler_oracle(*d, *n);
                return Ok(json!({ "d": d, "n": n, "method": "oracle", "euler": e }));
            }
            let amb = AmbientDescriptor::t(*d, *n).map_err(structural)?;
            let r = engine::run(amb, &WeightVector::ones(*d, *n), &OrderSpec::AscendingDimension)
                .map_err(structural)?;
            Ok(json!({ "d": d, "n": n, "method": "engine", "euler": r.euler }))
        }
        Command::Twist { inst, set } => {
            let (amb, w) = ctx.instance(inst)?;
            let containing = engine::twist_report(amb, &w, *set).map_err(structural)?;
            Ok(json!({ "I": set, "containing": containing, "twist": containing as i64 - 1 }))
        }
        Command::Tree(cmd) => tree(cmd, ctx),
        Command::Git(cmd) => git_cmd(cmd, ctx),
        Command::Toric(cmd) => toric_cmd(cmd, ctx),
        Command::ShaDims { n, m } => {
            let (strict, pair, dominates) = arrangements::sha_dimensions(*n, *m).map_err(structural)?;
            Ok(json!({ "n": n, "m": m, "strict_transform": strict, "pair_locus": pair, "pair_locus_dominates": dominates }))
        }
    }
}

fn load_tree(input: &TreeInput, ctx: &Ctx) -> Result<StableTree, Failure> {
    StableTree::from_json(&read_json(&input.path)?, &ctx.epsilon).map_err(tree_failure)
}

fn tree(cmd: &TreeCmd, ctx: &Ctx) -> Outcome {
    match cmd {
        TreeCmd::Validate(input) => {
            let report = load_tree(input, ctx)?.validate().map_err(tree_failure)?;
            if report.accepted {
                Ok(to_value(&report))
            } else {
                Err(Failure::Rejected(to_value(&report)))
            }
        }
        TreeCmd::Canon(input) => Ok(load_tree(input, ctx)?.canonicalize().map_err(tree_failure)?.to_json()),
        TreeCmd::Reduce { input, to } => {
            let t = load_tree(input, ctx)?;
            let b = ctx.weights(t.d(), to)?;
            Ok(t.reduce(&b).map_err(tree_failure)?.to_json())
        }
        TreeCmd::Forget { input, keep } => {
            let t = load_tree(input, ctx)?.forget(*keep).map_err(tree_failure)?;
            Ok(json!({ "kept": keep, "tree": t.to_json() }))
        }
        TreeCmd::Profile { input, k } => {
            let p = load_tree(input, ctx)?.forgetful_profile(*k).map_err(tree_failure)?;
            Ok(trees::profile_json(&p))
        }
    }
}

fn git_cmd(cmd: &GitCmd, ctx: &Ctx) -> Outcome {
    let config = |input: &FileInput| -> Result<PointConfiguration, Failure> {
        serde_json::from_value(read_json(&input.path)?).map_err(structural)
    };
    match cmd {
        GitCmd::Check { input, weights } => {
            let c = config(input)?;
            let w = match weights {
                Some(raw) => ctx.weights(c.d(), raw)?.entries().to_vec(),
                None => weights::git_weights(c.d(), c.n()).map_err(structural)?.entries,
            };
            let report = git::is_stable(&c, &w).map_err(git_failure)?;
            let conditions = (weights.is_none()).then(|| git::direct_conditions(&c));
            let v = json!({ "stability": report, "conditions": conditions });
            if report.stable {
                Ok(v)
            } else {
                Err(Failure::Rejected(v))
            }
        }
        GitCmd::Normalize(input) => Ok(to_value(&git::normalize(&config(input)?).map_err(git_failure)?)),
        GitCmd::Classify { input, weights } => {
            let rows: Vec<Vec<String>> = serde_json::from_value(read_json(&input.path)?).map_err(structural)?;
            let d = rows.len();
            let n = rows.first().map_or(0, Vec::len) + d + 1;
            let qp = QuotientPoint::from_strings(n, &rows).map_err(git_failure)?;
            let w = ctx.weights(d, weights)?;
            let sets = git::classify_coincidence(&qp, &w).map_err(git_failure)?;
            Ok(json!({ "point": qp, "coincident": sets }))
        }
    }
}

fn load_fan(src: &FanSource) -> Result<Fan, Failure> {
    if let Some(path) = &src.path {
        let text = read_input(path)?;
        let fan = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(structural)?
        } else {
            Fan::from_text(&text).map_err(structural)?
        };
        return Ok(fan);
    }
    match (src.kind, src.d, src.n) {
        (Some(kind), Some(d), Some(n)) => toric::build_fan(kind, d, n).map_err(structural),
        _ => Err(Failure::Structural("give --kind, -d and -n, or --in".into())),
    }
}

fn toric_cmd(cmd: &ToricCmd, ctx: &Ctx) -> Outcome {
    match cmd {
        ToricCmd::Rays(s) => {
            let rays = toric::lm_rays(s.kind, s.d, s.n).map_err(structural)?;
            Ok(json!({ "kind": s.kind, "d": s.d, "n": s.n, "rays": rays }))
        }
        ToricCmd::Fan(s) => {
            let fan = toric::build_fan(s.kind, s.d, s.n).map_err(structural)?;
            Ok(match ctx.format {
                Format::Text => Value::String(fan.to_text()),
                _ => to_value(&fan),
            })
        }
        ToricCmd::Check(src) => {
            let fan = load_fan(src)?;
            let check = toric::check_fan(&fan, ctx.seed).map_err(structural)?;
            let v = json!({ "smooth": check.smooth, "complete": check.complete, "f_vector": fan.f_vector() });
            if check.smooth && check.complete {
                Ok(v)
            } else {
                Err(Failure::Rejected(v))
            }
        }
        ToricCmd::HPoly(src) => {
            let fan = load_fan(src)?;
            let h = toric::h_polynomial(&fan).map_err(structural)?;
            Ok(json!({ "h": h, "f_vector": fan.f_vector() }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    let epsilon = match rational::parse(&cli.epsilon) {
        Ok(e) if rational::is_positive(&e) => e,
        _ => {
            eprintln!("error: --epsilon must be a positive rational, got `{}`", cli.epsilon);
            return ExitCode::from(64);
        }
    };
    let ctx = Ctx { epsilon, seed: cli.seed, format: cli.format };
    match dispatch(&cli.command, &ctx) {
        Ok(v) => {
            print!("{}", render(&v, cli.format));
            ExitCode::SUCCESS
        }
        Err(Failure::Rejected(v)) => {
            print!("{}", render(&v, cli.format));
            ExitCode::from(1)
        }
        Err(Failure::Structural(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
