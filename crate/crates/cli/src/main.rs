//! `rdel`: resolve, evaluate and generate ranked-delegation instances.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ranked_delegation::axioms::{run_axiom, Axiom};
use ranked_delegation::experiment::{run_experiment, ExperimentConfig};
use ranked_delegation::format::{self, parse_edge_list, EdgeList};
use ranked_delegation::generate::{generate, participation_rate, GenConfig, Method, Spatial};
use ranked_delegation::metrics::{aggregate, compute_metrics, csv_mean_row, csv_row, CSV_HEADER};
use ranked_delegation::num::{fmt_sig6, to_f64};
use ranked_delegation::{unpopularity_margin, Branching, Error, Instance, PriorityOrder, Resolution, Rule};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rdel", version, about = "Ranked delegation for liquid democracy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the delegation path chosen for every delegating voter.
    Resolve(ResolveArgs),
    /// Evaluation metrics as CSV.
    Metrics(MetricsArgs),
    /// Generate a synthetic instance.
    Generate(GenerateArgs),
    /// Randomized axiom checks; exits 1 when violations are found.
    Axioms(AxiomsArgs),
    /// Run a batch experiment from a TOML config.
    Experiment(ExperimentArgs),
    /// Unpopularity margin of a confluent rule's branching.
    Unpop(UnpopArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct RuleArgs {
    /// bfd, dfd, minsum, leximax, diffusion, borda or wsum:1=1,2=3,...
    #[arg(long, default_value = "bfd")]
    rule: String,
    /// Borda tie-breaking: voter ids from highest to lowest priority, e.g. `2,0,1`.
    #[arg(long)]
    priority: Option<String>,
}

impl RuleArgs {
    fn rule(&self) -> Result<Rule, Error> {
        parse_rule(&self.rule, self.priority.as_deref())
    }
}

#[derive(Args)]
struct ResolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    rule: RuleArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Single instance file.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    instance: Option<PathBuf>,
    /// Experiment config; prints one averaged row per rule.
    #[arg(long)]
    config: Option<PathBuf>,
    /// A rule name or `all`.
    #[arg(long, default_value = "all")]
    rule: String,
    #[arg(long)]
    priority: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMethod {
    Friendship,
    Prominence,
    Weight,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpatialArg {
    Uniform,
    Gaussian,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    method: GenMethod,
    #[arg(long)]
    n: Option<usize>,
    /// Target average out-degree.
    #[arg(long, default_value_t = 4.0)]
    delta: f64,
    /// Probability that a voter is casting.
    #[arg(long, default_value_t = 0.2)]
    pc: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    spatial: SpatialArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base graph as an edge list; required for prominence on a real network.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Output file (`.json` selects the JSON mirror); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AxiomsArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// guru, guru-star, copy or iic.
    #[arg(long)]
    axiom: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UnpopArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    rule: RuleArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// A failure together with its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::Io(_) | Error::Json(_) | Error::InvalidInstance(_) => 2,
            Error::NotConfluentOrder
            | Error::Infeasible(_)
            | Error::MismatchedInstance(_)
            | Error::NonUniqueMax(_)
            | Error::NonConfluentMetrics
            | Error::BudgetExceeded { .. } => 3,
            Error::PreconditionUnmet(_)
            | Error::EmptyInput
            | Error::InvalidConfig(_)
            | Error::InsufficientNeighbors { .. } => 4,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn config_error(msg: impl Into<String>) -> Failure {
    Failure { code: 4, msg: msg.into() }
}

fn parse_rule(name: &str, priority: Option<&str>) -> Result<Rule, Error> {
    let rule: Rule = name.parse()?;
    match (rule, priority) {
        (Rule::Borda(_), Some(p)) => Ok(Rule::Borda(Some(p.parse::<PriorityOrder>()?))),
        (_, Some(_)) => Err(Error::InvalidConfig("--priority only applies to borda".into())),
        (rule, None) => Ok(rule),
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    format::load(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

fn load_base(path: &Path) -> Result<EdgeList, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure { code: 2, msg: format!("{}: {e}", path.display()) })?;
    Ok(parse_edge_list(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: 4, msg: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn resolution_json(inst: &Instance, res: &Resolution) -> serde_json::Value {
    let paths: Vec<_> = res
        .paths()
        .map(|(v, p)| {
            json!({
                "voter": inst.name(v),
                "guru": p.target().map(|g| inst.name(g)),
                "path": p.voters().into_iter().map(|x| inst.name(x)).collect::<Vec<_>>(),
                "sequence": p.sequence().ranks(),
            })
        })
        .collect();
    json!({ "rule": res.rule, "paths": paths })
}

fn cmd_resolve(a: &ResolveArgs) -> Result<u8, Failure> {
    let inst = load(&a.instance)?;
    let res = a.rule.rule()?.resolve(&inst)?;
    let text = match a.format {
        Format::Text => res.listing(&inst),
        Format::Csv => {
            let mut out = String::from("voter,guru,path,sequence\n");
            for (v, p) in res.paths() {
                let path: Vec<String> = p.voters().into_iter().map(|x| inst.name(x)).collect();
                let seq: Vec<String> = p.sequence().ranks().iter().map(u32::to_string).collect();
                let guru = p.target().map(|g| inst.name(g)).unwrap_or_default();
                out.push_str(&format!("{},{guru},{},{}\n", inst.name(v), path.join(" "), seq.join(" ")));
            }
            out
        }
        Format::Json => format!("{:#}\n", resolution_json(&inst, &res)),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn metric_rules(name: &str, priority: Option<&str>) -> Result<Vec<Rule>, Error> {
    if name.eq_ignore_ascii_case("all") {
        let mut rules = Rule::all();
        if let Some(p) = priority {
            *rules.last_mut().expect("borda is listed") = Rule::Borda(Some(p.parse()?));
        }
        Ok(rules)
    } else {
        Ok(vec![parse_rule(name, priority)?])
    }
}

fn read_config(path: &Path) -> Result<(ExperimentConfig, Option<EdgeList>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let base = match &cfg.base {
        Some(b) => Some(load_base(&path.parent().unwrap_or(Path::new(".")).join(b))?),
        None => None,
    };
    Ok((cfg, base))
}

fn cmd_metrics(a: &MetricsArgs) -> Result<u8, Failure> {
    let rules = metric_rules(&a.rule, a.priority.as_deref())?;
    let mut out = format!("{CSV_HEADER}\n");
    if let Some(path) = &a.instance {
        let inst = load(path)?;
        let name = stem(path);
        for rule in &rules {
            let rec = compute_metrics(&inst, &rule.resolve(&inst)?, rule.is_confluent())?;
            out.push_str(&csv_row(&name, &rule.name(), &rec));
            out.push('\n');
        }
    } else if let Some(path) = &a.config {
        let (cfg, base) = read_config(path)?;
        for rule in &rules {
            let records = (0..cfg.instances)
                .map(|i| {
                    let inst = generate(&cfg.instance_config(i), base.as_ref())?;
                    compute_metrics(&inst, &rule.resolve(&inst)?, rule.is_confluent())
                })
                .collect::<Result<Vec<_>, Error>>()?;
            out.push_str(&csv_mean_row(&format!("mean{}", cfg.instances), &rule.name(), &aggregate(&records)?));
            out.push('\n');
        }
    }
    emit(a.out.as_deref(), &out)?;
    Ok(0)
}

fn cmd_generate(a: &GenerateArgs) -> Result<u8, Failure> {
    let base = a.base.as_deref().map(load_base).transpose()?;
    let method = match (a.method, &base) {
        (GenMethod::Friendship, Some(_)) => return Err(config_error("friendship generation builds its own base graph")),
        (GenMethod::Friendship, None) => Method::Friendship,
        (GenMethod::Prominence, None) => Method::ProminenceSynthetic,
        (GenMethod::Prominence, Some(_)) => Method::ProminenceFromBase,
        (GenMethod::Weight, _) => Method::WeightBased,
    };
    let n = match (a.n, &base) {
        (Some(n), _) => n,
        (None, Some(b)) => b.n(),
        (None, None) => return Err(config_error("--n is required without --base")),
    };
    let cfg = GenConfig {
        method,
        n,
        p_c: a.pc,
        avg_degree: a.delta,
        alpha: a.alpha,
        beta: a.beta,
        spatial: match a.spatial {
            SpatialArg::Uniform => Spatial::Uniform2d,
            SpatialArg::Gaussian => Spatial::Gaussian2d,
        },
        seed: a.seed,
    };
    let inst = generate(&cfg, base.as_ref())?;
    let rate = format!("participation rate: {}", fmt_sig6(to_f64(&participation_rate(&inst))));
    match &a.out {
        Some(p) => {
            format::save(&inst, p).map_err(|e| config_error(format!("{}: {e}", p.display())))?;
            println!("{rate}");
        }
        None => {
            print!("{}", format::write_v1(&inst)?);
            eprintln!("{rate}");
        }
    }
    Ok(0)
}

fn cmd_axioms(a: &AxiomsArgs) -> Result<u8, Failure> {
    let rule = a.rule.rule()?;
    let axiom: Axiom = a.axiom.parse()?;
    let report = run_axiom(&rule, axiom, a.trials, a.seed)?;
    emit(a.out.as_deref(), &format!("{}\n", report.to_json()?))?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<u8, Failure> {
    let (cfg, base) = read_config(&a.config)?;
    let report = run_experiment(&cfg, base.as_ref())?;
    emit(a.out.as_deref(), &report.to_csv())?;
    eprint!("{}", report.summary_text());
    Ok(0)
}

fn cmd_unpop(a: &UnpopArgs) -> Result<u8, Failure> {
    let inst = load(&a.instance)?;
    let rule = a.rule.rule()?;
    if !rule.is_confluent() {
        return Err(Error::NonConfluentMetrics.into());
    }
    let res = rule.resolve(&inst)?;
    let b = Branching::from_resolution(&inst, &res)?;
    let (mu, rival) = unpopularity_margin(&inst, &b)?;
    let edges = |br: &Branching| -> Vec<String> {
        br.edges().map(|e| format!("{}->{}", inst.name(e.source), inst.name(e.target))).collect()
    };
    let text = match a.format {
        Format::Json => format!(
            "{:#}\n",
            json!({ "rule": rule.name(), "unpopularity": mu, "popular": mu == 0, "rival": edges(&rival) })
        ),
        Format::Text | Format::Csv => {
            let mut s = format!("unpopularity margin: {mu}\n");
            if mu > 0 {
                s.push_str(&format!("beaten by: {}\n", edges(&rival).join(" ")));
            }
            s
        }
    };
    print!("{text}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Resolve(a) => cmd_resolve(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Axioms(a) => cmd_axioms(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Unpop(a) => cmd_unpop(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("rdel: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
