// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! `kolmoverify`: complexity queries, verifications, experiments, corpus and
//! golden-constant maintenance.
//!
//! Settings resolve as flags, then the `--config` file, then defaults. The
//! resolved settings are echoed into every output. Exit codes: 0 ok/accept,
//! 1 reject/fail, 2 usage or input error.

mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kolmoverify::bits::BitTape;
use kolmoverify::bitvm::{universal_distribution, Mode, SeedPolicy, VmBudget, VmOutcome};
use kolmoverify::experiments::{self, goldens::Goldens, parse_param_value, ExperimentReport, RunOptions, CSV_HEADER};
use kolmoverify::extreal::json::to_value as num;
use kolmoverify::io::{csv_field, distribution_csv, DistributionDoc, SamplesFile};
use kolmoverify::joint::Flavor;
use kolmoverify::qsim::quantum_universal_distribution;
use kolmoverify::samplers::Corpus;
use kolmoverify::verify::{make_oracle, qas_verify, ver, ver_star, OracleSpec, OracleTarget, QasConfigV, VerConfig, Verdict};
use kolmoverify::{Error, Result};

use config::Resolver;

#[derive(Parser, Debug)]
#[command(name = "kolmoverify", version, about = "Exact time-bounded complexity, distribution verifiers and experiments")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, env = "KOLMOVERIFY_SEED")]
    seed: Option<u64>,
    /// Flat TOML file of settings; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Leave wall-clock times out of reports so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Csv,
    /// Samples file (`corpus show` only).
    Samples,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time-bounded complexity of one bit string.
    Complexity(ComplexityArgs),
    /// Run a verifier on a samples file.
    Verify(VerifyArgs),
    /// Run or list experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Inspect the sampler corpus.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Check or re-freeze the golden constants.
    #[command(subcommand)]
    Golden(GoldenCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FlavorArg {
    Ukt,
    Qukt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    /// Classical (ukt) or quantum (qukt) machine.
    #[arg(long, value_enum)]
    flavor: Option<FlavorArg>,
    /// The bit string, e.g. 0110.
    #[arg(long)]
    x: Option<String>,
    /// Step budget in bits.
    #[arg(long)]
    t: Option<u32>,
    /// Output length; defaults to the length of --x.
    #[arg(long)]
    m: Option<u32>,
    /// Instance size recorded in the budget.
    #[arg(long)]
    n: Option<u32>,
    /// Exact enumeration or a sampled estimate.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Number of tapes in sampled mode.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum VerifierArg {
    Ver,
    VerStar,
    Qas,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Samples file (`m=<bits>` header, one hex sample per line).
    #[arg(long, value_name = "FILE")]
    samples: Option<PathBuf>,
    /// Label of the target sampler.
    #[arg(long)]
    target: Option<String>,
    /// Corpus JSON holding the target; defaults to the shipped corpus.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Verifier to run.
    #[arg(long, value_enum)]
    verifier: Option<VerifierArg>,
    /// Complexity oracle: exact or two-sided:δ, optionally @seed.
    #[arg(long, value_name = "SPEC")]
    m_oracle: Option<String>,
    /// Probability oracle: exact, one-sided:δ or two-sided:δ, optionally @seed.
    #[arg(long, value_name = "SPEC")]
    approx: Option<String>,
    /// Security parameter (for qas: the number of samples).
    #[arg(long)]
    n: Option<u32>,
    /// Soundness exponent.
    #[arg(long)]
    c: Option<f64>,
    /// Distance the verifier must catch.
    #[arg(long)]
    eps: Option<f64>,
    /// Budget of the complexity oracle (Ver and Ver*).
    #[arg(long)]
    t: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Run one experiment, or `all`.
    Run(RunArgs),
    /// List experiment ids with their parameter defaults.
    List,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment id from `experiment list`, or `all`.
    id: String,
    /// Classical budget T.
    #[arg(long = "T")]
    t: Option<u32>,
    /// Quantum budget T_q.
    #[arg(long = "T_q")]
    t_q: Option<u32>,
    /// Sampler label (or a comma-separated list).
    #[arg(long)]
    sampler: Option<String>,
    /// Alpha value or comma-separated list.
    #[arg(long)]
    alpha: Option<String>,
    /// Trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Security parameter n (or a comma-separated list).
    #[arg(long)]
    n: Option<String>,
    /// Soundness exponent c.
    #[arg(long)]
    c: Option<f64>,
    /// Distance ε (or a comma-separated list).
    #[arg(long)]
    eps: Option<String>,
    /// Any other parameter, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum CorpusCmd {
    /// List the samplers.
    List,
    /// Show one sampler: descriptor and exact distribution, or drawn samples.
    Show(ShowArgs),
}

#[derive(Args, Debug)]
struct ShowArgs {
    label: String,
    /// Number of samples for --format samples.
    #[arg(long)]
    count: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum GoldenCmd {
    /// Recompute the constants and compare them with the frozen file.
    Check {
        /// Golden file to compare against; defaults to the shipped one.
        #[arg(long, value_name = "FILE")]
        file: Option<PathBuf>,
    },
    /// Recompute the constants and write them out.
    Freeze,
}

/// What a command produced.
struct Output {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(p) => config::load(p)?,
        None => BTreeMap::new(),
    };
    let r = Resolver::new(file);
    let seed = r.pick("seed", cli.seed, 0u64)?;
    let format = r.pick("format", cli.format, Format::Json)?;
    let no_timestamp = cli.no_timestamp || r.pick("no_timestamp", None, false)?;
    let output = match cli.output.clone() {
        Some(p) => Some(p),
        None => r.pick::<Option<String>>("output", None, None)?.map(PathBuf::from),
    };
    let mut base = serde_json::Map::new();
    base.insert("seed".into(), json!(seed));
    base.insert("format".into(), json!(format!("{format:?}").to_lowercase()));
    base.insert("no_timestamp".into(), json!(no_timestamp));
    if let Some(p) = &output {
        base.insert("output".into(), json!(p.display().to_string()));
    }
    let g = Globals { seed, format, no_timestamp, base };
    let out = match cli.command {
        Command::Complexity(a) => complexity(&r, &g, a)?,
        Command::Verify(a) => verify(&r, &g, a)?,
        Command::Experiment(ExperimentCmd::Run(a)) => experiment_run(&r, &g, a)?,
        Command::Experiment(ExperimentCmd::List) => experiment_list(&g)?,
        Command::Corpus(CorpusCmd::List) => corpus_list(&g)?,
        Command::Corpus(CorpusCmd::Show(a)) => corpus_show(&r, &g, a)?,
        Command::Golden(GoldenCmd::Check { file }) => golden_check(&g, file)?,
        Command::Golden(GoldenCmd::Freeze) => golden_freeze()?,
    };
    match output {
        Some(p) => std::fs::write(&p, &out.text)?,
        None => print!("{}", out.text),
    }
    Ok(out.code)
}

struct Globals {
    seed: u64,
    format: Format,
    no_timestamp: bool,
    base: serde_json::Map<String, Value>,
}

impl Globals {
    fn config(&self, extra: Value) -> Value {
        let mut m = self.base.clone();
        if let Value::Object(e) = extra {
            m.extend(e);
        }
        Value::Object(m)
    }

    fn no_samples(&self, cmd: &str) -> Result<()> {
        if self.format == Format::Samples {
            return Err(Error::InvalidArgument(format!("--format samples is not available for `{cmd}`")));
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

/// CSV preamble echoing the resolved settings as `#` comments.
fn csv_preamble(config: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(m) = config {
        for (k, v) in m {
            s.push_str(&format!("# {k}={}\n", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())));
        }
    }
    s
}

fn complexity(r: &Resolver, g: &Globals, a: ComplexityArgs) -> Result<Output> {
    g.no_samples("complexity")?;
    let flavor = r.pick("flavor", a.flavor, FlavorArg::Ukt)?;
    let x: String = r
        .pick::<Option<String>>("x", a.x.map(Some), None)?
        .ok_or_else(|| Error::InvalidArgument("complexity needs --x".into()))?;
    let bits: BitTape = x.parse()?;
    let t = r.pick("t", a.t, 12u32)?;
    let m = r.pick("m", a.m, bits.len() as u32)?;
    let n = r.pick("n", a.n, 4u32)?;
    let mode = r.pick("mode", a.mode, ModeArg::Exact)?;
    let samples = r.pick("samples", a.samples, 100_000u64)?;
    let budget = VmBudget::new(n, t, m)?;
    if bits.len() != m as usize {
        return Err(Error::LengthMismatch { expected: m as usize, actual: bits.len() });
    }
    let vm_mode = match mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Sampled => Mode::Sampled { samples, seed: SeedPolicy::Random(g.seed) },
    };
    let outcome = VmOutcome::Bits(bits);
    let value = match (flavor, mode) {
        (FlavorArg::Ukt, ModeArg::Exact) => kolmoverify::ukt(outcome.bits().unwrap(), &budget)?,
        (FlavorArg::Qukt, ModeArg::Exact) => kolmoverify::qukt(outcome.bits().unwrap(), &budget)?,
        (FlavorArg::Ukt, ModeArg::Sampled) => universal_distribution(&budget, vm_mode)?.neg_log2(&outcome),
        (FlavorArg::Qukt, ModeArg::Sampled) => {
            kolmoverify::extreal::neg_log2(quantum_universal_distribution(&budget, vm_mode)?.prob(&outcome))
        }
    };
    let mut extra = json!({"flavor": format!("{flavor:?}").to_lowercase(), "x": x, "t": t, "m": m, "n": n, "mode": format!("{mode:?}").to_lowercase()});
    if mode == ModeArg::Sampled {
        extra["samples"] = json!(samples);
    }
    let config = g.config(extra);
    let text = match g.format {
        Format::Csv => format!(
            "{}flavor,x,t,m,mode,value\n{:?},{x},{t},{m},{:?},{}\n",
            csv_preamble(&config),
            flavor,
            mode,
            fmt_value(value)
        )
        .to_lowercase(),
        _ => pretty(&json!({"command": "complexity", "config": config, "value": num(value)})),
    };
    Ok(Output { text, code: 0 })
}

fn fmt_value(v: f64) -> String {
    match num(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn load_corpus(path: Option<&PathBuf>) -> Result<Corpus> {
    let src = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => kolmoverify::samplers::CORPUS_V1.to_string(),
    };
    Corpus::from_json(&src)
}

fn verify(r: &Resolver, g: &Globals, a: VerifyArgs) -> Result<Output> {
    g.no_samples("verify")?;
    let path: String = r
        .pick::<Option<String>>("samples", a.samples.map(|p| Some(p.display().to_string())), None)?
        .ok_or_else(|| Error::InvalidArgument("verify needs --samples".into()))?;
    let target_label: String = r
        .pick::<Option<String>>("target", a.target.map(Some), None)?
        .ok_or_else(|| Error::InvalidArgument("verify needs --target".into()))?;
    let corpus_path: Option<String> = r.pick("corpus", a.corpus.map(|p| Some(p.display().to_string())), None)?;
    let verifier = r.pick("verifier", a.verifier, VerifierArg::Ver)?;
    let m_spec: String = r.pick("m_oracle", a.m_oracle, "exact".to_string())?;
    let a_spec: String = r.pick("approx", a.approx, "exact".to_string())?;
    let file = SamplesFile::parse(&std::fs::read_to_string(&path)?)?;
    let samples = file.flatten();
    let corpus = load_corpus(corpus_path.as_ref().map(PathBuf::from).as_ref())?;
    let target = corpus.get(&target_label)?;
    if file.m != target.budget.m {
        return Err(Error::LengthMismatch { expected: target.budget.m as usize, actual: file.m as usize });
    }
    let c = r.pick("c", a.c, 1.0f64)?;
    let mut extra = json!({
        "samples": path,
        "target": target_label,
        "verifier": format!("{verifier:?}"),
        "m_oracle": m_spec,
        "approx": a_spec,
        "c": c,
        "sample_count": samples.len(),
    });
    if let Some(p) = &corpus_path {
        extra["corpus"] = json!(p);
    }
    let m_parsed: OracleSpec = m_spec.parse()?;
    let verdict: Verdict = match verifier {
        VerifierArg::Ver | VerifierArg::VerStar => {
            let n = r.pick("n", a.n, 4u32)?;
            let eps = r.pick("eps", a.eps, 0.25f64)?;
            let t = r.pick("t", a.t, 20u32)?;
            extra["n"] = json!(n);
            extra["eps"] = json!(eps);
            extra["t"] = json!(t);
            let cfg = VerConfig::defaults(n, c, eps, t, Flavor::Classical)?;
            let m_oracle = make_oracle(OracleTarget::Ukt { t }, m_parsed)?;
            let approx = make_oracle(OracleTarget::ProbabilityOf(target.clone()), a_spec.parse()?)?;
            if verifier == VerifierArg::Ver {
                ver(&samples, &target, &cfg, &m_oracle, &approx, g.seed)?
            } else {
                ver_star(&samples, &target, &cfg, &m_oracle, &approx, g.seed)?
            }
        }
        VerifierArg::Qas => {
            let d = corpus.descriptor(&target_label)?;
            let t_c = match d.classical_budget {
                Some(t) => r.pick("t", a.t, t)?,
                None => r
                    .pick::<Option<u32>>("t", a.t.map(Some), None)?
                    .ok_or_else(|| Error::InvalidArgument(format!("`{target_label}` names no classical budget; pass --t")))?,
            };
            let t_q = target.budget.t;
            let n = r.pick("n", a.n, samples.len() as u32)?;
            extra["n"] = json!(n);
            extra["t_c"] = json!(t_c);
            extra["t_q"] = json!(t_q);
            let cfg = QasConfigV { n, c, m: target.budget.m };
            let m_c = make_oracle(OracleTarget::Ukt { t: t_c }, m_parsed)?;
            let m_q = make_oracle(OracleTarget::Qukt { t: t_q }, a_spec.parse()?)?;
            qas_verify(&samples, &cfg, &m_c, &m_q, g.seed)?
        }
    };
    let config = g.config(extra);
    let code = if verdict.accepted { 0 } else { 1 };
    let text = match g.format {
        Format::Csv => format!(
            "{}verifier,accepted,k,neg_log_p,alpha,count\n{},{},{},{},{},{}\n",
            csv_preamble(&config),
            format!("{:?}", verdict.verifier).to_lowercase(),
            verdict.accepted,
            verdict.k.map(fmt_value).unwrap_or_default(),
            verdict.neg_log_p.map(fmt_value).unwrap_or_default(),
            verdict.alpha.map(fmt_value).unwrap_or_default(),
            verdict.count.map(|c| c.to_string()).unwrap_or_default(),
        ),
        _ => pretty(&json!({"command": "verify", "config": config, "verdict": verdict})),
    };
    Ok(Output { text, code })
}

/// Parameter overrides for one experiment: config file keys that name a
/// parameter of the experiment, then flags.
fn experiment_overrides(r: &Resolver, id: &str, a: &RunArgs) -> Result<BTreeMap<String, Value>> {
    let params = experiments::resolve_params(id, &BTreeMap::new())?;
    let mut ov = BTreeMap::new();
    for key in params.as_map().keys() {
        if let Some(v) = r.file_json(key)? {
            ov.insert(key.clone(), v);
        }
    }
    let mut flag = |key: &str, v: Option<Value>| -> Result<()> {
        if let Some(v) = v {
            if !params.as_map().contains_key(key) {
                return Err(Error::InvalidArgument(format!("experiment `{id}` has no parameter `{key}`")));
            }
            ov.insert(key.to_string(), v);
        }
        Ok(())
    };
    flag("T", a.t.map(|x| json!(x)))?;
    flag("T_q", a.t_q.map(|x| json!(x)))?;
    flag("sampler", a.sampler.as_deref().map(parse_param_value))?;
    flag("alpha", a.alpha.as_deref().map(parse_param_value))?;
    flag("trials", a.trials.map(|x| json!(x)))?;
    flag("n", a.n.as_deref().map(parse_param_value))?;
    flag("c", a.c.map(|x| json!(x)))?;
    flag("eps", a.eps.as_deref().map(parse_param_value))?;
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        flag(k.trim(), Some(parse_param_value(v.trim())))?;
    }
    Ok(ov)
}

fn experiment_run(r: &Resolver, g: &Globals, a: RunArgs) -> Result<Output> {
    g.no_samples("experiment run")?;
    let ids: Vec<String> = if a.id == "all" {
        experiments::experiment_ids().map(str::to_string).collect()
    } else {
        vec![a.id.clone()]
    };
    let opts = RunOptions { seed: g.seed, timestamps: !g.no_timestamp };
    let mut reports: Vec<ExperimentReport> = vec![];
    for id in &ids {
        let ov = experiment_overrides(r, id, &a)?;
        reports.push(experiments::run_experiment(id, &ov, opts)?);
    }
    let code = if reports.iter().all(|r| r.pass) { 0 } else { 1 };
    let config = g.config(json!({"experiment": a.id}));
    let text = match g.format {
        Format::Csv => {
            let mut s = csv_preamble(&config);
            s.push_str(CSV_HEADER);
            s.push('\n');
            for rep in &reports {
                s.push_str(&rep.csv_rows());
            }
            s
        }
        _ if reports.len() == 1 => pretty(&json!({"command": "experiment run", "config": config, "report": reports[0]})),
        _ => pretty(&json!({"command": "experiment run", "config": config, "reports": reports})),
    };
    Ok(Output { text, code })
}

fn experiment_list(g: &Globals) -> Result<Output> {
    g.no_samples("experiment list")?;
    let manifest = experiments::manifest()?;
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("id,summary\n");
            for e in manifest.as_array().unwrap() {
                s.push_str(&format!("{},{}\n", e["id"].as_str().unwrap(), csv_field(e["summary"].as_str().unwrap())));
            }
            s
        }
        _ => pretty(&json!({"command": "experiment list", "config": g.config(json!({})), "experiments": manifest})),
    };
    Ok(Output { text, code: 0 })
}

fn corpus_list(g: &Globals) -> Result<Output> {
    g.no_samples("corpus list")?;
    let corpus = Corpus::v1();
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("label,kind,n,t,m,description_length\n");
            for smp in corpus.samplers() {
                let kind = serde_json::to_value(smp.kind)?;
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    csv_field(&smp.label),
                    kind.as_str().unwrap(),
                    smp.budget.n,
                    smp.budget.t,
                    smp.budget.m,
                    smp.description_length
                ));
            }
            s
        }
        _ => pretty(&json!({"command": "corpus list", "config": g.config(json!({})), "samplers": corpus.descriptors})),
    };
    Ok(Output { text, code: 0 })
}

fn corpus_show(r: &Resolver, g: &Globals, a: ShowArgs) -> Result<Output> {
    let corpus = Corpus::v1();
    let smp = corpus.get(&a.label)?;
    let text = match g.format {
        Format::Samples => {
            let count = r.pick("count", a.count, 100u64)?;
            let mut rng = kolmoverify::rng::derived_rng(g.seed, &[0x73_616d_706c_6573]);
            let samples: Vec<VmOutcome> = (0..count).map(|_| smp.sample_with(&mut rng)).collect::<Result<_>>()?;
            SamplesFile::single(smp.budget.m, samples).render()
        }
        Format::Csv => distribution_csv(smp.distribution()?),
        Format::Json => {
            let doc = match smp.exact_distribution()? {
                Some(d) => DistributionDoc::from_exact(d, Some(smp.budget), Some(Mode::Exact))?,
                None => DistributionDoc::from_f64(smp.distribution()?, Some(smp.budget), None)?,
            };
            pretty(&json!({
                "command": "corpus show",
                "config": g.config(json!({"label": a.label})),
                "descriptor": corpus.descriptor(&a.label)?,
                "randomness_bits": smp.randomness_bits(),
                "distribution": doc,
            }))
        }
    };
    Ok(Output { text, code: 0 })
}

fn golden_check(g: &Globals, file: Option<PathBuf>) -> Result<Output> {
    g.no_samples("golden check")?;
    let frozen = match &file {
        Some(p) => Goldens::from_json(&std::fs::read_to_string(p)?)?,
        None => Goldens::shipped()?,
    };
    let fresh = Goldens::compute()?;
    let drift = frozen.drift(&fresh);
    let code = if drift.is_empty() { 0 } else { 1 };
    let text = pretty(&json!({
        "command": "golden check",
        "config": g.config(json!({"file": file.map(|p| p.display().to_string()).unwrap_or_else(|| "shipped".into())})),
        "frozen": frozen,
        "computed": fresh,
        "drift": drift,
    }));
    Ok(Output { text, code })
}

fn golden_freeze() -> Result<Output> {
    Ok(Output { text: Goldens::compute()?.to_json(), code: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn walk(cmd: &clap::Command, path: &str, out: &mut Vec<String>) {
        for arg in cmd.get_arguments() {
            if arg.is_hide_set() {
                continue;
            }
            if arg.get_help().is_none() && arg.get_long().is_some() {
                out.push(format!("{path} --{}", arg.get_long().unwrap()));
            }
        }
        for sub in cmd.get_subcommands() {
            walk(sub, &format!("{path} {}", sub.get_name()), out);
        }
    }

    #[test]
    fn every_flag_is_documented() {
        let mut missing = vec![];
        walk(&Cli::command(), "kolmoverify", &mut missing);
        assert!(missing.is_empty(), "undocumented flags: {missing:?}");
        Cli::command().debug_assert();
    }
}
