//! Command-line front end.
//!
//! Every command accepts `--config FILE`, a flat TOML table whose keys are
//! the command's long flag names with `-` replaced by `_`. Flags override
//! file values, which override built-in defaults.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::code::{build_qrlc, recommended_gate_count, Connectivity, QuantumCode};
use crate::decoder::{measurement_cost, write_trial_log, DecodingMode, MeasurementCost, SyndromeTable, TruncationConvention};
use crate::error::{invalid, Error, Result};
use crate::experiments::{
    self, evaluate_code, min_gates_experiment, ordering_study, p_threshold_sweep, run_trials, success_study, summarize_trials,
    sweep_rate, with_threads, EvalReport, KRule, Metadata, MinGatesConfig, OrderingStudyConfig, PatternSet, RateSweepConfig,
    SuccessStudyConfig, SweepRow, ThresholdSweepConfig,
};
use crate::noise::{bernoulli_model, NoiseModel, SyntheticKind};

#[derive(Parser, Debug)]
#[command(name = "qgrand", version, about = "Quantum random linear codes and noise-guessing decoding")]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a random code and write it to a code file.
    Generate(GenerateArgs),
    /// Evaluate a code against a noise model semi-analytically.
    Evaluate(EvaluateArgs),
    /// Run a parameter sweep over sampled codes and write CSV plus JSON metadata.
    Sweep(SweepArgs),
    /// Monte Carlo decoding trials with a per-trial log.
    Simulate(SimulateArgs),
}

fn merge<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| Error::Parse {
                what: "config file",
                reason: e.to_string(),
            })
        }
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| invalid(format!("--{name} is required")))
}

fn output_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(std::io::stdout())),
    })
}

// ------------------------------------------------------------------ generate

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Physical qubits n (≥ 2).
    #[arg(long)]
    n: Option<usize>,
    /// Logical qubits k (1 ≤ k < n).
    #[arg(long)]
    k: Option<usize>,
    /// Number of random two-qubit Clifford gates [default: ceil(0.21·n·log₂²n)].
    #[arg(long)]
    gates: Option<usize>,
    /// RNG seed for the circuit [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Code file to write [default: code.qrlc].
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let file: GenerateArgs = read_config(args.config.as_deref())?;
    let n = required(merge(args.n, file.n), "n")?;
    let k = required(merge(args.k, file.k), "k")?;
    if n < 2 || k == 0 || k >= n {
        return Err(invalid(format!("need n ≥ 2 and 1 ≤ k < n, got n = {n}, k = {k}")));
    }
    let gates = match merge(args.gates, file.gates) {
        Some(g) => g,
        None => recommended_gate_count(n, 0.21)?,
    };
    let seed = merge(args.seed, file.seed).unwrap_or(0);
    let output = merge(args.output, file.output).unwrap_or_else(|| PathBuf::from("code.qrlc"));
    let code = build_qrlc(n, k, gates, Connectivity::AllToAll, seed)?;
    code.save(&output)?;
    println!(
        "n={} k={} gates={} rank={}/{} seed={} file={}",
        code.n(),
        code.k(),
        code.gates().len(),
        code.s(),
        n - k,
        seed,
        output.display()
    );
    Ok(())
}

// ------------------------------------------------------------------ evaluate

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Code file produced by `generate`.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Per-qubit depolarizing probability p (0 ≤ p ≤ 3/4).
    #[arg(long)]
    p: Option<f64>,
    /// Maximum listed error weight t [default: 1].
    #[arg(long)]
    t: Option<usize>,
    /// Explicit noise statistics CSV (columns pattern,probability) instead of --p/--t.
    #[arg(long)]
    noise_file: Option<PathBuf>,
    /// Add a conditional_bler column that excludes the unlisted residual mass.
    #[arg(long)]
    #[serde(default)]
    conditional: bool,
    /// JSON report destination [default: stdout].
    #[arg(long)]
    json: Option<PathBuf>,
    /// One-row CSV summary destination [default: none].
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn load_noise(n: usize, p: Option<f64>, t: Option<usize>, noise_file: Option<&Path>) -> Result<NoiseModel> {
    match (p, noise_file) {
        (Some(_), Some(_)) => Err(invalid("give either --p/--t or --noise-file, not both")),
        (None, None) => Err(invalid("a noise model is required: --p (with --t) or --noise-file")),
        (Some(p), None) => bernoulli_model(n, p, t.unwrap_or(1)),
        (None, Some(path)) => {
            if t.is_some() {
                return Err(invalid("--t applies only to depolarizing noise"));
            }
            NoiseModel::from_csv_reader(n, BufReader::new(File::open(path)?))
        }
    }
}

#[derive(Serialize)]
struct EvaluateOutput<'a> {
    #[serde(flatten)]
    report: &'a EvalReport,
    expected_iterations: f64,
    measurement_cost: Option<MeasurementCost>,
}

fn evaluation_csv<W: Write>(writer: W, r: &EvalReport, conditional: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = [
        "n",
        "k",
        "gates",
        "seed",
        "success_prob",
        "bler",
        "f_min_bound",
        "unique_syndromes",
        "collisions",
        "degenerate_count",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut row = vec![
        r.n.to_string(),
        r.k.to_string(),
        r.num_gates.to_string(),
        r.seed.to_string(),
        r.success_prob.to_string(),
        r.bler.to_string(),
        r.f_min_bound.to_string(),
        r.unique_syndromes.to_string(),
        r.collisions.to_string(),
        r.degenerate_count.to_string(),
    ];
    if conditional {
        header.push("conditional_bler".into());
        row.push(r.conditional_bler.to_string());
    }
    for (t, f) in &r.f_by_weight {
        header.push(format!("f{t}"));
        row.push(f.to_string());
    }
    w.write_record(&header)?;
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let file: EvaluateArgs = read_config(args.config.as_deref())?;
    let code_path = required(merge(args.code, file.code), "code")?;
    let code = QuantumCode::load(&code_path)?;
    let noise = load_noise(
        code.n(),
        merge(args.p, file.p),
        merge(args.t, file.t),
        merge(args.noise_file, file.noise_file).as_deref(),
    )?;
    let conditional = args.conditional || file.conditional;
    let report = evaluate_code(&code, &noise)?;
    let cost = if code.s() >= 1 {
        Some(measurement_cost(code.s(), &noise, TruncationConvention::Printed)?)
    } else {
        None
    };
    let out = EvaluateOutput {
        report: &report,
        expected_iterations: noise.expected_iterations(),
        measurement_cost: cost,
    };
    let mut w = output_writer(merge(args.json, file.json).as_deref())?;
    serde_json::to_writer_pretty(&mut w, &out)?;
    writeln!(w)?;
    w.flush()?;
    if let Some(path) = merge(args.csv, file.csv) {
        evaluation_csv(BufWriter::new(File::create(path)?), &report, conditional)?;
    }
    Ok(())
}

// --------------------------------------------------------------------- sweep

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SweepKind {
    /// BLER and f(t) against the rate k/n.
    Rate,
    /// Gate count needed to match the ideal random code.
    MinGates,
    /// BLER against p at a fixed rate.
    PThreshold,
    /// Greedy against random stabilizer ordering across noise entropies.
    Ordering,
    /// Correction probability and code quality against the number of equiprobable patterns.
    Success,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Sweep to run.
    #[arg(long, value_enum)]
    kind: Option<SweepKind>,
    /// Master seed; every code sample derives its seed from it. Required.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination [default: stdout].
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// JSON metadata destination [default: OUTPUT with extension .json; none for stdout].
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Code samples per point [default: 31; success: 500].
    #[arg(long)]
    samples: Option<usize>,
    /// Random gates per code [default: 2000] (rate, p-threshold, ordering, success).
    #[arg(long)]
    gates: Option<usize>,
    /// Physical qubits [default: rate 32, ordering 30, success 16].
    #[arg(long)]
    n: Option<usize>,
    /// Logical qubits [default: 1] (ordering, success).
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated k values [default: 1..=n] (rate).
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    /// Maximum listed error weight [default: 3] (rate, p-threshold).
    #[arg(long)]
    t: Option<usize>,
    /// Depolarizing probability per qubit [default: 0.01] (rate).
    #[arg(long)]
    p: Option<f64>,
    /// Further probabilities evaluated on the same codes [default: 0.001] (rate).
    #[arg(long, value_delimiter = ',')]
    extra_p: Option<Vec<f64>>,
    /// Comma-separated code lengths [default: 16,32,64] (min-gates, p-threshold).
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Code rate k/n, k = round(R·n) [default: 0.7] (p-threshold).
    #[arg(long)]
    rate: Option<f64>,
    /// Comma-separated probabilities [default: 0.001 … 0.1] (p-threshold).
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    /// Comma-separated error weights [default: 1,2] (min-gates).
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<usize>>,
    /// Threshold on δ_f and δ_P [default: 0.02] (min-gates).
    #[arg(long)]
    delta: Option<f64>,
    /// Gate counts as multiples m of n·log₂²n [default: 0.01,0.02,…,0.60] (min-gates).
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<f64>>,
    /// k per length: fixed:K, rate:R or redundancy:S [default: fixed:1] (min-gates).
    #[arg(long)]
    k_rule: Option<String>,
    /// Comma-separated noise entropies in bits [default: 0.5,1,…,6,log₂(3n+1)] (ordering).
    #[arg(long, value_delimiter = ',')]
    entropy_grid: Option<Vec<f64>>,
    /// Comma-separated distribution shapes: decaying, constant [default: both] (ordering).
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    /// Comma-separated pattern counts N [default: 1,8,32,64,128,256,512,819] (success).
    #[arg(long, value_delimiter = ',')]
    pattern_counts: Option<Vec<u64>>,
    /// lowest-weight or random [default: random] (success).
    #[arg(long)]
    pattern_set: Option<String>,
}

impl SweepArgs {
    fn merged(self, file: SweepArgs) -> SweepArgs {
        SweepArgs {
            config: self.config,
            kind: merge(self.kind, file.kind),
            seed: merge(self.seed, file.seed),
            output: merge(self.output, file.output),
            metadata: merge(self.metadata, file.metadata),
            samples: merge(self.samples, file.samples),
            gates: merge(self.gates, file.gates),
            n: merge(self.n, file.n),
            k: merge(self.k, file.k),
            k_list: merge(self.k_list, file.k_list),
            t: merge(self.t, file.t),
            p: merge(self.p, file.p),
            extra_p: merge(self.extra_p, file.extra_p),
            n_list: merge(self.n_list, file.n_list),
            rate: merge(self.rate, file.rate),
            p_grid: merge(self.p_grid, file.p_grid),
            t_list: merge(self.t_list, file.t_list),
            delta: merge(self.delta, file.delta),
            m_grid: merge(self.m_grid, file.m_grid),
            k_rule: merge(self.k_rule, file.k_rule),
            entropy_grid: merge(self.entropy_grid, file.entropy_grid),
            kinds: merge(self.kinds, file.kinds),
            pattern_counts: merge(self.pattern_counts, file.pattern_counts),
            pattern_set: merge(self.pattern_set, file.pattern_set),
        }
    }

    /// Names of parameters that were set but are ignored by `kind`.
    fn unused(&self, kind: SweepKind) -> Vec<&'static str> {
        use SweepKind::*;
        let checks: [(&str, bool, &[SweepKind]); 19] = [
            ("gates", self.gates.is_some(), &[Rate, PThreshold, Ordering, Success]),
            ("n", self.n.is_some(), &[Rate, Ordering, Success]),
            ("k", self.k.is_some(), &[Ordering, Success]),
            ("k-list", self.k_list.is_some(), &[Rate]),
            ("t", self.t.is_some(), &[Rate, PThreshold]),
            ("p", self.p.is_some(), &[Rate]),
            ("extra-p", self.extra_p.is_some(), &[Rate]),
            ("n-list", self.n_list.is_some(), &[MinGates, PThreshold]),
            ("rate", self.rate.is_some(), &[PThreshold]),
            ("p-grid", self.p_grid.is_some(), &[PThreshold]),
            ("t-list", self.t_list.is_some(), &[MinGates]),
            ("delta", self.delta.is_some(), &[MinGates]),
            ("m-grid", self.m_grid.is_some(), &[MinGates]),
            ("k-rule", self.k_rule.is_some(), &[MinGates]),
            ("entropy-grid", self.entropy_grid.is_some(), &[Ordering]),
            ("kinds", self.kinds.is_some(), &[Ordering]),
            ("pattern-counts", self.pattern_counts.is_some(), &[Success]),
            ("pattern-set", self.pattern_set.is_some(), &[Success]),
            ("samples", false, &[]),
        ];
        checks
            .iter()
            .filter(|(_, set, kinds)| *set && !kinds.contains(&kind))
            .map(|(name, _, _)| *name)
            .collect()
    }
}

const DEFAULT_P_GRID: [f64; 7] = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1];
const DEFAULT_PATTERN_COUNTS: [u64; 8] = [1, 8, 32, 64, 128, 256, 512, 819];

fn parse_all<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>> {
    items.iter().map(|s| s.trim().parse()).collect()
}

fn metadata_path(args: &SweepArgs) -> Option<PathBuf> {
    match (&args.metadata, &args.output) {
        (Some(m), _) => Some(m.clone()),
        (None, Some(o)) if o != Path::new("-") => Some(o.with_extension("json")),
        _ => None,
    }
}

fn cmd_sweep(args: SweepArgs, threads: Option<usize>) -> Result<()> {
    let file: SweepArgs = read_config(args.config.as_deref())?;
    let args = args.merged(file);
    let kind = required(args.kind, "kind")?;
    let seed = args
        .seed
        .ok_or_else(|| invalid("sweeps need an explicit --seed (or `seed` in the config file)"))?;
    let unused = args.unused(kind);
    if !unused.is_empty() {
        return Err(invalid(format!("parameters not used by this sweep kind: {}", unused.join(", "))));
    }
    let samples = args.samples.unwrap_or(if kind == SweepKind::Success { 500 } else { 31 });
    let gates = args.gates.unwrap_or(2000);
    let start = Instant::now();
    let (rows, mut meta): (Vec<SweepRow>, Metadata) = match kind {
        SweepKind::Rate => {
            let n = args.n.unwrap_or(32);
            let cfg = RateSweepConfig {
                n,
                k_list: args.k_list.clone().unwrap_or_else(|| (1..=n).collect()),
                t: args.t.unwrap_or(3),
                p: args.p.unwrap_or(0.01),
                extra_p: args.extra_p.clone().unwrap_or_else(|| vec![0.001]),
                num_gates: gates,
                samples,
                master_seed: seed,
            };
            let r = with_threads(threads, || sweep_rate(&cfg))??;
            (r.rows(), r.metadata())
        }
        SweepKind::PThreshold => {
            let cfg = ThresholdSweepConfig {
                n_list: args.n_list.clone().unwrap_or_else(|| vec![16, 32, 64]),
                rate: args.rate.unwrap_or(0.7),
                p_grid: args.p_grid.clone().unwrap_or_else(|| DEFAULT_P_GRID.to_vec()),
                t: args.t.unwrap_or(3),
                num_gates: gates,
                samples,
                master_seed: seed,
            };
            let r = with_threads(threads, || p_threshold_sweep(&cfg))??;
            (r.rows(), r.metadata())
        }
        SweepKind::MinGates => {
            let cfg = MinGatesConfig {
                n_list: args.n_list.clone().unwrap_or_else(|| vec![16, 32, 64]),
                k_rule: match &args.k_rule {
                    Some(s) => s.parse()?,
                    None => KRule::Fixed(1),
                },
                t_list: args.t_list.clone().unwrap_or_else(|| vec![1, 2]),
                delta_threshold: args.delta.unwrap_or(0.02),
                samples,
                master_seed: seed,
                m_grid: args
                    .m_grid
                    .clone()
                    .unwrap_or_else(|| (1..=60).map(|i| i as f64 / 100.0).collect()),
            };
            let r = with_threads(threads, || min_gates_experiment(&cfg))??;
            (r.rows(), r.metadata())
        }
        SweepKind::Ordering => {
            let n = args.n.unwrap_or(30);
            let cfg = OrderingStudyConfig {
                n,
                k: args.k.unwrap_or(1),
                num_gates: gates,
                entropy_grid: args.entropy_grid.clone().unwrap_or_else(|| {
                    let mut g = vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
                    let h_max = ((3 * n + 1) as f64).log2();
                    g.retain(|&h| h < h_max);
                    g.push(h_max);
                    g
                }),
                kinds: match &args.kinds {
                    Some(k) => parse_all::<SyntheticKind>(k)?,
                    None => vec![SyntheticKind::Decaying, SyntheticKind::Constant],
                },
                samples,
                master_seed: seed,
            };
            let r = with_threads(threads, || ordering_study(&cfg))??;
            (r.rows(), r.metadata())
        }
        SweepKind::Success => {
            let cfg = SuccessStudyConfig {
                n: args.n.unwrap_or(16),
                k: args.k.unwrap_or(1),
                num_gates: gates,
                pattern_counts: args.pattern_counts.clone().unwrap_or_else(|| DEFAULT_PATTERN_COUNTS.to_vec()),
                pattern_set: match &args.pattern_set {
                    Some(s) => s.parse()?,
                    None => PatternSet::Random,
                },
                samples,
                master_seed: seed,
            };
            let r = with_threads(threads, || success_study(&cfg))??;
            (r.rows(), r.metadata())
        }
    };
    meta.wall_time_seconds = start.elapsed().as_secs_f64();
    meta.threads = threads;
    let mut w = output_writer(args.output.as_deref())?;
    experiments::write_rows(&mut w, &rows)?;
    w.flush()?;
    if let Some(path) = metadata_path(&args) {
        let mut m = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut m, &meta)?;
        writeln!(m)?;
        m.flush()?;
    }
    Ok(())
}

// ------------------------------------------------------------------ simulate

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Code file produced by `generate`.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Per-qubit depolarizing probability p (0 ≤ p ≤ 3/4).
    #[arg(long)]
    p: Option<f64>,
    /// Maximum listed error weight t [default: 1].
    #[arg(long)]
    t: Option<usize>,
    /// Explicit noise statistics CSV instead of --p/--t.
    #[arg(long)]
    noise_file: Option<PathBuf>,
    /// Number of trials [default: 1000].
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed for error sampling. Required.
    #[arg(long)]
    seed: Option<u64>,
    /// membership (guess and test) or syndrome (table lookup) [default: syndrome].
    #[arg(long)]
    mode: Option<String>,
    /// Give up after this many candidate patterns (abandonment threshold).
    #[arg(long)]
    abandon_after: Option<u64>,
    /// Patterns whose syndromes are stored in the table; later ones are found on the fly.
    #[arg(long)]
    precompute_limit: Option<u64>,
    /// Trial log CSV destination [default: none].
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn cmd_simulate(args: SimulateArgs, threads: Option<usize>) -> Result<()> {
    let file: SimulateArgs = read_config(args.config.as_deref())?;
    let code = QuantumCode::load(required(merge(args.code, file.code), "code")?)?;
    let noise = load_noise(
        code.n(),
        merge(args.p, file.p),
        merge(args.t, file.t),
        merge(args.noise_file, file.noise_file).as_deref(),
    )?;
    let seed = required(merge(args.seed, file.seed), "seed")?;
    let trials = merge(args.trials, file.trials).unwrap_or(1000);
    let mode: DecodingMode = match merge(args.mode, file.mode) {
        Some(m) => m.parse()?,
        None => DecodingMode::SyndromeDecoding,
    };
    let abandon_after = merge(args.abandon_after, file.abandon_after);
    let precompute_limit = merge(args.precompute_limit, file.precompute_limit);
    let (table, records) = with_threads(threads, || -> Result<_> {
        let table = SyndromeTable::build(&code, &noise, precompute_limit)?;
        let records = run_trials(&table, mode, abandon_after, trials, seed);
        Ok((table, records))
    })??;
    if let Some(path) = merge(args.output, file.output) {
        write_trial_log(BufWriter::new(File::create(path)?), table.s(), &records)?;
    }
    let summary = summarize_trials(mode, &records);
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a, cli.threads),
        Command::Simulate(a) => cmd_simulate(a, cli.threads),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() {
    std::process::exit(run(std::env::args_os()));
}
