//! Semi-analytic evaluation of sampled codes and sweep harnesses.
//!
//! Every code sample is built from a seed derived from
//! `(master_seed, axis_index, sample_index)` by [`derive_seed`], so the
//! results do not depend on the number of worker threads. Percentile
//! bands are nearest-rank order statistics of the samples.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{self, pattern_counts_f64};
use crate::code::{build_qrlc, Connectivity, QuantumCode};
use crate::decoder::{
    greedy_ordering, random_ordering_cost, simulate_trial, DecodingMode, SyndromeMatrix, SyndromeTable, TrialRecord,
};
use crate::error::{check_dims, invalid, Error, Result};
use crate::noise::{bernoulli_model, synthetic_distribution, NoiseModel, SyntheticKind};
use crate::pauli::{Letter, PauliString};

/// Lower and upper quantiles of the reported band.
pub const BAND: (f64, f64) = (0.10, 0.90);
pub const BAND_METHOD: &str = "nearest-rank order statistics, 10th and 90th percentiles";

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// `h(h(h(master) ⊕ axis) ⊕ sample)` with `h` the SplitMix64 finalizer.
pub fn derive_seed(master: u64, axis_index: u64, sample_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ axis_index) ^ sample_index)
}

/// Runs `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(invalid("thread count must be ≥ 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Assertion(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub p10: f64,
    pub p90: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    let rank = ((q * m as f64).ceil() as usize).clamp(1, m);
    sorted[rank - 1]
}

/// Sample mean, standard deviation and order-statistic band.
pub fn summarize(values: &[f64]) -> Summary {
    if values.is_empty() {
        return Summary {
            mean: f64::NAN,
            std: f64::NAN,
            p10: f64::NAN,
            p90: f64::NAN,
            min: f64::NAN,
            max: f64::NAN,
            samples: 0,
        };
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Summary {
        mean,
        std: var.sqrt(),
        p10: nearest_rank(&sorted, BAND.0),
        p90: nearest_rank(&sorted, BAND.1),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        samples: values.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseSummary {
    pub bernoulli_p: Option<f64>,
    pub t_max: usize,
    pub listed_patterns: u64,
    pub p0: f64,
    pub residual: f64,
    pub entropy_bits: f64,
    pub full_channel_entropy_bits: Option<f64>,
}

impl NoiseSummary {
    pub fn of(noise: &NoiseModel) -> Self {
        NoiseSummary {
            bernoulli_p: noise.bernoulli_p(),
            t_max: noise.t_max(),
            listed_patterns: noise.len(),
            p0: noise.p0(),
            residual: noise.residual(),
            entropy_bits: noise.entropy_bits(),
            full_channel_entropy_bits: noise
                .bernoulli_p()
                .map(|p| crate::noise::full_channel_entropy(noise.n(), p)),
        }
    }
}

/// Per-code evaluation results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub k: usize,
    pub num_gates: usize,
    pub seed: u64,
    pub noise: NoiseSummary,
    /// Fraction of listed weight-`t` patterns that are coset leaders, `t ≥ 1`.
    pub f_by_weight: BTreeMap<usize, f64>,
    pub leaders_by_weight: BTreeMap<usize, u64>,
    pub patterns_by_weight: BTreeMap<usize, u64>,
    /// `Σ` of leader probabilities.
    pub success_prob: f64,
    /// Success counting patterns equivalent to their leader as corrected.
    pub success_with_degenerate: f64,
    /// Residual mass plus every non-leader mass.
    pub bler: f64,
    /// BLER conditioned on the error being listed.
    pub conditional_bler: f64,
    pub f_min_bound: f64,
    pub unique_syndromes: u64,
    pub collisions: u64,
    pub degenerate_count: u64,
    pub degenerate_mass: f64,
}

impl EvalReport {
    pub fn from_table(code: &QuantumCode, noise: &NoiseModel, table: &SyndromeTable) -> Self {
        let f_by_weight = table
            .patterns_by_weight()
            .iter()
            .filter(|(&w, _)| w >= 1)
            .map(|(&w, &count)| {
                let leaders = table.leaders_by_weight().get(&w).copied().unwrap_or(0);
                (w, leaders as f64 / count as f64)
            })
            .collect();
        let residual = noise.residual();
        let bler = (residual + table.collision_mass()).clamp(0.0, 1.0);
        let listed = 1.0 - residual;
        EvalReport {
            n: code.n(),
            k: code.k(),
            num_gates: code.gates().len(),
            seed: code.seed(),
            noise: NoiseSummary::of(noise),
            f_by_weight,
            leaders_by_weight: table.leaders_by_weight().clone(),
            patterns_by_weight: table.patterns_by_weight().clone(),
            success_prob: table.success_probability(),
            success_with_degenerate: table.success_probability() + table.degenerate_mass(),
            bler,
            conditional_bler: if listed > 0.0 {
                (table.collision_mass() / listed).clamp(0.0, 1.0)
            } else {
                1.0
            },
            f_min_bound: 1.0 - bler,
            unique_syndromes: table.occupied(),
            collisions: table.collision_count(),
            degenerate_count: table.degenerate_count(),
            degenerate_mass: table.degenerate_mass(),
        }
    }

    /// BLER of the same code under a depolarizing channel with a different
    /// `p`, reusing the leader counts (the pattern order does not depend on `p`).
    pub fn bler_at(&self, p: f64) -> Result<(f64, f64)> {
        let model = bernoulli_model(self.n, p, self.noise.t_max)?;
        let mass = model.mass_by_weight();
        let mut collisions = 0.0;
        for (w, &count) in &self.patterns_by_weight {
            let leaders = self.leaders_by_weight.get(w).copied().unwrap_or(0);
            collisions += mass[w] * (count - leaders) as f64 / count as f64;
        }
        let residual = model.residual();
        Ok((
            (residual + collisions).clamp(0.0, 1.0),
            (collisions / (1.0 - residual)).clamp(0.0, 1.0),
        ))
    }
}

/// Streams the noise model, builds the syndrome table and reports.
pub fn evaluate_code(code: &QuantumCode, noise: &NoiseModel) -> Result<EvalReport> {
    check_dims(code.n(), noise.n())?;
    let table = SyndromeTable::build(code, noise, None)?;
    Ok(EvalReport::from_table(code, noise, &table))
}

/// `Σ_{i=start}^{start+count−1} [1 − (1 − 1/S)^i]`, the expected number of
/// non-leaders among those entries of an ideal random code.
pub fn ideal_collisions(s: f64, start: f64, count: f64) -> f64 {
    if count <= 0.0 {
        return 0.0;
    }
    if s <= 1.0 {
        return count - if start == 0.0 { 1.0 } else { 0.0 };
    }
    let l = (-1.0 / s).ln_1p();
    count - s * (start * l).exp() * -(count * l).exp_m1()
}

/// BLER of an ideal random code with `S = 2^s` syndromes.
pub fn ideal_bler(s_bits: usize, noise: &NoiseModel) -> f64 {
    let s = 2f64.powi(s_bits as i32);
    let collisions = if noise.bernoulli_p().is_some() {
        let mass = noise.mass_by_weight();
        let mut start = 0.0;
        let mut acc = 0.0;
        for (w, &count) in &noise.count_by_weight() {
            let c = count as f64;
            acc += mass[w] / c * ideal_collisions(s, start, c);
            start += c;
        }
        acc
    } else {
        let l = (-1.0 / s).ln_1p();
        noise
            .iter()
            .map(|e| {
                let miss = if s <= 1.0 {
                    if e.index == 0 { 1.0 } else { 0.0 }
                } else {
                    (e.index as f64 * l).exp()
                };
                e.probability * (1.0 - miss)
            })
            .sum()
    };
    (noise.residual() + collisions).clamp(0.0, 1.0)
}

/// One aggregated row in a sweep output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep: &'static str,
    pub n: usize,
    pub k: usize,
    pub gates: usize,
    pub axis: &'static str,
    pub axis_value: f64,
    pub series: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub p10: f64,
    pub p90: f64,
    pub samples: usize,
    pub ideal_overlay: Option<f64>,
    pub seed: u64,
}

impl SweepRow {
    #[allow(clippy::too_many_arguments)]
    fn new(
        sweep: &'static str,
        (n, k, gates): (usize, usize, usize),
        axis: &'static str,
        axis_value: f64,
        series: &str,
        metric: &str,
        summary: &Summary,
        ideal_overlay: Option<f64>,
        seed: u64,
    ) -> Self {
        SweepRow {
            sweep,
            n,
            k,
            gates,
            axis,
            axis_value,
            series: series.into(),
            metric: metric.into(),
            mean: summary.mean,
            std: summary.std,
            p10: summary.p10,
            p90: summary.p90,
            samples: summary.samples,
            ideal_overlay,
            seed,
        }
    }
}

/// Writes rows as CSV with a header.
pub fn write_rows<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record([
            "sweep", "n", "k", "gates", "axis", "axis_value", "series", "metric", "mean", "std", "p10", "p90",
            "samples", "ideal_overlay", "seed",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Sidecar metadata describing how a sweep was produced.
#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub sweep: String,
    pub config: serde_json::Value,
    pub band_method: &'static str,
    pub seed_derivation: &'static str,
    pub notes: Vec<String>,
    pub wall_time_seconds: f64,
    pub threads: Option<usize>,
}

impl Metadata {
    pub fn new(sweep: &str, config: serde_json::Value) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            sweep: sweep.into(),
            config,
            band_method: BAND_METHOD,
            seed_derivation: "splitmix64(splitmix64(splitmix64(master) ^ axis_index) ^ sample_index)",
            notes: Vec::new(),
            wall_time_seconds: 0.0,
            threads: None,
        }
    }
}

fn sample_note(samples: usize) -> Option<String> {
    (samples < 31).then(|| format!("{samples} code samples per point, fewer than the 31 of the reference runs"))
}

// ---------------------------------------------------------------- rate sweep

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct RateSweepConfig {
    pub n: usize,
    pub k_list: Vec<usize>,
    pub t: usize,
    pub p: f64,
    /// Extra depolarizing probabilities evaluated on the same codes.
    #[serde(default)]
    pub extra_p: Vec<f64>,
    pub num_gates: usize,
    pub samples: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatePoint {
    pub k: usize,
    pub rate: f64,
    pub reports: Vec<EvalReport>,
    /// `(p, bler summary, conditional summary, ideal bler)` for `p` and every extra `p`.
    pub bler: Vec<(f64, Summary, Summary, f64)>,
    /// `t → (measured summary, ideal fraction)`.
    pub f_by_weight: BTreeMap<usize, (Summary, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateSweep {
    pub config: RateSweepConfig,
    pub points: Vec<RatePoint>,
}

/// Evaluates `samples` codes per `k` and aggregates BLER and `f(t)`.
/// `k = n` leaves no stabilizers: every error is undetectable.
pub fn sweep_rate(cfg: &RateSweepConfig) -> Result<RateSweep> {
    if cfg.samples == 0 || cfg.k_list.is_empty() {
        return Err(invalid("rate sweep needs samples ≥ 1 and at least one k"));
    }
    if cfg.k_list.iter().any(|&k| k == 0 || k > cfg.n) {
        return Err(invalid("every k must satisfy 1 ≤ k ≤ n"));
    }
    let noise = bernoulli_model(cfg.n, cfg.p, cfg.t)?;
    let all_p: Vec<f64> = std::iter::once(cfg.p).chain(cfg.extra_p.iter().copied()).collect();
    let extra_models: Vec<NoiseModel> = all_p
        .iter()
        .map(|&p| bernoulli_model(cfg.n, p, cfg.t))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.k_list.len())
        .flat_map(|a| (0..cfg.samples).map(move |i| (a, i)))
        .collect();
    let reports: Vec<Option<EvalReport>> = jobs
        .par_iter()
        .map(|&(a, i)| {
            let k = cfg.k_list[a];
            if k == cfg.n {
                return Ok(None);
            }
            let seed = derive_seed(cfg.master_seed, a as u64, i as u64);
            let code = build_qrlc(cfg.n, k, cfg.num_gates, Connectivity::AllToAll, seed)?;
            evaluate_code(&code, &noise).map(Some)
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for (a, &k) in cfg.k_list.iter().enumerate() {
        let chunk: Vec<EvalReport> = reports[a * cfg.samples..(a + 1) * cfg.samples]
            .iter()
            .flatten()
            .cloned()
            .collect();
        let s = cfg.n - k;
        let mut bler = Vec::new();
        for (&p, model) in all_p.iter().zip(&extra_models) {
            let (b, c): (Vec<f64>, Vec<f64>) = if k == cfg.n {
                let b = 1.0 - model.p0();
                let c = (1.0 - model.p0() - model.residual()) / (1.0 - model.residual());
                (vec![b; cfg.samples], vec![c; cfg.samples])
            } else {
                chunk.iter().map(|r| r.bler_at(p)).collect::<Result<Vec<_>>>()?.into_iter().unzip()
            };
            bler.push((p, summarize(&b), summarize(&c), ideal_bler(s, model)));
        }
        let mut f_by_weight = BTreeMap::new();
        for t in 1..=cfg.t {
            let values: Vec<f64> = if k == cfg.n {
                vec![0.0; cfg.samples]
            } else {
                chunk.iter().map(|r| r.f_by_weight[&t]).collect()
            };
            let ideal = analytics::ideal_weight_fraction(2f64.powi(s as i32), cfg.n, t)?.exact;
            f_by_weight.insert(t, (summarize(&values), ideal));
        }
        points.push(RatePoint {
            k,
            rate: k as f64 / cfg.n as f64,
            reports: chunk,
            bler,
            f_by_weight,
        });
    }
    Ok(RateSweep {
        config: cfg.clone(),
        points,
    })
}

impl RateSweep {
    pub fn rows(&self) -> Vec<SweepRow> {
        let c = &self.config;
        let mut rows = Vec::new();
        for pt in &self.points {
            let id = (c.n, pt.k, c.num_gates);
            for (p, b, cond, ideal) in &pt.bler {
                let series = format!("p={p}");
                rows.push(SweepRow::new("rate", id, "rate", pt.rate, &series, "bler", b, Some(*ideal), c.master_seed));
                rows.push(SweepRow::new("rate", id, "rate", pt.rate, &series, "conditional_bler", cond, None, c.master_seed));
            }
            for (t, (f, ideal)) in &pt.f_by_weight {
                rows.push(SweepRow::new(
                    "rate",
                    id,
                    "rate",
                    pt.rate,
                    &format!("p={}", c.p),
                    &format!("f{t}"),
                    f,
                    Some(*ideal),
                    c.master_seed,
                ));
            }
        }
        rows
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new("rate", serde_json::to_value(&self.config).expect("config serializes"));
        m.notes.extend(sample_note(self.config.samples));
        m.notes.push("bler counts residual mass (weight > t) as failure; conditional_bler excludes it".into());
        m
    }
}

// ---------------------------------------------------------- p-threshold sweep

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct ThresholdSweepConfig {
    pub n_list: Vec<usize>,
    pub rate: f64,
    pub p_grid: Vec<f64>,
    pub t: usize,
    pub num_gates: usize,
    pub samples: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdPoint {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub bler: Summary,
    pub conditional_bler: Summary,
    pub ideal_bler: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdSweep {
    pub config: ThresholdSweepConfig,
    pub points: Vec<ThresholdPoint>,
}

/// `k = round(R·n)`, clamped to `[1, n − 1]`.
pub fn k_for_rate(n: usize, rate: f64) -> usize {
    ((rate * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1))
}

/// BLER against `p` at a fixed rate for several code lengths.
pub fn p_threshold_sweep(cfg: &ThresholdSweepConfig) -> Result<ThresholdSweep> {
    if cfg.samples == 0 || cfg.n_list.is_empty() || cfg.p_grid.is_empty() {
        return Err(invalid("threshold sweep needs samples, code lengths and probabilities"));
    }
    if !(cfg.rate > 0.0 && cfg.rate < 1.0) {
        return Err(invalid(format!("rate must be in (0, 1), got {}", cfg.rate)));
    }
    let reference_p = cfg.p_grid[0];
    let jobs: Vec<(usize, usize)> = (0..cfg.n_list.len())
        .flat_map(|a| (0..cfg.samples).map(move |i| (a, i)))
        .collect();
    let reports: Vec<EvalReport> = jobs
        .par_iter()
        .map(|&(a, i)| {
            let n = cfg.n_list[a];
            let noise = bernoulli_model(n, reference_p, cfg.t.min(n))?;
            let seed = derive_seed(cfg.master_seed, a as u64, i as u64);
            let code = build_qrlc(n, k_for_rate(n, cfg.rate), cfg.num_gates, Connectivity::AllToAll, seed)?;
            evaluate_code(&code, &noise)
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for (a, &n) in cfg.n_list.iter().enumerate() {
        let chunk = &reports[a * cfg.samples..(a + 1) * cfg.samples];
        let k = k_for_rate(n, cfg.rate);
        for &p in &cfg.p_grid {
            let (b, c): (Vec<f64>, Vec<f64>) =
                chunk.iter().map(|r| r.bler_at(p)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
            let model = bernoulli_model(n, p, cfg.t.min(n))?;
            points.push(ThresholdPoint {
                n,
                k,
                p,
                bler: summarize(&b),
                conditional_bler: summarize(&c),
                ideal_bler: ideal_bler(n - k, &model),
            });
        }
    }
    Ok(ThresholdSweep {
        config: cfg.clone(),
        points,
    })
}

impl ThresholdSweep {
    pub fn rows(&self) -> Vec<SweepRow> {
        let c = &self.config;
        let mut rows = Vec::new();
        for pt in &self.points {
            let id = (pt.n, pt.k, c.num_gates);
            let series = format!("n={}", pt.n);
            rows.push(SweepRow::new("p-threshold", id, "p", pt.p, &series, "bler", &pt.bler, Some(pt.ideal_bler), c.master_seed));
            rows.push(SweepRow::new(
                "p-threshold",
                id,
                "p",
                pt.p,
                &series,
                "conditional_bler",
                &pt.conditional_bler,
                None,
                c.master_seed,
            ));
        }
        rows
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new("p-threshold", serde_json::to_value(&self.config).expect("config serializes"));
        m.notes.extend(sample_note(self.config.samples));
        m.notes.push("k = round(rate·n); bler counts residual mass as failure".into());
        m
    }
}

// ------------------------------------------------------------ minimum gates

/// How `k` is chosen for each code length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum KRule {
    Fixed(usize),
    Rate(f64),
    /// `k = n − s` for a fixed number of stabilizers.
    Redundancy(usize),
}

impl KRule {
    pub fn k_for(&self, n: usize) -> Result<usize> {
        let k = match *self {
            KRule::Fixed(k) => k,
            KRule::Rate(r) => k_for_rate(n, r),
            KRule::Redundancy(s) => n.checked_sub(s).ok_or_else(|| invalid(format!("s = {s} exceeds n = {n}")))?,
        };
        if k == 0 || k >= n {
            return Err(invalid(format!("k rule gives k = {k} for n = {n}")));
        }
        Ok(k)
    }
}

impl std::str::FromStr for KRule {
    type Err = Error;

    /// `fixed:K`, `rate:R` or `redundancy:S`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("k rule must be fixed:K, rate:R or redundancy:S, got {s:?}"));
        let (name, value) = s.split_once(':').ok_or_else(bad)?;
        match name {
            "fixed" => value.parse().map(KRule::Fixed).map_err(|_| bad()),
            "rate" => value.parse().map(KRule::Rate).map_err(|_| bad()),
            "redundancy" => value.parse().map(KRule::Redundancy).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct MinGatesConfig {
    pub n_list: Vec<usize>,
    pub k_rule: KRule,
    pub t_list: Vec<usize>,
    pub delta_threshold: f64,
    pub samples: usize,
    pub master_seed: u64,
    /// Gate counts scanned, as multiples `m` of `n·log₂²n`.
    pub m_grid: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinGatesPoint {
    pub n: usize,
    pub k: usize,
    pub gates: usize,
    pub t: usize,
    pub f: Summary,
    pub f_theory: f64,
    /// `(f_theory − f_exp)/f_theory`.
    pub delta_f: f64,
    /// Fraction of codes correcting every listed pattern of weight ≤ t.
    pub p_all_exp: f64,
    pub p_all_theory: f64,
    /// `P_theory − P_exp`.
    pub delta_p: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinGatesLength {
    pub n: usize,
    pub k: usize,
    /// Smallest scanned gate count with `δ_f` below the threshold for
    /// every `t`; `None` when censored by the grid.
    pub n_min_mean_code: Option<usize>,
    /// Same with `δ_P` for `t = 1`.
    pub n_min_all_t1: Option<usize>,
    pub m_mean_code: Option<f64>,
    pub m_all_t1: Option<f64>,
    /// Smallest scanned gate count from which `δ_f` stays below the threshold.
    pub sustained_mean_code: Option<usize>,
    /// Smallest scanned gate count from which `δ_P` stays below the threshold.
    pub sustained_all_t1: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinGates {
    pub config: MinGatesConfig,
    pub points: Vec<MinGatesPoint>,
    pub lengths: Vec<MinGatesLength>,
    /// Least-squares slope of `N_min` against `n·log₂²n` through the origin.
    pub m_fit_mean_code: Option<f64>,
    pub m_fit_all_t1: Option<f64>,
}

fn scale(n: usize) -> f64 {
    let l = (n as f64).log2();
    n as f64 * l * l
}

/// First grid index from which `ok` holds at every later index.
fn sustained_from(ok: &[bool]) -> Option<usize> {
    let last_bad = ok.iter().rposition(|&b| !b);
    match last_bad {
        None => Some(0),
        Some(i) if i + 1 < ok.len() => Some(i + 1),
        Some(_) => None,
    }
}

fn fit_through_origin(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let sxy: f64 = pairs.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    Some(sxy / sxx)
}

/// Scans gate counts upward and records where sampled codes reach the
/// ideal random-code correctable fraction. Each sample extends a single
/// random circuit, so successive gate counts share their gate prefix.
pub fn min_gates_experiment(cfg: &MinGatesConfig) -> Result<MinGates> {
    if cfg.samples == 0 || cfg.n_list.is_empty() || cfg.t_list.is_empty() || cfg.m_grid.is_empty() {
        return Err(invalid("minimum-gate experiment needs samples, lengths, weights and a gate grid"));
    }
    if cfg.m_grid.windows(2).any(|w| w[1] <= w[0]) || cfg.m_grid[0] < 0.0 {
        return Err(invalid("gate grid must be non-negative and increasing"));
    }
    let t_max = *cfg.t_list.iter().max().expect("non-empty");
    if cfg.t_list.contains(&0) {
        return Err(invalid("weights must be ≥ 1"));
    }
    let mut points = Vec::new();
    let mut lengths = Vec::new();
    for (a, &n) in cfg.n_list.iter().enumerate() {
        let k = cfg.k_rule.k_for(n)?;
        let s = n - k;
        let grid: Vec<usize> = cfg.m_grid.iter().map(|m| (m * scale(n)).round() as usize).collect();
        let max_gates = *grid.last().expect("non-empty");
        // any p gives the same pattern order
        let noise = bernoulli_model(n, 0.01, t_max.min(n))?;
        // per sample: f(t) at every grid point
        let per_sample: Vec<Vec<BTreeMap<usize, f64>>> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.master_seed, a as u64, i as u64);
                let full = build_qrlc(n, k, max_gates, Connectivity::AllToAll, seed)?;
                grid.iter()
                    .map(|&g| {
                        let code = QuantumCode::from_circuit(n, k, full.gates()[..g].to_vec(), Connectivity::AllToAll, seed)?;
                        Ok(evaluate_code(&code, &noise)?.f_by_weight)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let syndromes = 2f64.powi(s as i32);
        let mut ok_f = vec![true; grid.len()];
        let mut ok_p = vec![true; grid.len()];
        for (gi, &g) in grid.iter().enumerate() {
            for &t in &cfg.t_list {
                let f_vals: Vec<f64> = per_sample.iter().map(|v| v[gi][&t]).collect();
                let f = summarize(&f_vals);
                let f_theory = analytics::ideal_weight_fraction(syndromes, n, t)?.exact;
                let delta_f = (f_theory - f.mean) / f_theory;
                let all_correct = |v: &BTreeMap<usize, f64>| (1..=t).all(|w| v[&w] == 1.0);
                let p_all_exp = per_sample.iter().filter(|v| all_correct(&v[gi])).count() as f64 / cfg.samples as f64;
                let (_, b_t) = pattern_counts_f64(n, t);
                let p_all_theory = analytics::p_all_distinct(syndromes, b_t as u64 - 1)?.exact;
                let delta_p = p_all_theory - p_all_exp;
                ok_f[gi] &= delta_f < cfg.delta_threshold;
                if t == 1 {
                    ok_p[gi] = delta_p < cfg.delta_threshold;
                }
                points.push(MinGatesPoint {
                    n,
                    k,
                    gates: g,
                    t,
                    f,
                    f_theory,
                    delta_f,
                    p_all_exp,
                    p_all_theory,
                    delta_p,
                });
            }
        }
        let has_t1 = cfg.t_list.contains(&1);
        let first = |ok: &[bool]| ok.iter().position(|&b| b).map(|i| grid[i]);
        let n_min_mean_code = first(&ok_f);
        let n_min_all_t1 = if has_t1 { first(&ok_p) } else { None };
        lengths.push(MinGatesLength {
            n,
            k,
            n_min_mean_code,
            n_min_all_t1,
            m_mean_code: n_min_mean_code.map(|g| g as f64 / scale(n)),
            m_all_t1: n_min_all_t1.map(|g| g as f64 / scale(n)),
            sustained_mean_code: sustained_from(&ok_f).map(|i| grid[i]),
            sustained_all_t1: if has_t1 { sustained_from(&ok_p).map(|i| grid[i]) } else { None },
        });
    }
    let fit = |pick: fn(&MinGatesLength) -> Option<usize>| {
        let pairs: Vec<(f64, f64)> = lengths
            .iter()
            .filter_map(|l| pick(l).map(|g| (scale(l.n), g as f64)))
            .collect();
        fit_through_origin(&pairs)
    };
    Ok(MinGates {
        config: cfg.clone(),
        m_fit_mean_code: fit(|l| l.n_min_mean_code),
        m_fit_all_t1: fit(|l| l.n_min_all_t1),
        points,
        lengths,
    })
}

impl MinGates {
    pub fn rows(&self) -> Vec<SweepRow> {
        let seed = self.config.master_seed;
        let mut rows = Vec::new();
        for pt in &self.points {
            let id = (pt.n, pt.k, pt.gates);
            let series = format!("t={}", pt.t);
            let x = pt.gates as f64;
            rows.push(SweepRow::new("min-gates", id, "gates", x, &series, "f", &pt.f, Some(pt.f_theory), seed));
            let single = |v: f64| Summary {
                mean: v,
                std: f64::NAN,
                p10: f64::NAN,
                p90: f64::NAN,
                min: v,
                max: v,
                samples: pt.f.samples,
            };
            rows.push(SweepRow::new("min-gates", id, "gates", x, &series, "delta_f", &single(pt.delta_f), Some(0.0), seed));
            rows.push(SweepRow::new(
                "min-gates",
                id,
                "gates",
                x,
                &series,
                "p_all_correct",
                &single(pt.p_all_exp),
                Some(pt.p_all_theory),
                seed,
            ));
        }
        rows
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new("min-gates", serde_json::to_value(&self.config).expect("config serializes"));
        m.notes.extend(sample_note(self.config.samples));
        for l in &self.lengths {
            m.notes.push(format!(
                "n={} k={}: N_min(mean code)={:?} m={:?}; N_min(all t=1)={:?} m={:?}; sustained from {:?} / {:?}",
                l.n,
                l.k,
                l.n_min_mean_code,
                l.m_mean_code,
                l.n_min_all_t1,
                l.m_all_t1,
                l.sustained_mean_code,
                l.sustained_all_t1
            ));
        }
        m.notes.push(format!(
            "fitted m: mean code {:?}, all t=1 {:?}",
            self.m_fit_mean_code, self.m_fit_all_t1
        ));
        m
    }
}

// ------------------------------------------------- success vs pattern count

/// Which `N` non-identity patterns accompany the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternSet {
    /// The first `N` patterns in depolarizing order (lowest weight first).
    LowestWeight,
    /// `N` distinct uniformly random Pauli strings, drawn per code sample.
    Random,
}

impl PatternSet {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatternSet::LowestWeight => "lowest-weight",
            PatternSet::Random => "random",
        }
    }
}

impl std::str::FromStr for PatternSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-weight" => Ok(PatternSet::LowestWeight),
            "random" => Ok(PatternSet::Random),
            other => Err(invalid(format!("unknown pattern set '{other}'"))),
        }
    }
}

/// Identity followed by `count` distinct random non-identity strings.
pub fn random_pattern_set<R: rand::Rng + ?Sized>(n: usize, count: u64, rng: &mut R) -> Result<Vec<PauliString>> {
    if n == 0 || (count + 1) as f64 > 4f64.powi(n as i32) {
        return Err(invalid("more patterns requested than exist"));
    }
    let mut seen = rustc_hash::FxHashSet::default();
    let mut out = vec![PauliString::identity(n)];
    seen.insert(out[0].symplectic_xz());
    while (out.len() as u64) < count + 1 {
        let mut e = PauliString::identity(n);
        for q in 0..n {
            e.set_letter(q, Letter::from_xz(rng.random(), rng.random()));
        }
        if seen.insert(e.symplectic_xz()) {
            out.push(e);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct SuccessStudyConfig {
    pub n: usize,
    pub k: usize,
    pub num_gates: usize,
    /// Numbers of non-identity patterns `N`, equiprobable with the identity.
    pub pattern_counts: Vec<u64>,
    pub pattern_set: PatternSet,
    pub samples: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessPoint {
    pub num_errors: u64,
    pub ratio: f64,
    /// Uniform-weighted success counting degenerate collisions as corrected.
    pub success: Summary,
    pub success_leaders_only: Summary,
    /// Fraction of codes where every collision is degenerate.
    pub p_good: f64,
    pub p_all_distinct: f64,
    pub theory_p_good: f64,
    pub theory_p_all_distinct: f64,
    pub theory_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessStudy {
    pub config: SuccessStudyConfig,
    pub points: Vec<SuccessPoint>,
}

/// Correction probability and code quality against the number of
/// equiprobable patterns. Each sample code is shared by every `N`.
pub fn success_study(cfg: &SuccessStudyConfig) -> Result<SuccessStudy> {
    if cfg.samples == 0 || cfg.pattern_counts.is_empty() {
        return Err(invalid("success study needs samples and pattern counts"));
    }
    let max_n = *cfg.pattern_counts.iter().max().expect("non-empty");
    if (max_n + 1) as f64 > 4f64.powi(cfg.n as i32) {
        return Err(invalid("more patterns requested than exist"));
    }
    let lowest = match cfg.pattern_set {
        PatternSet::LowestWeight => {
            let mut t = 0;
            while (pattern_counts_f64(cfg.n, t).1 as u64) < max_n + 1 {
                t += 1;
            }
            let base = bernoulli_model(cfg.n, 0.01, t)?;
            Some(base.iter().take(max_n as usize + 1).map(|e| e.pattern(cfg.n)).collect::<Vec<_>>())
        }
        PatternSet::Random => None,
    };
    let per_sample: Vec<Vec<EvalReport>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.master_seed, 0, i as u64);
            let code = build_qrlc(cfg.n, cfg.k, cfg.num_gates, Connectivity::AllToAll, seed)?;
            let drawn;
            let patterns = match &lowest {
                Some(p) => p,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, 1, i as u64));
                    drawn = random_pattern_set(cfg.n, max_n, &mut rng)?;
                    &drawn
                }
            };
            cfg.pattern_counts
                .iter()
                .map(|&m| evaluate_code(&code, &NoiseModel::uniform(cfg.n, &patterns[..m as usize + 1])?))
                .collect()
        })
        .collect::<Result<_>>()?;
    let s = 2f64.powi((cfg.n - cfg.k) as i32);
    let l = 4f64.powi(cfg.k as i32);
    let mut points = Vec::new();
    for (j, &m) in cfg.pattern_counts.iter().enumerate() {
        let reports: Vec<&EvalReport> = per_sample.iter().map(|v| &v[j]).collect();
        let success: Vec<f64> = reports.iter().map(|r| r.success_with_degenerate).collect();
        let leaders: Vec<f64> = reports.iter().map(|r| r.success_prob).collect();
        let good = reports.iter().filter(|r| r.collisions == r.degenerate_count).count();
        let distinct = reports.iter().filter(|r| r.collisions == 0).count();
        let g = analytics::p_good(s, m, l)?;
        points.push(SuccessPoint {
            num_errors: m,
            ratio: m as f64 / s,
            success: summarize(&success),
            success_leaders_only: summarize(&leaders),
            p_good: good as f64 / cfg.samples as f64,
            p_all_distinct: distinct as f64 / cfg.samples as f64,
            theory_p_good: g.p_good,
            theory_p_all_distinct: analytics::p_all_distinct(s, m)?.exact,
            theory_fraction: analytics::ideal_fraction(s, m as f64)?,
        });
    }
    Ok(SuccessStudy {
        config: cfg.clone(),
        points,
    })
}

impl SuccessStudy {
    pub fn rows(&self) -> Vec<SweepRow> {
        let c = &self.config;
        let id = (c.n, c.k, c.num_gates);
        let series = c.pattern_set.as_str();
        let mut rows = Vec::new();
        for pt in &self.points {
            let x = pt.ratio;
            let fraction = |v: f64| Summary {
                mean: v,
                std: (v * (1.0 - v) / c.samples as f64).sqrt(),
                p10: f64::NAN,
                p90: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
                samples: c.samples,
            };
            rows.push(SweepRow::new("success", id, "n_over_s", x, series, "success", &pt.success, Some(pt.theory_fraction), c.master_seed));
            rows.push(SweepRow::new(
                "success",
                id,
                "n_over_s",
                x,
                series,
                "success_leaders_only",
                &pt.success_leaders_only,
                Some(pt.theory_fraction),
                c.master_seed,
            ));
            rows.push(SweepRow::new("success", id, "n_over_s", x, series, "p_good", &fraction(pt.p_good), Some(pt.theory_p_good), c.master_seed));
            rows.push(SweepRow::new(
                "success",
                id,
                "n_over_s",
                x,
                series,
                "p_all_distinct",
                &fraction(pt.p_all_distinct),
                Some(pt.theory_p_all_distinct),
                c.master_seed,
            ));
        }
        rows
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new("success", serde_json::to_value(&self.config).expect("config serializes"));
        m.notes.push(
            "success: probability-weighted correction averaged over codes, degenerate collisions counted as corrected".into(),
        );
        m.notes.push("p_good/p_all_distinct rows: std is the binomial standard error".into());
        m
    }
}

// ------------------------------------------------------------ trial runner

/// Aggregates over a batch of decoding trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub mode: DecodingMode,
    pub success_rate: f64,
    pub degenerate_successes: u64,
    pub mean_iterations: f64,
    pub mean_measurements: f64,
    /// Mean stabilizer bits read per rejected candidate (membership mode).
    pub measurements_per_rejection: Option<f64>,
}

/// Runs `trials` decoding trials; trial `i` draws from its own stream
/// seeded by `derive_seed(seed, 0, i)`.
pub fn run_trials(
    table: &SyndromeTable,
    mode: DecodingMode,
    abandon_after: Option<u64>,
    trials: u64,
    seed: u64,
) -> Vec<TrialRecord> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0, i));
            simulate_trial(table, &mut rng, mode, abandon_after, i)
        })
        .collect()
}

pub fn summarize_trials(mode: DecodingMode, records: &[TrialRecord]) -> TrialSummary {
    let m = records.len().max(1) as f64;
    let rejected: u64 = records.iter().map(|r| r.rejected).sum();
    let rejected_bits: u64 = records.iter().map(|r| r.rejected_measurements).sum();
    TrialSummary {
        trials: records.len() as u64,
        mode,
        success_rate: records.iter().filter(|r| r.success).count() as f64 / m,
        degenerate_successes: records.iter().filter(|r| r.success && r.degenerate).count() as u64,
        mean_iterations: records.iter().map(|r| r.iterations as f64).sum::<f64>() / m,
        mean_measurements: records.iter().map(|r| r.measurements as f64).sum::<f64>() / m,
        measurements_per_rejection: (rejected > 0).then(|| rejected_bits as f64 / rejected as f64),
    }
}

// ------------------------------------------------------------ ordering study

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct OrderingStudyConfig {
    pub n: usize,
    pub k: usize,
    pub num_gates: usize,
    pub entropy_grid: Vec<f64>,
    pub kinds: Vec<SyntheticKind>,
    pub samples: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderingPoint {
    pub kind: SyntheticKind,
    pub entropy_bits: f64,
    pub greedy: Summary,
    pub random: Summary,
    /// `log₂(N + 1)`.
    pub log2_patterns: f64,
    /// Stopping index of the decision-tree recursion.
    pub recursion_floor: usize,
    /// `log₂log₂s + 1`.
    pub savings_scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderingStudy {
    pub config: OrderingStudyConfig,
    pub points: Vec<OrderingPoint>,
}

/// Greedy against random stabilizer ordering over weight-1 patterns with
/// synthetic probabilities of prescribed entropy.
pub fn ordering_study(cfg: &OrderingStudyConfig) -> Result<OrderingStudy> {
    if cfg.samples == 0 || cfg.entropy_grid.is_empty() || cfg.kinds.is_empty() {
        return Err(invalid("ordering study needs samples, entropies and distribution kinds"));
    }
    let base = bernoulli_model(cfg.n, 0.01, 1)?;
    let num_errors = base.num_errors() as usize;
    let patterns: Vec<PauliString> = base.iter().map(|e| e.pattern(cfg.n)).collect();
    let mut axis = Vec::new();
    for &kind in &cfg.kinds {
        for &h in &cfg.entropy_grid {
            axis.push((kind, h, synthetic_distribution(kind, num_errors, h)?));
        }
    }
    let codes: Vec<QuantumCode> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            build_qrlc(
                cfg.n,
                cfg.k,
                cfg.num_gates,
                Connectivity::AllToAll,
                derive_seed(cfg.master_seed, 0, i as u64),
            )
        })
        .collect::<Result<_>>()?;
    let uniform = NoiseModel::uniform(cfg.n, &patterns)?;
    let matrices: Vec<SyndromeMatrix> = codes
        .iter()
        .map(|c| SyndromeMatrix::new(c, &uniform))
        .collect::<Result<_>>()?;
    let s = cfg.n - cfg.k;
    let floor = analytics::decision_tree_recursion(num_errors as f64, s.max(2))?.i_stop;
    let points = axis
        .par_iter()
        .enumerate()
        .map(|(a, (kind, h, probs))| {
            let (greedy, random): (Vec<f64>, Vec<f64>) = matrices
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let m = SyndromeMatrix::from_parts(s, m.syndromes().to_vec(), probs.clone())?;
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, 1 + a as u64, i as u64));
                    Ok((greedy_ordering(&m).1, random_ordering_cost(&m, &mut rng)))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            Ok(OrderingPoint {
                kind: *kind,
                entropy_bits: *h,
                greedy: summarize(&greedy),
                random: summarize(&random),
                log2_patterns: ((num_errors + 1) as f64).log2(),
                recursion_floor: floor,
                savings_scale: (s as f64).log2().log2() + 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderingStudy {
        config: cfg.clone(),
        points,
    })
}

impl OrderingStudy {
    pub fn rows(&self) -> Vec<SweepRow> {
        let c = &self.config;
        let mut rows = Vec::new();
        for pt in &self.points {
            let id = (c.n, c.k, c.num_gates);
            for (series, summary) in [("random", &pt.random), ("greedy", &pt.greedy)] {
                rows.push(SweepRow::new(
                    "ordering",
                    id,
                    "entropy_bits",
                    pt.entropy_bits,
                    &format!("{}/{}", pt.kind.as_str(), series),
                    "measurements",
                    summary,
                    Some(if series == "greedy" {
                        pt.recursion_floor as f64
                    } else {
                        pt.log2_patterns
                    }),
                    c.master_seed,
                ));
            }
        }
        rows
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new("ordering", serde_json::to_value(&self.config).expect("config serializes"));
        m.notes.extend(sample_note(self.config.samples));
        m.notes.push(
            "ideal_overlay: log2(N+1) for random ordering, decision-tree recursion floor for greedy ordering".into(),
        );
        m
    }
}
