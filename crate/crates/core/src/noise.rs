//! Ordered noise statistics `{(p_i, E_i)}`.
//!
//! Entry 0 is always the identity. Entries are ordered by non-increasing
//! probability; equiprobable patterns are ordered by weight, then by their
//! position tuple (ascending, lexicographic), then by their letter tuple
//! with `X < Y < Z`. Bernoulli models are never materialized: entries are
//! streamed, ranked and unranked on demand.

use std::collections::BTreeMap;
use std::io::Read;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use smallvec::SmallVec;

use crate::error::{check_dims, invalid, Error, Result};
use crate::pauli::{Letter, PauliString};

/// Non-identity positions of a pattern, ascending by qubit.
pub type Support = SmallVec<[(usize, Letter); 4]>;

/// The largest depolarizing probability for which weight order is
/// probability order: `(p/3) ≤ (1 − p)`.
pub const MAX_ORDERED_P: f64 = 0.75;

#[derive(Clone, Debug)]
enum Source {
    Bernoulli(BernoulliSpec),
    Explicit(Arc<ExplicitEntries>),
}

#[derive(Clone, Debug)]
struct BernoulliSpec {
    p: f64,
    t_max: usize,
    /// `ln` of the probability of one pattern of weight `w`.
    log_prob: Vec<f64>,
    /// `B_{w−1}`, the index of the first weight-`w` pattern, for `w = 0..=t_max+1`.
    offsets: Vec<u64>,
    /// `C(n, w)` for `w = 0..=t_max`.
    binom: Vec<Vec<u64>>,
}

#[derive(Debug)]
struct ExplicitEntries {
    probs: Vec<f64>,
    patterns: Vec<PauliString>,
    cumulative: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct NoiseModel {
    n: usize,
    source: Source,
    residual: f64,
}

/// One streamed entry of a noise model.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseEntry {
    pub index: u64,
    pub probability: f64,
    pub support: Support,
}

impl NoiseEntry {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn pattern(&self, n: usize) -> PauliString {
        PauliString::from_support(n, &self.support).expect("support within model size")
    }
}

/// Outcome of drawing an error from the channel described by a model.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledError {
    Listed { index: u64, support: Support },
    /// Mass outside the listed entries. Bernoulli models report the drawn
    /// pattern; explicit models have no pattern to report.
    Residual { support: Option<Support> },
}

fn binomial_table(n: usize, t_max: usize) -> Result<Vec<Vec<u64>>> {
    // binom[m][w] = C(m, w) for m = 0..=n, w = 0..=t_max
    let mut table = vec![vec![0u64; t_max + 1]; n + 1];
    for m in 0..=n {
        table[m][0] = 1;
        for w in 1..=t_max.min(m) {
            table[m][w] = table[m - 1][w - 1]
                .checked_add(if w <= m - 1 { table[m - 1][w] } else { 0 })
                .ok_or_else(|| invalid("binomial coefficient overflows u64"))?;
        }
    }
    Ok(table)
}

/// Depolarizing channel truncated at weight `t_max`: each qubit suffers
/// `X`, `Y` or `Z` with probability `p/3` each.
pub fn bernoulli_model(n: usize, p: f64, t_max: usize) -> Result<NoiseModel> {
    if n == 0 {
        return Err(invalid("noise model needs at least one qubit"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("error probability must be in (0, 1), got {p}")));
    }
    if p > MAX_ORDERED_P {
        return Err(invalid(format!(
            "p = {p} > 3/4 makes heavier patterns more likely; weight order would not be probability order"
        )));
    }
    if t_max > n {
        return Err(invalid(format!("t_max = {t_max} exceeds n = {n}")));
    }
    let binom = binomial_table(n, t_max)?;
    let mut offsets = vec![0u64; t_max + 2];
    for w in 0..=t_max {
        let a_w = binom[n][w]
            .checked_mul(3u64.checked_pow(w as u32).ok_or_else(|| invalid("3^t overflows"))?)
            .ok_or_else(|| invalid("pattern count overflows u64"))?;
        offsets[w + 1] = offsets[w]
            .checked_add(a_w)
            .ok_or_else(|| invalid("pattern count overflows u64"))?;
    }
    let ln_single = (p / 3.0).ln();
    let ln_clean = (-p).ln_1p();
    let log_prob: Vec<f64> = (0..=t_max)
        .map(|w| w as f64 * ln_single + (n - w) as f64 * ln_clean)
        .collect();
    // tail mass of weights above t_max, summed directly for accuracy
    let residual: f64 = ((t_max + 1)..=n)
        .map(|w| (ln_binomial(n, w) + w as f64 * p.ln() + (n - w) as f64 * ln_clean).exp())
        .sum();
    Ok(NoiseModel {
        n,
        source: Source::Bernoulli(BernoulliSpec {
            p,
            t_max,
            log_prob,
            offsets,
            binom,
        }),
        residual,
    })
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (k - i) as f64).ln()).sum()
}

/// `A_t = 3^t·C(n, t)` and `B_t = Σ_{t' ≤ t} A_{t'}` exactly.
pub fn pattern_counts(n: usize, t: usize) -> Result<(BigUint, BigUint)> {
    if t > n {
        return Err(invalid(format!("t = {t} exceeds n = {n}")));
    }
    let mut binom = BigUint::one();
    let mut pow3 = BigUint::one();
    let mut cumulative = BigUint::zero();
    let mut a = BigUint::one();
    for w in 0..=t {
        if w > 0 {
            binom = binom * BigUint::from(n - w + 1) / BigUint::from(w);
            pow3 *= 3u32;
        }
        a = &binom * &pow3;
        cumulative += &a;
    }
    Ok((a, cumulative))
}

/// Full (untruncated) depolarizing-channel entropy `n·(H_b(p) + p·log₂3)`.
pub fn full_channel_entropy(n: usize, p: f64) -> f64 {
    let hb = if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    };
    n as f64 * (hb + p * 3f64.log2())
}

/// Shannon entropy in bits of a probability list, with `0·log 0 = 0`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

impl NoiseModel {
    /// Model over explicit patterns. The identity must be present and be
    /// the most likely entry; the rest are sorted by non-increasing
    /// probability, ties keeping their given order.
    pub fn from_entries(n: usize, entries: Vec<(f64, PauliString)>) -> Result<NoiseModel> {
        let mut identity = None;
        let mut rest = Vec::with_capacity(entries.len());
        let mut seen = std::collections::HashSet::new();
        let mut total = 0.0;
        for (p, e) in entries {
            check_dims(n, e.num_qubits())?;
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(invalid(format!("probability {p} outside [0, 1]")));
            }
            let e = e.phaseless();
            if !seen.insert(e.clone()) {
                return Err(invalid(format!("pattern {e} listed twice")));
            }
            total += p;
            if e.is_identity_phaseless() {
                identity = Some(p);
            } else {
                rest.push((p, e));
            }
        }
        let p0 = identity.ok_or_else(|| invalid("noise statistics must list the identity"))?;
        if total > 1.0 + 1e-12 {
            return Err(invalid(format!("probabilities sum to {total} > 1")));
        }
        rest.sort_by(|a, b| b.0.total_cmp(&a.0));
        if rest.first().is_some_and(|(p, _)| *p > p0) {
            return Err(invalid("the identity must be the most likely pattern"));
        }
        let mut probs = Vec::with_capacity(rest.len() + 1);
        let mut patterns = Vec::with_capacity(rest.len() + 1);
        probs.push(p0);
        patterns.push(PauliString::identity(n));
        for (p, e) in rest {
            probs.push(p);
            patterns.push(e);
        }
        Ok(Self::explicit(n, probs, patterns))
    }

    fn explicit(n: usize, probs: Vec<f64>, patterns: Vec<PauliString>) -> NoiseModel {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let residual = (1.0 - acc).max(0.0);
        NoiseModel {
            n,
            source: Source::Explicit(Arc::new(ExplicitEntries {
                probs,
                patterns,
                cumulative,
            })),
            residual,
        }
    }

    /// Attaches an already sorted probability list to patterns given in
    /// order (identity first).
    pub fn with_probabilities(n: usize, probs: &[f64], patterns: &[PauliString]) -> Result<NoiseModel> {
        if probs.len() != patterns.len() {
            return Err(invalid("probability and pattern lists differ in length"));
        }
        if patterns.first().is_none_or(|p| !p.is_identity_phaseless()) {
            return Err(invalid("first pattern must be the identity"));
        }
        if probs.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("probabilities must be non-increasing"));
        }
        NoiseModel::from_entries(n, probs.iter().copied().zip(patterns.iter().cloned()).collect())
    }

    /// Equiprobable model over the given patterns (identity first).
    pub fn uniform(n: usize, patterns: &[PauliString]) -> Result<NoiseModel> {
        let p = 1.0 / patterns.len() as f64;
        Self::with_probabilities(n, &vec![p; patterns.len()], patterns)
    }

    /// Reads `pauli_literal,probability` rows. A header row is optional.
    pub fn from_csv_reader<R: Read>(n: usize, reader: R) -> Result<NoiseModel> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut entries = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Parse {
                    what: "noise statistics",
                    reason: format!("row {} has {} fields, expected 2", line + 1, record.len()),
                });
            }
            if line == 0 && record[1].parse::<f64>().is_err() {
                continue;
            }
            let pattern: PauliString = record[0].parse()?;
            let p: f64 = record[1].parse().map_err(|_| Error::Parse {
                what: "noise statistics",
                reason: format!("bad probability {:?} on row {}", &record[1], line + 1),
            })?;
            entries.push((p, pattern));
        }
        NoiseModel::from_entries(n, entries)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["pauli", "probability"])?;
        for e in self.iter() {
            w.write_record([e.pattern(self.n).to_string(), format!("{:e}", e.probability)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of listed entries, `N + 1`.
    pub fn len(&self) -> u64 {
        match &self.source {
            Source::Bernoulli(b) => b.offsets[b.t_max + 1],
            Source::Explicit(e) => e.probs.len() as u64,
        }
    }

    /// Number of listed non-identity entries, `N`.
    pub fn num_errors(&self) -> u64 {
        self.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn p0(&self) -> f64 {
        self.probability(0)
    }

    /// Probability mass not covered by the listed entries.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest listed weight.
    pub fn t_max(&self) -> usize {
        match &self.source {
            Source::Bernoulli(b) => b.t_max,
            Source::Explicit(e) => e.patterns.iter().map(PauliString::weight).max().unwrap_or(0),
        }
    }

    /// Per-qubit error probability for Bernoulli models.
    pub fn bernoulli_p(&self) -> Option<f64> {
        match &self.source {
            Source::Bernoulli(b) => Some(b.p),
            Source::Explicit(_) => None,
        }
    }

    pub fn probability(&self, index: u64) -> f64 {
        match &self.source {
            Source::Bernoulli(b) => {
                let w = b.weight_of_index(index);
                b.log_prob[w].exp()
            }
            Source::Explicit(e) => e.probs[index as usize],
        }
    }

    pub fn pattern(&self, index: u64) -> Result<PauliString> {
        if index >= self.len() {
            return Err(invalid(format!("entry {index} beyond {} listed patterns", self.len())));
        }
        match &self.source {
            Source::Bernoulli(b) => PauliString::from_support(self.n, &b.unrank(self.n, index)),
            Source::Explicit(e) => Ok(e.patterns[index as usize].clone()),
        }
    }

    /// Index of a pattern in this model, if listed.
    pub fn index_of(&self, pattern: &PauliString) -> Result<Option<u64>> {
        check_dims(self.n, pattern.num_qubits())?;
        Ok(match &self.source {
            Source::Bernoulli(b) => {
                let support: Support = pattern.support().collect();
                b.rank(self.n, &support)
            }
            Source::Explicit(e) => e
                .patterns
                .iter()
                .position(|p| p.eq_phaseless(pattern))
                .map(|i| i as u64),
        })
    }

    /// Number of listed patterns of each weight.
    pub fn count_by_weight(&self) -> BTreeMap<usize, u64> {
        match &self.source {
            Source::Bernoulli(b) => (0..=b.t_max)
                .map(|w| (w, b.offsets[w + 1] - b.offsets[w]))
                .collect(),
            Source::Explicit(e) => {
                let mut m = BTreeMap::new();
                for p in &e.patterns {
                    *m.entry(p.weight()).or_insert(0) += 1;
                }
                m
            }
        }
    }

    /// Listed probability mass of each weight class.
    pub fn mass_by_weight(&self) -> BTreeMap<usize, f64> {
        match &self.source {
            Source::Bernoulli(b) => (0..=b.t_max)
                .map(|w| (w, (b.offsets[w + 1] - b.offsets[w]) as f64 * b.log_prob[w].exp()))
                .collect(),
            Source::Explicit(e) => {
                let mut m = BTreeMap::new();
                for (p, pat) in e.probs.iter().zip(&e.patterns) {
                    *m.entry(pat.weight()).or_insert(0.0) += p;
                }
                m
            }
        }
    }

    /// Shannon entropy of the listed entries, in bits.
    pub fn entropy_bits(&self) -> f64 {
        match &self.source {
            Source::Bernoulli(b) => (0..=b.t_max)
                .map(|w| {
                    let p = b.log_prob[w].exp();
                    if p > 0.0 {
                        -((b.offsets[w + 1] - b.offsets[w]) as f64) * p * b.log_prob[w] / std::f64::consts::LN_2
                    } else {
                        0.0
                    }
                })
                .sum(),
            Source::Explicit(e) => entropy_of(&e.probs),
        }
    }

    /// `I = Σ (i + 1)·p_i` over listed entries.
    pub fn expected_iterations(&self) -> f64 {
        match &self.source {
            Source::Bernoulli(b) => (0..=b.t_max)
                .map(|w| {
                    let (lo, hi) = (b.offsets[w] as f64, b.offsets[w + 1] as f64);
                    // Σ_{i=lo}^{hi-1} (i+1) = (hi(hi+1) − lo(lo+1)) / 2
                    (hi * (hi + 1.0) - lo * (lo + 1.0)) / 2.0 * b.log_prob[w].exp()
                })
                .sum(),
            Source::Explicit(e) => e
                .probs
                .iter()
                .enumerate()
                .map(|(i, p)| (i + 1) as f64 * p)
                .sum(),
        }
    }

    /// Streams entries in order.
    pub fn iter(&self) -> NoiseStream<'_> {
        NoiseStream::new(self)
    }

    /// Streams entries in order starting at `index`.
    pub fn iter_from(&self, index: u64) -> NoiseStream<'_> {
        let mut stream = NoiseStream::new(self);
        if index >= self.len() {
            stream.index = self.len();
            return stream;
        }
        stream.index = index;
        if let Source::Bernoulli(b) = &self.source {
            let support = b.unrank(self.n, index);
            stream.positions = support.iter().map(|&(q, _)| q).collect();
            stream.letters = support
                .iter()
                .map(|&(_, l)| match l {
                    Letter::X => 0,
                    Letter::Y => 1,
                    _ => 2,
                })
                .collect();
        }
        stream
    }

    /// Listed probabilities in order. Materializes the whole model.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.source {
            Source::Explicit(e) => e.probs.clone(),
            Source::Bernoulli(_) => self.iter().map(|e| e.probability).collect(),
        }
    }

    /// Draws an error from the channel.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledError {
        match &self.source {
            Source::Bernoulli(b) => {
                let mut support = Support::new();
                for q in 0..self.n {
                    if rng.random::<f64>() < b.p {
                        support.push((q, Letter::NON_IDENTITY[rng.random_range(0..3)]));
                    }
                }
                match b.rank(self.n, &support) {
                    Some(index) => SampledError::Listed { index, support },
                    None => SampledError::Residual {
                        support: Some(support),
                    },
                }
            }
            Source::Explicit(e) => {
                let u: f64 = rng.random();
                let i = e.cumulative.partition_point(|&c| c <= u);
                if i < e.probs.len() {
                    SampledError::Listed {
                        index: i as u64,
                        support: e.patterns[i].support().collect(),
                    }
                } else {
                    SampledError::Residual { support: None }
                }
            }
        }
    }
}

impl BernoulliSpec {
    fn weight_of_index(&self, index: u64) -> usize {
        self.offsets.partition_point(|&o| o <= index) - 1
    }

    fn rank(&self, n: usize, support: &[(usize, Letter)]) -> Option<u64> {
        let w = support.len();
        if w > self.t_max {
            return None;
        }
        // lexicographic rank of the position tuple
        let mut comb_rank = 0u64;
        let mut prev: Option<usize> = None;
        for (i, &(q, _)) in support.iter().enumerate() {
            let start = prev.map_or(0, |p| p + 1);
            for v in start..q {
                comb_rank += self.binom[n - 1 - v][w - 1 - i];
            }
            prev = Some(q);
        }
        let letter_rank = support.iter().fold(0u64, |acc, &(_, l)| {
            acc * 3 + match l {
                Letter::X => 0,
                Letter::Y => 1,
                Letter::Z => 2,
                Letter::I => unreachable!("support holds non-identity letters"),
            }
        });
        Some(self.offsets[w] + comb_rank * 3u64.pow(w as u32) + letter_rank)
    }

    fn unrank(&self, n: usize, index: u64) -> Support {
        let w = self.weight_of_index(index);
        let within = index - self.offsets[w];
        let pow = 3u64.pow(w as u32);
        let (mut comb_rank, mut letter_rank) = (within / pow, within % pow);
        let mut positions = SmallVec::<[usize; 4]>::new();
        let mut v = 0usize;
        for i in 0..w {
            loop {
                let block = self.binom[n - 1 - v][w - 1 - i];
                if comb_rank < block {
                    break;
                }
                comb_rank -= block;
                v += 1;
            }
            positions.push(v);
            v += 1;
        }
        let mut letters = [Letter::X; 64];
        for i in (0..w).rev() {
            letters[i] = Letter::NON_IDENTITY[(letter_rank % 3) as usize];
            letter_rank /= 3;
        }
        positions
            .into_iter()
            .enumerate()
            .map(|(i, q)| (q, letters[i]))
            .collect()
    }
}

/// Streaming cursor over a model's entries. Independent cursors may run
/// concurrently over the same model.
pub struct NoiseStream<'a> {
    model: &'a NoiseModel,
    index: u64,
    positions: SmallVec<[usize; 4]>,
    letters: SmallVec<[u8; 4]>,
}

impl<'a> NoiseStream<'a> {
    fn new(model: &'a NoiseModel) -> Self {
        NoiseStream {
            model,
            index: 0,
            positions: SmallVec::new(),
            letters: SmallVec::new(),
        }
    }

    fn advance_bernoulli(&mut self, n: usize) {
        // letters: rightmost fastest
        for i in (0..self.letters.len()).rev() {
            if self.letters[i] < 2 {
                self.letters[i] += 1;
                return;
            }
            self.letters[i] = 0;
        }
        // next position tuple in lexicographic order
        let w = self.positions.len();
        for i in (0..w).rev() {
            if self.positions[i] < n - w + i {
                self.positions[i] += 1;
                for j in i + 1..w {
                    self.positions[j] = self.positions[j - 1] + 1;
                }
                return;
            }
        }
        // next weight
        let w = w + 1;
        self.positions = (0..w).collect();
        self.letters = SmallVec::from_elem(0, w);
    }
}

impl Iterator for NoiseStream<'_> {
    type Item = NoiseEntry;

    fn next(&mut self) -> Option<NoiseEntry> {
        if self.index >= self.model.len() {
            return None;
        }
        let entry = match &self.model.source {
            Source::Bernoulli(b) => {
                let support: Support = self
                    .positions
                    .iter()
                    .zip(&self.letters)
                    .map(|(&q, &l)| (q, Letter::NON_IDENTITY[l as usize]))
                    .collect();
                let entry = NoiseEntry {
                    index: self.index,
                    probability: b.log_prob[support.len()].exp(),
                    support,
                };
                self.advance_bernoulli(self.model.n);
                entry
            }
            Source::Explicit(e) => {
                let i = self.index as usize;
                NoiseEntry {
                    index: self.index,
                    probability: e.probs[i],
                    support: e.patterns[i].support().collect(),
                }
            }
        };
        self.index += 1;
        Some(entry)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.model.len() - self.index) as usize;
        (left, Some(left))
    }
}

/// Shape of a synthetic distribution over `N + 1` entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticKind {
    /// `p_i ∝ exp(−α·i)`.
    Decaying,
    /// `p_i = ε` for `i ≥ 1`, `p_0 = 1 − N·ε`.
    Constant,
}

impl SyntheticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SyntheticKind::Decaying => "decaying",
            SyntheticKind::Constant => "constant",
        }
    }
}

impl std::str::FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decaying" => Ok(SyntheticKind::Decaying),
            "constant" => Ok(SyntheticKind::Constant),
            _ => Err(invalid(format!("unknown distribution kind {s:?}"))),
        }
    }
}

fn decaying_probs(num_errors: usize, alpha: f64) -> Vec<f64> {
    let weights: Vec<f64> = (0..=num_errors).map(|i| (-alpha * i as f64).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

fn constant_probs(num_errors: usize, eps: f64) -> Vec<f64> {
    let mut v = vec![eps; num_errors + 1];
    v[0] = 1.0 - num_errors as f64 * eps;
    v
}

/// Probability list over `N + 1` entries with the requested Shannon
/// entropy, solved by bisection on the shape parameter.
pub fn synthetic_distribution(kind: SyntheticKind, num_errors: usize, target_bits: f64) -> Result<Vec<f64>> {
    let max = ((num_errors + 1) as f64).log2();
    if !(target_bits.is_finite() && target_bits >= 0.0 && target_bits <= max + 1e-12) {
        return Err(Error::Unattainable(format!(
            "entropy {target_bits} bits outside [0, {max}] for {num_errors} errors"
        )));
    }
    if target_bits <= 0.0 || num_errors == 0 {
        return Ok(constant_probs(num_errors, 0.0));
    }
    if target_bits >= max - 1e-13 {
        return Ok(vec![1.0 / (num_errors + 1) as f64; num_errors + 1]);
    }
    let entropy_at = |param: f64| match kind {
        SyntheticKind::Decaying => entropy_of(&decaying_probs(num_errors, param)),
        SyntheticKind::Constant => entropy_of(&constant_probs(num_errors, param)),
    };
    // entropy decreases with α and increases with ε
    let (mut lo, mut hi) = match kind {
        SyntheticKind::Decaying => {
            let mut hi = 1.0;
            while entropy_at(hi) > target_bits {
                hi *= 2.0;
                if hi > 1e6 {
                    return Err(Error::Unattainable(format!("entropy {target_bits} too small")));
                }
            }
            (0.0, hi)
        }
        SyntheticKind::Constant => (0.0, 1.0 / (num_errors + 1) as f64),
    };
    let mut param = 0.5 * (lo + hi);
    for _ in 0..200 {
        param = 0.5 * (lo + hi);
        let h = entropy_at(param);
        if (h - target_bits).abs() < 1e-12 {
            break;
        }
        match (kind, h > target_bits) {
            (SyntheticKind::Decaying, true) | (SyntheticKind::Constant, false) => lo = param,
            _ => hi = param,
        }
    }
    Ok(match kind {
        SyntheticKind::Decaying => decaying_probs(num_errors, param),
        SyntheticKind::Constant => constant_probs(num_errors, param),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_qubit_model_is_complete() {
        let m = bernoulli_model(2, 0.3, 2).unwrap();
        let entries: Vec<_> = m.iter().collect();
        assert_eq!(entries.len(), 16);
        assert_abs_diff_eq!(entries[0].probability, 0.49, epsilon = 1e-15);
        for e in &entries[1..7] {
            assert_abs_diff_eq!(e.probability, 0.07, epsilon = 1e-15);
        }
        for e in &entries[7..] {
            assert_abs_diff_eq!(e.probability, 0.01, epsilon = 1e-15);
        }
        assert!(m.residual().abs() < 1e-15);
        let listed: Vec<String> = entries.iter().map(|e| e.pattern(2).to_string()).collect();
        assert_eq!(&listed[..7], &["II", "XI", "YI", "ZI", "IX", "IY", "IZ"]);
        assert_eq!(&listed[7..10], &["XX", "XY", "XZ"]);
    }

    #[test]
    fn zero_truncation_keeps_identity_only() {
        let m = bernoulli_model(5, 0.01, 0).unwrap();
        assert_eq!(m.len(), 1);
        assert_abs_diff_eq!(m.p0(), 0.99f64.powi(5), epsilon = 1e-15);
        assert_abs_diff_eq!(m.residual(), 1.0 - 0.99f64.powi(5), epsilon = 1e-15);
    }

    #[test]
    fn large_model_counts() {
        let m = bernoulli_model(128, 0.01, 3).unwrap();
        assert_eq!(m.len(), 9_290_689);
        let (_, b3) = pattern_counts(128, 3).unwrap();
        assert_eq!(b3, BigUint::from(9_290_689u64));
    }

    #[test]
    fn pattern_count_examples() {
        let (a, b) = pattern_counts(7, 0).unwrap();
        assert_eq!((a, b), (BigUint::one(), BigUint::one()));
        let (a, b) = pattern_counts(16, 1).unwrap();
        assert_eq!((a, b), (BigUint::from(48u32), BigUint::from(49u32)));
        assert_eq!(pattern_counts(2, 2).unwrap().1, BigUint::from(16u32));
        assert!(pattern_counts(2, 3).is_err());
    }

    #[test]
    fn invalid_bernoulli_parameters() {
        assert!(bernoulli_model(4, 0.0, 1).is_err());
        assert!(bernoulli_model(4, 1.0, 1).is_err());
        assert!(bernoulli_model(4, 0.8, 1).is_err());
        assert!(bernoulli_model(4, 0.1, 5).is_err());
    }

    #[test]
    fn rank_and_unrank_agree_with_stream() {
        let m = bernoulli_model(7, 0.05, 3).unwrap();
        for e in m.iter() {
            let p = e.pattern(7);
            assert_eq!(m.pattern(e.index).unwrap(), p);
            assert_eq!(m.index_of(&p).unwrap(), Some(e.index));
        }
        let heavy: PauliString = "XXXXIII".parse().unwrap();
        assert_eq!(m.index_of(&heavy).unwrap(), None);
    }

    #[test]
    fn stream_can_start_anywhere() {
        let m = bernoulli_model(6, 0.05, 3).unwrap();
        let all: Vec<_> = m.iter().collect();
        for start in [0u64, 1, 18, 19, 200, m.len() - 1, m.len()] {
            let tail: Vec<_> = m.iter_from(start).collect();
            assert_eq!(tail, all[start as usize..]);
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_of(&[1.0, 0.0]), 0.0);
        assert_abs_diff_eq!(entropy_of(&[0.25; 4]), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(full_channel_entropy(1, 0.01), 0.0966, epsilon = 5e-5);
        let m = bernoulli_model(6, 0.1, 6).unwrap();
        let direct = entropy_of(&m.probabilities());
        assert_abs_diff_eq!(m.entropy_bits(), direct, epsilon = 1e-12);
        assert_abs_diff_eq!(m.entropy_bits(), full_channel_entropy(6, 0.1), epsilon = 1e-12);
    }

    #[test]
    fn expected_iterations_closed_form() {
        let m = bernoulli_model(5, 0.2, 2).unwrap();
        let direct: f64 = m.iter().map(|e| (e.index + 1) as f64 * e.probability).sum();
        assert_abs_diff_eq!(m.expected_iterations(), direct, epsilon = 1e-12);
    }

    #[test]
    fn synthetic_limits() {
        for kind in [SyntheticKind::Decaying, SyntheticKind::Constant] {
            let uniform = synthetic_distribution(kind, 48, 49f64.log2()).unwrap();
            for p in &uniform {
                assert_abs_diff_eq!(*p, 1.0 / 49.0, epsilon = 1e-12);
            }
            let point = synthetic_distribution(kind, 48, 0.0).unwrap();
            assert_eq!(point[0], 1.0);
            assert!(synthetic_distribution(kind, 48, 6.0).is_err());
        }
    }

    #[test]
    fn synthetic_hits_target_entropy() {
        for kind in [SyntheticKind::Decaying, SyntheticKind::Constant] {
            for target in [0.1, 1.0, 3.0, 5.0] {
                let probs = synthetic_distribution(kind, 48, target).unwrap();
                assert_abs_diff_eq!(entropy_of(&probs), target, epsilon = 1e-9);
                assert_abs_diff_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
                assert!(probs.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn explicit_models_from_csv() {
        let text = "pauli,probability\nIX,0.1\nII,0.8\nZI,0.05\n";
        let m = NoiseModel::from_csv_reader(2, text.as_bytes()).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.pattern(1).unwrap().to_string(), "IX");
        assert_abs_diff_eq!(m.residual(), 0.05, epsilon = 1e-12);
        let back = NoiseModel::from_csv_reader(2, m.to_csv().unwrap().as_bytes()).unwrap();
        assert_eq!(back.probabilities(), m.probabilities());

        assert!(NoiseModel::from_csv_reader(2, "IX,0.5\n".as_bytes()).is_err());
        assert!(NoiseModel::from_csv_reader(2, "II,0.5\nIX,0.6\n".as_bytes()).is_err());
        assert!(NoiseModel::from_csv_reader(2, "II,0.5\nIX,0.2\n-IX,0.1\n".as_bytes()).is_err());
    }
}
