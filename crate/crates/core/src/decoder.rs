//! Syndromes, coset-leader tables and guessing-based decoding.
//!
//! Two decoding modes are provided. The membership test replays the
//! guessing loop: candidates are tried in noise order and each test reads
//! stabilizer bits until the first 1. Syndrome decoding reads the full
//! syndrome once and looks up its coset leader.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::code::{row_to_hex, QuantumCode};
use crate::error::{check_dims, invalid, Error, Result};
use crate::gf2::{get_bit, words_for};
use crate::noise::{NoiseModel, SampledError, Support};
use crate::pauli::{Letter, PauliString};

/// Cap on the number of degenerate pairs kept verbatim in a table.
pub const DEGENERATE_PAIR_LIMIT: usize = 10_000;

/// `s`-bit syndrome; bit `i` is set iff the error anticommutes with stabilizer `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(SmallVec<[u64; 2]>);

/// Commutation bits of a pattern with the `2k` logical operators.
pub type LogicalKey = SmallVec<[u64; 4]>;

impl Syndrome {
    pub fn zero(s: usize) -> Self {
        Syndrome(SmallVec::from_elem(0, words_for(s)))
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Syndrome::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.0[i / 64] |= 1 << (i % 64);
            }
        }
        v
    }

    pub fn words(&self) -> &[u64] {
        &self.0
    }

    pub fn bit(&self, i: usize) -> bool {
        get_bit(&self.0, i)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        Syndrome(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// Position of the first set bit, or `None` for the zero syndrome.
    pub fn first_set_bit(&self) -> Option<usize> {
        crate::gf2::first_set_bit(&self.0)
    }

    pub fn to_hex(&self, s: usize) -> String {
        row_to_hex(&self.0, s)
    }
}

/// Reference syndrome `M_E·Aᵀ` computed from the parity-check matrix.
pub fn syndrome_of(code: &QuantumCode, e: &PauliString) -> Result<Syndrome> {
    check_dims(code.n(), e.num_qubits())?;
    Ok(Syndrome::from_bits(&code.parity_check().mul_vec(&e.symplectic_xz())))
}

/// Per-qubit syndrome and logical-commutation columns, so that the
/// syndrome of a sparse pattern is the XOR of at most `weight` columns.
#[derive(Clone, Debug)]
pub struct SyndromeColumns {
    n: usize,
    s: usize,
    num_logicals: usize,
    // indexed by 3·q + letter (X, Y, Z)
    syndromes: Vec<Syndrome>,
    logicals: Vec<LogicalKey>,
}

fn letter_slot(l: Letter) -> usize {
    match l {
        Letter::X => 0,
        Letter::Y => 1,
        Letter::Z => 2,
        Letter::I => unreachable!("support holds non-identity letters"),
    }
}

fn commutation_bits(generators: &[PauliString], q: usize, letter: Letter) -> SmallVec<[u64; 4]> {
    let mut out = SmallVec::from_elem(0u64, words_for(generators.len()));
    let (x, z) = letter.xz();
    for (i, g) in generators.iter().enumerate() {
        let anti = (x && g.z_bit(q)) ^ (z && g.x_bit(q));
        if anti {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

impl SyndromeColumns {
    pub fn new(code: &QuantumCode) -> Self {
        let n = code.n();
        let mut syndromes = Vec::with_capacity(3 * n);
        let mut logicals = Vec::with_capacity(3 * n);
        for q in 0..n {
            for l in Letter::NON_IDENTITY {
                syndromes.push(Syndrome(
                    commutation_bits(code.stabilizers(), q, l).into_iter().collect(),
                ));
                logicals.push(commutation_bits(code.logicals(), q, l));
            }
        }
        SyndromeColumns {
            n,
            s: code.s(),
            num_logicals: code.logicals().len(),
            syndromes,
            logicals,
        }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn syndrome(&self, support: &[(usize, Letter)]) -> Syndrome {
        let mut acc = Syndrome::zero(self.s);
        for &(q, l) in support {
            for (a, b) in acc.0.iter_mut().zip(&self.syndromes[3 * q + letter_slot(l)].0) {
                *a ^= b;
            }
        }
        acc
    }

    pub fn logical_key(&self, support: &[(usize, Letter)]) -> LogicalKey {
        let mut acc: LogicalKey = SmallVec::from_elem(0, words_for(self.num_logicals));
        for &(q, l) in support {
            for (a, b) in acc.iter_mut().zip(&self.logicals[3 * q + letter_slot(l)]) {
                *a ^= b;
            }
        }
        acc
    }

    /// Two patterns with equal syndromes differ by a stabilizer iff their
    /// logical keys agree.
    pub fn equivalent(&self, a: &[(usize, Letter)], b: &[(usize, Letter)]) -> bool {
        self.syndrome(a) == self.syndrome(b) && self.logical_key(a) == self.logical_key(b)
    }

    pub fn syndrome_of(&self, e: &PauliString) -> Result<Syndrome> {
        check_dims(self.n, e.num_qubits())?;
        let support: Support = e.support().collect();
        Ok(self.syndrome(&support))
    }
}

/// Coset leader of one occupied syndrome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeaderEntry {
    pub index: u64,
    pub probability: f64,
    /// Later patterns sharing this syndrome.
    pub collisions: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Map from occupied syndrome to coset leader, with collision and
/// degeneracy bookkeeping gathered while streaming the noise model.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    columns: SyndromeColumns,
    noise: NoiseModel,
    leaders: FxHashMap<Syndrome, LeaderEntry>,
    occupied: u64,
    n_p: u64,
    n_j: u64,
    leaders_by_weight: BTreeMap<usize, u64>,
    patterns_by_weight: BTreeMap<usize, u64>,
    success_probability: f64,
    collision_mass: f64,
    collision_count: u64,
    degenerate_count: u64,
    degenerate_mass: f64,
    degenerate_pairs: Vec<(u64, u64)>,
}

impl SyndromeTable {
    /// Streams `noise` in order. The first pattern seen for a syndrome
    /// becomes its leader. Only leaders with index `≤ precompute_limit`
    /// are kept for lookup; the rest are searched on the fly when decoding.
    pub fn build(code: &QuantumCode, noise: &NoiseModel, precompute_limit: Option<u64>) -> Result<Self> {
        check_dims(code.n(), noise.n())?;
        let columns = SyndromeColumns::new(code);
        let num_errors = noise.num_errors();
        let n_p = precompute_limit.map_or(num_errors, |l| l.min(num_errors));
        let mut leaders: FxHashMap<Syndrome, LeaderEntry> = FxHashMap::default();
        let mut leader_keys: FxHashMap<Syndrome, LogicalKey> = FxHashMap::default();
        let mut leaders_by_weight = BTreeMap::new();
        let mut patterns_by_weight = BTreeMap::new();
        let mut success = NeumaierSum::default();
        let mut collision_mass = NeumaierSum::default();
        let mut degenerate_mass = NeumaierSum::default();
        let (mut collision_count, mut degenerate_count) = (0u64, 0u64);
        let mut degenerate_pairs = Vec::new();

        for entry in noise.iter() {
            let w = entry.weight();
            *patterns_by_weight.entry(w).or_insert(0u64) += 1;
            let syndrome = columns.syndrome(&entry.support);
            match leaders.get_mut(&syndrome) {
                None => {
                    leaders.insert(
                        syndrome,
                        LeaderEntry {
                            index: entry.index,
                            probability: entry.probability,
                            collisions: 0,
                        },
                    );
                    *leaders_by_weight.entry(w).or_insert(0u64) += 1;
                    success.add(entry.probability);
                }
                Some(leader) => {
                    leader.collisions += 1;
                    collision_count += 1;
                    collision_mass.add(entry.probability);
                    let leader_index = leader.index;
                    let leader_key = leader_keys.entry(syndrome).or_insert_with(|| {
                        let support: Support = noise
                            .pattern(leader_index)
                            .expect("leader index is listed")
                            .support()
                            .collect();
                        columns.logical_key(&support)
                    });
                    if *leader_key == columns.logical_key(&entry.support) {
                        degenerate_count += 1;
                        degenerate_mass.add(entry.probability);
                        if degenerate_pairs.len() < DEGENERATE_PAIR_LIMIT {
                            degenerate_pairs.push((leader_index, entry.index));
                        }
                    }
                }
            }
        }
        let occupied = leaders.len() as u64;
        if n_p < num_errors {
            leaders.retain(|_, e| e.index <= n_p);
        }
        leaders_by_weight.entry(0).or_insert(0);
        Ok(SyndromeTable {
            columns,
            noise: noise.clone(),
            leaders,
            occupied,
            n_p,
            n_j: num_errors - n_p,
            leaders_by_weight,
            patterns_by_weight,
            success_probability: success.value(),
            collision_mass: collision_mass.value(),
            collision_count,
            degenerate_count,
            degenerate_mass: degenerate_mass.value(),
            degenerate_pairs,
        })
    }

    pub fn columns(&self) -> &SyndromeColumns {
        &self.columns
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn s(&self) -> usize {
        self.columns.s
    }

    /// Number of occupied syndromes `u`.
    pub fn occupied(&self) -> u64 {
        self.occupied
    }

    /// Precomputed non-identity entries `N_P`.
    pub fn n_p(&self) -> u64 {
        self.n_p
    }

    /// Entries left for on-the-fly computation `N_J`.
    pub fn n_j(&self) -> u64 {
        self.n_j
    }

    /// Leader among the precomputed entries.
    pub fn leader(&self, syndrome: &Syndrome) -> Option<&LeaderEntry> {
        self.leaders.get(syndrome)
    }

    /// Precomputed leaders, in unspecified order.
    pub fn leaders(&self) -> impl Iterator<Item = (&Syndrome, &LeaderEntry)> {
        self.leaders.iter()
    }

    pub fn leaders_by_weight(&self) -> &BTreeMap<usize, u64> {
        &self.leaders_by_weight
    }

    pub fn patterns_by_weight(&self) -> &BTreeMap<usize, u64> {
        &self.patterns_by_weight
    }

    /// `Σ` over occupied syndromes of the leader probability.
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    /// Listed probability mass of patterns that are not leaders.
    pub fn collision_mass(&self) -> f64 {
        self.collision_mass
    }

    pub fn collision_count(&self) -> u64 {
        self.collision_count
    }

    /// Non-leader patterns equivalent to their leader up to a stabilizer.
    pub fn degenerate_count(&self) -> u64 {
        self.degenerate_count
    }

    pub fn degenerate_mass(&self) -> f64 {
        self.degenerate_mass
    }

    /// `(leader, pattern)` index pairs, capped at [`DEGENERATE_PAIR_LIMIT`].
    pub fn degenerate_pairs(&self) -> &[(u64, u64)] {
        &self.degenerate_pairs
    }

    fn search_on_the_fly(&self, syndrome: &Syndrome, abandon_after: Option<u64>) -> Option<u64> {
        let last = abandon_after.unwrap_or(u64::MAX);
        self.noise
            .iter_from(self.n_p + 1)
            .take_while(|e| e.index <= last)
            .find(|e| self.columns.syndrome(&e.support) == *syndrome)
            .map(|e| e.index)
    }

    /// Decodes a measured syndrome.
    pub fn decode(&self, syndrome: &Syndrome, abandon_after: Option<u64>) -> DecodeOutcome {
        if syndrome.is_zero() {
            return DecodeOutcome::NoError;
        }
        let index = match self.leaders.get(syndrome) {
            Some(e) => Some(e.index),
            None if self.n_j > 0 => self.search_on_the_fly(syndrome, abandon_after),
            None => None,
        };
        match index {
            Some(i) if abandon_after.is_none_or(|a| i <= a) => DecodeOutcome::Corrected {
                index: i,
                pattern: self.noise.pattern(i).expect("leader index is listed"),
            },
            _ => DecodeOutcome::Abandoned,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    NoError,
    /// Apply `pattern` (self-inverse) as the recovery.
    Corrected { index: u64, pattern: PauliString },
    Abandoned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodingMode {
    MembershipTest,
    SyndromeDecoding,
}

impl DecodingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecodingMode::MembershipTest => "membership_test",
            DecodingMode::SyndromeDecoding => "syndrome_decoding",
        }
    }
}

impl std::str::FromStr for DecodingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "membership_test" | "membership" => Ok(DecodingMode::MembershipTest),
            "syndrome_decoding" | "syndrome" => Ok(DecodingMode::SyndromeDecoding),
            _ => Err(invalid(format!("unknown decoding mode {s:?}"))),
        }
    }
}

/// Outcome of one simulated decoding trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    /// `None` when the error fell in the unlisted residual of an explicit model.
    pub true_pattern: Option<PauliString>,
    pub true_index: Option<u64>,
    pub syndrome: Option<Syndrome>,
    pub decoded_index: Option<u64>,
    pub decoded_pattern: Option<PauliString>,
    pub success: bool,
    /// Decoded pattern differs from the true one by a stabilizer.
    pub degenerate: bool,
    pub iterations: u64,
    pub measurements: u64,
    /// Candidates rejected in membership mode and the bits read on them.
    pub rejected: u64,
    pub rejected_measurements: u64,
}

/// Draws an error from `noise` and decodes it. Errors outside the listed
/// entries always count as failures.
pub fn simulate_trial<R: Rng + ?Sized>(
    table: &SyndromeTable,
    rng: &mut R,
    mode: DecodingMode,
    abandon_after: Option<u64>,
    trial: u64,
) -> TrialRecord {
    let noise = &table.noise;
    let columns = &table.columns;
    let n = noise.n();
    let s = columns.s as u64;
    let (support, true_index) = match noise.sample(rng) {
        SampledError::Listed { index, support } => (Some(support), Some(index)),
        SampledError::Residual { support } => (support, None),
    };
    let mut record = TrialRecord {
        trial,
        true_pattern: support
            .as_ref()
            .map(|sp| PauliString::from_support(n, sp).expect("sampled support fits")),
        true_index,
        syndrome: None,
        decoded_index: None,
        decoded_pattern: None,
        success: false,
        degenerate: false,
        iterations: 0,
        measurements: 0,
        rejected: 0,
        rejected_measurements: 0,
    };
    let Some(support) = support else {
        return record;
    };
    let syndrome = columns.syndrome(&support);
    let decoded = match mode {
        DecodingMode::SyndromeDecoding => {
            record.iterations = 1;
            record.measurements = s;
            match table.decode(&syndrome, abandon_after) {
                DecodeOutcome::NoError => Some(0),
                DecodeOutcome::Corrected { index, .. } => Some(index),
                DecodeOutcome::Abandoned => None,
            }
        }
        DecodingMode::MembershipTest => {
            let last = abandon_after.unwrap_or(u64::MAX);
            let mut accepted = None;
            for candidate in noise.iter().take_while(|e| e.index <= last) {
                record.iterations += 1;
                let residual = syndrome.xor(&columns.syndrome(&candidate.support));
                match residual.first_set_bit() {
                    None => {
                        record.measurements += s;
                        accepted = Some(candidate.index);
                        break;
                    }
                    Some(bit) => {
                        record.measurements += bit as u64 + 1;
                        record.rejected += 1;
                        record.rejected_measurements += bit as u64 + 1;
                    }
                }
            }
            accepted
        }
    };
    record.syndrome = Some(syndrome);
    if let Some(index) = decoded {
        let pattern = noise.pattern(index).expect("decoded index is listed");
        let decoded_support: Support = pattern.support().collect();
        let equal = decoded_support == support;
        let equivalent = equal || columns.equivalent(&decoded_support, &support);
        record.success = true_index.is_some() && equivalent;
        record.degenerate = equivalent && !equal;
        record.decoded_index = Some(index);
        record.decoded_pattern = Some(pattern);
    }
    record
}

/// Writes trial records as CSV with a header row.
pub fn write_trial_log<W: std::io::Write>(writer: W, s: usize, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "trial",
        "true_pattern",
        "syndrome_hex",
        "decoded_pattern",
        "success",
        "iterations",
        "measurements",
    ])?;
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.true_pattern.as_ref().map_or_else(|| "residual".into(), |p| p.to_string()),
            r.syndrome.as_ref().map_or_else(String::new, |v| v.to_hex(s)),
            r.decoded_pattern.as_ref().map_or_else(String::new, |p| p.to_string()),
            r.success.to_string(),
            r.iterations.to_string(),
            r.measurements.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Which terms enter `⟨C_s(p)⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationConvention {
    /// `Σ_{i=1}^{s} i(1−p)^{i−1}p`, without the all-zero branch.
    #[default]
    Printed,
    /// Adds `s·(1−p)^s` for the event that all `s` bits read 0.
    WithAllZeroMass,
}

/// Mean number of bits read until the first 1, each bit being 1 with
/// probability `p`, truncated after `s` bits.
pub fn expected_bits_until_hit(s: usize, p: f64, convention: TruncationConvention) -> f64 {
    let q = 1.0 - p;
    let mut sum = 0.0;
    let mut qi = 1.0;
    for i in 1..=s {
        sum += i as f64 * qi * p;
        qi *= q;
    }
    match convention {
        TruncationConvention::Printed => sum,
        TruncationConvention::WithAllZeroMass => sum + s as f64 * qi,
    }
}

/// Closed form of [`expected_bits_until_hit`] at `p = 1/2`.
pub fn c_s_half(s: usize, convention: TruncationConvention) -> f64 {
    let tail = (-(s as f64)).exp2();
    match convention {
        TruncationConvention::Printed => 2.0 - (s as f64 + 2.0) * tail,
        TruncationConvention::WithAllZeroMass => 2.0 - 2.0 * tail,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MeasurementCost {
    pub s: usize,
    pub convention: TruncationConvention,
    /// `⟨C_s⟩` at `p = 1/2`.
    pub c_s_half: f64,
    /// `p₀·s + (1 − p₀)·⟨C_s⟩`.
    pub c_s_p0: f64,
    /// `I = Σ (i + 1)·p_i`.
    pub iterations_i: f64,
    /// `⟨C⟩ = s + (I − 1)·⟨C_s⟩`.
    pub total_c: f64,
    /// `s − 2 + 2I`.
    pub bound: f64,
}

/// Expected stabilizer measurements for membership-test decoding. Fails
/// if `⟨C⟩ < s − 2 + 2I` does not hold; at `I = 1` both sides equal `s`.
/// The reported `I` sums over the listed entries only; the inequality is
/// checked on the listed entries renormalized to unit mass.
pub fn measurement_cost(s: usize, noise: &NoiseModel, convention: TruncationConvention) -> Result<MeasurementCost> {
    if s == 0 {
        return Err(invalid("measurement cost needs s ≥ 1"));
    }
    let c = c_s_half(s, convention);
    let p0 = noise.p0();
    let i = noise.expected_iterations();
    let total = s as f64 + (i - 1.0) * c;
    let bound = s as f64 - 2.0 + 2.0 * i;
    let mass = 1.0 - noise.residual();
    let i_norm = if mass > 0.0 { i / mass } else { 1.0 };
    let (total_norm, bound_norm) = (s as f64 + (i_norm - 1.0) * c, s as f64 - 2.0 + 2.0 * i_norm);
    let tol = 1e-12 * bound_norm.abs().max(1.0);
    let holds = total_norm < bound_norm || ((i_norm - 1.0).abs() <= 1e-12 && (total_norm - bound_norm).abs() <= tol);
    if !holds {
        return Err(Error::Assertion(format!(
            "⟨C⟩ = {total_norm} violates the bound s − 2 + 2I = {bound_norm}"
        )));
    }
    Ok(MeasurementCost {
        s,
        convention,
        c_s_half: c,
        c_s_p0: p0 * s as f64 + (1.0 - p0) * c,
        iterations_i: i,
        total_c: total,
        bound,
    })
}

/// Syndromes and probabilities of a materialized noise model.
#[derive(Clone, Debug)]
pub struct SyndromeMatrix {
    s: usize,
    syndromes: Vec<Syndrome>,
    probabilities: Vec<f64>,
}

impl SyndromeMatrix {
    pub fn new(code: &QuantumCode, noise: &NoiseModel) -> Result<Self> {
        check_dims(code.n(), noise.n())?;
        let columns = SyndromeColumns::new(code);
        let (syndromes, probabilities) = noise
            .iter()
            .map(|e| (columns.syndrome(&e.support), e.probability))
            .unzip();
        Ok(SyndromeMatrix {
            s: code.s(),
            syndromes,
            probabilities,
        })
    }

    pub fn from_parts(s: usize, syndromes: Vec<Syndrome>, probabilities: Vec<f64>) -> Result<Self> {
        if syndromes.len() != probabilities.len() {
            return Err(invalid("syndrome and probability lists differ in length"));
        }
        if syndromes.iter().any(|v| v.words().len() != words_for(s)) {
            return Err(invalid("syndrome length does not match s"));
        }
        Ok(SyndromeMatrix {
            s,
            syndromes,
            probabilities,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.syndromes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syndromes.is_empty()
    }

    pub fn syndromes(&self) -> &[Syndrome] {
        &self.syndromes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecisionNode {
    /// Surviving patterns. More than one means they share every remaining bit.
    Leaf { patterns: Vec<usize>, depth: usize },
    Split { bit: usize, zero: usize, one: usize },
}

/// Adaptive stabilizer-measurement order; node 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<DecisionNode>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[DecisionNode] {
        &self.nodes
    }

    /// Follows the tree for a syndrome; returns the leaf patterns and depth.
    pub fn classify(&self, syndrome: &Syndrome) -> (&[usize], usize) {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                DecisionNode::Leaf { patterns, depth } => return (patterns, *depth),
                DecisionNode::Split { bit, zero, one } => {
                    node = if syndrome.bit(*bit) { *one } else { *zero };
                }
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, DecisionNode::Leaf { .. }))
            .count()
    }
}

/// Builds a decision tree that measures, at each node, the stabilizer
/// splitting the surviving probability mass most evenly. Ties prefer the
/// split leaving fewer patterns on the heavier side, then the lower bit.
/// Returns the tree and its probability-weighted expected depth.
pub fn greedy_ordering(matrix: &SyndromeMatrix) -> (DecisionTree, f64) {
    let mut nodes = Vec::new();
    let all: Vec<usize> = (0..matrix.len()).collect();
    build_node(matrix, all, 0, &mut nodes);
    let tree = DecisionTree { nodes };
    let total = matrix.total_mass();
    let weighted: f64 = tree
        .nodes
        .iter()
        .filter_map(|n| match n {
            DecisionNode::Leaf { patterns, depth } => Some(
                patterns.iter().map(|&i| matrix.probabilities[i]).sum::<f64>() * *depth as f64,
            ),
            DecisionNode::Split { .. } => None,
        })
        .sum();
    let expected = if total > 0.0 { weighted / total } else { 0.0 };
    (tree, expected)
}

fn build_node(matrix: &SyndromeMatrix, set: Vec<usize>, depth: usize, nodes: &mut Vec<DecisionNode>) -> usize {
    let id = nodes.len();
    nodes.push(DecisionNode::Leaf {
        patterns: Vec::new(),
        depth,
    });
    if set.len() <= 1 {
        nodes[id] = DecisionNode::Leaf { patterns: set, depth };
        return id;
    }
    let mass: f64 = set.iter().map(|&i| matrix.probabilities[i]).sum();
    let mut best: Option<(f64, usize, usize)> = None;
    for bit in 0..matrix.s {
        let (mut m1, mut c1) = (0.0, 0usize);
        for &i in &set {
            if matrix.syndromes[i].bit(bit) {
                m1 += matrix.probabilities[i];
                c1 += 1;
            }
        }
        if c1 == 0 || c1 == set.len() {
            continue;
        }
        let m0 = mass - m1;
        let c0 = set.len() - c1;
        let heavy = if m1 > m0 {
            c1
        } else if m0 > m1 {
            c0
        } else {
            c0.max(c1)
        };
        let key = ((m1 - m0).abs(), heavy, bit);
        let better = match best {
            None => true,
            Some((imb, h, _)) => key.0 < imb || (key.0 == imb && key.1 < h),
        };
        if better {
            best = Some(key);
        }
    }
    let Some((_, _, bit)) = best else {
        nodes[id] = DecisionNode::Leaf { patterns: set, depth };
        return id;
    };
    let (ones, zeros): (Vec<usize>, Vec<usize>) = set.into_iter().partition(|&i| matrix.syndromes[i].bit(bit));
    let zero = build_node(matrix, zeros, depth + 1, nodes);
    let one = build_node(matrix, ones, depth + 1, nodes);
    nodes[id] = DecisionNode::Split { bit, zero, one };
    id
}

/// Expected number of stabilizers read, in the fixed order `order`, until
/// the pattern is distinguished from every other listed pattern. Patterns
/// sharing a full syndrome cost `order.len()`.
pub fn fixed_ordering_cost(matrix: &SyndromeMatrix, order: &[usize]) -> Result<f64> {
    let mut seen = vec![false; matrix.s];
    for &b in order {
        if b >= matrix.s || std::mem::replace(&mut seen[b], true) {
            return Err(invalid("order must be a permutation of the stabilizer indices"));
        }
    }
    let permuted: Vec<Syndrome> = matrix
        .syndromes
        .iter()
        .map(|v| Syndrome::from_bits(&order.iter().map(|&b| v.bit(b)).collect::<Vec<_>>()))
        .collect();
    let total = matrix.total_mass();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let m = permuted.len();
    let mut cost = vec![0usize; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let need = permuted[i].xor(&permuted[j]).first_set_bit().map_or(order.len(), |p| p + 1);
            cost[i] = cost[i].max(need);
            cost[j] = cost[j].max(need);
        }
    }
    Ok(cost
        .iter()
        .zip(&matrix.probabilities)
        .map(|(&c, &p)| c as f64 * p)
        .sum::<f64>()
        / total)
}

/// [`fixed_ordering_cost`] for a uniformly random order.
pub fn random_ordering_cost<R: Rng + ?Sized>(matrix: &SyndromeMatrix, rng: &mut R) -> f64 {
    let mut order: Vec<usize> = (0..matrix.s).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    fixed_ordering_cost(matrix, &order).expect("shuffled order is a permutation")
}

impl fmt::Display for DecodeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeOutcome::NoError => write!(f, "no_error"),
            DecodeOutcome::Corrected { pattern, .. } => write!(f, "corrected({pattern})"),
            DecodeOutcome::Abandoned => write!(f, "abandoned"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_qrlc, Connectivity};
    use crate::noise::bernoulli_model;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trivial_code() -> QuantumCode {
        build_qrlc(2, 1, 0, Connectivity::AllToAll, 0).unwrap()
    }

    #[test]
    fn trivial_code_table() {
        let code = trivial_code();
        let noise = bernoulli_model(2, 0.3, 1).unwrap();
        let table = SyndromeTable::build(&code, &noise, None).unwrap();
        assert_eq!(table.occupied(), 2);
        let one = Syndrome::from_bits(&[true]);
        let leader = table.leader(&one).unwrap();
        assert_eq!(noise.pattern(leader.index).unwrap().to_string(), "IX");
        assert_eq!(leader.collisions, 1);
        let zero = table.leader(&Syndrome::zero(1)).unwrap();
        assert_eq!(zero.index, 0);
        assert_eq!(zero.collisions, 4);
        assert_abs_diff_eq!(table.success_probability(), 0.56, epsilon = 1e-12);
        assert_eq!(table.leaders_by_weight()[&1], 1);
        // X and Y on the ancilla differ by the stabilizer, as do I and Z
        let pairs: Vec<String> = table
            .degenerate_pairs()
            .iter()
            .map(|&(a, b)| format!("{}~{}", noise.pattern(a).unwrap(), noise.pattern(b).unwrap()))
            .collect();
        assert_eq!(pairs, ["IX~IY", "II~IZ"]);
    }

    #[test]
    fn decode_examples() {
        let code = trivial_code();
        let noise = bernoulli_model(2, 0.3, 1).unwrap();
        let table = SyndromeTable::build(&code, &noise, None).unwrap();
        assert_eq!(table.decode(&Syndrome::zero(1), None), DecodeOutcome::NoError);
        let x2: PauliString = "IX".parse().unwrap();
        let syn = syndrome_of(&code, &x2).unwrap();
        match table.decode(&syn, None) {
            DecodeOutcome::Corrected { pattern, .. } => assert_eq!(pattern, x2),
            other => panic!("unexpected {other}"),
        }
        assert_eq!(table.decode(&syn, Some(0)), DecodeOutcome::Abandoned);
    }

    #[test]
    fn identity_only_noise() {
        let code = build_qrlc(6, 2, 30, Connectivity::AllToAll, 3).unwrap();
        let noise = bernoulli_model(6, 0.01, 0).unwrap();
        let table = SyndromeTable::build(&code, &noise, None).unwrap();
        assert_eq!(table.occupied(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let exact = NoiseModel::from_entries(6, vec![(1.0, PauliString::identity(6))]).unwrap();
        let exact_table = SyndromeTable::build(&code, &exact, None).unwrap();
        for mode in [DecodingMode::MembershipTest, DecodingMode::SyndromeDecoding] {
            let r = simulate_trial(&exact_table, &mut rng, mode, None, 0);
            assert!(r.success);
            assert_eq!(r.iterations, 1);
            assert_eq!(r.measurements, 4);
        }
    }

    #[test]
    fn column_syndromes_match_parity_check() {
        let code = build_qrlc(9, 3, 80, Connectivity::AllToAll, 11).unwrap();
        let columns = SyndromeColumns::new(&code);
        let noise = bernoulli_model(9, 0.1, 2).unwrap();
        for e in noise.iter() {
            let p = e.pattern(9);
            assert_eq!(columns.syndrome(&e.support), syndrome_of(&code, &p).unwrap());
        }
        for st in code.stabilizers() {
            assert!(syndrome_of(&code, st).unwrap().is_zero());
        }
    }

    #[test]
    fn precompute_limit_keeps_decoding_identical() {
        let code = build_qrlc(8, 3, 60, Connectivity::AllToAll, 5).unwrap();
        let noise = bernoulli_model(8, 0.05, 2).unwrap();
        let full = SyndromeTable::build(&code, &noise, None).unwrap();
        let partial = SyndromeTable::build(&code, &noise, Some(10)).unwrap();
        assert_eq!(partial.n_p() + partial.n_j(), noise.num_errors());
        assert_eq!(partial.n_p(), 10);
        for e in noise.iter() {
            let syn = full.columns().syndrome(&e.support);
            assert_eq!(full.decode(&syn, None), partial.decode(&syn, None));
            assert_eq!(full.decode(&syn, Some(30)), partial.decode(&syn, Some(30)));
        }
    }

    #[test]
    fn modes_agree_with_decode() {
        let code = build_qrlc(10, 4, 100, Connectivity::AllToAll, 9).unwrap();
        let noise = bernoulli_model(10, 0.05, 2).unwrap();
        let table = SyndromeTable::build(&code, &noise, None).unwrap();
        for mode in [DecodingMode::MembershipTest, DecodingMode::SyndromeDecoding] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for t in 0..300 {
                let r = simulate_trial(&table, &mut rng, mode, None, t);
                if let (Some(syn), Some(_)) = (&r.syndrome, r.true_index) {
                    let expected = match table.decode(syn, None) {
                        DecodeOutcome::NoError => Some(0),
                        DecodeOutcome::Corrected { index, .. } => Some(index),
                        DecodeOutcome::Abandoned => None,
                    };
                    assert_eq!(r.decoded_index, expected);
                } else {
                    assert!(!r.success);
                }
            }
        }
    }

    #[test]
    fn bits_until_hit_examples() {
        let c = TruncationConvention::Printed;
        assert_abs_diff_eq!(expected_bits_until_hit(1, 0.5, c), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c_s_half(1, c), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c_s_half(4, c), 1.625, epsilon = 1e-15);
        let alt = TruncationConvention::WithAllZeroMass;
        assert_abs_diff_eq!(c_s_half(4, alt), expected_bits_until_hit(4, 0.5, alt), epsilon = 1e-15);
        assert_abs_diff_eq!(c_s_half(1, alt), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn measurement_cost_without_errors() {
        let noise = NoiseModel::from_entries(3, vec![(1.0, PauliString::identity(3))]).unwrap();
        let c = measurement_cost(5, &noise, TruncationConvention::Printed).unwrap();
        assert_eq!(c.iterations_i, 1.0);
        assert_eq!(c.total_c, 5.0);
        assert_eq!(c.c_s_p0, 5.0);
        assert!(measurement_cost(0, &noise, TruncationConvention::Printed).is_err());
    }

    #[test]
    fn greedy_tree_on_small_matrix() {
        let syn = |b: &[bool]| Syndrome::from_bits(b);
        let m = SyndromeMatrix::from_parts(
            3,
            vec![syn(&[false, false, false]), syn(&[true, false, true]), syn(&[false, true, true]), syn(&[true, true, false])],
            vec![0.25; 4],
        )
        .unwrap();
        let (tree, depth) = greedy_ordering(&m);
        assert_abs_diff_eq!(depth, 2.0, epsilon = 1e-12);
        for (i, v) in m.syndromes().iter().enumerate() {
            let (leaf, d) = tree.classify(v);
            assert_eq!(leaf, [i]);
            assert_eq!(d, 2);
        }
        assert_abs_diff_eq!(fixed_ordering_cost(&m, &[0, 1, 2]).unwrap(), 2.0, epsilon = 1e-12);
        assert!(fixed_ordering_cost(&m, &[0, 0, 1]).is_err());
    }

    #[test]
    fn two_pattern_depth_bounds() {
        let code = build_qrlc(8, 1, 80, Connectivity::AllToAll, 2).unwrap();
        let e: PauliString = "IIXIIIII".parse().unwrap();
        let noise = NoiseModel::from_entries(8, vec![(0.6, PauliString::identity(8)), (0.4, e.clone())]).unwrap();
        let m = SyndromeMatrix::new(&code, &noise).unwrap();
        let (_, depth) = greedy_ordering(&m);
        let differing = m.syndromes()[1].words().iter().map(|w| w.count_ones()).sum::<u32>() as f64;
        if differing > 0.0 {
            assert!((1.0..=differing).contains(&depth));
        }
    }

    #[test]
    fn ambiguous_leaves_keep_all_patterns() {
        let z = Syndrome::zero(2);
        let m = SyndromeMatrix::from_parts(2, vec![z.clone(), z.clone()], vec![0.5, 0.5]).unwrap();
        let (tree, depth) = greedy_ordering(&m);
        assert_eq!(tree.num_leaves(), 1);
        assert_eq!(depth, 0.0);
        assert_eq!(fixed_ordering_cost(&m, &[1, 0]).unwrap(), 2.0);
    }
}
