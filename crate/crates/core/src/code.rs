//! Quantum random linear codes: construction from random two-qubit
//! Cliffords, the parity-check matrix, and the versioned text file format.
//!
//! The parity-check matrix `A` has one row per stabilizer laid out as
//! `[z | x]`, so that for an error with symplectic row `M_E = [x | z]` the
//! syndrome is `M_E · Aᵀ` over GF(2).

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::clifford::{extract_stabilizers, sample_c2, CliffordGate};
use crate::error::{check_dims, invalid, Error, Result};
use crate::gf2::{get_bit, set_bit, words_for, BitMatrix, RowBasis};
use crate::pauli::PauliString;

pub const CODE_FILE_HEADER: &str = "QGRAND-CODE 1";

/// How random gates choose their qubit pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Connectivity {
    /// Uniform over unordered pairs of distinct qubits.
    #[default]
    AllToAll,
}

impl Connectivity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Connectivity::AllToAll => "all_to_all",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "all_to_all" => Ok(Connectivity::AllToAll),
            other => Err(Error::Format(format!("unknown connectivity {other:?}"))),
        }
    }

    fn sample_pair<R: Rng>(&self, n: usize, rng: &mut R) -> (usize, usize) {
        match self {
            Connectivity::AllToAll => {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                (a, b)
            }
        }
    }
}

/// Result of a phaseless stabilizer-group membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    /// Stabilizer generators whose product matches the query up to phase.
    pub generators: Vec<usize>,
    /// Power of `i` relating the query to the ordered generator product:
    /// `query = i^sign_phase · S_g0 · S_g1 · …`.
    pub sign_phase: u8,
}

#[derive(Clone, Debug)]
pub struct QuantumCode {
    n: usize,
    k: usize,
    seed: u64,
    connectivity: Connectivity,
    gates: Vec<CliffordGate>,
    stabilizers: Vec<PauliString>,
    logicals: Vec<PauliString>,
    parity_check: BitMatrix,
    basis: RowBasis,
}

impl PartialEq for QuantumCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.seed == other.seed
            && self.connectivity == other.connectivity
            && self.gates == other.gates
            && self.stabilizers == other.stabilizers
            && self.logicals == other.logicals
            && self.parity_check == other.parity_check
    }
}

impl Eq for QuantumCode {}

fn validate_sizes(n: usize, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(invalid(format!("need 0 < k < n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// Builds an `(n, k)` code from `num_gates` uniformly random two-qubit
/// Cliffords. For every gate the RNG draws the C2 index, then the pair.
/// The RNG is ChaCha8 seeded from `seed`, so the result is a pure function
/// of the arguments.
pub fn build_qrlc(
    n: usize,
    k: usize,
    num_gates: usize,
    connectivity: Connectivity,
    seed: u64,
) -> Result<QuantumCode> {
    validate_sizes(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = (0..num_gates)
        .map(|_| {
            let index = sample_c2(&mut rng);
            let (a, b) = connectivity.sample_pair(n, &mut rng);
            CliffordGate::C2 { a, b, index }
        })
        .collect();
    QuantumCode::from_circuit(n, k, gates, connectivity, seed)
}

/// `ceil(m · n · log₂²(n))`.
pub fn recommended_gate_count(n: usize, m: f64) -> Result<usize> {
    if n < 2 {
        return Err(invalid("recommended gate count needs n >= 2"));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(invalid("gate-count multiplier must be finite and non-negative"));
    }
    let l = (n as f64).log2();
    // guard against 0.21·16·16 = 53.76000000000001 style noise
    let raw = m * n as f64 * l * l;
    Ok((raw - 1e-9 * raw.max(1.0)).ceil() as usize)
}

impl QuantumCode {
    /// Encodes with an explicit circuit. Data qubits are `0..k`, ancillas
    /// `k..n`.
    pub fn from_circuit(
        n: usize,
        k: usize,
        gates: Vec<CliffordGate>,
        connectivity: Connectivity,
        seed: u64,
    ) -> Result<QuantumCode> {
        validate_sizes(n, k)?;
        let ops = extract_stabilizers(&gates, n, k)?;
        let parity_check = parity_check_of(n, &ops.stabilizers)?;
        let basis = RowBasis::new(&parity_check);
        if basis.rank() != n - k {
            return Err(Error::RankDeficient {
                rank: basis.rank(),
                expected: n - k,
            });
        }
        Ok(QuantumCode {
            n,
            k,
            seed,
            connectivity,
            gates,
            stabilizers: ops.stabilizers,
            logicals: ops.logicals,
            parity_check,
            basis,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of stabilizer generators `s = n − k`.
    pub fn s(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// `log₂ S` where `S = 2^s` is the number of syndromes.
    pub fn log2_syndromes(&self) -> usize {
        self.s()
    }

    /// `log₂ L` where `L = 2^{2k}` is the number of logical operators.
    pub fn log2_logicals(&self) -> usize {
        2 * self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn logicals(&self) -> &[PauliString] {
        &self.logicals
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// Phaseless membership of `p` in the stabilizer group, solved over
    /// GF(2) against the generators.
    pub fn stabilizer_membership(&self, p: &PauliString) -> Result<Option<Membership>> {
        check_dims(self.n, p.num_qubits())?;
        let Some(generators) = self.basis.solve(&p.symplectic_zx()) else {
            return Ok(None);
        };
        let mut product = PauliString::identity(self.n);
        for &g in &generators {
            product = product.multiply(&self.stabilizers[g])?;
        }
        let sign_phase = (p.phase() + 4 - product.phase()) % 4;
        Ok(Some(Membership {
            generators,
            sign_phase,
        }))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<QuantumCode> {
        let text = std::fs::read_to_string(path)?;
        QuantumCode::from_file_str(&text)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CODE_FILE_HEADER}");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "k {}", self.k);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "connectivity {}", self.connectivity.as_str());
        let _ = writeln!(out, "gates {}", self.gates.len());
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        let _ = writeln!(out, "stabilizers {}", self.stabilizers.len());
        for p in &self.stabilizers {
            let _ = writeln!(out, "{}", p.to_signed_string());
        }
        let _ = writeln!(out, "logicals {}", self.logicals.len());
        for p in &self.logicals {
            let _ = writeln!(out, "{}", p.to_signed_string());
        }
        let _ = writeln!(
            out,
            "parity_check {} {}",
            self.parity_check.num_rows(),
            self.parity_check.num_cols()
        );
        for row in self.parity_check.rows() {
            let _ = writeln!(out, "{}", row_to_hex(row, self.parity_check.num_cols()));
        }
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        let _ = writeln!(out, "checksum {digest}");
        out
    }

    pub fn from_file_str(text: &str) -> Result<QuantumCode> {
        let first = text.lines().next().unwrap_or("");
        if first.trim_end() != CODE_FILE_HEADER {
            return Err(Error::Version(format!(
                "expected header {CODE_FILE_HEADER:?}, found {first:?}"
            )));
        }
        let marker = text
            .rfind("checksum ")
            .ok_or_else(|| Error::Format("missing checksum line".into()))?;
        let (body, tail) = text.split_at(marker);
        let stored = tail["checksum ".len()..].trim().to_string();
        let computed = hex::encode(Sha256::digest(body.as_bytes()));
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }

        let mut lines = body.lines().skip(1);
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Format(format!("unexpected end of file, expected {what}")))
        };
        let n: usize = keyed(next("n")?, "n")?;
        let k: usize = keyed(next("k")?, "k")?;
        let seed: u64 = keyed(next("seed")?, "seed")?;
        let connectivity = Connectivity::parse(&keyed::<String>(next("connectivity")?, "connectivity")?)?;
        let num_gates: usize = keyed(next("gates")?, "gates")?;
        let mut gates = Vec::with_capacity(num_gates);
        for _ in 0..num_gates {
            gates.push(next("gate")?.parse::<CliffordGate>()?);
        }
        let num_stab: usize = keyed(next("stabilizers")?, "stabilizers")?;
        let mut stabilizers = Vec::with_capacity(num_stab);
        for _ in 0..num_stab {
            stabilizers.push(next("stabilizer")?.parse::<PauliString>()?);
        }
        let num_log: usize = keyed(next("logicals")?, "logicals")?;
        let mut logicals = Vec::with_capacity(num_log);
        for _ in 0..num_log {
            logicals.push(next("logical")?.parse::<PauliString>()?);
        }
        let dims = next("parity_check")?;
        let mut it = dims.split_whitespace();
        if it.next() != Some("parity_check") {
            return Err(Error::Format(format!("expected parity_check line, found {dims:?}")));
        }
        let rows: usize = parse_field(it.next(), "parity_check rows")?;
        let cols: usize = parse_field(it.next(), "parity_check cols")?;
        let mut stored_rows = Vec::with_capacity(rows);
        for _ in 0..rows {
            stored_rows.push(hex_to_row(next("parity row")?, cols)?);
        }
        if lines.next().is_some() {
            return Err(Error::Format("trailing content before checksum".into()));
        }
        let stored_a = BitMatrix::from_rows(cols, stored_rows)?;

        let code = QuantumCode::from_circuit(n, k, gates, connectivity, seed)?;
        if code.stabilizers != stabilizers {
            return Err(Error::Format(
                "stored stabilizers disagree with the encoding circuit".into(),
            ));
        }
        if code.logicals != logicals {
            return Err(Error::Format(
                "stored logical operators disagree with the encoding circuit".into(),
            ));
        }
        if parity_check_of(n, &stabilizers)? != stored_a {
            return Err(Error::Format(
                "stored parity-check matrix disagrees with the stabilizers".into(),
            ));
        }
        Ok(code)
    }
}

fn parity_check_of(n: usize, stabilizers: &[PauliString]) -> Result<BitMatrix> {
    for s in stabilizers {
        check_dims(n, s.num_qubits())?;
    }
    BitMatrix::from_rows(2 * n, stabilizers.iter().map(PauliString::symplectic_zx).collect())
}

fn keyed<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(Error::Format(format!("expected {key:?} line, found {line:?}")));
    }
    let value = parse_field(it.next(), key)?;
    if it.next().is_some() {
        return Err(Error::Format(format!("extra fields on {key:?} line")));
    }
    Ok(value)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Format(format!("missing value for {what}")))?
        .parse()
        .map_err(|_| Error::Format(format!("bad value for {what}")))
}

/// Hex digits read the row left to right: digit `d` holds bits
/// `4d..4d+3`, most significant first.
pub fn row_to_hex(row: &[u64], bits: usize) -> String {
    (0..bits.div_ceil(4))
        .map(|d| {
            let v = (0..4).fold(0u32, |acc, j| {
                let bit = 4 * d + j;
                acc | ((bit < bits && get_bit(row, bit)) as u32) << (3 - j)
            });
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

pub fn hex_to_row(text: &str, bits: usize) -> Result<Vec<u64>> {
    let text = text.trim();
    if text.len() != bits.div_ceil(4) {
        return Err(Error::Format(format!(
            "hex row has {} digits, expected {}",
            text.len(),
            bits.div_ceil(4)
        )));
    }
    let mut row = vec![0u64; words_for(bits)];
    for (d, c) in text.chars().enumerate() {
        let v = c
            .to_digit(16)
            .ok_or_else(|| Error::Format(format!("bad hex digit {c:?}")))?;
        for j in 0..4 {
            if v >> (3 - j) & 1 == 1 {
                let bit = 4 * d + j;
                if bit >= bits {
                    return Err(Error::Format("padding bits set in hex row".into()));
                }
                set_bit(&mut row, bit, true);
            }
        }
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_encoding_of_two_qubits() {
        let code = build_qrlc(2, 1, 0, Connectivity::AllToAll, 0).unwrap();
        assert_eq!(code.stabilizers(), &["IZ".parse::<PauliString>().unwrap()]);
        assert_eq!(code.s(), 1);
        assert_eq!(code.parity_check().rank(), 1);
    }

    #[test]
    fn invalid_sizes() {
        assert!(build_qrlc(1, 1, 0, Connectivity::AllToAll, 0).is_err());
        assert!(build_qrlc(4, 0, 0, Connectivity::AllToAll, 0).is_err());
        assert!(build_qrlc(4, 4, 0, Connectivity::AllToAll, 0).is_err());
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_qrlc(16, 1, 200, Connectivity::AllToAll, 7).unwrap();
        let b = build_qrlc(16, 1, 200, Connectivity::AllToAll, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_file_string(), b.to_file_string());
        let c = build_qrlc(16, 1, 200, Connectivity::AllToAll, 8).unwrap();
        assert_ne!(a.gates(), c.gates());
    }

    #[test]
    fn gate_count_formula() {
        assert_eq!(recommended_gate_count(16, 0.21).unwrap(), 54);
        assert_eq!(recommended_gate_count(2, 0.15).unwrap(), 1);
        assert_eq!(recommended_gate_count(128, 0.15).unwrap(), 941);
        assert!(recommended_gate_count(1, 0.15).is_err());
    }

    #[test]
    fn hex_rows_round_trip() {
        let mut row = vec![0u64; 2];
        for j in [0, 3, 64, 69] {
            set_bit(&mut row, j, true);
        }
        let h = row_to_hex(&row, 70);
        assert_eq!(h.len(), 18);
        assert!(h.starts_with('9'));
        assert_eq!(hex_to_row(&h, 70).unwrap(), row);
        assert!(hex_to_row("f", 3).is_err());
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let code = build_qrlc(5, 2, 20, Connectivity::AllToAll, 1).unwrap();
        let text = code.to_file_string();
        assert_eq!(QuantumCode::from_file_str(&text).unwrap(), code);

        let bad_header = text.replacen("QGRAND-CODE 1", "QGRAND-CODE 2", 1);
        assert!(matches!(
            QuantumCode::from_file_str(&bad_header),
            Err(Error::Version(_))
        ));
        let garbled = text.replacen("QGRAND", "QGRXND", 1);
        assert!(matches!(QuantumCode::from_file_str(&garbled), Err(Error::Version(_))));

        let tampered = text.replacen("seed 1", "seed 2", 1);
        assert!(matches!(
            QuantumCode::from_file_str(&tampered),
            Err(Error::Checksum { .. })
        ));
    }

    #[test]
    fn membership_recovers_products_and_signs() {
        let code = build_qrlc(6, 2, 40, Connectivity::AllToAll, 11).unwrap();
        let st = code.stabilizers();
        let prod = st[0].multiply(&st[2]).unwrap().multiply(&st[3]).unwrap();
        let m = code.stabilizer_membership(&prod).unwrap().unwrap();
        assert_eq!(m.generators, vec![0, 2, 3]);
        assert_eq!(m.sign_phase, 0);
        let mut neg = prod.clone();
        neg.add_phase(2);
        assert_eq!(code.stabilizer_membership(&neg).unwrap().unwrap().sign_phase, 2);
        assert!(code.stabilizer_membership(&code.logicals()[0]).unwrap().is_none());
    }
}
