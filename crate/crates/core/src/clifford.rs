//! Clifford gates acting on Pauli strings by conjugation, the canonical
//! enumeration of the two-qubit Clifford group, and stabilizer extraction
//! from an encoding circuit.
//!
//! Every gate is described by a local action table: for each of the `4^m`
//! raw Pauli patterns on its `m` targets it stores the image pattern and the
//! phase picked up by conjugation. Applying a gate to a string rewrites the
//! target bits and adds the phase, which is exact under the
//! `i^θ · X^x Z^z` convention of [`PauliString`].
//!
//! # Two-qubit Clifford enumeration
//!
//! A two-qubit Clifford (modulo global phase) is fixed by the images of
//! `X_a, Z_a, X_b, Z_b`. Each image is a Hermitian two-qubit Pauli encoded
//! as a 4-bit vector `x_a | z_a<<1 | x_b<<2 | z_b<<3` plus a sign bit.
//! The symplectic parts are enumerated by looping the four image vectors
//! over `1..16` in nested lexicographic order (first image outermost) and
//! keeping the tuples that preserve the symplectic form; this yields the
//! 720 elements of `Sp(4, GF(2))`. Index `16·m + s` denotes symplectic
//! element `m` with sign bits `s` (bit `j` negates image `j`), for 11 520
//! elements in total. The table is rebuilt deterministically on first use.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Order of the two-qubit Clifford group modulo global phase.
pub const C2_ORDER: usize = 11_520;
/// Order of `Sp(4, GF(2))`.
pub const SP4_ORDER: usize = 720;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    SqrtZ,
    Cnot,
    C2Sample,
}

/// A gate of an encoding circuit. Qubit indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    /// `diag(1, i)`.
    SqrtZ(usize),
    Cnot { control: usize, target: usize },
    /// Element `index` of the canonical enumeration, with `a` playing the
    /// role of the first qubit.
    C2 { a: usize, b: usize, index: u16 },
}

impl CliffordGate {
    pub fn kind(&self) -> GateKind {
        match self {
            CliffordGate::H(_) => GateKind::H,
            CliffordGate::SqrtZ(_) => GateKind::SqrtZ,
            CliffordGate::Cnot { .. } => GateKind::Cnot,
            CliffordGate::C2 { .. } => GateKind::C2Sample,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q) | CliffordGate::SqrtZ(q) => vec![q],
            CliffordGate::Cnot { control, target } => vec![control, target],
            CliffordGate::C2 { a, b, .. } => vec![a, b],
        }
    }

    pub fn c2_index(&self) -> Option<u16> {
        match self {
            CliffordGate::C2 { index, .. } => Some(*index),
            _ => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let targets = self.targets();
        if let Some(&q) = targets.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidParameter(format!(
                "gate target {q} out of range for {n} qubits"
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidParameter(format!(
                "two-qubit gate with repeated target {}",
                targets[0]
            )));
        }
        if let Some(index) = self.c2_index() {
            if index as usize >= C2_ORDER {
                return Err(Error::InvalidParameter(format!(
                    "C2 index {index} outside 0..{C2_ORDER}"
                )));
            }
        }
        Ok(())
    }

    fn action(&self) -> &'static LocalAction {
        match self {
            CliffordGate::H(_) => &single_qubit_tables().0,
            CliffordGate::SqrtZ(_) => &single_qubit_tables().1,
            CliffordGate::Cnot { .. } => cnot_table(),
            CliffordGate::C2 { index, .. } => &c2_group().actions[*index as usize],
        }
    }

    /// Gates whose sequential application undoes this gate exactly.
    pub fn inverse(&self) -> Vec<CliffordGate> {
        match *self {
            CliffordGate::H(_) | CliffordGate::Cnot { .. } => vec![*self],
            CliffordGate::SqrtZ(q) => vec![CliffordGate::SqrtZ(q); 3],
            CliffordGate::C2 { a, b, index } => vec![CliffordGate::C2 {
                a,
                b,
                index: c2_inverse(index),
            }],
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliffordGate::H(q) => write!(f, "H {q}"),
            CliffordGate::SqrtZ(q) => write!(f, "SQRTZ {q}"),
            CliffordGate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            CliffordGate::C2 { a, b, index } => write!(f, "C2 {a} {b} {index}"),
        }
    }
}

impl FromStr for CliffordGate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |reason: &str| Error::Parse {
            what: "gate line",
            reason: format!("{reason}: {line:?}"),
        };
        let num = |i: usize| -> Result<usize> {
            fields
                .get(i)
                .ok_or_else(|| bad("missing field"))?
                .parse::<usize>()
                .map_err(|_| bad("non-numeric field"))
        };
        let gate = match fields.first().map(|s| s.to_ascii_uppercase()).as_deref() {
            Some("H") if fields.len() == 2 => CliffordGate::H(num(1)?),
            Some("SQRTZ") | Some("S") if fields.len() == 2 => CliffordGate::SqrtZ(num(1)?),
            Some("CNOT") if fields.len() == 3 => CliffordGate::Cnot {
                control: num(1)?,
                target: num(2)?,
            },
            Some("C2") if fields.len() == 4 => {
                let index = num(3)?;
                if index >= C2_ORDER {
                    return Err(bad("C2 index out of range"));
                }
                CliffordGate::C2 {
                    a: num(1)?,
                    b: num(2)?,
                    index: index as u16,
                }
            }
            _ => return Err(bad("unknown gate or wrong arity")),
        };
        if gate.targets().len() == 2 && gate.targets()[0] == gate.targets()[1] {
            return Err(bad("repeated target"));
        }
        Ok(gate)
    }
}

/// Parses a circuit in the one-gate-per-line text format. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_circuit(text: &str) -> Result<Vec<CliffordGate>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

pub fn format_circuit(gates: &[CliffordGate]) -> String {
    gates.iter().map(|g| format!("{g}\n")).collect()
}

/// Conjugation table on `m ∈ {1, 2}` qubits. Pattern bit `2j` is the `x` bit
/// of target `j`, bit `2j+1` its `z` bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalAction {
    arity: usize,
    image: [u8; 16],
    phase: [u8; 16],
}

impl LocalAction {
    /// Builds the table from the images of the generators
    /// `X_0, Z_0[, X_1, Z_1]`, each given as raw bits plus a sign.
    fn from_generator_images(arity: usize, images: &[(u8, bool)]) -> LocalAction {
        debug_assert_eq!(images.len(), 2 * arity);
        let gens: Vec<PauliString> = images
            .iter()
            .map(|&(bits, negative)| hermitian_local(arity, bits, negative))
            .collect();
        let mut image = [0u8; 16];
        let mut phase = [0u8; 16];
        for pattern in 0..(1usize << (2 * arity)) {
            let mut acc = PauliString::identity(arity);
            for (g, gen) in gens.iter().enumerate() {
                if pattern >> g & 1 == 1 {
                    acc = acc.multiply(gen).expect("same arity");
                }
            }
            image[pattern] = local_bits(&acc);
            phase[pattern] = acc.phase();
        }
        LocalAction {
            arity,
            image,
            phase,
        }
    }

    fn apply(&self, p: &mut PauliString, targets: &[usize]) {
        let mut pattern = 0usize;
        for (j, &q) in targets.iter().enumerate() {
            pattern |= (p.x_bit(q) as usize) << (2 * j);
            pattern |= (p.z_bit(q) as usize) << (2 * j + 1);
        }
        let out = self.image[pattern];
        for (j, &q) in targets.iter().enumerate() {
            p.set_xz_raw(q, out >> (2 * j) & 1 == 1, out >> (2 * j + 1) & 1 == 1);
        }
        p.add_phase(self.phase[pattern]);
    }

    /// Images of the generators as (raw bits, phase exponent).
    fn generator_images(&self) -> Vec<(u8, u8)> {
        (0..2 * self.arity)
            .map(|g| (self.image[1 << g], self.phase[1 << g]))
            .collect()
    }
}

fn hermitian_local(arity: usize, bits: u8, negative: bool) -> PauliString {
    let mut p = PauliString::identity(arity);
    let mut ys = 0;
    for j in 0..arity {
        let x = bits >> (2 * j) & 1 == 1;
        let z = bits >> (2 * j + 1) & 1 == 1;
        p.set_xz_raw(j, x, z);
        ys += (x && z) as u8;
    }
    p.add_phase(ys + if negative { 2 } else { 0 });
    p
}

fn local_bits(p: &PauliString) -> u8 {
    (0..p.num_qubits()).fold(0u8, |acc, j| {
        acc | (p.x_bit(j) as u8) << (2 * j) | (p.z_bit(j) as u8) << (2 * j + 1)
    })
}

fn symplectic_form(u: u8, v: u8) -> bool {
    // x_a z_a x_b z_b
    let swapped = ((v & 0b0101) << 1) | ((v & 0b1010) >> 1);
    (u & swapped).count_ones() % 2 == 1
}

fn single_qubit_tables() -> &'static (LocalAction, LocalAction) {
    static TABLES: OnceLock<(LocalAction, LocalAction)> = OnceLock::new();
    TABLES.get_or_init(|| {
        // X = 0b01, Z = 0b10, Y = 0b11
        let h = LocalAction::from_generator_images(1, &[(0b10, false), (0b01, false)]);
        let s = LocalAction::from_generator_images(1, &[(0b11, false), (0b10, false)]);
        (h, s)
    })
}

fn cnot_table() -> &'static LocalAction {
    static TABLE: OnceLock<LocalAction> = OnceLock::new();
    TABLE.get_or_init(|| {
        LocalAction::from_generator_images(
            2,
            &[
                (0b0101, false), // X_c -> X_c X_t
                (0b0010, false), // Z_c -> Z_c
                (0b0100, false), // X_t -> X_t
                (0b1010, false), // Z_t -> Z_c Z_t
            ],
        )
    })
}

struct C2Group {
    actions: Vec<LocalAction>,
    identity: u16,
}

fn c2_group() -> &'static C2Group {
    static GROUP: OnceLock<C2Group> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut symplectic = Vec::with_capacity(SP4_ORDER);
        for xa in 1u8..16 {
            for za in 1u8..16 {
                if !symplectic_form(xa, za) {
                    continue;
                }
                for xb in 1u8..16 {
                    if symplectic_form(xa, xb) || symplectic_form(za, xb) {
                        continue;
                    }
                    for zb in 1u8..16 {
                        if symplectic_form(xb, zb)
                            && !symplectic_form(xa, zb)
                            && !symplectic_form(za, zb)
                        {
                            symplectic.push([xa, za, xb, zb]);
                        }
                    }
                }
            }
        }
        assert_eq!(symplectic.len(), SP4_ORDER);
        let mut actions = Vec::with_capacity(C2_ORDER);
        for images in &symplectic {
            for signs in 0u8..16 {
                let gens: Vec<(u8, bool)> = images
                    .iter()
                    .enumerate()
                    .map(|(j, &bits)| (bits, signs >> j & 1 == 1))
                    .collect();
                actions.push(LocalAction::from_generator_images(2, &gens));
            }
        }
        let identity_sym = symplectic
            .iter()
            .position(|m| *m == [0b0001, 0b0010, 0b0100, 0b1000])
            .expect("identity is symplectic");
        C2Group {
            actions,
            identity: (identity_sym * 16) as u16,
        }
    })
}

/// Index of the identity element in the canonical enumeration.
pub fn c2_identity_index() -> u16 {
    c2_group().identity
}

/// Images of `X_a, Z_a, X_b, Z_b` under element `index`, as Pauli strings
/// on two qubits.
pub fn c2_generator_images(index: u16) -> [PauliString; 4] {
    let action = &c2_group().actions[index as usize];
    let imgs = action.generator_images();
    std::array::from_fn(|g| {
        let (bits, phase) = imgs[g];
        let mut p = hermitian_local(2, bits, false);
        let ys = (bits & (bits >> 1) & 0b0101).count_ones() as u8;
        p.add_phase((phase + 4 - ys) & 3);
        p
    })
}

/// Index of the inverse element. Searches the group once per call.
pub fn c2_inverse(index: u16) -> u16 {
    let group = c2_group();
    let forward = &group.actions[index as usize];
    let gens: Vec<PauliString> = (0..4)
        .map(|g| hermitian_local(2, 1 << g, false))
        .collect();
    let images: Vec<PauliString> = gens
        .iter()
        .map(|g| {
            let mut p = g.clone();
            forward.apply(&mut p, &[0, 1]);
            p
        })
        .collect();
    (0..C2_ORDER as u16)
        .find(|&cand| {
            let back = &group.actions[cand as usize];
            images.iter().zip(&gens).all(|(img, g)| {
                let mut p = img.clone();
                back.apply(&mut p, &[0, 1]);
                p == *g
            })
        })
        .expect("every group element has an inverse")
}

/// Draws a uniformly random two-qubit Clifford index.
pub fn sample_c2<R: Rng + ?Sized>(rng: &mut R) -> u16 {
    rng.random_range(0..C2_ORDER as u16)
}

/// Conjugates `p` by `gate`: returns `U p U†`.
pub fn conjugate_pauli(p: &PauliString, gate: &CliffordGate) -> Result<PauliString> {
    gate.validate(p.num_qubits())?;
    let mut out = p.clone();
    gate.action().apply(&mut out, &gate.targets());
    Ok(out)
}

/// Stabilizer tableau. Rows `0..n` are destabilizers (initially `X_i`),
/// rows `n..2n` are stabilizers (initially `Z_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
}

impl Tableau {
    pub fn identity(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, crate::pauli::Letter::X).expect("in range"));
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, crate::pauli::Letter::Z).expect("in range"));
        }
        Tableau { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn destabilizer(&self, q: usize) -> &PauliString {
        &self.rows[q]
    }

    pub fn stabilizer(&self, q: usize) -> &PauliString {
        &self.rows[self.n + q]
    }

    /// Conjugates every row by `gate` in place.
    pub fn apply(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        let action = gate.action();
        let targets = gate.targets();
        for row in &mut self.rows {
            action.apply(row, &targets);
        }
        Ok(())
    }

    pub fn conjugated(&self, gate: &CliffordGate) -> Result<Tableau> {
        let mut t = self.clone();
        t.apply(gate)?;
        Ok(t)
    }
}

/// Stabilizers and logical operators of an encoding circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedOperators {
    /// Images of `Z_i` for the ancilla qubits `k..n`.
    pub stabilizers: Vec<PauliString>,
    /// Images of `X_i, Z_i` for the data qubits `0..k`, interleaved as
    /// `[X̄_0, Z̄_0, X̄_1, Z̄_1, …]`.
    pub logicals: Vec<PauliString>,
}

/// Runs the encoding circuit through a tableau and reads off the `n − k`
/// stabilizers and `2k` logical operators.
pub fn extract_stabilizers(circuit: &[CliffordGate], n: usize, k: usize) -> Result<EncodedOperators> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 0 < k < n, got n = {n}, k = {k}"
        )));
    }
    let mut tableau = Tableau::identity(n);
    for gate in circuit {
        tableau.apply(gate)?;
    }
    let stabilizers = (k..n).map(|q| tableau.stabilizer(q).clone()).collect();
    let logicals = (0..k)
        .flat_map(|q| [tableau.destabilizer(q).clone(), tableau.stabilizer(q).clone()])
        .collect();
    Ok(EncodedOperators {
        stabilizers,
        logicals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn hadamard_exchanges_x_and_z() {
        let h = CliffordGate::H(0);
        assert_eq!(conjugate_pauli(&p("X"), &h).unwrap(), p("Z"));
        assert_eq!(conjugate_pauli(&p("Z"), &h).unwrap(), p("X"));
        assert_eq!(conjugate_pauli(&p("Y"), &h).unwrap(), p("-Y"));
    }

    #[test]
    fn sqrt_z_maps_x_to_y() {
        let s = CliffordGate::SqrtZ(0);
        assert_eq!(conjugate_pauli(&p("X"), &s).unwrap(), p("Y"));
        assert_eq!(conjugate_pauli(&p("Y"), &s).unwrap(), p("-X"));
        assert_eq!(conjugate_pauli(&p("Z"), &s).unwrap(), p("Z"));
    }

    #[test]
    fn cnot_spreads_x_forward_and_z_backward() {
        let g = CliffordGate::Cnot { control: 0, target: 1 };
        assert_eq!(conjugate_pauli(&p("XI"), &g).unwrap(), p("XX"));
        assert_eq!(conjugate_pauli(&p("IZ"), &g).unwrap(), p("ZZ"));
        assert_eq!(conjugate_pauli(&p("ZI"), &g).unwrap(), p("ZI"));
        assert_eq!(conjugate_pauli(&p("IX"), &g).unwrap(), p("IX"));
    }

    #[test]
    fn out_of_range_targets_are_rejected() {
        let mut t = Tableau::identity(2);
        assert!(t.apply(&CliffordGate::H(2)).is_err());
        assert!(t.apply(&CliffordGate::Cnot { control: 1, target: 1 }).is_err());
        assert!(t
            .apply(&CliffordGate::C2 { a: 0, b: 1, index: C2_ORDER as u16 })
            .is_err());
    }

    #[test]
    fn identity_element_fixes_everything() {
        let id = c2_identity_index();
        for s in ["XI", "IZ", "YY", "-XZ", "iZY"] {
            let g = CliffordGate::C2 { a: 0, b: 1, index: id };
            assert_eq!(conjugate_pauli(&p(s), &g).unwrap(), p(s));
        }
        assert_eq!(c2_inverse(id), id);
    }

    #[test]
    fn enumeration_has_distinct_actions() {
        let mut seen = std::collections::HashSet::new();
        for index in 0..C2_ORDER as u16 {
            let images = c2_generator_images(index);
            let key: Vec<String> = images.iter().map(|p| p.to_signed_string()).collect();
            assert!(seen.insert(key), "duplicate action at {index}");
            for img in &images {
                assert!(img.is_hermitian());
            }
        }
        assert_eq!(seen.len(), C2_ORDER);
    }

    #[test]
    fn c2_inverse_restores_rows_with_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let index = sample_c2(&mut rng);
            let g = CliffordGate::C2 { a: 2, b: 0, index };
            let start = Tableau::identity(3);
            let mut t = start.clone();
            t.apply(&g).unwrap();
            for inv in g.inverse() {
                t.apply(&inv).unwrap();
            }
            assert_eq!(t, start);
        }
    }

    #[test]
    fn extraction_examples() {
        let ops = extract_stabilizers(&[], 3, 1).unwrap();
        assert_eq!(ops.stabilizers, vec![p("IZI"), p("IIZ")]);
        assert_eq!(ops.logicals, vec![p("XII"), p("ZII")]);

        let ops = extract_stabilizers(&[CliffordGate::H(2)], 3, 1).unwrap();
        assert_eq!(ops.stabilizers, vec![p("IZI"), p("IIX")]);

        assert!(extract_stabilizers(&[], 3, 0).is_err());
        assert!(extract_stabilizers(&[], 3, 3).is_err());
    }

    #[test]
    fn circuit_text_round_trip() {
        let gates = vec![
            CliffordGate::H(3),
            CliffordGate::SqrtZ(0),
            CliffordGate::Cnot { control: 1, target: 2 },
            CliffordGate::C2 { a: 4, b: 0, index: 11519 },
        ];
        let text = format_circuit(&gates);
        assert_eq!(text, "H 3\nSQRTZ 0\nCNOT 1 2\nC2 4 0 11519\n");
        assert_eq!(parse_circuit(&text).unwrap(), gates);
        assert!(parse_circuit("C2 0 1 11520").is_err());
        assert!(parse_circuit("CNOT 1 1").is_err());
        assert!(parse_circuit("T 0").is_err());
    }
}
