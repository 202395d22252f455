//! Pauli strings in binary symplectic form.
//!
//! A [`PauliString`] on `n` qubits stores two packed bit vectors `x`, `z`
//! and a phase exponent `θ ∈ {0,1,2,3}`. The operator it denotes is
//!
//! ```text
//! i^θ · (X^x₁ Z^z₁) ⊗ (X^x₂ Z^z₂) ⊗ … ⊗ (X^xₙ Z^zₙ)
//! ```
//!
//! so the Hermitian `Y = i·X·Z` is `x = z = 1` with one unit of phase. The
//! textual form is a string over `{I, X, Y, Z}` with qubit 0 leftmost and an
//! optional sign prefix (`+`, `-`, `i`, `+i`, `-i`); letters denote the
//! Hermitian single-qubit Paulis and the prefix is the remaining scalar.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::gf2::{get_bit, parity_of_and, set_bit, words_for};

/// Single-qubit Pauli letter. Ordered `I < X < Y < Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    /// The three non-identity letters in enumeration order.
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    pub fn from_xz(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn xz(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Builds a string from packed halves. Bits beyond `n` must be clear.
    pub fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Result<Self> {
        let w = words_for(n);
        if x.len() != w || z.len() != w {
            return Err(Error::InvalidParameter(format!(
                "expected {w} words per half for {n} qubits"
            )));
        }
        if n % 64 != 0 && w > 0 {
            let mask = !0u64 << (n % 64);
            if x[w - 1] & mask != 0 || z[w - 1] & mask != 0 {
                return Err(Error::InvalidParameter("bits set beyond qubit count".into()));
            }
        }
        Ok(PauliString {
            n,
            x,
            z,
            phase: phase & 3,
        })
    }

    /// Hermitian string with the given letters on the given qubits.
    pub fn from_support(n: usize, support: &[(usize, Letter)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(q, letter) in support {
            if q >= n {
                return Err(Error::InvalidParameter(format!(
                    "qubit {q} out of range for {n} qubits"
                )));
            }
            p.set_letter(q, letter);
        }
        Ok(p)
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Result<Self> {
        Self::from_support(n, &[(qubit, letter)])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Raw exponent `θ` of `i^θ` in front of the `X^x Z^z` product.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_bit(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_xz(self.x_bit(q), self.z_bit(q))
    }

    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// Scalar in front of the Hermitian letter product, as a power of `i`.
    /// `0` is `+`, `2` is `-`, odd values are `±i`.
    pub fn sign_phase(&self) -> u8 {
        ((self.phase as u32 + 4 - (self.y_count() % 4)) % 4) as u8
    }

    pub fn is_hermitian(&self) -> bool {
        self.sign_phase() % 2 == 0
    }

    /// Replaces the letter on one qubit, keeping the Hermitian sign fixed.
    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let sign = self.sign_phase();
        let (x, z) = letter.xz();
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
        self.phase = (sign + (self.y_count() % 4) as u8) % 4;
    }

    /// Writes raw `x`/`z` bits on one qubit without touching the phase.
    pub(crate) fn set_xz_raw(&mut self, q: usize, x: bool, z: bool) {
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    pub(crate) fn add_phase(&mut self, delta: u8) {
        self.phase = (self.phase + delta) & 3;
    }

    /// Copy with the Hermitian sign reset to `+`.
    pub fn phaseless(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (self.y_count() % 4) as u8;
        p
    }

    pub fn eq_phaseless(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn is_identity_phaseless(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Non-identity positions in ascending qubit order.
    pub fn support(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        (0..self.n)
            .map(move |q| (q, self.letter(q)))
            .filter(|(_, l)| *l != Letter::I)
    }

    /// Symplectic product `x_p·z_q + z_p·x_q mod 2`; `true` means the two
    /// strings anticommute.
    pub fn anticommutes(&self, other: &PauliString) -> Result<bool> {
        check_dims(self.n, other.n)?;
        Ok(parity_of_and(&self.x, &other.z) ^ parity_of_and(&self.z, &other.x))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.anticommutes(other).map(|a| !a)
    }

    /// Operator product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        check_dims(self.n, other.n)?;
        // Z^z1 X^x2 = (-1)^{z1·x2} X^x2 Z^z1 on every qubit.
        let swaps: u32 = self
            .z
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        let phase = ((self.phase as u32 + other.phase as u32 + 2 * (swaps % 2)) % 4) as u8;
        Ok(PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase,
        })
    }

    /// Symplectic row `[x | z]` of length `2n`, the `M_E` form of an error.
    pub fn symplectic_xz(&self) -> Vec<u64> {
        let mut v = vec![0u64; words_for(2 * self.n)];
        for q in 0..self.n {
            set_bit(&mut v, q, self.x_bit(q));
            set_bit(&mut v, self.n + q, self.z_bit(q));
        }
        v
    }

    /// Symplectic row `[z | x]` of length `2n`, the parity-check layout.
    pub fn symplectic_zx(&self) -> Vec<u64> {
        let mut v = vec![0u64; words_for(2 * self.n)];
        for q in 0..self.n {
            set_bit(&mut v, q, self.z_bit(q));
            set_bit(&mut v, self.n + q, self.x_bit(q));
        }
        v
    }

    /// Textual form that always carries a sign prefix.
    pub fn to_signed_string(&self) -> String {
        let mut s = String::with_capacity(self.n + 2);
        s.push_str(match self.sign_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        });
        s.extend((0..self.n).map(|q| self.letter(q).as_char()));
        s
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.sign_phase() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(Error::Parse {
                what: "Pauli literal",
                reason: "empty".into(),
            });
        }
        let letters: Vec<Letter> = body
            .chars()
            .map(|c| {
                Letter::from_char(c).ok_or_else(|| Error::Parse {
                    what: "Pauli literal",
                    reason: format!("unexpected character {c:?} in {s:?}"),
                })
            })
            .collect::<Result<_>>()?;
        let mut p = PauliString::identity(letters.len());
        for (q, l) in letters.into_iter().enumerate() {
            let (x, z) = l.xz();
            set_bit(&mut p.x, q, x);
            set_bit(&mut p.z, q, z);
        }
        p.phase = ((p.y_count() + sign) % 4) as u8;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("X").commutes(&p("X")).unwrap());
        assert!(p("XZ").commutes(&p("ZX")).unwrap());
        assert!(p("-iY").commutes(&p("Y")).unwrap());
    }

    #[test]
    fn multiplication_examples() {
        let xx = p("X").multiply(&p("X")).unwrap();
        assert!(xx.is_identity_phaseless());
        assert_eq!(xx.phase(), 0);

        // X·Z = -iY
        let xz = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(xz.to_string(), "-iY");
        assert_eq!(xz.phase(), 0);

        let r = p("XI").multiply(&p("IZ")).unwrap();
        assert_eq!(r.to_string(), "XZ");
        assert_eq!(r.sign_phase(), 0);

        let yy = p("Y").multiply(&p("Y")).unwrap();
        assert!(yy.is_identity_phaseless());
        assert_eq!(yy.phase(), 0);
    }

    #[test]
    fn weights() {
        assert_eq!(PauliString::identity(5).weight(), 0);
        assert_eq!(p("XIY").weight(), 2);
        assert_eq!(p("YYYY").weight(), 4);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            p("X").commutes(&p("XX")),
            Err(Error::Dimension { expected: 1, found: 2 })
        ));
        assert!(p("X").multiply(&p("XX")).is_err());
    }

    #[test]
    fn text_round_trip_keeps_signs() {
        for s in ["XYZ", "-XYZ", "iI", "-iZZ", "IIIIXIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIIY"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+XY").to_signed_string(), "+XY");
        assert_eq!(p("+iX").to_string(), "iX");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn set_letter_keeps_sign() {
        let mut q = p("-XI");
        q.set_letter(1, Letter::Y);
        assert_eq!(q.to_string(), "-XY");
        q.set_letter(0, Letter::I);
        assert_eq!(q.to_string(), "-IY");
    }

    #[test]
    fn symplectic_layouts() {
        let e = p("XZY");
        let xz = e.symplectic_xz();
        let zx = e.symplectic_zx();
        // [x | z] = 101 | 011 ; [z | x] = 011 | 101
        let bits = |v: &Vec<u64>| (0..6).map(|j| get_bit(v, j) as u8).collect::<Vec<_>>();
        assert_eq!(bits(&xz), vec![1, 0, 1, 0, 1, 1]);
        assert_eq!(bits(&zx), vec![0, 1, 1, 1, 0, 1]);
    }
}
