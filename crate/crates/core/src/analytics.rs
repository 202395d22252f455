//! Closed forms for ideal uniform-at-random codes, code-size bounds and
//! the greedy decision-tree recursion.
//!
//! Syndrome counts `S` and logical counts `L` are passed as `f64` so that
//! values up to `2^1023` are representable; all products are evaluated in
//! the log domain.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rustc_hash::FxHashSet;

use crate::error::{invalid, Error, Result};

/// Above this many patterns the exact all-distinct product switches to its
/// exponential approximation.
pub const EXACT_PRODUCT_LIMIT: f64 = 1e6;

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s >= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("syndrome count must be a finite value ≥ 1, got {s}")))
    }
}

fn check_n(n: f64) -> Result<()> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("pattern count must be a finite value ≥ 0, got {n}")))
    }
}

/// `ln(1 − 1/S)`, `−∞` at `S = 1`.
fn ln_miss(s: f64) -> f64 {
    (-1.0 / s).ln_1p()
}

/// Mean number of occupied bins when `N + 1` balls fall uniformly into `S`
/// bins: `S·[1 − (1 − 1/S)^{N+1}]`.
pub fn expected_unique_syndromes(s: f64, num_errors: f64) -> Result<f64> {
    check_s(s)?;
    check_n(num_errors)?;
    if s == 1.0 {
        return Ok(1.0);
    }
    Ok(-s * ((num_errors + 1.0) * ln_miss(s)).exp_m1())
}

/// Correctable fraction `u / (N + 1)` of an ideal random code.
pub fn ideal_fraction(s: f64, num_errors: f64) -> Result<f64> {
    Ok(expected_unique_syndromes(s, num_errors)? / (num_errors + 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct AllDistinct {
    /// `Π_{j=0}^{N} (S − j)/S`, or `approx` beyond [`EXACT_PRODUCT_LIMIT`].
    pub exact: f64,
    /// `exp(−N(N + 1)/(2S))`.
    pub approx: f64,
}

/// Probability that all `N + 1` patterns receive distinct syndromes.
pub fn p_all_distinct(s: f64, num_errors: u64) -> Result<AllDistinct> {
    check_s(s)?;
    let n = num_errors as f64;
    let approx = (-n * (n + 1.0) / (2.0 * s)).exp();
    let exact = if n >= s {
        0.0
    } else if n > EXACT_PRODUCT_LIMIT {
        approx
    } else {
        (1..=num_errors)
            .map(|j| (-(j as f64) / s).ln_1p())
            .sum::<f64>()
            .exp()
    };
    Ok(AllDistinct { exact, approx })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GoodCode {
    /// Probability that no pair of patterns is confused non-degenerately:
    /// `[1 − (1/S)(1 − 1/L)]^{C(N+1, 2)}`.
    pub p_good: f64,
    /// The exponential form `exp(−C(N+1, 2)(1 − 1/L)/S)`.
    pub p_good_exp: f64,
    /// `p_good − p_all_distinct`.
    pub p_degenerate: f64,
}

pub fn p_good(s: f64, num_errors: u64, l: f64) -> Result<GoodCode> {
    check_s(s)?;
    if l.is_nan() || l < 1.0 {
        return Err(invalid(format!("logical count must be ≥ 1, got {l}")));
    }
    let n = num_errors as f64;
    let pairs = n * (n + 1.0) / 2.0;
    let q = (1.0 - 1.0 / l) / s;
    let p_good = if pairs == 0.0 { 1.0 } else { (pairs * (-q).ln_1p()).exp() };
    let p_good_exp = (-pairs * q).exp();
    let distinct = p_all_distinct(s, num_errors)?.exact;
    Ok(GoodCode {
        p_good,
        p_good_exp,
        p_degenerate: p_good - distinct,
    })
}

/// `A_t = 3^t·C(n, t)` and `B_t = Σ_{t' ≤ t} A_{t'}` as floating values.
pub fn pattern_counts_f64(n: usize, t: usize) -> (f64, f64) {
    let mut binom = 1.0f64;
    let mut a = 1.0;
    let mut b = 1.0;
    for w in 1..=t.min(n) {
        binom = binom * (n - w + 1) as f64 / w as f64;
        a = binom * 3f64.powi(w as i32);
        b += a;
    }
    if t > n {
        a = 0.0;
    }
    (a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct WeightFraction {
    /// `(⟨u⟩_{S,B_t} − ⟨u⟩_{S,B_{t−1}}) / A_t`.
    pub exact: f64,
    /// `(S/A_t)·e^{−B_{t−1}/S}·(1 − e^{−A_t/S})`.
    pub asymptotic: f64,
}

/// Expected fraction of weight-`t` patterns that are coset leaders in an
/// ideal random code over `n` qubits with `S` syndromes.
pub fn ideal_weight_fraction(s: f64, n: usize, t: usize) -> Result<WeightFraction> {
    check_s(s)?;
    if t == 0 || t > n {
        return Err(invalid(format!("weight must satisfy 1 ≤ t ≤ n, got t = {t}, n = {n}")));
    }
    let (a_t, b_t) = pattern_counts_f64(n, t);
    let b_prev = b_t - a_t;
    let exact = if s == 1.0 {
        0.0
    } else {
        // S·(1 − 1/S)^{B_{t−1}}·[1 − (1 − 1/S)^{A_t}], free of cancellation
        let l = ln_miss(s);
        s * (b_prev * l).exp() * -(a_t * l).exp_m1() / a_t
    };
    let asymptotic = s / a_t * (-b_prev / s).exp() * -(-a_t / s).exp_m1();
    Ok(WeightFraction { exact, asymptotic })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MinNBounds {
    /// `k + log₂(N(N + 1)/(2ε))`, all patterns distinct with probability ≥ 1 − ε.
    pub n_all_distinct: usize,
    /// `k + log₂(N/(2ε))`, expected correctable fraction ≥ 1 − ε.
    pub n_fraction: usize,
    /// `k + H`, the hashing requirement.
    pub n_hashing: usize,
}

fn ceil_guarded(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

pub fn min_n_bounds(k: usize, num_errors: u64, epsilon: f64, entropy_bits: f64) -> Result<MinNBounds> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("ε must be in (0, 1), got {epsilon}")));
    }
    if num_errors == 0 {
        return Err(invalid("bounds need at least one error pattern"));
    }
    if !(entropy_bits.is_finite() && entropy_bits >= 0.0) {
        return Err(invalid(format!("entropy must be ≥ 0, got {entropy_bits}")));
    }
    let n = num_errors as f64;
    let k = k as f64;
    Ok(MinNBounds {
        n_all_distinct: ceil_guarded(k + (n * (n + 1.0) / (2.0 * epsilon)).log2()),
        n_fraction: ceil_guarded(k + (n / (2.0 * epsilon)).log2()),
        n_hashing: ceil_guarded(k + entropy_bits),
    })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Recursion {
    /// `N_0, N_1, …, N_{I_stop}`.
    pub sequence: Vec<f64>,
    pub i_stop: usize,
    /// `log₂N − log₂log₂s − 1`.
    pub closed_form: f64,
    /// `false` when the stabilizers ran out before `N_j ≤ 1`.
    pub reached_one: bool,
}

/// Iterates `N_{j+1} = N_j/2 − sqrt((N_j/2)·ln(s − j))` from `N_0 = N`
/// until `N_j ≤ 1` or `j ≥ s − 1`.
pub fn decision_tree_recursion(num_errors: f64, s: usize) -> Result<Recursion> {
    if !(num_errors.is_finite() && num_errors >= 1.0) {
        return Err(invalid(format!("N must be ≥ 1, got {num_errors}")));
    }
    if s < 2 {
        return Err(invalid(format!("s must be ≥ 2, got {s}")));
    }
    let mut sequence = vec![num_errors];
    let mut j = 0usize;
    let mut nj = num_errors;
    while nj > 1.0 && j < s - 1 {
        let half = nj / 2.0;
        nj = half - (half * ((s - j) as f64).ln()).sqrt();
        sequence.push(nj);
        j += 1;
    }
    Ok(Recursion {
        sequence,
        i_stop: j,
        closed_form: num_errors.log2() - (s as f64).log2().log2() - 1.0,
        reached_one: nj <= 1.0,
    })
}

/// One `(N, s, I)` observation for [`fit_savings`].
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SavingsSample {
    pub num_errors: f64,
    pub s: f64,
    pub iterations: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SavingsFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms: f64,
    pub samples: usize,
}

/// Least-squares fit of `I = a·log₂N − b·log₂log₂s − c` by normal equations.
pub fn fit_savings(samples: &[SavingsSample]) -> Result<SavingsFit> {
    if samples.len() < 3 {
        return Err(invalid("the fit needs at least three samples"));
    }
    let row = |p: &SavingsSample| Vector3::new(p.num_errors.log2(), -p.s.log2().log2(), -1.0);
    let mut xtx = Matrix3::zeros();
    let mut xty = Vector3::zeros();
    for p in samples {
        if !(p.num_errors > 0.0 && p.s > 1.0) {
            return Err(invalid("samples need N > 0 and s > 1"));
        }
        let r = row(p);
        xtx += r * r.transpose();
        xty += r * p.iterations;
    }
    let scale = xtx.norm().max(1.0);
    let lu = xtx.lu();
    if lu.determinant().abs() <= 1e-12 * scale.powi(3) {
        return Err(Error::Singular(
            "design matrix is singular; samples must span distinct N and s".into(),
        ));
    }
    let beta = lu
        .solve(&xty)
        .ok_or_else(|| Error::Singular("normal equations have no solution".into()))?;
    let rms = (samples
        .iter()
        .map(|p| (row(p).dot(&beta) - p.iterations).powi(2))
        .sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    Ok(SavingsFit {
        a: beta[0],
        b: beta[1],
        c: beta[2],
        rms,
        samples: samples.len(),
    })
}

/// Recursion stopping indices over `N = 2^e` for `e` in `log2_n` and each
/// `s` in `s_values`. Points where the stabilizers run out before
/// `N_j ≤ 1` are dropped unless `include_exhausted` is set.
pub fn recursion_samples(
    log2_n: std::ops::RangeInclusive<u32>,
    s_values: &[usize],
    include_exhausted: bool,
) -> Result<Vec<SavingsSample>> {
    let mut out = Vec::new();
    for e in log2_n {
        for &s in s_values {
            let n = 2f64.powi(e as i32);
            let r = decision_tree_recursion(n, s)?;
            if r.reached_one || include_exhausted {
                out.push(SavingsSample {
                    num_errors: n,
                    s: s as f64,
                    iterations: r.i_stop as f64,
                });
            }
        }
    }
    Ok(out)
}

/// Number of distinct bins hit when `balls` balls fall uniformly into
/// `bins` bins.
pub fn random_assignment<R: Rng + ?Sized>(bins: u64, balls: u64, rng: &mut R) -> u64 {
    let mut seen = FxHashSet::default();
    for _ in 0..balls {
        seen.insert(rng.random_range(0..bins));
    }
    seen.len() as u64
}
