//! Structural properties of sampled codes, syndromes and tables.

use std::collections::HashMap;

use proptest::prelude::*;
use qgrand_core::clifford::{sample_c2, C2_ORDER};
use qgrand_core::code::{build_qrlc, Connectivity, QuantumCode};
use qgrand_core::decoder::{syndrome_of, SyndromeColumns, SyndromeTable};
use qgrand_core::experiments::evaluate_code;
use qgrand_core::noise::{bernoulli_model, NoiseModel};
use qgrand_core::pauli::{Letter, PauliString};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    use rand::Rng;
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set_letter(q, Letter::from_xz(rng.random(), rng.random()));
    }
    p
}

fn all_paulis(n: usize) -> impl Iterator<Item = PauliString> {
    (0..1u64 << (2 * n)).map(move |code| {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            p.set_letter(q, [Letter::I, Letter::X, Letter::Y, Letter::Z][(code >> (2 * q) & 3) as usize]);
        }
        p
    })
}

fn code_strategy() -> impl Strategy<Value = QuantumCode> {
    (2usize..12)
        .prop_flat_map(|n| (Just(n), 1..n, 0usize..200, any::<u64>()))
        .prop_map(|(n, k, g, seed)| build_qrlc(n, k, g, Connectivity::AllToAll, seed).unwrap())
}

fn check_structure(code: &QuantumCode) {
    let (n, k) = (code.n(), code.k());
    let stabs = code.stabilizers();
    let logs = code.logicals();
    assert_eq!(stabs.len(), n - k);
    assert_eq!(logs.len(), 2 * k);
    for a in stabs {
        assert!(a.is_hermitian());
        for b in stabs {
            assert!(a.commutes(b).unwrap());
        }
        for l in logs {
            assert!(a.commutes(l).unwrap());
        }
    }
    for (i, a) in logs.iter().enumerate() {
        for (j, b) in logs.iter().enumerate() {
            let paired = i / 2 == j / 2 && i != j;
            assert_eq!(a.anticommutes(b).unwrap(), paired, "logicals {i}, {j}");
        }
    }
    assert_eq!(code.parity_check().rank(), n - k);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stabilizers_and_logicals_satisfy_their_relations(code in code_strategy()) {
        check_structure(&code);
    }

    #[test]
    fn code_files_round_trip(code in code_strategy()) {
        let text = code.to_file_string();
        let back = QuantumCode::from_file_str(&text).unwrap();
        prop_assert_eq!(back.to_file_string(), text);
        prop_assert_eq!(back.stabilizers(), code.stabilizers());
        prop_assert_eq!(back.logicals(), code.logicals());
    }

    #[test]
    fn syndromes_are_linear(code in code_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pauli(code.n(), &mut rng);
        let b = random_pauli(code.n(), &mut rng);
        let sab = syndrome_of(&code, &a.multiply(&b).unwrap()).unwrap();
        let sa = syndrome_of(&code, &a).unwrap();
        let sb = syndrome_of(&code, &b).unwrap();
        prop_assert_eq!(sab, sa.xor(&sb));
    }

    #[test]
    fn syndrome_bits_are_anticommutation_with_generators(code in code_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_pauli(code.n(), &mut rng);
        let s = syndrome_of(&code, &e).unwrap();
        for (i, g) in code.stabilizers().iter().enumerate() {
            prop_assert_eq!(s.bit(i), g.anticommutes(&e).unwrap());
        }
    }

    #[test]
    fn stabilizer_products_are_members(code in code_strategy(), mask in any::<u64>()) {
        let mut p = PauliString::identity(code.n());
        let mut chosen = Vec::new();
        for (i, g) in code.stabilizers().iter().enumerate() {
            if mask >> (i % 64) & 1 == 1 {
                p = p.multiply(g).unwrap();
                chosen.push(i);
            }
        }
        let m = code.stabilizer_membership(&p).unwrap().expect("product is in the group");
        prop_assert_eq!(m.generators, chosen);
        for l in code.logicals() {
            prop_assert!(code.stabilizer_membership(l).unwrap().is_none());
        }
    }

    #[test]
    fn table_success_matches_report(code in code_strategy(), p in 0.001f64..0.3, t in 0usize..3) {
        let noise = bernoulli_model(code.n(), p, t.min(code.n())).unwrap();
        let table = SyndromeTable::build(&code, &noise, None).unwrap();
        let report = evaluate_code(&code, &noise).unwrap();
        prop_assert!((report.bler + report.f_min_bound - 1.0).abs() < 1e-12);
        prop_assert!((report.success_prob - table.success_probability()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&report.bler));
        for f in report.f_by_weight.values() {
            prop_assert!((0.0..=1.0).contains(f));
        }
        prop_assert!(table.occupied() <= 1u64 << code.s().min(63));
    }

    #[test]
    fn precompute_limit_does_not_change_decoding(code in code_strategy(), limit in 0u64..40) {
        let noise = bernoulli_model(code.n(), 0.05, 2.min(code.n())).unwrap();
        let full = SyndromeTable::build(&code, &noise, None).unwrap();
        let partial = SyndromeTable::build(&code, &noise, Some(limit)).unwrap();
        for e in noise.iter() {
            let s = full.columns().syndrome(&e.support);
            prop_assert_eq!(full.decode(&s, None), partial.decode(&s, None));
        }
    }
}

#[test]
fn cosets_of_every_syndrome_have_equal_size() {
    for n in 2..=5 {
        for k in 1..n {
            let code = build_qrlc(n, k, 40, Connectivity::AllToAll, (n * 10 + k) as u64).unwrap();
            let mut counts: HashMap<_, u64> = HashMap::new();
            for p in all_paulis(n) {
                *counts.entry(syndrome_of(&code, &p).unwrap()).or_default() += 1;
            }
            assert_eq!(counts.len(), 1 << (n - k), "(n, k) = ({n}, {k})");
            assert!(counts.values().all(|&c| c == 1 << (n + k)), "(n, k) = ({n}, {k})");
            let zero_members = all_paulis(n)
                .filter(|p| syndrome_of(&code, p).unwrap().is_zero())
                .filter(|p| code.stabilizer_membership(p).unwrap().is_some())
                .count();
            assert_eq!(zero_members, 1 << (n - k));
        }
    }
}

#[test]
fn c2_sampling_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 40 * C2_ORDER;
    let mut counts = vec![0u32; C2_ORDER];
    for _ in 0..draws {
        counts[sample_c2(&mut rng) as usize] += 1;
    }
    let expected = draws as f64 / C2_ORDER as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 11 519 degrees of freedom: mean 11 519, sd ≈ 151.8; allow 5 sd
    let dof = (C2_ORDER - 1) as f64;
    assert!((chi2 - dof).abs() < 5.0 * (2.0 * dof).sqrt(), "chi2 = {chi2}");
}

#[test]
fn same_syndrome_pairs_are_degenerate_at_rate_one_over_l() {
    // a distinct same-syndrome pair multiplies to one of the S·L − 1
    // non-identity zero-syndrome strings, S − 1 of which are stabilizers
    let (n, k) = (10, 1);
    let (s, l) = (512.0, 4.0);
    let exact = (s - 1.0) / (s * l - 1.0);
    let (mut pairs, mut degenerate) = (0u64, 0u64);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for seed in 0..300 {
        let code = build_qrlc(n, k, 400, Connectivity::AllToAll, seed).unwrap();
        let columns = SyndromeColumns::new(&code);
        let mut buckets: HashMap<_, Vec<PauliString>> = HashMap::new();
        for _ in 0..200 {
            let e = random_pauli(n, &mut rng);
            buckets.entry(columns.syndrome_of(&e).unwrap()).or_default().push(e);
        }
        for group in buckets.values() {
            for (i, a) in group.iter().enumerate() {
                for b in &group[i + 1..] {
                    if a.eq_phaseless(b) {
                        continue;
                    }
                    pairs += 1;
                    let prod = a.multiply(b).unwrap();
                    degenerate += code.stabilizer_membership(&prod).unwrap().is_some() as u64;
                }
            }
        }
    }
    assert!(pairs >= 2000, "only {pairs} pairs");
    let rate = degenerate as f64 / pairs as f64;
    let sigma = (exact * (1.0 - exact) / pairs as f64).sqrt();
    assert!((rate - exact).abs() < 3.0 * sigma, "rate {rate} over {pairs} pairs, exact {exact}");
    assert!((rate - 1.0 / l).abs() < 3.0 * sigma, "rate {rate} over {pairs} pairs");
}

#[test]
fn equivalence_agrees_with_membership() {
    let code = build_qrlc(7, 2, 150, Connectivity::AllToAll, 5).unwrap();
    let columns = SyndromeColumns::new(&code);
    let noise = bernoulli_model(7, 0.1, 2).unwrap();
    let entries: Vec<_> = noise.iter().collect();
    for a in entries.iter().step_by(5) {
        for b in entries.iter().step_by(7) {
            let pa = a.pattern(7);
            let pb = b.pattern(7);
            let member = code.stabilizer_membership(&pa.multiply(&pb).unwrap()).unwrap().is_some();
            assert_eq!(columns.equivalent(&a.support, &b.support), member);
        }
    }
}

#[test]
fn uniform_noise_entropy() {
    let patterns: Vec<PauliString> = all_paulis(2).take(8).collect();
    let noise = NoiseModel::uniform(2, &patterns).unwrap();
    assert!((noise.entropy_bits() - 3.0).abs() < 1e-12);
}
