use proptest::prelude::*;
use secexp::ntype::{log_type_class_size, quantize_to_ntype};
use secexp::prob::{kl_divergence, output_marginal};
use secexp::sim::*;
use secexp::{Channel, Distribution, Ensemble, NType};

fn iid(p: &[f64]) -> Ensemble {
    Ensemble::Iid(Distribution::new(p.to_vec()).unwrap())
}

fn cc(counts: &[u32]) -> Ensemble {
    Ensemble::ConstantComposition(NType::new(counts.to_vec()).unwrap())
}

fn ternary() -> Channel {
    Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3], vec![0.25, 0.25, 0.5]]).unwrap()
}

/// Every sequence in the type class with the given counts.
fn type_class(counts: &[u32]) -> Vec<Vec<usize>> {
    fn rec(left: &mut Vec<u32>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.iter().all(|&c| c == 0) {
            out.push(prefix.clone());
            return;
        }
        for x in 0..left.len() {
            if left[x] > 0 {
                left[x] -= 1;
                prefix.push(x);
                rec(left, prefix, out);
                prefix.pop();
                left[x] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn seq_prob(w: &Channel, x: &[usize], z: &[usize]) -> f64 {
    x.iter().zip(z).map(|(&a, &b)| w.get(a, b)).product()
}

#[test]
fn same_seed_same_codebook() {
    let e = iid(&[0.3, 0.7]);
    assert_eq!(sample_codebook(&e, 8, 40, 9).unwrap(), sample_codebook(&e, 8, 40, 9).unwrap());
    assert_ne!(sample_codebook(&e, 8, 40, 9).unwrap(), sample_codebook(&e, 8, 40, 10).unwrap());
    let e = cc(&[3, 5]);
    assert_eq!(sample_codebook(&e, 8, 40, 9).unwrap(), sample_codebook(&e, 8, 40, 9).unwrap());
}

#[test]
fn iid_symbol_frequency_is_binomial() {
    let cb = sample_codebook(&iid(&[0.3, 0.7]), 10, 10_000, 1).unwrap();
    let zeros = cb.codewords().flatten().filter(|&&x| x == 0).count() as f64;
    let total: f64 = 1e5;
    let sigma = (total * 0.3 * 0.7).sqrt();
    assert!((zeros - 0.3 * total).abs() < 3.0 * sigma, "zeros = {zeros}");
}

#[test]
fn cc_codewords_have_the_exact_composition() {
    let cb = sample_codebook(&cc(&[2, 3, 4]), 9, 500, 5).unwrap();
    for word in cb.codewords() {
        let mut counts = [0u32; 3];
        word.iter().for_each(|&x| counts[x] += 1);
        assert_eq!(counts, [2, 3, 4]);
    }
    assert!(sample_codebook(&cc(&[2, 3]), 6, 5, 0).is_err());
}

#[test]
fn output_laws_sum_to_one() {
    let w = ternary();
    for seed in 0..5 {
        let cb = sample_codebook(&iid(&[0.2, 0.5, 0.3]), 6, 30, seed).unwrap();
        assert!((output_law(&cb, &w).unwrap().total() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn zero_capacity_law_is_the_output_product() {
    let w = Channel::new(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
    for e in [iid(&[0.4, 0.6]), cc(&[3, 4])] {
        let cb = sample_codebook(&e, 7, 11, 2).unwrap();
        let law = output_law(&cb, &w).unwrap();
        for (i, &m) in law.masses().iter().enumerate() {
            let expected: f64 = law.sequence_of(i).iter().map(|&z| [0.3, 0.7][z]).product();
            assert!((m - expected).abs() < 1e-15);
        }
        let d = divergence_to_reference(&cb, &w, &e).unwrap();
        assert!(d.abs() < 1e-13, "D = {d}");
    }
}

#[test]
fn duplicating_codewords_leaves_the_law_unchanged() {
    let w = Channel::bsc(0.11).unwrap();
    let cb = sample_codebook(&iid(&[0.5, 0.5]), 6, 7, 3).unwrap();
    let words: Vec<Vec<usize>> = cb.codewords().map(<[usize]>::to_vec).collect();
    let doubled = Codebook::from_codewords(2, &[words.clone(), words].concat(), "iid", 0).unwrap();
    let a = output_law(&cb, &w).unwrap();
    let b = output_law(&doubled, &w).unwrap();
    for (x, y) in a.masses().iter().zip(b.masses()) {
        assert!((x - y).abs() < 1e-16);
    }
}

#[test]
fn iid_reference_under_symmetry_is_uniform() {
    let law = reference_law(&iid(&[0.5, 0.5]), 2, &Channel::bsc(0.11).unwrap()).unwrap();
    for &m in law.masses() {
        assert!((m - 0.25).abs() < 1e-15);
    }
}

#[test]
fn cc_reference_has_no_mass_on_all_zero_for_bec() {
    let w = Channel::bec(0.5).unwrap();
    let law = reference_law(&cc(&[3, 3]), 6, &w).unwrap();
    let zero = law.index_of(&[0; 6]);
    assert_eq!(law.masses()[zero], 0.0);
    assert!((law.total() - 1.0).abs() < 1e-10);
}

#[test]
fn cc_reference_sums_to_one() {
    let w = Channel::bsc(0.11).unwrap();
    for n in [2u32, 4, 9, 12] {
        let pn = quantize_to_ntype(&Distribution::new(vec![0.3, 0.7]).unwrap(), n).unwrap();
        let law = reference_law(&Ensemble::ConstantComposition(pn), n, &w).unwrap();
        assert!((law.total() - 1.0).abs() < 1e-10, "n = {n}");
    }
    let law = reference_law(&cc(&[2, 2, 2]), 6, &ternary()).unwrap();
    assert!((law.total() - 1.0).abs() < 1e-10);
}

#[test]
fn cc_reference_is_the_type_class_average() {
    for (counts, w) in [(vec![2u32, 4], Channel::bsc(0.11).unwrap()), (vec![1, 2, 2], ternary())] {
        let class = type_class(&counts);
        let e = cc(&counts);
        let n = counts.iter().sum::<u32>();
        let law = reference_law(&e, n, &w).unwrap();
        assert!(((class.len() as f64).ln() - log_type_class_size(&NType::new(counts.clone()).unwrap())).abs() < 1e-12);
        for i in 0..law.masses().len() {
            let z = law.sequence_of(i);
            let brute: f64 = class.iter().map(|x| seq_prob(&w, x, &z)).sum::<f64>() / class.len() as f64;
            assert!((law.masses()[i] - brute).abs() < 1e-13 * brute.max(1e-3), "z = {z:?}");
        }
        // The codebook made of the whole class has output law P-bar.
        let cb = Codebook::from_codewords(w.inputs(), &class, "cc", 0).unwrap();
        assert!(divergence_to_reference(&cb, &w, &e).unwrap() < 1e-13);
    }
}

#[test]
fn single_codeword_divergence_tensorizes() {
    let w = ternary();
    let p = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
    let pz = output_marginal(&p, &w).unwrap();
    let e = Ensemble::Iid(p);
    for seed in 0..5 {
        let cb = sample_codebook(&e, 6, 1, seed).unwrap();
        let oracle: f64 = cb
            .codeword(0)
            .iter()
            .map(|&x| kl_divergence(&Distribution::new(w.row(x).to_vec()).unwrap(), &pz).unwrap())
            .sum();
        let d = divergence_to_reference(&cb, &w, &e).unwrap();
        assert!((d - oracle).abs() < 1e-12, "{d} vs {oracle}");
    }
}

#[test]
fn single_bin_leaks_nothing() {
    let w = Channel::bsc(0.11).unwrap();
    let e = iid(&[0.5, 0.5]);
    let cb = sample_codebook(&e, 6, 16, 4).unwrap().with_bins(1).unwrap();
    let leak = wiretap_leakage(&cb, &w, &e).unwrap();
    assert!(leak.leak.abs() < 1e-12);
    assert!((leak.cond_div - leak.uncond_div).abs() < 1e-12);
}

#[test]
fn singleton_bins_leak_the_index_information() {
    let w = Channel::bac(0.05, 0.3).unwrap();
    let e = iid(&[0.4, 0.6]);
    let cb = sample_codebook(&e, 5, 12, 8).unwrap();
    let m = cb.len();
    // Direct joint of (index, Z^n).
    let nz_seq = 1usize << 5;
    let zs: Vec<Vec<usize>> = (0..nz_seq).map(|i| (0..5).rev().map(|b| (i >> b) & 1).collect()).collect();
    let joint: Vec<Vec<f64>> = cb
        .codewords()
        .map(|x| zs.iter().map(|z| seq_prob(&w, x, z) / m as f64).collect())
        .collect();
    let pz: Vec<f64> = (0..nz_seq).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let mut direct = 0.0;
    for row in &joint {
        for (j, &q) in row.iter().enumerate() {
            if q > 0.0 {
                direct += q * (q / (pz[j] / m as f64)).ln();
            }
        }
    }
    let leak = wiretap_leakage(&cb.with_bins(m).unwrap(), &w, &e).unwrap();
    assert!((leak.leak - direct).abs() < 1e-12, "{} vs {direct}", leak.leak);
}

#[test]
fn leakage_identity_on_random_codebooks() {
    let channels = [Channel::bsc(0.11).unwrap(), Channel::z_channel(0.303).unwrap(), ternary()];
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let w = &channels[(k % 3) as usize];
        let n = 3 + (k % 6) as u32;
        let n = if w.inputs() == 3 { n.min(6) } else { n };
        let e = if k % 2 == 0 {
            Ensemble::Iid(Distribution::uniform(w.inputs()).unwrap())
        } else {
            let p = Distribution::new(if w.inputs() == 2 { vec![0.4, 0.6] } else { vec![0.2, 0.3, 0.5] }).unwrap();
            Ensemble::ConstantComposition(quantize_to_ntype(&p, n).unwrap())
        };
        let bins = [1usize, 2, 4, 8][(k % 4) as usize];
        let cb = sample_codebook(&e, n, 3 * bins as u64, k).unwrap().with_bins(bins).unwrap();
        let leak = wiretap_leakage(&cb, w, &e).unwrap();
        assert!(leak.cond_div.is_finite() && leak.uncond_div.is_finite());
        worst = worst.max(leak.identity_residual());
    }
    eprintln!("worst identity residual {worst:e}");
    assert!(worst < 1e-10);
}

#[test]
fn sampled_laws_stay_inside_the_reference_support() {
    let w = Channel::bec(0.5).unwrap();
    let e = cc(&[4, 4]);
    let reference = reference_law(&e, 8, &w).unwrap();
    for seed in 0..20 {
        let cb = sample_codebook(&e, 8, 5, seed).unwrap();
        let law = output_law(&cb, &w).unwrap();
        assert!(support_violations(&law, &reference).is_empty());
    }
}

#[test]
fn a_lone_trial_fit_is_deterministic() {
    let spec = SimulationSpec {
        kind: EnsembleKind::Iid,
        input: Distribution::uniform(2).unwrap(),
        channel: Channel::bsc(0.11).unwrap(),
        rate: 0.55,
        trials: 1,
        seed: 17,
        bins: None,
        budget: DEFAULT_LAW_BUDGET,
    };
    let a = empirical_exponent(&spec, &[4, 6, 8]).unwrap();
    let b = empirical_exponent(&spec, &[4, 6, 8]).unwrap();
    assert_eq!(a, b);
    assert!(empirical_exponent(&spec, &[4, 6]).is_err());
    assert!(empirical_exponent(&spec, &[6, 4, 8]).is_err());
}

#[test]
fn rates_far_above_saturation_flag_low_confidence() {
    let spec = SimulationSpec {
        kind: EnsembleKind::Iid,
        input: Distribution::uniform(2).unwrap(),
        channel: Channel::bsc(0.11).unwrap(),
        rate: 3.0,
        trials: 4,
        seed: 1,
        bins: None,
        budget: DEFAULT_LAW_BUDGET,
    };
    let fit = empirical_exponent(&spec, &[1, 2, 3, 4]).unwrap();
    let mean_n = 2.5;
    assert_eq!(fit.low_confidence, fit.residual_rms > 0.05 * fit.slope.abs() * mean_n);
    eprintln!("R = 3: slope {} rms {} confidence {}", fit.slope, fit.residual_rms, fit.confidence());
}

#[test]
fn binned_simulation_reports_leakage() {
    let spec = SimulationSpec {
        kind: EnsembleKind::ConstantComposition,
        input: Distribution::new(vec![0.3, 0.7]).unwrap(),
        channel: Channel::z_channel(0.303).unwrap(),
        rate: 0.3,
        trials: 10,
        seed: 5,
        bins: Some(4),
        budget: DEFAULT_LAW_BUDGET,
    };
    let point = simulate_point(&spec, 6, 0).unwrap();
    assert!(point.max_identity_residual.unwrap() < 1e-10);
    assert!(point.mean_leak.unwrap() >= 0.0);
}

#[test]
fn probe_means_match_the_reference() {
    for kind in [EnsembleKind::Iid, EnsembleKind::ConstantComposition] {
        let spec = SimulationSpec {
            kind,
            input: Distribution::new(vec![0.3, 0.7]).unwrap(),
            channel: Channel::bac(0.01, 0.303).unwrap(),
            rate: 0.2,
            trials: 400,
            seed: 99,
            bins: None,
            budget: DEFAULT_LAW_BUDGET,
        };
        for probe in unbiasedness_probe(&spec, 6, &[0, 7, 21, 42, 63]).unwrap() {
            assert!(probe.within(spec.trials), "{kind:?} {probe:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_laws_are_distributions(seed in any::<u64>(), n in 1u32..8, m in 1u64..20, a in 0.01f64..0.49) {
        let w = Channel::bsc(a).unwrap();
        let cb = sample_codebook(&iid(&[0.35, 0.65]), n, m, seed).unwrap();
        let law = output_law(&cb, &w).unwrap();
        prop_assert!((law.total() - 1.0).abs() < 1e-10);
        prop_assert!(law.masses().iter().all(|&v| v >= 0.0));
        prop_assert!(divergence_to_reference(&cb, &w, &iid(&[0.35, 0.65])).unwrap() >= 0.0);
    }

    #[test]
    fn index_round_trips(i in 0usize..729) {
        let law = reference_law(&iid(&[0.2, 0.5, 0.3]), 6, &ternary()).unwrap();
        prop_assert_eq!(law.index_of(&law.sequence_of(i)), i);
    }
}
