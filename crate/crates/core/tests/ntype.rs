use proptest::prelude::*;
use secexp::ntype::*;
use secexp::{Distribution, NType};

fn distribution(k: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.0f64..1.0, k).prop_filter_map("nonzero mass", |raw| {
        let total: f64 = raw.iter().sum();
        (total > 1e-3).then(|| Distribution::new(raw.iter().map(|v| v / total).collect()).unwrap())
    })
}

/// Multinomial coefficient by repeated integer binomials.
fn multinomial(counts: &[u32]) -> f64 {
    let mut acc = 1.0;
    let mut seen = 0u32;
    for &c in counts {
        for j in 1..=c {
            acc *= f64::from(seen + j) / f64::from(j);
        }
        seen += c;
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quantization_preserves_support_and_stays_close(p in (2usize..5).prop_flat_map(distribution), n in 1u32..60) {
        let support = p.support().count();
        match quantize_to_ntype(&p, n) {
            Err(_) => prop_assert!((n as usize) < support),
            Ok(t) => {
                prop_assert_eq!(t.n(), n);
                for (x, &m) in p.masses().iter().enumerate() {
                    prop_assert_eq!(m > 0.0, t.counts()[x] > 0);
                }
                let l1: f64 = p.masses().iter().enumerate().map(|(x, &m)| (m - t.frequency(x)).abs()).sum();
                let k = p.len() as f64;
                let min_mass = p.masses().iter().copied().filter(|&m| m > 0.0).fold(1.0, f64::min);
                let bound = if min_mass >= 1.0 / f64::from(n) { k / f64::from(n) } else { 2.0 * k / f64::from(n) };
                prop_assert!(l1 <= bound + 1e-12, "l1 {} bound {}", l1, bound);
            }
        }
    }

    #[test]
    fn type_class_size_matches_the_multinomial(counts in prop::collection::vec(0u32..12, 1..5)) {
        let t = NType::new(counts.clone());
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let exact = multinomial(&counts).ln();
        prop_assert!((log_type_class_size(&t) - exact).abs() < 1e-9 * exact.max(1.0));
    }

    #[test]
    fn enumeration_is_complete_and_distinct(k in 1usize..4, n in 1u32..9) {
        let all: Vec<NType> = enumerate_ntypes(k, n).unwrap().collect();
        prop_assert_eq!(all.len() as f64, composition_count(k, n));
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        prop_assert_eq!(distinct.len(), all.len());
        prop_assert!(all.iter().all(|t| t.n() == n && t.len() == k));
        // Type classes partition the k^n sequences.
        let total: f64 = all.iter().map(|t| log_type_class_size(t).exp()).sum();
        prop_assert!((total - (k as f64).powi(n as i32)).abs() < 1e-6 * total);
    }

    #[test]
    fn joint_enumeration_respects_fixed_marginals(n in 1u32..6, split in 0u32..6) {
        let split = split.min(n);
        let qx = NType::new(vec![split, n - split]).unwrap();
        let all: Vec<_> = enumerate_joint_ntypes(2, 3, n, Some(&qx), None).unwrap().collect();
        prop_assert!(all.iter().all(|q| q.marginal_x() == qx));
        let expected = composition_count(3, split) * composition_count(3, n - split);
        prop_assert_eq!(all.len() as f64, expected);
        prop_assert!(all.len() as f64 <= joint_type_count_bound(2, 3, n, Some(&qx), None));
    }
}
