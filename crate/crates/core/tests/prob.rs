use proptest::prelude::*;
use secexp::prob::*;
use secexp::{Channel, Distribution};

fn distribution(k: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.0f64..1.0, k).prop_filter_map("nonzero mass", |raw| {
        let total: f64 = raw.iter().sum();
        (total > 1e-3).then(|| Distribution::new(raw.iter().map(|v| v / total).collect()).unwrap())
    })
}

fn channel(nx: usize, nz: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(distribution(nz), nx)
        .prop_map(|rows| Channel::new(rows.iter().map(|r| r.masses().to_vec()).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_is_bounded_by_the_alphabet(p in (1usize..6).prop_flat_map(distribution)) {
        let h = entropy(&p);
        prop_assert!(h >= 0.0 && h <= (p.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn divergence_is_nonnegative_and_vanishes_on_the_diagonal(
        (p, q) in (1usize..6).prop_flat_map(|k| (distribution(k), distribution(k)))
    ) {
        let d = kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mutual_information_is_bounded_by_both_entropies(
        (p, w) in (1usize..4, 1usize..4).prop_flat_map(|(a, b)| (distribution(a), channel(a, b)))
    ) {
        let i = mutual_information(&p, &w).unwrap();
        let pz = output_marginal(&p, &w).unwrap();
        prop_assert!(i >= -1e-15);
        prop_assert!(i <= entropy(&p) + 1e-12 && i <= entropy(&pz) + 1e-12);
        // I(P, W) = D(W || P_Z | P).
        let cond: f64 = p
            .masses()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(x, &m)| m * kl_divergence(&Distribution::new(w.row(x).to_vec()).unwrap(), &pz).unwrap())
            .sum();
        prop_assert!((i - cond).abs() < 1e-12);
    }

    #[test]
    fn prefixing_never_adds_information(
        (pu, pre, w) in (1usize..4, 2usize..4, 2usize..4)
            .prop_flat_map(|(u, x, z)| (distribution(u), channel(u, x), channel(x, z)))
    ) {
        let eff = compose_prefix(&pre, &w).unwrap();
        let px = output_marginal(&pu, &pre).unwrap();
        // Data processing: I(U; Z) <= I(X; Z) for the induced input law.
        prop_assert!(mutual_information(&pu, &eff).unwrap() <= mutual_information(&px, &w).unwrap() + 1e-12);
    }
}
