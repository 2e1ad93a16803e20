use entroloss_core::info::{relative_entropy, von_neumann_entropy};
use entroloss_core::random::{random_density, random_density_rank, random_pure, rng};
use entroloss_core::roof::{
    csq_entanglement_k, delta_k, entanglement_of_formation, hk_approximator, squashed_entanglement_k,
    OptimizerBudget,
};
use entroloss_core::{DensityState, TraceClassElement};
use proptest::prelude::*;

fn budget() -> OptimizerBudget {
    OptimizerBudget {
        restarts: 2,
        iterations: 200,
        ..Default::default()
    }
}

/// Spectral ensemble of `x`: probabilities `λ_i / Tr x` and rank-one
/// members `(Tr x) |v_i⟩⟨v_i|`, each with the trace of `x`.
fn spectral_ensemble(x: &TraceClassElement) -> Vec<(f64, TraceClassElement)> {
    let sd = x.eig();
    let d = x.dim();
    let t = x.trace();
    sd.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(i, &l)| {
            let v = sd.eigenvectors.column(i).into_owned();
            (l / t, TraceClassElement::pure(&v, vec![d]).unwrap().scale(t))
        })
        .collect()
}

fn ensemble_delta(ens: &[(f64, TraceClassElement)], avg: &TraceClassElement) -> f64 {
    ens.iter()
        .map(|(p, m)| p * relative_entropy(m, avg).unwrap().unwrap())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_anchors(seed in any::<u64>(), d in 1usize..=5, rank in 1usize..=5) {
        let rho = random_density_rank(&mut rng(seed), &[d], rank.min(d));
        let h = von_neumann_entropy(&rho).unwrap();
        let h1 = hk_approximator(&rho, 1, &budget()).unwrap();
        prop_assert!(h1.is_exact() && h1.value == 0.0);
        let d1 = delta_k(&rho, 1, &budget()).unwrap();
        prop_assert!(d1.is_exact() && (d1.value - h).abs() <= 1e-12);
        let dr = delta_k(&rho, rho.rank().max(1), &budget()).unwrap();
        prop_assert!(dr.is_exact() && dr.value.abs() <= 1e-12);
    }

    #[test]
    fn entropy_grows_along_the_cone_order(seed in any::<u64>(), d in 1usize..=5, t in 0.0f64..2.0) {
        // Δ₁ = H is monotone: ρ ≤ ρ + tτ
        let mut r = rng(seed);
        let rho = random_density(&mut r, &[d]);
        let tau = random_density(&mut r, &[d]).element().scale(t);
        let sum = rho.element().add(&tau).unwrap();
        prop_assert!(von_neumann_entropy(&rho).unwrap() <= von_neumann_entropy(&sum).unwrap() + 1e-9);
    }

    #[test]
    fn delta_subadditivity_at_certified_points(seed in any::<u64>(), d in 1usize..=5, a in 0.05f64..2.0, b in 0.05f64..2.0) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, &[d]).element().scale(a);
        let sigma = random_density(&mut r, &[d]).element().scale(b);
        let total = rho.add(&sigma).unwrap();
        let er = spectral_ensemble(&rho);
        let es = spectral_ensemble(&sigma);
        // the spectral ensemble certifies Δ₁ = H on the cone
        let hr = von_neumann_entropy(&rho).unwrap();
        let hs = von_neumann_entropy(&sigma).unwrap();
        prop_assert!((ensemble_delta(&er, &rho) - hr).abs() <= 1e-9);
        prop_assert!((ensemble_delta(&es, &sigma) - hs).abs() <= 1e-9);
        // pairwise sums form a rank-≤2 ensemble of ρ + σ, so this bounds Δ₂(ρ + σ) from above
        let paired: Vec<(f64, TraceClassElement)> = er
            .iter()
            .flat_map(|(p, x)| es.iter().map(move |(q, y)| (p * q, x.add(y).unwrap())))
            .collect();
        let upper = ensemble_delta(&paired, &total);
        prop_assert!(upper <= hr + hs + 1e-9, "{upper} > {}", hr + hs);
        let opt = delta_k(&DensityState::normalized(&total).unwrap(), 2, &budget()).unwrap();
        prop_assert!(opt.value >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn measures_agree_on_pure_states(seed in any::<u64>()) {
        let w = random_pure(&mut rng(seed), &[2, 2]);
        let ha = von_neumann_entropy(&w.partial_trace(&[0]).unwrap()).unwrap();
        let ef = entanglement_of_formation(&w, 2, &budget()).unwrap();
        prop_assert!(ef.is_exact() && (ef.value - ha).abs() <= 1e-10);
        let csq = csq_entanglement_k(&w, 2, &budget()).unwrap();
        prop_assert!((csq.value - ha).abs() <= 1e-9);
        // the optimizer's upper estimate of E_sq may not fall below the exact E_F
        let sq = squashed_entanglement_k(&w, 2, &budget()).unwrap();
        prop_assert!(sq.value >= ha - 1e-6, "E_sq estimate {} below E_F {}", sq.value, ha);
    }
}
