use entroloss_core::energy::{
    energy_rearrangement_gap, gibbs_identity_residual, mean_energy, truncated_gibbs, Hamiltonian,
};
use entroloss_core::info::von_neumann_entropy;
use entroloss_core::majorization::{
    entropy_gap_decomposition, f_gap_approximant, majorizes, majorizes_spectra, pinsker_margin,
    rearrangement,
};
use entroloss_core::random::{random_density, random_density_rank, random_probability, random_unitary, rng};
use entroloss_core::{DensityState, TraceClassElement};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// `σ = Σ p_i U_i ρ U_i†`, majorized by `ρ`.
fn mixed_unitary(rho: &DensityState, seed: u64, terms: usize) -> DensityState {
    let mut r = rng(seed);
    let d = rho.dim();
    let p = random_probability(&mut r, terms);
    let mut acc: Option<TraceClassElement> = None;
    for pi in p {
        let t = rho.conjugate(&random_unitary(&mut r, d)).unwrap().element().scale(pi);
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t).unwrap(),
        });
    }
    DensityState::normalized(&acc.unwrap()).unwrap()
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn majorized_pairs(seed in any::<u64>(), d in 1usize..=6, rank in 1usize..=6, terms in 1usize..=4) {
        let rho = random_density_rank(&mut rng(seed), &[d], rank.min(d));
        let sigma = mixed_unitary(&rho, seed ^ 0x5a5a, terms);
        prop_assert!(majorizes(&rho, &sigma).unwrap());
        let (hr, hs) = (von_neumann_entropy(&rho).unwrap(), von_neumann_entropy(&sigma).unwrap());
        prop_assert!(hr <= hs + 1e-9);
        prop_assert!(pinsker_margin(&rho, &sigma).unwrap() >= -1e-8);
        let g = entropy_gap_decomposition(&rho, &sigma).unwrap();
        prop_assert!(g.f_term >= -1e-12);
        prop_assert!(g.d_term >= -1e-12);
        let mut prev = f64::NEG_INFINITY;
        for n in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
            let f = f_gap_approximant(&rho, &sigma, n).unwrap();
            prop_assert!(f >= prev - 1e-12);
            prev = f;
        }
        prop_assert!(prev <= g.f_term + 1e-9);
    }

    #[test]
    fn nondecreasing_weights_favour_the_majorized_side(seed in any::<u64>(), d in 1usize..=10, mixes in 1usize..=5) {
        let mut r = rng(seed);
        let lambda = random_probability(&mut r, d);
        // a convex combination of permutations is doubly stochastic
        let w = random_probability(&mut r, mixes);
        let mut mu = vec![0.0; d];
        for wi in w {
            let mut idx: Vec<usize> = (0..d).collect();
            idx.shuffle(&mut r);
            for (k, &j) in idx.iter().enumerate() {
                mu[k] += wi * lambda[j];
            }
        }
        let (lambda, mu) = (descending(lambda), descending(mu));
        prop_assert!(majorizes_spectra(&lambda, &mu));
        let mut h = Vec::with_capacity(d);
        let mut acc = 0.0;
        for _ in 0..d {
            acc += r.gen::<f64>() * 3.0;
            h.push(acc);
        }
        let el: f64 = lambda.iter().zip(&h).map(|(a, b)| a * b).sum();
        let em: f64 = mu.iter().zip(&h).map(|(a, b)| a * b).sum();
        prop_assert!(el <= em + 1e-9);
    }

    #[test]
    fn rearrangement_lowers_energy(seed in any::<u64>(), d in 1usize..=8, a in 0.1f64..3.0) {
        let h = Hamiltonian::log_law(a, 0.0, 64).unwrap();
        let rho = random_density(&mut rng(seed), &[d]);
        let down = rearrangement(&rho, &h).unwrap();
        prop_assert!(mean_energy(&down, &h).unwrap() <= mean_energy(&rho, &h).unwrap() + 1e-9);
        prop_assert!(energy_rearrangement_gap(&rho, &h).unwrap() >= -1e-9);
        let spec_down = down.spectrum();
        let spec = rho.spectrum();
        for (x, y) in spec_down.iter().zip(&spec) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn gibbs_identity_and_entropy_bound(seed in any::<u64>(), d in 1usize..=8, lambda in 0.05f64..4.0) {
        // linear levels E_k = k: log Z = −log(1 − e^{−λ}) in closed form
        let h = Hamiltonian::new(entroloss_core::energy::LevelLaw::Linear { e0: 0.0, slope: 1.0 }, 4096).unwrap();
        let rho = random_density(&mut rng(seed), &[d]);
        let resid = gibbs_identity_residual(&rho, &h, lambda, d.max(2)).unwrap();
        prop_assert!(resid <= 1e-8, "residual {resid}");
        let log_z = -(-(-lambda).exp()).ln_1p();
        let (_, log_z_trunc) = truncated_gibbs(&h, lambda, 4096).unwrap();
        prop_assert!(log_z_trunc <= log_z + 1e-12);
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s <= lambda * mean_energy(&rho, &h).unwrap() + log_z + 1e-9);
    }
}
