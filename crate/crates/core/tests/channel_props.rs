use entroloss_core::channels::{
    channel_mutual_information, coherent_information, complementary_output_entropy, ext2_residual,
    output_entropy, QuantumOperation,
};
use entroloss_core::info::{mutual_information, von_neumann_entropy};
use entroloss_core::linalg::CVector;
use entroloss_core::random::{random_density, random_kraus, random_unitary, rng};
use entroloss_core::TraceClassElement;
use proptest::prelude::*;

/// `k` is raised to `⌈d_in / d_out⌉` so that the Stinespring isometry exists.
fn random_channel(seed: u64, d_in: usize, d_out: usize, k: usize) -> QuantumOperation {
    let k = k.max(d_in.div_ceil(d_out));
    QuantumOperation::channel_from_kraus(random_kraus(&mut rng(seed), d_in, d_out, k)).unwrap()
}

/// `vec(√ρ U)` on `A ⊗ R`.
fn purification(rho: &TraceClassElement, seed: u64) -> TraceClassElement {
    let d = rho.dim();
    let root = rho.eig().map(|x| x.max(0.0).sqrt());
    let m = root * random_unitary(&mut rng(seed), d);
    let psi = CVector::from_fn(d * d, |i, _| m[(i / d, i % d)]);
    TraceClassElement::pure(&psi, vec![d, d]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ext2_identity(seed in any::<u64>(), d_in in 1usize..=4, d_out in 1usize..=4, k in 1usize..=4) {
        let phi = random_channel(seed, d_in, d_out, k);
        let rho = random_density(&mut rng(seed ^ 1), &[d_in]);
        prop_assert!(ext2_residual(&phi, &rho).unwrap() <= 1e-8);
    }

    #[test]
    fn channel_mutual_information_ignores_the_purification(
        seed in any::<u64>(), d_in in 1usize..=4, d_out in 1usize..=4, k in 1usize..=3,
    ) {
        let phi = random_channel(seed, d_in, d_out, k);
        let rho = random_density(&mut rng(seed ^ 2), &[d_in]);
        let i = channel_mutual_information(&phi, &rho).unwrap();
        let w = purification(&rho, seed ^ 3);
        prop_assert!((w.partial_trace(&[0]).unwrap().to_dense() - rho.to_dense()).norm() <= 1e-10);
        let other = mutual_information(&phi.apply_to_first(&w).unwrap()).unwrap().unwrap();
        prop_assert!((i - other).abs() <= 1e-8 * (1.0 + i.abs()), "{i} vs {other}");
    }

    #[test]
    fn coherent_information_range(seed in any::<u64>(), d_in in 1usize..=4, d_out in 1usize..=4, k in 1usize..=4) {
        let phi = random_channel(seed, d_in, d_out, k);
        let rho = random_density(&mut rng(seed ^ 4), &[d_in]);
        let h = von_neumann_entropy(&rho).unwrap();
        let ic = coherent_information(&phi, &rho).unwrap();
        prop_assert!(ic.abs() <= h + 1e-9);
        // Araki-Lieb on the dilation: |H(Φ(ρ)) − H(Φ̂(ρ))| ≤ H(ρ)
        let hb = output_entropy(&phi, &rho).unwrap();
        let he = complementary_output_entropy(&phi, &rho).unwrap();
        prop_assert!(hb <= h + he + 1e-9);
        prop_assert!(he <= (phi.env_dim() as f64).ln() + 1e-9);
    }
}
