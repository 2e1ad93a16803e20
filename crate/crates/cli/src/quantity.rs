//! Named scalar quantities on a configured state, channel or Hamiltonian.

use entroloss_core::channels::{
    channel_mutual_information, coherent_information, complementary_output_entropy, entropy_gain,
    output_entropy, QuantumOperation,
};
use entroloss_core::energy::{energy_rearrangement_gap, g_parameter, mean_energy, Hamiltonian};
use entroloss_core::info::{
    conditional_entropy, conditional_mutual_information, mutual_information, relative_entropy,
    shannon_entropy, von_neumann_entropy,
};
use entroloss_core::roof::{
    classical_correlations_cb, constrained_holevo, csq_entanglement_k, default_members, delta_k,
    entanglement_of_formation, hk_approximator, quantum_discord, squashed_entanglement_k,
};
use entroloss_core::{BoundDirection, BoundedValue, DensityState, ExtendedReal, OptimizerBudget, Provenance};
use serde::Serialize;

use crate::CliError;

/// What a quantity needs besides its name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Needs {
    State,
    StateSigma,
    StateHamiltonian,
    Hamiltonian,
    StateChannel,
}

/// `(name, needs, description)`.
pub const QUANTITIES: &[(&str, &str, &str)] = &[
    ("entropy", "state", "von Neumann entropy H(rho)"),
    ("marginal_entropy_a", "state", "H of the first factor"),
    ("marginal_entropy_b", "state", "H of the second factor"),
    ("mutual_information", "state", "I(A:B) of a bipartite state"),
    ("conditional_entropy", "state", "H(A|B) of a bipartite state"),
    ("cmi", "state", "I(A:C|B) of a tripartite state"),
    ("pinched_entropy", "state", "Shannon entropy of the computational-basis diagonal"),
    ("relative_entropy", "state, sigma", "H(rho||sigma), +inf off support"),
    ("energy", "state, hamiltonian", "Tr rho H"),
    ("rearrangement_gap", "state, hamiltonian", "Tr rho H minus the energy of the rearranged state"),
    ("g_parameter", "hamiltonian", "inf{lambda : Tr exp(-lambda H) finite}"),
    ("output_entropy", "state, channel", "H(Phi(rho))"),
    ("exchange_entropy", "state, channel", "H of the complementary output"),
    ("channel_mutual_information", "state, channel", "I(Phi, rho)"),
    ("coherent_information", "state, channel", "I_c(Phi, rho)"),
    ("entropy_gain", "state, channel", "H(Phi(rho)) - H(rho)"),
    ("hk", "state", "rank-k approximator H_k (k)"),
    ("delta", "state", "Delta_k (k)"),
    ("entanglement_of_formation", "state", "E_F upper bound (members)"),
    ("csq_entanglement", "state", "E_csq estimate over k-member decompositions (k)"),
    ("squashed_entanglement", "state", "E_sq upper bound over k-dimensional extensions (k)"),
    ("classical_correlations", "state", "C_B lower bound over rank-one POVMs (members)"),
    ("discord", "state", "quantum discord upper bound"),
    ("constrained_holevo", "state, channel", "constrained Holevo capacity lower bound (members)"),
];

#[derive(Debug, Clone, Serialize)]
pub struct QuantityRecord {
    pub quantity: String,
    pub value: ExtendedReal,
    pub provenance: Provenance,
    /// Set for optimizer-backed quantities: which side of the true value `value` is on.
    pub direction: Option<BoundDirection>,
    pub converged: bool,
    pub gap: f64,
    pub seed: u64,
    pub k: Option<usize>,
    pub members: Option<usize>,
}

pub struct Inputs<'a> {
    pub state: Option<&'a DensityState>,
    pub sigma: Option<&'a DensityState>,
    pub channel: Option<&'a QuantumOperation>,
    pub hamiltonian: Option<&'a Hamiltonian>,
    pub budget: OptimizerBudget,
    pub k: Option<usize>,
    pub members: Option<usize>,
}

fn missing(what: &str, name: &str) -> CliError {
    CliError::Config(format!("quantity `{name}` needs a [{what}] section"))
}

fn exact(name: &str, value: ExtendedReal, seed: u64) -> QuantityRecord {
    QuantityRecord {
        quantity: name.to_string(),
        value,
        provenance: Provenance::Exact,
        direction: None,
        converged: true,
        gap: 0.0,
        seed,
        k: None,
        members: None,
    }
}

fn bounded(name: &str, b: BoundedValue, seed: u64, k: Option<usize>, members: Option<usize>) -> QuantityRecord {
    QuantityRecord {
        quantity: name.to_string(),
        value: ExtendedReal::Finite(b.value),
        provenance: b.provenance,
        direction: Some(b.direction),
        converged: b.converged,
        gap: b.gap_estimate,
        seed,
        k,
        members,
    }
}

fn marginal(rho: &DensityState, i: usize) -> Result<f64, CliError> {
    let m = rho.partial_trace(&[i])?;
    Ok(von_neumann_entropy(&m)?)
}

fn needs(name: &str) -> Option<Needs> {
    let n = match name {
        "relative_entropy" => Needs::StateSigma,
        "energy" | "rearrangement_gap" => Needs::StateHamiltonian,
        "g_parameter" => Needs::Hamiltonian,
        "output_entropy"
        | "exchange_entropy"
        | "channel_mutual_information"
        | "coherent_information"
        | "entropy_gain"
        | "constrained_holevo" => Needs::StateChannel,
        _ if QUANTITIES.iter().any(|q| q.0 == name) => Needs::State,
        _ => return None,
    };
    Some(n)
}

pub fn evaluate(name: &str, inp: &Inputs) -> Result<QuantityRecord, CliError> {
    let need = needs(name).ok_or_else(|| {
        let known: Vec<&str> = QUANTITIES.iter().map(|q| q.0).collect();
        CliError::Config(format!("unknown quantity `{name}`; known: {}", known.join(", ")))
    })?;
    let seed = inp.budget.seed;
    let fin = |x: f64| exact(name, ExtendedReal::Finite(x), seed);
    if need == Needs::Hamiltonian {
        let h = inp.hamiltonian.ok_or_else(|| missing("hamiltonian", name))?;
        return Ok(exact(name, g_parameter(h)?, seed));
    }
    let rho = inp.state.ok_or_else(|| missing("state", name))?;
    let b = &inp.budget;
    let k_or = |d: usize| inp.k.unwrap_or(d);
    let rec = match need {
        Needs::StateSigma => {
            let sigma = inp.sigma.ok_or_else(|| missing("sigma", name))?;
            exact(name, relative_entropy(rho, sigma)?, seed)
        }
        Needs::StateHamiltonian => {
            let h = inp.hamiltonian.ok_or_else(|| missing("hamiltonian", name))?;
            match name {
                "energy" => fin(mean_energy(rho, h)?),
                _ => fin(energy_rearrangement_gap(rho, h)?),
            }
        }
        Needs::StateChannel => {
            let phi = inp.channel.ok_or_else(|| missing("channel", name))?;
            match name {
                "output_entropy" => fin(output_entropy(phi, rho)?),
                "exchange_entropy" => fin(complementary_output_entropy(phi, rho)?),
                "channel_mutual_information" => fin(channel_mutual_information(phi, rho)?),
                "coherent_information" => fin(coherent_information(phi, rho)?),
                "entropy_gain" => fin(entropy_gain(phi, rho)?),
                _ => {
                    let m = inp.members.unwrap_or_else(|| default_members(rho.rank()));
                    bounded(name, constrained_holevo(phi, rho, m, b)?, seed, None, Some(m))
                }
            }
        }
        Needs::State => match name {
            "entropy" => fin(von_neumann_entropy(rho)?),
            "marginal_entropy_a" => fin(marginal(rho, 0)?),
            "marginal_entropy_b" => fin(marginal(rho, 1)?),
            "mutual_information" => exact(name, mutual_information(rho)?, seed),
            "conditional_entropy" => fin(conditional_entropy(rho)?),
            "cmi" => fin(conditional_mutual_information(rho)?),
            "pinched_entropy" => {
                let d = rho.to_dense();
                let p: Vec<f64> = (0..rho.dim()).map(|i| d[(i, i)].re.max(0.0)).collect();
                exact(name, shannon_entropy(&p), seed)
            }
            "hk" => {
                let k = k_or(1);
                bounded(name, hk_approximator(rho, k, b)?, seed, Some(k), None)
            }
            "delta" => {
                let k = k_or(1);
                bounded(name, delta_k(rho, k, b)?, seed, Some(k), None)
            }
            "entanglement_of_formation" => {
                let m = inp.members.unwrap_or_else(|| default_members(rho.rank()));
                bounded(name, entanglement_of_formation(rho, m, b)?, seed, None, Some(m))
            }
            "csq_entanglement" => {
                let k = k_or(2);
                bounded(name, csq_entanglement_k(rho, k, b)?, seed, Some(k), None)
            }
            "squashed_entanglement" => {
                let k = k_or(2);
                bounded(name, squashed_entanglement_k(rho, k, b)?, seed, Some(k), None)
            }
            "classical_correlations" => {
                let db = rho.factor_dims().get(1).copied().unwrap_or(1);
                let m = inp.members.unwrap_or(db.max(2));
                bounded(name, classical_correlations_cb(rho, m, b)?, seed, None, Some(m))
            }
            "discord" => bounded(name, quantum_discord(rho, b)?, seed, None, None),
            _ => unreachable!("every state quantity is matched"),
        },
        Needs::Hamiltonian => unreachable!(),
    };
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use entroloss_core::CVector;
    use num_complex::Complex64;

    fn inputs(state: &DensityState) -> Inputs<'_> {
        Inputs {
            state: Some(state),
            sigma: None,
            channel: None,
            hamiltonian: None,
            budget: OptimizerBudget::default(),
            k: None,
            members: None,
        }
    }

    fn bell() -> DensityState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ]);
        DensityState::pure(&psi, vec![2, 2]).unwrap()
    }

    #[test]
    fn every_listed_quantity_is_dispatched() {
        for (name, _, _) in QUANTITIES {
            assert!(needs(name).is_some(), "{name}");
        }
        assert!(needs("nonsense").is_none());
    }

    #[test]
    fn bell_values() {
        let w = bell();
        let mi = evaluate("mutual_information", &inputs(&w)).unwrap();
        assert!((mi.value.unwrap() - 4f64.ln()).abs() < 1e-12);
        let ef = evaluate("entanglement_of_formation", &inputs(&w)).unwrap();
        assert!((ef.value.unwrap() - 2f64.ln()).abs() < 1e-6);
        assert_eq!(ef.direction, Some(BoundDirection::UpperBound));
    }

    #[test]
    fn missing_inputs_are_config_errors() {
        let w = bell();
        assert!(matches!(evaluate("output_entropy", &inputs(&w)), Err(CliError::Config(_))));
        assert!(matches!(evaluate("relative_entropy", &inputs(&w)), Err(CliError::Config(_))));
    }
}
