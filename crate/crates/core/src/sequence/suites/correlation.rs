//! Suites on correlation quantities: mutual and conditional information,
//! Holevo quantity, entanglement, discord and sums of cone elements.

use crate::channels::QuantumOperation;
use crate::error::{Error, Result};
use crate::info::ExtendedReal;
use crate::operator::DensityState;

use super::super::functional::Functional;
use super::super::sample::Sample;
use super::state::RAMP_TOL;
use super::{emin, note, Ctx, Relation};

/// Rounding allowance for entropy combinations on up to 2¹⁷ levels.
const EXACT: f64 = 1e-10;
/// Optimizer-backed rows on fixed-dimension ramps.
const OPT_TOL: f64 = 1e-4;

fn dephase_first(s: &Sample) -> Result<Sample> {
    match s {
        Sample::Correlated(c) => Ok(Sample::Correlated(c.dephased())),
        Sample::State(st) if st.is_diagonal() => Ok(s.clone()),
        Sample::State(st) => {
            let d = st.factor_dims()[0];
            let out = QuantumOperation::dephasing(d, 1.0)?.apply_to_first(st)?;
            Ok(Sample::State(DensityState::new(out)?))
        }
        Sample::ChannelInput { .. } => Err(Error::InvalidArgument("state sample expected".into())),
    }
}

pub(super) fn mi_local_ops(ctx: &mut Ctx) -> Result<()> {
    let i = Functional::mutual_information();
    let ha = Functional::marginal_entropy(&[0]);
    let hb = Functional::marginal_entropy(&[1]);
    let icd = Functional::mutual_information().after("I(C:D), A dephased", dephase_first);
    for name in ["lifted_sharp", "correlated_sharp", "product_sharp"] {
        let seq = ctx.family(name)?;
        let vi = ctx.dj(&seq, &i)?;
        let a = ctx.dj(&seq, &ha)?;
        let b = ctx.dj(&seq, &hb)?;
        let vcd = ctx.dj(&seq, &icd)?;
        ctx.le(name, "dj I(A:B) <= 2 min{dj H(A), dj H(B)}", vi, 2.0 * emin(&[a, b]), EXACT);
        let row = ctx.le(name, "dj I(C:D) <= dj I(A:B), local dephasing", vcd, vi, EXACT);
        note(row, "data processing with equal limit values");
        if name == "lifted_sharp" {
            let target = 2.0 * a;
            let row = ctx.eq(name, "dj I(A:B) = 2 dj H(A), pure lift", vi, target, 0.05 * target.to_f64());
            note(row, "5% relative tolerance");
        }
    }
    let seq = ctx.family("bell_ramp")?;
    ctx.asymptotic(
        &seq,
        "dj I(A:B) <= 2 min{dj H(A), dj H(B)}",
        Relation::Le,
        &[(1.0, i.clone())],
        &[(2.0, ha.clone())],
        RAMP_TOL,
    )?;
    ctx.asymptotic(
        &seq,
        "dj I(C:D) <= dj I(A:B), local dephasing",
        Relation::Le,
        &[(1.0, icd)],
        &[(1.0, i)],
        RAMP_TOL,
    )?;
    Ok(())
}

pub(super) fn conditional_entropy(ctx: &mut Ctx) -> Result<()> {
    let ce = Functional::conditional_entropy();
    let ha = Functional::marginal_entropy(&[0]);
    let hb = Functional::marginal_entropy(&[1]);
    let hab = Functional::entropy();
    for name in ["lifted_sharp", "correlated_sharp", "product_sharp"] {
        let seq = ctx.family(name)?;
        let down = ctx.dj(&seq, &ce)?;
        let up = ctx.gain(&seq, &ce)?;
        let a = ctx.dj(&seq, &ha)?;
        let b = ctx.dj(&seq, &hb)?;
        let ab = ctx.dj(&seq, &hab)?;
        ctx.le(name, "dj_down H(A|B) <= min{dj H(A), dj H(AB)}", down, emin(&[a, ab]), EXACT);
        ctx.le(name, "dj_up H(A|B) <= min{2 dj H(A), dj H(B)}", up, emin(&[2.0 * a, b]), EXACT);
        match name {
            "lifted_sharp" => {
                let row = ctx.eq(name, "dj_up H(A|B) = dj H(B), pure lift", up, b, EXACT);
                note(row, "H(A|B) = -H(B) on pure states: the upward bound is attained");
            }
            "correlated_sharp" => {
                let row = ctx.eq(name, "dj_up H(A|B) = 0, separable", up, ExtendedReal::ZERO, EXACT);
                note(row, "H(A|B) >= 0 on separable states and vanishes at the limit");
            }
            _ => {
                let row = ctx.eq(name, "dj_down H(A|B) = dj H(A), product", down, a, EXACT);
                note(row, "H(A|B) = H(A) on products: the downward bound is attained");
            }
        }
    }
    Ok(())
}

pub(super) fn holevo(ctx: &mut Ctx) -> Result<()> {
    let chi = Functional::mutual_information();
    let avg = Functional::marginal_entropy(&[0]);
    let weights = Functional::marginal_entropy(&[1]);
    let sum = Functional::block_entropy_sum();
    for name in ["ensemble_orthogonal", "ensemble_overlap", "ensemble_varying", "correlated_sharp"] {
        let seq = ctx.family(name)?;
        let c = ctx.dj(&seq, &chi)?;
        let a = ctx.dj(&seq, &avg)?;
        let w = ctx.dj(&seq, &weights)?;
        let row = ctx.le(name, "dj chi <= min{dj H(avg), 2 dj H(weights)}", c, emin(&[a, 2.0 * w]), EXACT);
        note(row, "chi is I(A:B) of the cq state, with B the classical register");
        match name {
            "ensemble_orthogonal" => {
                let s = ctx.dj(&seq, &sum)?;
                let row = ctx.eq(name, "dj H(sum_i pi_i rho_i) = dj sum_i H(pi_i rho_i)", a, s, EXACT);
                note(row, "the two sides differ by chi, constant on this family");
            }
            "ensemble_overlap" | "ensemble_varying" => {
                let row = ctx.asymptotic(
                    &seq,
                    "dj H(sum_i pi_i rho_i) = dj sum_i H(pi_i rho_i)",
                    Relation::Eq,
                    &[(1.0, avg.clone())],
                    &[(1.0, sum.clone())],
                    1e-4,
                )?;
                note(row, "two members; the sides differ by chi, which converges");
            }
            _ => {
                let row = ctx.eq(name, "dj chi = dj H(avg), basis ensemble", c, a, EXACT);
                note(row, "unboundedly many members: the sum identity is not claimed");
            }
        }
    }
    Ok(())
}

pub(super) fn cmi(ctx: &mut Ctx) -> Result<()> {
    let cmi = Functional::conditional_mutual_information();
    let iac = Functional::mutual_information_between(&[0], &[2]);
    let m = |k: &[usize]| Functional::marginal_entropy(k);
    for name in ["ghz_sharp", "classical_cmi"] {
        let seq = ctx.family(name)?;
        let v = ctx.dj(&seq, &cmi)?;
        let i = ctx.dj(&seq, &iac)?;
        let a = ctx.dj(&seq, &m(&[0]))?;
        let b = ctx.dj(&seq, &m(&[1]))?;
        let c = ctx.dj(&seq, &m(&[2]))?;
        let ab = ctx.dj(&seq, &m(&[0, 1]))?;
        let bc = ctx.dj(&seq, &m(&[1, 2]))?;
        let abc = ctx.dj(&seq, &Functional::entropy())?;
        ctx.le(
            name,
            "dj I(A:C|B) <= 2 min{dj H(A), dj H(C), dj H(AB), dj H(BC)}",
            v,
            2.0 * emin(&[a, c, ab, bc]),
            EXACT,
        );
        let rhs = i + 2.0 * emin(&[b, abc]);
        ctx.le(name, "dj I(A:C|B) <= dj I(A:C) + 2 min{dj H(B), dj H(ABC)}", v, rhs, EXACT);
        let row = ctx.eq(name, "dj I(A:C|B) = dj I(A:C) + 2 min{dj H(B), dj H(ABC)}", v, rhs, EXACT);
        note(row, "the second bound is attained on this family");
    }
    Ok(())
}

pub(super) fn entanglement(ctx: &mut Ctx) -> Result<()> {
    let budget = ctx.budget();
    let i = Functional::mutual_information();
    let ha = Functional::marginal_entropy(&[0]);
    let hb = Functional::marginal_entropy(&[1]);
    // (measure, obeys the half mutual-information bound)
    let measures = [
        (Functional::entanglement_of_formation(budget), false),
        (Functional::csq_entanglement(2, budget), true),
        (Functional::squashed_entanglement(2, budget), true),
        (Functional::regularized_entanglement_of_formation(), false),
    ];
    for name in ["lifted_sharp", "correlated_sharp", "product_sharp", "bell_ramp"] {
        let seq = ctx.family(name)?;
        let a = ctx.dj(&seq, &ha)?;
        let b = ctx.dj(&seq, &hb)?;
        let vi = ctx.dj(&seq, &i)?;
        let tol = if name == "bell_ramp" { OPT_TOL } else { EXACT };
        for (e, half_i) in &measures {
            // the regularized measure is known only on pure or separable samples
            if name == "bell_ramp" && e.bound().is_none() {
                continue;
            }
            let v = ctx.dj(&seq, e)?;
            let row = ctx.le(name, format!("dj {} <= min{{dj H(A), dj H(B)}}", e.name()), v, emin(&[a, b]), tol);
            if e.bound().is_some() && name == "bell_ramp" {
                note(row, "optimizer upper bound on E: a passing row is conclusive");
            }
            if *half_i {
                ctx.le(name, format!("dj {} <= dj I(A:B) / 2", e.name()), v, 0.5 * vi, tol);
            }
            if name == "lifted_sharp" {
                let row = ctx.eq(name, format!("dj {} = dj H(A), pure lift", e.name()), v, a, EXACT);
                note(row, "E = H(A) on pure states: the marginal bound is attained");
            }
        }
    }
    Ok(())
}

pub(super) fn discord(ctx: &mut Ctx) -> Result<()> {
    let budget = ctx.budget();
    let cb = Functional::classical_correlations(budget);
    let db = Functional::discord(budget);
    let ha = Functional::marginal_entropy(&[0]);
    let hb = Functional::marginal_entropy(&[1]);
    let hab = Functional::entropy();
    for name in ["lifted_sharp", "correlated_sharp", "product_sharp", "bell_ramp"] {
        let seq = ctx.family(name)?;
        let tol = if name == "bell_ramp" { OPT_TOL } else { EXACT };
        let c = ctx.dj(&seq, &cb)?;
        let down = ctx.dj(&seq, &db)?;
        let up = ctx.gain(&seq, &db)?;
        let a = ctx.dj(&seq, &ha)?;
        let b = ctx.dj(&seq, &hb)?;
        let ab = ctx.dj(&seq, &hab)?;
        let row = ctx.le(name, "dj C_B <= dj H(A)", c, a, tol);
        if name == "bell_ramp" {
            note(row, "optimizer lower bound on C_B: the row can under-report the loss");
        }
        ctx.le(name, "dj_down D_B <= min{2 dj H(A), dj H(B)}", down, emin(&[2.0 * a, b]), tol);
        ctx.le(name, "dj_up D_B <= min{dj H(A), dj H(AB)}", up, emin(&[a, ab]), tol);
        if name == "lifted_sharp" {
            let row = ctx.eq(name, "dj C_B = dj H(A), pure lift", c, a, EXACT);
            note(row, "C_B = D_B = H(A) on pure states");
        }
    }
    Ok(())
}

pub(super) fn sums(ctx: &mut Ctx) -> Result<()> {
    let total = Functional::marginal_entropy(&[0]);
    let sum = Functional::block_entropy_sum();
    let first = Functional::block_entropy(0);
    let second = Functional::block_entropy(1);

    let seq = ctx.family("sum_orthogonal")?;
    let t = ctx.dj(&seq, &total)?;
    let s = ctx.dj(&seq, &sum)?;
    let f = ctx.dj(&seq, &first)?;
    let g = ctx.dj(&seq, &second)?;
    let row = ctx.eq("sum_orthogonal", "dj H(rho + sigma) = dj H(rho) + dj H(sigma)", t, f + g, EXACT);
    note(row, "summands on disjoint levels");
    ctx.eq("sum_orthogonal", "dj H(sum_k rho_k) = dj sum_k H(rho_k)", t, s, EXACT);
    ctx.le("sum_orthogonal", "max{dj H(rho), dj H(sigma)} <= dj H(rho + sigma)", f.max(g), t, EXACT);
    ctx.le("sum_orthogonal", "dj H(rho + sigma) <= dj H(rho) + dj H(sigma)", t, f + g, EXACT);

    let seq = ctx.family("ensemble_overlap")?;
    let row = ctx.asymptotic(
        &seq,
        "dj H(rho + sigma) = dj H(rho) + dj H(sigma)",
        Relation::Eq,
        &[(1.0, total.clone())],
        &[(1.0, first.clone()), (1.0, second.clone())],
        1e-4,
    )?;
    note(row, "overlapping summands, the second one fixed");
    ctx.asymptotic(
        &seq,
        "dj H(rho) <= dj H(rho + sigma)",
        Relation::Le,
        &[(1.0, first.clone())],
        &[(1.0, total.clone())],
        1e-4,
    )?;
    ctx.asymptotic(
        &seq,
        "dj H(rho + sigma) <= dj H(rho) + dj H(sigma)",
        Relation::Le,
        &[(1.0, total)],
        &[(1.0, first), (1.0, second)],
        1e-4,
    )?;
    Ok(())
}
