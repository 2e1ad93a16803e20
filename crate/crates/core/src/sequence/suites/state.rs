//! Suites on single-system and bipartite entropies.

use std::sync::Arc;

use crate::energy::{g_parameter, truncated_gibbs};
use crate::error::Result;
use crate::info::{von_neumann_entropy, ExtendedReal};
use crate::majorization::{entropy_gap_decomposition, pinsker_margin};

use super::super::families::log_hamiltonian;
use super::super::functional::Functional;
use super::{note, Ctx, Relation, RowBasis};

/// Rounding allowance for entropy combinations on up to 2¹⁷ levels.
const EXACT: f64 = 1e-10;
/// Fixed-dimension ramps: finite-n deviations at the last grid points are
/// of order `n⁻² log n²`.
pub(super) const RAMP_TOL: f64 = 1e-5;

fn fin(x: f64) -> ExtendedReal {
    ExtendedReal::Finite(x)
}

pub(super) fn gen_ub(ctx: &mut Ctx) -> Result<()> {
    let h = Functional::entropy();
    let cross = Functional::self_cross_entropy();
    for (name, tol) in [
        ("sharp", EXACT),
        ("classical_tail", EXACT),
        ("mix_to_pure", 1e-10),
        ("coherent_block", 1e-10),
    ] {
        let seq = ctx.family(name)?;
        let l = ctx.dj(&seq, &h)?;
        let r = ctx.dj(&seq, &cross)?;
        let row = ctx.eq(name, "dj H = dj Tr rho(-log sigma), sigma_n = rho_n", l, r, tol);
        note(row, "reference equal to the sequence: the cross entropy is the entropy");
    }

    // a fixed Gibbs reference for E_k = log(k+1) at inverse temperature 2,
    // truncated to the largest support on the grid
    let seq = ctx.family("sharp")?;
    let d = seq.n_grid.last().copied().unwrap_or(1) + 1;
    let ham = log_hamiltonian(1.0)?;
    let lambda = 2.0;
    let (_, log_z) = truncated_gibbs(&ham, lambda, d)?;
    let neg_log: Vec<f64> = ham.levels(d)?.iter().map(|e| lambda * e + log_z).collect();
    let f = Functional::cross_entropy_diagonal("Tr rho(-log gibbs(lambda=2))", Arc::new(neg_log));
    let row = ctx.asymptotic(
        &seq,
        "dj H <= dj Tr rho(-log sigma), Gibbs reference",
        Relation::Le,
        &[(1.0, h.clone())],
        &[(1.0, f)],
        EXACT,
    )?;
    note(row, "cross-entropy loss is lambda (E - E0) = 2; the relation is not forced pointwise");
    Ok(())
}

pub(super) fn pinching(ctx: &mut Ctx) -> Result<()> {
    let h = Functional::entropy();
    let hp = Functional::pinched_entropy();
    for name in ["sharp", "sharp_half", "classical_tail"] {
        let seq = ctx.family(name)?;
        let l = ctx.dj(&seq, &h)?;
        let r = ctx.dj(&seq, &hp)?;
        note(ctx.eq(name, "dj H = dj H(pinched), diagonal sequence", l, r, EXACT), "pinching is the identity");
    }
    let seq = ctx.family("coherent_block")?;
    let l = ctx.dj(&seq, &h)?;
    let r = ctx.dj(&seq, &hp)?;
    let row = ctx.le("coherent_block", "dj H <= dj H(pinched)", l, r, 1e-10);
    note(
        row,
        "pinching adds h2(cos^2 theta_n)/2, which exceeds its limit value for every n",
    );
    Ok(())
}

pub(super) fn subadditivity(ctx: &mut Ctx) -> Result<()> {
    let ha = Functional::marginal_entropy(&[0]);
    let hb = Functional::marginal_entropy(&[1]);
    let hab = Functional::entropy();
    for name in ["product_sharp", "correlated_sharp", "lifted_sharp"] {
        let seq = ctx.family(name)?;
        let a = ctx.dj(&seq, &ha)?;
        let b = ctx.dj(&seq, &hb)?;
        let ab = ctx.dj(&seq, &hab)?;
        ctx.le(name, "dj H(AB) <= dj H(A) + dj H(B)", ab, a + b, EXACT);
        ctx.le(name, "dj H(A) <= dj H(AB) + 2 dj H(B)", a, ab + 2.0 * b, EXACT);
        ctx.le(name, "dj H(B) <= dj H(AB) + 2 dj H(A)", b, ab + 2.0 * a, EXACT);
        if name == "product_sharp" {
            let row = ctx.le(name, "dj H(A) <= dj H(AB) + dj H(B), H(B) converging", a, ab + b, EXACT);
            note(row, "the factor 2 is dropped because H(B) is constant");
        }
        if name == "lifted_sharp" {
            ctx.eq(name, "dj H(AB) = 0", ab, ExtendedReal::ZERO, EXACT);
            let row = ctx.eq(name, "dj H(A) = dj H(B) when dj H(AB) = 0", a, b, EXACT);
            note(row, "pure states have equal marginal spectra");
        }
    }

    // the Bell ramp limit is not a product, so these hold only in the limit
    let seq = ctx.family("bell_ramp")?;
    let (a1, b1, ab1) = ((1.0, ha.clone()), (1.0, hb.clone()), (1.0, hab.clone()));
    ctx.asymptotic(
        &seq,
        "dj H(AB) <= dj H(A) + dj H(B)",
        Relation::Le,
        &[ab1.clone()],
        &[a1.clone(), b1.clone()],
        RAMP_TOL,
    )?;
    ctx.asymptotic(
        &seq,
        "dj H(A) <= dj H(AB) + 2 dj H(B)",
        Relation::Le,
        &[a1.clone()],
        &[ab1.clone(), (2.0, hb.clone())],
        RAMP_TOL,
    )?;
    ctx.asymptotic(&seq, "dj H(AB) = 0", Relation::Eq, &[ab1], &[], RAMP_TOL)?;
    ctx.asymptotic(&seq, "dj H(A) = dj H(B) when dj H(AB) = 0", Relation::Eq, &[a1], &[b1], RAMP_TOL)?;
    Ok(())
}

pub(super) fn majorization(ctx: &mut Ctx) -> Result<()> {
    let seq = ctx.family("majorized_pair")?;
    let hr = Functional::on_pair("H(rho)", |r, _| von_neumann_entropy(r));
    let hs = Functional::on_pair("H(sigma)", |_, s| von_neumann_entropy(s));
    let d = Functional::on_pair("D(rho_down || sigma_down)", |r, s| {
        Ok(entropy_gap_decomposition(r, s)?.d_term)
    });
    let f = Functional::on_pair("f(rho, sigma)", |r, s| Ok(entropy_gap_decomposition(r, s)?.f_term));
    let l = ctx.dj(&seq, &hr)?;
    let r = ctx.dj(&seq, &hs)?;
    let ed = ctx.est(&seq, &d)?;
    let ef = ctx.est(&seq, &f)?;
    // liminf minus limit value of each correction, on the window
    let delta1 = ed.tail_inf.to_f64() - ed.limit_value.to_f64();
    let delta2 = ef.tail_inf.to_f64() - ef.limit_value.to_f64();
    ctx.le("majorized_pair", "dj H(rho) <= dj H(sigma)", l, r, EXACT);
    let row = ctx.le(
        "majorized_pair",
        "dj H(rho) <= dj H(sigma) - Delta1 - Delta2",
        l,
        r.minus(delta1 + delta2),
        1e-9,
    );
    row.extras.insert("delta1".into(), delta1);
    row.extras.insert("delta2".into(), delta2);
    note(row, "H(sigma) = H(rho) + D + f pointwise, so sup H(rho) <= sup H(sigma) - inf D - inf f");

    let residual = Functional::on_pair("|H(sigma) - H(rho) - D - f|", |r, s| {
        let g = entropy_gap_decomposition(r, s)?;
        Ok((von_neumann_entropy(s)? - von_neumann_entropy(r)? - g.d_term - g.f_term).abs())
    });
    ctx.pointwise(&seq, "H(sigma) - H(rho) = D + f", &residual, 1e-9)?;
    let pinsker = Functional::on_pair("-(H(sigma) - H(rho) - |sigma_down - rho_down|^2 / 2)", |r, s| {
        Ok(-pinsker_margin(r, s)?)
    });
    ctx.pointwise(&seq, "H(sigma) - H(rho) >= |sigma_down - rho_down|_1^2 / 2", &pinsker, EXACT)?;
    Ok(())
}

pub(super) fn separable(ctx: &mut Ctx) -> Result<()> {
    let ha = Functional::marginal_entropy(&[0]);
    let hb = Functional::marginal_entropy(&[1]);
    let hab = Functional::entropy();
    for name in ["correlated_sharp", "product_sharp"] {
        let seq = ctx.family(name)?;
        let a = ctx.dj(&seq, &ha)?;
        let b = ctx.dj(&seq, &hb)?;
        let ab = ctx.dj(&seq, &hab)?;
        let row = ctx.le(name, "max{dj H(A), dj H(B)} <= dj H(AB)", a.max(b), ab, EXACT);
        note(row, "separable states satisfy H(AB) >= max{H(A), H(B)}");
        ctx.le(name, "dj H(AB) <= dj H(A) + dj H(B)", ab, a + b, EXACT);
    }
    Ok(())
}

pub(super) fn energy(ctx: &mut Ctx) -> Result<()> {
    const ENERGY: f64 = 1.0;
    for (name, a) in [("sharp", 1.0), ("sharp_half", 2.0)] {
        let seq = ctx.family(name)?;
        let ham = log_hamiltonian(a)?;
        let g = g_parameter(&ham)?.unwrap();
        let bound = g * (ENERGY - ham.e0());
        let fe = Functional::energy(ham.clone());
        let fr = Functional::rearranged_energy(ham.clone());
        let h = Functional::entropy();
        let delta2 = Functional::delta_anchored(2);

        let rear = Functional::combination("E(rho_down) - E(rho)", vec![(1.0, fr.clone()), (-1.0, fe.clone())]);
        ctx.pointwise(&seq, "E(rho_down) <= E(rho)", &rear, 1e-9)?;
        let fe2 = fe.clone();
        let over = Functional::new("E(rho) - E", move |s| Ok(fin(fe2.eval(s)?.to_f64() - ENERGY)));
        ctx.pointwise(&seq, "E(rho_n) <= E", &over, 1e-9)?;

        let er = ctx.est(&seq, &fr)?;
        let ee = ctx.est(&seq, &fe)?;
        ctx.le(name, "g dj E(rho_down) <= g dj E(rho)", g * er.dj, g * ee.dj, 1e-9);
        ctx.le(name, "g dj E(rho) <= g (E - E0)", g * ee.dj, fin(bound), 1e-9);

        // the chain at every grid point, anchored at the closed-form loss
        let worst = er
            .values
            .iter()
            .zip(&ee.values)
            .map(|(r, e)| {
                let link_r = g * (r.to_f64() - er.limit_value.to_f64());
                let link_e = g * (e.to_f64() - ee.limit_value.to_f64());
                (bound - link_r).max(link_r - link_e).max(link_e - bound)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let row = ctx.row(
            name,
            "g(E - E0) <= g dE(rho_down)_n <= g dE(rho)_n <= g(E - E0) at every n",
            Relation::Le,
            fin(worst),
            ExtendedReal::ZERO,
            1e-9,
            RowBasis::Pointwise,
        );
        row.extras.insert("points".into(), er.values.len() as f64);

        // the entropy link holds in the limit; the finite-n loss approaches it from above
        let eh = ctx.est(&seq, &h)?;
        let excess: Vec<f64> = eh.values.iter().map(|v| v.to_f64() - eh.limit_value.to_f64() - bound).collect();
        let tail = &excess[excess.len() / 2..];
        let shrinking = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let row = ctx.row(
            name,
            "dj H <= g dj E(rho_down), closed-form loss",
            Relation::Le,
            fin(bound),
            g * er.dj,
            1e-9,
            RowBasis::Asymptotic,
        );
        row.pass &= shrinking;
        row.extras.insert("measured_dj_h".into(), eh.dj.to_f64());
        row.extras.insert("excess_last".into(), *excess.last().expect("nonempty"));
        row.extras.insert("shrinking".into(), f64::from(u8::from(shrinking)));
        note(row, "lhs is the loss of the family; the measured entropy excess over it must shrink");

        let ed = ctx.est(&seq, &delta2)?;
        let row = ctx.row(
            name,
            "dj Delta_2 within 20% of g(E - E0)",
            Relation::Band { lo: 0.8, hi: 1.2 },
            ed.dj,
            fin(bound),
            0.0,
            RowBasis::Asymptotic,
        );
        row.extras.insert("raw_dj_h".into(), eh.dj.to_f64());
        row.extras.insert("ratio".into(), ed.dj.to_f64() / bound);
        row.extras.insert("excess".into(), ed.dj.to_f64() - bound);
        note(row, "Delta_2 removes the binary-entropy term of the finite-n loss; upper bound");
    }
    Ok(())
}
