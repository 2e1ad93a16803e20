//! Channel-input suites.

use crate::error::Result;
use crate::info::ExtendedReal;

use super::super::families::depolarizing_channels;
use super::super::functional::Functional;
use super::super::ramp_grid;
use super::state::RAMP_TOL;
use super::{emin, note, Ctx, Relation, RowBasis};

/// Rounding allowance for entropy combinations on up to 2¹⁷ levels.
const EXACT: f64 = 1e-10;
/// Allowance for relations that hold only in the limit on growing-dimension
/// families, relative to the right-hand side.
const REL_TOL: f64 = 0.05;

fn abs_ic_minus_h() -> Functional {
    let ic = Functional::coherent_information();
    let h = Functional::entropy();
    Functional::new("|I_c| - H(rho)", move |s| {
        Ok(ExtendedReal::Finite(ic.eval(s)?.to_f64().abs() - h.eval(s)?.to_f64()))
    })
}

fn negated(f: Functional) -> Functional {
    Functional::combination(format!("-{}", f.name()), vec![(-1.0, f)])
}

pub(super) fn channels(ctx: &mut Ctx) -> Result<()> {
    let budget = ctx.budget();
    let h = Functional::entropy();
    let out = Functional::output_entropy();
    let ex = Functional::exchange_entropy();
    let mi = Functional::channel_mutual_information();
    let ic = Functional::coherent_information();
    let eg = Functional::entropy_gain();
    let cbar = Functional::constrained_holevo(budget);

    // isometric channels: the exchange entropy vanishes
    for name in ["identity_sharp", "pairswap_sharp"] {
        let seq = ctx.family(name)?;
        let vh = ctx.dj(&seq, &h)?;
        let vo = ctx.dj(&seq, &out)?;
        let vx = ctx.dj(&seq, &ex)?;
        let vi = ctx.dj(&seq, &mi)?;
        let vc = ctx.dj(&seq, &cbar)?;
        let ic_down = ctx.dj(&seq, &ic)?;
        let ic_up = ctx.gain(&seq, &ic)?;
        ctx.le(name, "dj H(Phi(rho)) <= dj H(rho), bounded Choi rank", vo, vh, EXACT);
        ctx.le(name, "dj H(Phi(rho)) <= dj H(rho) + 2 dj H(Phi^(rho))", vo, vh + 2.0 * vx, EXACT);
        ctx.eq(name, "dj H(Phi^(rho)) = 0", vx, ExtendedReal::ZERO, EXACT);
        let row = ctx.eq(name, "dj H(Phi(rho)) = dj H(rho) when dj H(Phi^(rho)) = 0", vo, vh, REL_TOL * vh.to_f64());
        note(row, "5% relative tolerance");
        ctx.le(name, "dj Cbar(Phi,rho) <= dj H(Phi(rho))", vc, vo, EXACT);
        ctx.le(name, "dj I(Phi,rho) <= 2 min{dj H(rho), dj H(Phi(rho))}", vi, 2.0 * emin(&[vh, vo]), EXACT);
        ctx.le(name, "dj_down I_c <= min{2 dj H(rho), dj H(Phi(rho))}", ic_down, emin(&[2.0 * vh, vo]), EXACT);
        ctx.le(name, "dj_up I_c <= min{dj H(rho), dj H(Phi^(rho))}", ic_up, emin(&[vh, vx]), EXACT);
        ctx.pointwise(&seq, "-H(rho) <= I_c <= H(rho)", &abs_ic_minus_h(), 1e-9)?;
    }

    // Choi rank 2 with constant exchange entropy h2(p)
    let name = "swapmix_sharp";
    let seq = ctx.family(name)?;
    let vh = ctx.dj(&seq, &h)?;
    let vo = ctx.dj(&seq, &out)?;
    let vx = ctx.dj(&seq, &ex)?;
    let vi = ctx.dj(&seq, &mi)?;
    let ic_down = ctx.dj(&seq, &ic)?;
    let ic_up = ctx.gain(&seq, &ic)?;
    let row = ctx.le(name, "dj H(Phi(rho)) <= dj H(rho), bounded Choi rank", vo, vh, EXACT);
    note(row, "H(Phi(rho)) <= H(rho) + h2(p) pointwise and the limit output entropy is h2(p)");
    ctx.le(name, "dj H(Phi(rho)) <= dj H(rho) + 2 dj H(Phi^(rho))", vo, vh + 2.0 * vx, EXACT);
    ctx.eq(name, "dj H(Phi^(rho)) = 0", vx, ExtendedReal::ZERO, EXACT);
    ctx.le(name, "dj I(Phi,rho) <= 2 dj H(rho)", vi, 2.0 * vh, EXACT);
    ctx.le(name, "dj_down I_c <= min{2 dj H(rho), dj H(Phi(rho))}", ic_down, emin(&[2.0 * vh, vo]), EXACT);
    ctx.le(name, "dj_up I_c <= min{dj H(rho), dj H(Phi^(rho))}", ic_up, emin(&[vh, vx]), EXACT);
    let row = ctx.asymptotic(
        &seq,
        "dj H(Phi(rho)) = dj H(rho) when dj H(Phi^(rho)) = 0",
        Relation::Eq,
        &[(1.0, out.clone())],
        &[(1.0, h.clone())],
        REL_TOL * vh.to_f64(),
    )?;
    note(row, "finite-n gap is about q_n h2(p); 5% relative tolerance at the last grid point");
    let row = ctx.asymptotic(
        &seq,
        "dj I(Phi,rho) <= 2 dj H(Phi(rho))",
        Relation::Le,
        &[(1.0, mi.clone())],
        &[(2.0, out.clone())],
        REL_TOL * 2.0 * vo.to_f64(),
    )?;
    note(row, "5% relative tolerance at the last grid point");
    ctx.pointwise(&seq, "-H(rho) <= I_c <= H(rho)", &abs_ic_minus_h(), 1e-9)?;

    // fixed dimension: depolarizing channels and near-pure inputs both ramp
    let seq = ctx.family("depolarizing_ramp")?;
    let one = |f: &Functional| vec![(1.0, f.clone())];
    ctx.asymptotic(&seq, "dj H(Phi(rho)) <= dj H(rho)", Relation::Le, &one(&out), &one(&h), RAMP_TOL)?;
    let row = ctx.asymptotic(
        &seq,
        "dj Cbar(Phi,rho) <= dj H(Phi(rho))",
        Relation::Le,
        &one(&cbar),
        &one(&out),
        RAMP_TOL,
    )?;
    note(row, "optimizer lower bound on Cbar");
    ctx.asymptotic(&seq, "dj I(Phi,rho) <= 2 dj H(rho)", Relation::Le, &one(&mi), &[(2.0, h.clone())], RAMP_TOL)?;
    ctx.asymptotic(
        &seq,
        "dj I(Phi,rho) <= 2 dj H(Phi(rho))",
        Relation::Le,
        &one(&mi),
        &[(2.0, out.clone())],
        RAMP_TOL,
    )?;
    ctx.pointwise(&seq, "-H(rho) <= I_c <= H(rho)", &abs_ic_minus_h(), 1e-9)?;
    let row = ctx.pointwise(&seq, "EG >= 0, unital channel", &negated(eg.clone()), 1e-10)?;
    note(row, "lhs is the worst value of -EG");
    let probes = depolarizing_channels()?.validate(&ramp_grid(), 16)?;
    let last = *probes.distances.last().unwrap_or(&f64::INFINITY);
    let row = ctx.row(
        "depolarizing_ramp",
        "channel sequence converges on spanning probes",
        Relation::Le,
        ExtendedReal::Finite(last),
        ExtendedReal::ZERO,
        1e-9,
        RowBasis::Pointwise,
    );
    row.pass &= probes.nonincreasing_after_n0;
    note(row, "lhs is the probe distance at the last grid point; distances must not increase after n = 16");

    // pseudo-diagonal channel: nonnegative and lower semicontinuous I_c and EG
    let seq = ctx.family("pseudo_diagonal_ramp")?;
    ctx.pointwise(&seq, "I_c >= 0, pseudo-diagonal", &negated(ic.clone()), 1e-10)?;
    ctx.pointwise(&seq, "EG >= 0, pseudo-diagonal", &negated(eg.clone()), 1e-10)?;
    let row = ctx.asymptotic(&seq, "dj_up I_c = 0", Relation::Le, &one(&negated(ic)), &[], RAMP_TOL)?;
    note(row, "lower semicontinuity: the upward loss of I_c vanishes");
    let row = ctx.asymptotic(&seq, "dj_up EG = 0", Relation::Le, &one(&negated(eg)), &[], RAMP_TOL)?;
    note(row, "lower semicontinuity: the upward loss of EG vanishes");
    Ok(())
}
