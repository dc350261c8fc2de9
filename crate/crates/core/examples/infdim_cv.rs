//! Finite position-momentum grids: the commutator, P_∞ in both
//! representations and through the Wigner function.

use intrinsic_coherence::infdim::{
    build_cv_grid, commutator_check, p_inf_cv, p_inf_wigner, thermal_wigner, wigner_from_cv,
    CvState,
};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let hbar = 1.0;
    let sigma0 = CvState::default_sigma0(hbar);
    for d in [64, 128, 256] {
        let grid = build_cv_grid(d, 2.5 * (d as f64 / 64.0).powf(0.25), hbar)?;
        let probe = CvState::gaussian(grid, sigma0, 0.0, 0.0)?;
        let c = commutator_check(&grid, &probe)?;
        println!(
            "D={:>3}  ⟨[x,p]⟩ deviation from iħ {:.2e}, trace {:.1e}",
            d, c.deviation, c.trace
        );
    }

    let grid = build_cv_grid(128, 8.0, hbar)?;
    let thermal = CvState::thermal(grid, 1.0, sigma0)?;
    let px = p_inf_cv(&thermal)?;
    let pp = p_inf_cv(&thermal.to_momentum())?;
    let w = wigner_from_cv(&thermal, grid.size(), grid.size())?;
    println!(
        "thermal n̄=1: position {:.9}, momentum {:.9}, wigner {:.9}",
        px,
        pp,
        p_inf_wigner(&w, hbar)?
    );

    let analytic = thermal_wigner(hbar, sigma0, 1.0, (-8.0, 8.0), (-8.0, 8.0), 201)?;
    println!(
        "analytic Wigner: {:.9} (expected {:.9})",
        p_inf_wigner(&analytic, hbar)?,
        1.0 / 3f64.sqrt()
    );
    Ok(())
}
