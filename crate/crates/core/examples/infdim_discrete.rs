//! P_∞ for OAM and photon-number states, with the angle route and a ladder.

use intrinsic_coherence::infdim::{
    geometric_oam, oam_to_angle, p_inf_angle, p_inf_fock, p_inf_oam, thermal_fock,
    ConvergenceLadder,
};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let oam = geometric_oam(0.5, 60)?;
    let by_oam = p_inf_oam(&oam)?;
    let by_angle = p_inf_angle(&oam_to_angle(&oam, 512)?)?;
    println!(
        "geometric q=1/2: oam {:.12} ± {:.1e}, angle {:.12}",
        by_oam.value, by_oam.error_bound, by_angle
    );
    println!("expected        {:.12}", (1.0f64 / 3.0).sqrt());

    let mut ladder = ConvergenceLadder::default();
    for d in [5, 10, 20, 40, 80] {
        let p = p_inf_fock(&thermal_fock(1.0, d)?)?;
        ladder.push(d, p.value, vec![("error_bound", p.error_bound)]);
    }
    for r in &ladder.rungs {
        println!("thermal n̄=1, D={:>2}: {:.12}", r.cutoff, r.value);
    }
    println!(
        "ladder error estimate {:.1e}",
        ladder.error_estimate().unwrap_or(0.0)
    );
    Ok(())
}
