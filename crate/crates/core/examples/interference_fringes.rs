//! Two-beam fringes of a qubit and their best visibility over (δ, θ).

use intrinsic_coherence::measures::{fringe_visibility, interference_2d, p_n};
use intrinsic_coherence::state::{random_state, RandomKind};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let rho = random_state(2, RandomKind::GinibreMixed, 5)?;
    for k in 0..8 {
        let delta = k as f64 * std::f64::consts::PI / 4.0;
        let (i1, i2) = interference_2d(&rho, delta, std::f64::consts::FRAC_PI_4)?;
        println!("δ = {:.3}  I = ({:.6}, {:.6})", delta, i1, i2);
    }
    let v = fringe_visibility(&rho, 256, 256)?;
    println!("max visibility {:.6}, P_2 {:.6}", v, p_n(&rho)?);
    Ok(())
}
