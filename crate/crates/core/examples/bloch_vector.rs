//! Generalized Gell-Mann basis and the Bloch-vector parametrization.

use intrinsic_coherence::bloch::{bloch_norm, from_bloch, gellmann_basis, to_bloch};
use intrinsic_coherence::state::{random_state, RandomKind};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let basis = gellmann_basis(3)?;
    println!("SU(3) generators: {}", basis.len());

    let rho = random_state(3, RandomKind::GinibreMixed, 2)?;
    let b = to_bloch(&rho);
    println!("components {:?}", b.to_flat());
    println!("|b|        {:.12}", bloch_norm(&b));

    let back = from_bloch(&b)?;
    let err = (back.matrix() - rho.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!("reconstruction error {:.2e}", err);
    Ok(())
}
