//! Diagonals in any basis are majorized by the spectrum, and the visibility
//! is Schur-convex.

use intrinsic_coherence::basis_opt::haar_unitary;
use intrinsic_coherence::measures::{is_majorized_by, visibility_f};
use intrinsic_coherence::state::{random_state, spectral_decompose, RandomKind};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let rho = random_state(5, RandomKind::GinibreMixed, 3)?;
    let spectrum = spectral_decompose(&rho)?.eigenvalues;
    let mut ok = 0;
    for seed in 0..100 {
        let diag = haar_unitary(5, seed)?.transform(&rho)?.diagonal();
        if is_majorized_by(&diag, &spectrum, 1e-10) {
            ok += 1;
        }
        assert!(visibility_f(&diag)? <= visibility_f(&spectrum)? + 1e-12);
    }
    println!("{}/100 rotated diagonals majorized by the spectrum", ok);
    println!("f(spectrum) = {:.6}", visibility_f(&spectrum)?);
    Ok(())
}
