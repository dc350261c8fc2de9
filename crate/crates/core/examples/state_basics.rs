//! Build, validate, decompose and serialize density matrices.

use intrinsic_coherence::state::{
    purity, random_state, read_state, spectral_decompose, validate_density, write_state,
    ComplexMatrix, RandomKind, DEFAULT_TOLERANCE,
};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.1, 0.0], &[0.1, 0.3, 0.0], &[0.0, 0.0, 0.2]])?;
    let rho = validate_density(&m, DEFAULT_TOLERANCE)?;
    let spec = spectral_decompose(&rho)?;
    println!("eigenvalues {:?}", spec.eigenvalues);
    println!("purity      {:.6}", purity(&rho));

    let bad = ComplexMatrix::from_real_rows(&[&[1.2, 0.0], &[0.0, -0.2]])?;
    match validate_density(&bad, DEFAULT_TOLERANCE) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {}", e),
    }

    let r = random_state(4, RandomKind::Rank(2), 11)?;
    let text = write_state(&r);
    let back = read_state(&text, DEFAULT_TOLERANCE)?;
    let err = (back.matrix() - r.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!("rank-2 round trip error {:.1e}", err);
    Ok(())
}
