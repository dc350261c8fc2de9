//! Every route to P_N for one state, plus the pure-part weights.

use intrinsic_coherence::measures::{
    coherence_report, p_n, pure_part_bound_check, pure_part_decomposition,
};
use intrinsic_coherence::DensityMatrix;
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let rho = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.2])?;
    let report = coherence_report(&rho)?;
    for (name, value) in report.routes() {
        println!("{:<20} {:.12}", name, value);
    }
    print!("{}", report.to_tsv());

    let d = pure_part_decomposition(&rho)?;
    let bound = pure_part_bound_check(&d, p_n(&rho)?);
    println!("weights {:?}", d.weights);
    println!(
        "gap {:.6}, identity residual {:.1e}",
        bound.gap, bound.identity_residual
    );
    Ok(())
}
