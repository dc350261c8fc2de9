//! Search over bases for the largest μ_N and visibility, compared with P_N.

use intrinsic_coherence::basis_opt::{equalizing_basis, maximize, SearchConfig, Target};
use intrinsic_coherence::measures::{mu_n, p_n};
use intrinsic_coherence::state::{random_state, RandomKind};
use intrinsic_coherence::Result;

fn main() -> Result<()> {
    let rho = random_state(4, RandomKind::GinibreMixed, 9)?;
    let p = p_n(&rho)?;
    let eq = equalizing_basis(&rho)?;
    println!("P_N                  {:.12}", p);
    println!("μ_N equalizing basis {:.12}", mu_n(&eq.transform(&rho)?)?);

    for target in [Target::Mu, Target::Visibility] {
        let config = SearchConfig::new(100_000, 1)
            .haar_seeds_only()
            .with_trace_stride(20_000);
        let r = maximize(&rho, target, &config)?;
        println!(
            "{:<13} best {:.9}  gap {:.2e}  restarts {}",
            target.name(),
            r.best_value,
            p - r.best_value,
            r.restarts
        );
        for (evals, best) in &r.trace {
            println!("    {:>7} {:.9}", evals, best);
        }
    }
    Ok(())
}
