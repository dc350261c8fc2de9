//! Drives the batch front end in-process, as the `coherence` binary does.

use intrinsic_coherence::cli::run;
use intrinsic_coherence::state::{random_state, write_state, RandomKind};

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("coherence-cli-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("state.json");
    let rho = random_state(3, RandomKind::GinibreMixed, 4).expect("valid dimension");
    std::fs::write(&path, write_state(&rho))?;
    let input = path.to_str().expect("utf-8 path");

    let mut out = Vec::new();
    let mut err = Vec::new();
    for args in [
        vec!["coherence", "report", "--input", input, "--format", "tsv"],
        vec![
            "coherence",
            "maximize",
            "--input",
            input,
            "--target",
            "mu",
            "--budget",
            "20000",
            "--format",
            "tsv",
        ],
        vec![
            "coherence",
            "infdim",
            "--family",
            "geometric-oam:q=0.5",
            "--format",
            "tsv",
        ],
    ] {
        let code = run(args, &mut out, &mut err);
        println!("exit {}", code);
    }
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    Ok(())
}
