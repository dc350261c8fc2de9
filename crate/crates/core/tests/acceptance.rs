//! Acceptance suite: one pass/fail line per criterion at the pinned
//! tolerances.
//!
//! Criterion 4 contains a claim that is false as stated: for rank-2 states
//! with N ≥ 3 the pure-part weights exceed P_N strictly. That sub-check is
//! reported red and the suite asserts that it is the only red item.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use intrinsic_coherence::basis_opt::{
    equalizing_basis, haar_unitary, maximize, SearchConfig, Target,
};
use intrinsic_coherence::bloch::{bloch_norm, to_bloch};
use intrinsic_coherence::infdim::{
    build_cv_grid, commutator_check, geometric_oam, oam_to_angle, p_inf_angle, p_inf_cv,
    p_inf_fock, p_inf_oam, p_inf_wigner, thermal_fock, thermal_wigner, wigner_from_cv, CvState,
};
use intrinsic_coherence::measures::{
    center_of_mass_distance, fringe_visibility, frobenius_distance_measure, is_majorized_by, mu_n,
    p_n, pure_part_bound_check, pure_part_decomposition, visibility, visibility_f,
};
use intrinsic_coherence::state::{random_state, spectral_decompose, RandomKind};

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(o: &Outcome) {
    println!(
        "criterion {} [{}] {}: {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.name,
        o.detail
    );
}

fn kind_for(i: usize) -> RandomKind {
    if i.is_multiple_of(5) {
        RandomKind::HaarPure
    } else {
        RandomKind::GinibreMixed
    }
}

fn six_interpretations() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..500 {
        let n = 2 + i % 9;
        let rho = random_state(n, kind_for(i), 1000 + i as u64).unwrap();
        let spec = spectral_decompose(&rho).unwrap();
        let values = [
            p_n(&rho).unwrap(),
            bloch_norm(&to_bloch(&rho)),
            frobenius_distance_measure(&rho),
            center_of_mass_distance(&spec),
            visibility(&rho).unwrap(),
        ];
        let hi = values.iter().copied().fold(f64::MIN, f64::max);
        let lo = values.iter().copied().fold(f64::MAX, f64::min);
        worst = worst.max(hi - lo);
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: 1,
        name: "six-interpretation equality",
        pass: worst <= 1e-9 && secs < 5.0,
        detail: format!(
            "max discrepancy {:.2e} (≤ 1e-9), {:.2} s (< 5 s)",
            worst, secs
        ),
    }
}

fn maximum_mu() -> Outcome {
    let start = Instant::now();
    let cases: Vec<(usize, u64)> = [2usize, 3, 4, 6]
        .iter()
        .flat_map(|&n| (0..100).map(move |k| (n, 2000 + 100 * n as u64 + k)))
        .collect();
    // (equalizing error, overshoot, shortfall)
    let rows: Vec<(f64, f64, f64)> = cases
        .par_iter()
        .map(|&(n, seed)| {
            let rho = random_state(n, RandomKind::GinibreMixed, seed).unwrap();
            let p = p_n(&rho).unwrap();
            let eq = mu_n(&equalizing_basis(&rho).unwrap().transform(&rho).unwrap()).unwrap();
            let config = SearchConfig::new(100_000, seed).haar_seeds_only();
            let best = maximize(&rho, Target::Mu, &config).unwrap().best_value;
            ((eq - p).abs(), best - p, p - best)
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let eq_err = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let overshoot = rows.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let shortfall = rows.iter().map(|r| r.2).fold(f64::MIN, f64::max);
    Outcome {
        id: 2,
        name: "maximum-μ theorem",
        pass: eq_err <= 1e-9 && overshoot <= 1e-6 && shortfall <= 1e-3 && secs < 60.0,
        detail: format!(
            "equalizing |μ−P| {:.2e} (≤ 1e-9), search overshoot {:.2e} (≤ 1e-6), \
             shortfall {:.2e} (≤ 1e-3), {:.1} s (< 60 s)",
            eq_err, overshoot, shortfall, secs
        ),
    }
}

/// y random on the simplex, x = B y with B unistochastic (|U_ij|²), so x ≺ y.
fn majorized_pair(rng: &mut ChaCha8Rng, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut y: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
    let total: f64 = y.iter().sum();
    y.iter_mut().for_each(|v| *v /= total);
    let u = haar_unitary(n, seed).unwrap();
    let x = (0..n)
        .map(|i| (0..n).map(|j| u.matrix()[(i, j)].norm_sqr() * y[j]).sum())
        .collect();
    (x, y)
}

fn schur_convexity() -> Outcome {
    let pairs: Vec<bool> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let n = 2 + (k % 7) as usize;
            let rho = random_state(n, RandomKind::GinibreMixed, 30_000 + k).unwrap();
            let spectrum = spectral_decompose(&rho).unwrap().eigenvalues;
            let diag = haar_unitary(n, 90_000 + k)
                .unwrap()
                .transform(&rho)
                .unwrap()
                .diagonal();
            is_majorized_by(&diag, &spectrum, 1e-10)
        })
        .collect();
    let majorized = pairs.iter().filter(|&&b| b).count();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut schur_ok = 0;
    let mut worst = f64::MIN;
    for k in 0..200 {
        let n = 2 + k % 8;
        let (x, y) = majorized_pair(&mut rng, n, 7_000 + k as u64);
        let excess = visibility_f(&x).unwrap() - visibility_f(&y).unwrap();
        worst = worst.max(excess);
        if excess <= 1e-12 && is_majorized_by(&x, &y, 1e-10) {
            schur_ok += 1;
        }
    }
    Outcome {
        id: 3,
        name: "Schur-convexity and majorization",
        pass: majorized == 10_000 && schur_ok == 200,
        detail: format!(
            "{}/10000 diagonals majorized by spectra; {}/200 pairs with f(x) ≤ f(y) + 1e-12 \
             (max f(x) − f(y) {:.2e})",
            majorized, schur_ok, worst
        ),
    }
}

/// Returns the outcome plus whether the sub-checks that are true as stated
/// all passed.
fn pure_part() -> (Outcome, bool) {
    let mut recon = 0.0f64;
    let mut identity = 0.0f64;
    for i in 0..200 {
        let n = 2 + i % 9;
        let rho = random_state(n, kind_for(i + 1), 5_000 + i as u64).unwrap();
        let d = pure_part_decomposition(&rho).unwrap();
        let err = (d.reconstruct() - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        recon = recon.max(err);
        identity = identity.max(pure_part_bound_check(&d, p_n(&rho).unwrap()).identity_residual);
    }

    // The literal claim: gap = 0 for every rank-2 state.
    let mut literal_gap = 0.0f64;
    // What does hold: N = 2 gives 0, and for N ≥ 3 the gap equals 1 − √(1 − 2Nab/(N−1)).
    let mut qubit_gap = 0.0f64;
    let mut formula_err = 0.0f64;
    for i in 0..100u64 {
        let n = 2 + (i % 6) as usize;
        let rho = random_state(n, RandomKind::Rank(2), 6_000 + i).unwrap();
        let d = pure_part_decomposition(&rho).unwrap();
        let gap = pure_part_bound_check(&d, p_n(&rho).unwrap()).gap;
        if n == 2 {
            qubit_gap = qubit_gap.max(gap.abs());
            continue;
        }
        literal_gap = literal_gap.max(gap.abs());
        let spec = spectral_decompose(&rho).unwrap().eigenvalues;
        let (a, b) = (spec[0], spec[1]);
        let nf = n as f64;
        let expected = 1.0 - (1.0 - 2.0 * nf * a * b / (nf - 1.0)).max(0.0).sqrt();
        formula_err = formula_err.max((gap - expected).abs());
    }
    let true_parts =
        recon <= 1e-10 && identity <= 1e-10 && qubit_gap <= 1e-9 && formula_err <= 1e-9;
    let literal = literal_gap <= 1e-9;
    let outcome = Outcome {
        id: 4,
        name: "pure-part decomposition",
        pass: true_parts && literal,
        detail: format!(
            "reconstruction {:.2e} (≤ 1e-10), identity {:.2e} (≤ 1e-10), rank-2 N=2 gap {:.2e}; \
             rank-2 N≥3 max gap {:.3} (claimed 0 ± 1e-9: does not hold), \
             closed-form gap residual {:.2e}",
            recon, identity, qubit_gap, literal_gap, formula_err
        ),
    };
    (outcome, true_parts)
}

fn fringe() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let rho = random_state(2, kind_for(i as usize + 1), 8_000 + i).unwrap();
        let v = fringe_visibility(&rho, 256, 256).unwrap();
        worst = worst.max((v - p_n(&rho).unwrap()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: 5,
        name: "2D interference fringe",
        pass: worst <= 1e-3 && secs < 10.0,
        detail: format!(
            "max |V − P_2| {:.2e} (≤ 1e-3), {:.2} s (< 10 s)",
            worst, secs
        ),
    }
}

fn infinite_dimensional() -> Outcome {
    let start = Instant::now();
    let third = (1.0f64 / 3.0).sqrt();
    let hbar = 1.0;
    let sigma0 = CvState::default_sigma0(hbar);
    let mut failures = Vec::new();
    let mut check = |what: &str, err: f64, tol: f64| {
        if err.is_nan() || err > tol {
            failures.push(format!("{} {:.2e} > {:.0e}", what, err, tol));
        }
        err
    };

    let fock = p_inf_fock(&thermal_fock(1.0, 80).unwrap()).unwrap().value;
    let e_fock = check("thermal Fock", (fock - third).abs(), 1e-6);

    let oam_state = geometric_oam(0.5, 60).unwrap();
    let oam = p_inf_oam(&oam_state).unwrap();
    let angle = p_inf_angle(&oam_to_angle(&oam_state, 512).unwrap()).unwrap();
    let e_oam = check("geometric OAM", (oam.value - third).abs(), 1e-6);
    let e_routes = check("OAM/angle", (oam.value - angle).abs(), 1e-4);
    let half = p_inf_oam(&geometric_oam(0.5, 30).unwrap()).unwrap();
    check(
        "OAM D vs 2D within tail bound",
        (oam.value - half.value).abs() - oam_state.declared_tail_bound().max(1e-15),
        0.0,
    );

    let grid = build_cv_grid(256, 10.0, hbar).unwrap();
    let gaussian = CvState::gaussian(grid, sigma0, 0.0, 0.0).unwrap();
    let e_gauss = check(
        "Gaussian CV",
        (p_inf_cv(&gaussian).unwrap() - 1.0).abs(),
        1e-3,
    );

    let thermal = CvState::thermal(grid, 1.0, sigma0).unwrap();
    let cv = p_inf_cv(&thermal).unwrap();
    let e_cv = check("thermal CV", (cv - third).abs(), 1e-3);
    let e_repr = check(
        "position vs momentum",
        (cv - p_inf_cv(&thermal.to_momentum()).unwrap()).abs(),
        1e-10,
    );
    let w = wigner_from_cv(&thermal, grid.size(), grid.size()).unwrap();
    let e_wig = check(
        "Wigner from CV",
        (p_inf_wigner(&w, hbar).unwrap() - third).abs(),
        1e-3,
    );
    let analytic = thermal_wigner(hbar, sigma0, 1.0, (-10.0, 10.0), (-10.0, 10.0), 401).unwrap();
    let e_wan = check(
        "analytic Wigner",
        (p_inf_wigner(&analytic, hbar).unwrap() - third).abs(),
        1e-3,
    );
    let secs = start.elapsed().as_secs_f64();
    let timely = secs < 120.0;
    let detail = format!(
        "Fock {:.1e}, OAM {:.1e}, OAM/angle {:.1e}, Gaussian CV {:.1e}, thermal CV {:.1e}, \
         repr {:.1e}, Wigner {:.1e}/{:.1e}; {:.1} s (< 120 s){}",
        e_fock,
        e_oam,
        e_routes,
        e_gauss,
        e_cv,
        e_repr,
        e_wig,
        e_wan,
        secs,
        if failures.is_empty() {
            String::new()
        } else {
            format!("; failed: {}", failures.join(", "))
        }
    );
    Outcome {
        id: 6,
        name: "infinite-dimensional oracles",
        pass: failures.is_empty() && timely,
        detail,
    }
}

fn finite_cv_space() -> Outcome {
    let hbar = 1.0;
    let sigma0 = CvState::default_sigma0(hbar);
    let mut relation = 0.0f64;
    let mut unitarity = 0.0f64;
    let mut trace = 0.0f64;
    let mut diagonal = 0.0f64;
    let mut deviations = Vec::new();
    for d in [64usize, 128, 256] {
        let grid = build_cv_grid(d, 2.5 * (d as f64 / 64.0).powf(0.25), hbar).unwrap();
        relation = relation.max(grid.defining_relation_residual().abs() / (2.0 * PI * hbar));
        let f = grid.fourier_matrix();
        let id = &f.adjoint() * &f;
        let defect = id
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let one = if k % (grid.size() + 1) == 0 { 1.0 } else { 0.0 };
                (z - Complex64::new(one, 0.0)).norm()
            })
            .fold(0.0, f64::max);
        unitarity = unitarity.max(defect);
        let c =
            commutator_check(&grid, &CvState::gaussian(grid, sigma0, 0.0, 0.0).unwrap()).unwrap();
        trace = trace.max(c.trace);
        diagonal = diagonal.max(c.max_diagonal);
        deviations.push(c.deviation);
    }
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    let last = *deviations.last().unwrap();
    Outcome {
        id: 7,
        name: "finite CV space consistency",
        pass: relation <= 4.0 * f64::EPSILON
            && unitarity <= 1e-12
            && trace <= 1e-10
            && diagonal <= 1e-10
            && last <= 0.01 * hbar
            && monotone,
        detail: format!(
            "relation residual {:.1e} rel, DFT defect {:.1e}, |Tr[x,p]| {:.1e}, diagonal {:.1e}, \
             deviation at D=64/128/256 {:.2e}/{:.2e}/{:.2e} (monotone {}, last ≤ 1%)",
            relation,
            unitarity,
            trace,
            diagonal,
            deviations[0],
            deviations[1],
            deviations[2],
            monotone
        ),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_coherence");
    let state = dir.path().join("state.json");
    let invocations: Vec<Vec<String>> = vec![
        vec![
            "random",
            "--dim",
            "4",
            "--kind",
            "ginibre_mixed",
            "--seed",
            "17",
        ],
        vec!["random", "--dim", "3", "--kind", "rank_k:2", "--seed", "1"],
        vec!["report", "--input", state.to_str().unwrap()],
        vec![
            "report",
            "--input",
            state.to_str().unwrap(),
            "--format",
            "tsv",
        ],
        vec![
            "maximize",
            "--input",
            state.to_str().unwrap(),
            "--target",
            "mu",
            "--budget",
            "20000",
            "--seed",
            "3",
            "--haar-only",
        ],
        vec![
            "maximize",
            "--input",
            state.to_str().unwrap(),
            "--target",
            "visibility",
            "--budget",
            "20000",
            "--seed",
            "3",
        ],
        vec!["infdim", "--family", "geometric-oam:q=0.5"],
        vec![
            "infdim",
            "--family",
            "thermal-cv:nbar=1",
            "--grid-d",
            "64",
            "--p-max",
            "5",
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    let seed_state = Command::new(bin)
        .args([
            "random",
            "--dim",
            "4",
            "--seed",
            "9",
            "--output",
            state.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(seed_state.success());
    let mut identical = 0;
    let mut mismatched = Vec::new();
    for args in &invocations {
        let run = || Command::new(bin).args(args).output().unwrap();
        let (a, b) = (run(), run());
        if a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty() {
            identical += 1;
        } else {
            mismatched.push(args.join(" "));
        }
    }
    Outcome {
        id: 8,
        name: "determinism",
        pass: mismatched.is_empty(),
        detail: format!(
            "{}/{} seeded commands byte-identical across two runs{}",
            identical,
            invocations.len(),
            if mismatched.is_empty() {
                String::new()
            } else {
                format!("; differing: {:?}", mismatched)
            }
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let (c4, c4_true_parts) = pure_part();
    let outcomes = vec![
        six_interpretations(),
        maximum_mu(),
        schur_convexity(),
        c4,
        fringe(),
        infinite_dimensional(),
        finite_cv_space(),
        determinism(),
    ];
    for o in &outcomes {
        report(o);
    }
    let red: BTreeSet<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    let documented: BTreeSet<u32> = [4].into_iter().collect();
    assert!(
        c4_true_parts,
        "criterion 4 sub-checks that hold as stated must pass"
    );
    assert_eq!(
        red, documented,
        "red criteria differ from the documented set"
    );
}
