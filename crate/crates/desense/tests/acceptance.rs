//! Acceptance suite. Each test prints one PASS/FAIL/SKIP line; criteria 1-5
//! are self-contained and never skip, criteria 6-11 need the public datasets
//! under DESENSE_DATA_DIR (or ./data) and mark themselves SKIP otherwise.

mod common;

use std::path::PathBuf;
use std::sync::OnceLock;

use desense::classifier::{dual_objective, train_binary_dcd};
use desense::data::{random_guess_accuracy, Label};
use desense::experiments::{
    dataset_available, emit_table, resolve_data_dir, run_experiment, summarize, DatasetKind,
    ExperimentConfig, ExperimentReport, ReportFormat, Role,
};
use desense::numerics::{cholesky, matmul, sym_eig, Matrix};
use desense::rdca::{compute_scatter, fit_rdca, project};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn pass(criterion: u32, what: &str) {
    println!("ACCEPTANCE {criterion} PASS  {what}");
}

fn skip(criterion: u32, what: &str) {
    println!("ACCEPTANCE {criterion} SKIP  {what} (dataset unavailable)");
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_01_numerics_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE01);
    for case in 0..200 {
        let n = 1 + case % 8;

        // symmetric eigensolver against inertia-bisection eigenvalues
        let s = random_symmetric(n, &mut rng);
        let eig = sym_eig(&s).expect("random symmetric matrices converge");
        let oracle = eig_oracle(&s, 1e-11);
        for (got, want) in eig.values.iter().zip(&oracle) {
            assert!(
                (got - want).abs() <= 1e-7,
                "eigenvalue mismatch at n={n}: {got} vs {want}"
            );
        }
        // reconstruction identity
        let mut lam = Matrix::zeros(n, n);
        for i in 0..n {
            lam.set(i, i, eig.values[i]);
        }
        let recon = matmul(&matmul(&eig.vectors, &lam).unwrap(), &eig.vectors.transpose()).unwrap();
        let scale = s.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                assert!((recon.get(i, j) - s.get(i, j)).abs() <= 1e-7 * scale);
            }
        }
        // trace identity
        let sum: f64 = eig.values.iter().sum();
        assert!((sum - s.trace()).abs() <= 1e-8 * s.trace().abs().max(1.0));

        // cholesky against the outer-product oracle
        let spd = random_spd(n, &mut rng);
        let l = cholesky(&spd).expect("SPD input");
        let l_oracle = cholesky_oracle(&spd).expect("SPD input");
        for (a, b) in l.as_slice().iter().zip(l_oracle.as_slice()) {
            assert!((a - b).abs() <= 1e-7 * spd.max_abs().max(1.0));
        }
        let back = matmul(&l, &l.transpose()).unwrap();
        for (a, b) in back.as_slice().iter().zip(spd.as_slice()) {
            assert!((a - b).abs() <= 1e-8 * spd.max_abs().max(1.0));
        }
    }
    pass(1, "sym_eig and cholesky match brute-force oracles on 200 instances");
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_02_rdca_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE02);
    for case in 0..100 {
        let m = 2 + case % 11; // up to 12
        let l = 2 + case % 3; // up to 4
        let n = (m + l) * 3;
        let (x, y) = random_problem(n, m, l, &mut rng);
        let scatter = compute_scatter(&x, &y).unwrap();
        for rho in [0.01, 1.0] {
            let model = fit_rdca(&x, &y, rho).unwrap();
            let c = scatter.s_t.add_scaled_identity(rho);

            // C-orthonormality
            let wtcw = matmul(
                &matmul(&model.components.transpose(), &c).unwrap(),
                &model.components,
            )
            .unwrap();
            for i in 0..m {
                for j in 0..m {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (wtcw.get(i, j) - want).abs() <= 1e-6,
                        "C-orthonormality violated at ({i},{j}): {}",
                        wtcw.get(i, j)
                    );
                }
            }

            // rank bound
            let above = model.powers.iter().filter(|&&p| p > 1e-6).count();
            assert!(above <= l - 1, "{above} powers above 1e-6 for L={l}");

            // Rayleigh consistency
            for k in 0..m {
                let w: Vec<f64> = (0..m).map(|i| model.components.get(i, k)).collect();
                let quad = |mat: &Matrix| -> f64 {
                    let mut acc = 0.0;
                    for i in 0..m {
                        for j in 0..m {
                            acc += w[i] * mat.get(i, j) * w[j];
                        }
                    }
                    acc
                };
                let rayleigh = quad(&scatter.s_b) / quad(&c);
                assert!(
                    (model.powers[k] - rayleigh).abs() <= 1e-6,
                    "Rayleigh mismatch: {} vs {rayleigh}",
                    model.powers[k]
                );
            }

            // generalized eigenvalue oracle
            let oracle = generalized_eig_oracle(&scatter.s_b, &c, -0.1, 1.1, 1e-10);
            for (got, want) in model.powers.iter().zip(&oracle) {
                assert!(
                    (got - want).abs() <= 1e-6,
                    "generalized eigenvalue mismatch: {got} vs {want}"
                );
            }
        }
    }
    pass(2, "RDCA invariants and generalized-eigenvalue oracle on 100 problems");
}

// ---------------------------------------------------------------- criterion 3

#[test]
fn criterion_03_centroid_collapse() {
    // the worked 4-point example: noise column is exactly the (1,-1,1,-1)
    // direction and both centroids land on zero
    let x = Matrix::from_vec(4, 2, vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]).unwrap();
    let y = vec![0usize, 0, 1, 1];
    let model = fit_rdca(&x, &y, 1.0).unwrap();
    let z = project(&x, &model.noise_subspace()).unwrap();
    let base = z.get(0, 0);
    assert!(base.abs() > 1e-9);
    for (i, sign) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
        assert!((z.get(i, 0) - sign * base).abs() <= 1e-12);
    }
    assert!((z.get(0, 0) + z.get(1, 0)).abs() <= 1e-12);
    assert!((z.get(2, 0) + z.get(3, 0)).abs() <= 1e-12);

    // random problems: noise components with negligible power are orthogonal
    // to every centroid deviation, so desensitized class centroids coincide
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE03);
    for case in 0..60 {
        let m = 3 + case % 8;
        let l = 2 + case % 3;
        let n = (m + l) * 4;
        let (x, y) = random_problem(n, m, l, &mut rng);
        let scatter = compute_scatter(&x, &y).unwrap();
        let model = fit_rdca(&x, &y, 0.5).unwrap();

        for k in 0..m {
            if model.powers[k] >= 1e-6 {
                continue;
            }
            let w: Vec<f64> = (0..m).map(|i| model.components.get(i, k)).collect();
            let w_norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            for class in 0..l {
                let dev: Vec<f64> = (0..m)
                    .map(|j| scatter.class_means.get(class, j) - scatter.global_mean[j])
                    .collect();
                let dev_norm = dev.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dot: f64 = w.iter().zip(&dev).map(|(a, b)| a * b).sum();
                assert!(
                    dot.abs() <= 1e-5 * dev_norm * w_norm + 1e-12,
                    "centroid leakage {dot} for class {class}"
                );
            }
        }

        // and the projected centroids actually coincide
        let z = project(&x, &model.noise_subspace()).unwrap();
        let d = z.cols();
        let mut centroids = vec![vec![0.0; d]; l];
        let mut counts = vec![0usize; l];
        for (i, &cls) in y.iter().enumerate() {
            counts[cls] += 1;
            for j in 0..d {
                centroids[cls][j] += z.get(i, j);
            }
        }
        for (cls, centroid) in centroids.iter_mut().enumerate() {
            for v in centroid.iter_mut() {
                *v /= counts[cls] as f64;
            }
        }
        let scale = z.max_abs().max(1.0);
        for a in 0..l {
            for b in (a + 1)..l {
                for j in 0..d {
                    assert!(
                        (centroids[a][j] - centroids[b][j]).abs() <= 1e-5 * scale,
                        "desensitized centroids differ: class {a} vs {b}"
                    );
                }
            }
        }
    }
    pass(3, "desensitized training centroids coincide (random + worked example)");
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_04_svm_dual_oracle() {
    // Every solve that reaches the in-contract tolerance must match the
    // exact QP optimum. The handful of degenerate instances that stop at the
    // spec's pass cap instead are excluded but counted, and the conversion
    // rate itself is asserted so the check cannot silently go vacuous.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE04);
    let mut converged = 0usize;
    let mut capped = 0usize;
    for checked in 0..40 {
        let n = 3 + (checked % 4); // up to 6
        let d = 1 + (checked % 2);
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            data.push(uniform(&mut rng) * 2.0);
        }
        let x = Matrix::from_vec(n, d, data).unwrap();
        let mut ybin: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        if checked % 3 == 0 {
            ybin.reverse();
        }
        for c in [0.5, 1.0, 10.0] {
            let sol = train_binary_dcd(&x, &ybin, c);
            if !sol.converged {
                capped += 1;
                continue;
            }
            converged += 1;
            let impl_obj = dual_objective(&x, &ybin, &sol.alpha);
            let (_, oracle_obj) = brute_force_box_qp(&x, &ybin, c);
            assert!(
                (impl_obj - oracle_obj).abs() <= 1e-4,
                "dual objective gap: impl {impl_obj} vs oracle {oracle_obj} (n={n}, C={c})"
            );
            assert!(impl_obj >= oracle_obj - 1e-9, "impl beat the exact optimum");
        }
    }
    assert!(
        converged >= 110,
        "too few converged solves ({converged} of {})",
        converged + capped
    );
    pass(4, "DCD dual objective within 1e-4 of the brute-force QP on N <= 6");
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_05_determinism_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_har(dir.path(), 3, 2, 8, 2, 3, 99);

    let mut cfg = ExperimentConfig::for_name("har", dir.path()).unwrap();
    cfg.seed = 7;
    cfg.folds = 3;
    cfg.c_grid = vec![0.1, 1.0];
    cfg.rho_multipliers = vec![0.1, 1.0];

    cfg.threads = 1;
    let first = run_experiment(&cfg).unwrap();
    let second = run_experiment(&cfg).unwrap();
    cfg.threads = 4;
    let third = run_experiment(&cfg).unwrap();

    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
        let a = emit_table(&first, format);
        let b = emit_table(&second, format);
        let c = emit_table(&third, format);
        assert_eq!(a, b, "same seed, same threads must be byte-identical");
        assert_eq!(a, c, "thread count must not change report bytes");
    }
    pass(5, "equal-seed runs byte-identical at 1 and 4 threads");
}

// ------------------------------------------------------- criteria 6-11 (data)

fn data_root() -> PathBuf {
    resolve_data_dir(None)
}

fn cached_report(name: &'static str) -> Option<&'static ExperimentReport> {
    static CELLS: OnceLock<std::sync::Mutex<std::collections::HashMap<&'static str, &'static Option<ExperimentReport>>>> =
        OnceLock::new();
    let cells = CELLS.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let mut guard = cells.lock().unwrap();
    if let Some(cached) = guard.get(name) {
        return cached.as_ref();
    }
    let kind = match name {
        "har" => DatasetKind::Har,
        "cmu-pose-utility" | "cmu-glasses-utility" => DatasetKind::Cmu,
        _ => DatasetKind::Semeion,
    };
    let computed: Option<ExperimentReport> = if dataset_available(kind, &data_root()) {
        let cfg = ExperimentConfig::for_name(name, data_root()).unwrap();
        Some(run_experiment(&cfg).unwrap_or_else(|e| panic!("experiment {name} failed: {e}")))
    } else {
        None
    };
    let leaked: &'static Option<ExperimentReport> = Box::leak(Box::new(computed));
    guard.insert(name, leaked);
    leaked.as_ref()
}

fn role_row<'a>(report: &'a ExperimentReport, role: Role) -> &'a desense::experiments::LabelResult {
    report.result_for(role).expect("both roles reported")
}

#[test]
fn criterion_06_har_reproduction() {
    let Some(report) = cached_report("har") else {
        skip(6, "HAR reproduction");
        return;
    };
    let utility = role_row(report, Role::Utility);
    let privacy = role_row(report, Role::Privacy);
    assert!(
        privacy.after.overall <= privacy.random_guess.overall + 0.05,
        "privacy after {} vs random {}",
        privacy.after.overall,
        privacy.random_guess.overall
    );
    assert!(
        utility.after.overall >= 0.85,
        "utility after {}",
        utility.after.overall
    );
    assert!(
        utility.before.overall >= 0.95,
        "utility before {}",
        utility.before.overall
    );
    pass(6, "HAR: privacy at random-guess level, utility preserved");
}

#[test]
fn criterion_07_cmu_experiment_one() {
    let Some(report) = cached_report("cmu-pose-utility") else {
        skip(7, "CMU Faces Experiment I");
        return;
    };
    let utility = role_row(report, Role::Utility);
    let privacy = role_row(report, Role::Privacy);
    assert!(
        privacy.after.overall <= 0.55,
        "glasses after {}",
        privacy.after.overall
    );
    let drop = utility.before.overall - utility.after.overall;
    assert!(drop <= 0.03, "pose drop {drop}");
    pass(7, "CMU I: glasses at chance, pose preserved");
}

#[test]
fn criterion_08_cmu_experiment_two() {
    let Some(report) = cached_report("cmu-glasses-utility") else {
        skip(8, "CMU Faces Experiment II");
        return;
    };
    let utility = role_row(report, Role::Utility);
    let privacy = role_row(report, Role::Privacy);
    assert!(
        privacy.after.overall <= 0.30,
        "pose after {}",
        privacy.after.overall
    );
    let drop = utility.before.overall - utility.after.overall;
    assert!(drop <= 0.03, "glasses drop {drop}");
    pass(8, "CMU II: pose at chance, glasses preserved");
}

fn check_semeion(criterion: u32, name: &'static str, published_after_mean: f64) {
    let Some(report) = cached_report(name) else {
        skip(criterion, name);
        return;
    };
    let utility = role_row(report, Role::Utility);
    let privacy = role_row(report, Role::Privacy);

    for (c, class_name) in privacy.class_names.iter().enumerate() {
        let acc = privacy.after.per_class[c];
        if class_name == "Rest" {
            assert!(acc >= 0.95, "privacy Rest after {acc}");
        } else {
            assert!(acc <= 0.05, "privacy digit {class_name} after {acc}");
        }
    }
    let mean_utility: f64 =
        utility.after.per_class.iter().sum::<f64>() / utility.after.per_class.len() as f64;
    assert!(
        (mean_utility - published_after_mean).abs() <= 0.10,
        "mean utility per-class {mean_utility} vs published {published_after_mean}"
    );
    pass(criterion, "Semeion: protected digits suppressed, utility digits preserved");
}

#[test]
fn criterion_09_semeion_experiment_one() {
    check_semeion(9, "semeion-u04", 0.8128);
}

#[test]
fn criterion_10_semeion_experiment_two() {
    check_semeion(10, "semeion-u59", 0.7857);
}

#[test]
fn criterion_11_aggregate_tradeoffs() {
    let names = [
        "har",
        "cmu-pose-utility",
        "cmu-glasses-utility",
        "semeion-u04",
        "semeion-u59",
    ];
    let reports: Vec<ExperimentReport> = names
        .iter()
        .filter_map(|n| cached_report(n).cloned())
        .collect();
    if reports.is_empty() {
        skip(11, "aggregate tradeoff claim");
        return;
    }
    let summary = summarize(&reports);
    let mut checked = false;
    if let Some(drop) = summary.aggregates.har_utility_drop_pp {
        assert!((drop - 5.14).abs() <= 10.0, "HAR drop {drop} pp");
        checked = true;
    }
    if let Some(drop) = summary.aggregates.cmu_mean_utility_drop_pp {
        assert!((drop - 0.04).abs() <= 10.0, "CMU drop {drop} pp");
        checked = true;
    }
    if let Some(drop) = summary.aggregates.semeion_mean_utility_digit_drop_pp {
        assert!((drop - 7.53).abs() <= 10.0, "Semeion drop {drop} pp");
        checked = true;
    }
    assert!(checked);
    pass(11, "aggregate utility drops within tolerance of the reported values");
}

// extra guard: the acceptance suite's random-guess formulas reproduce the
// published baselines exactly
#[test]
fn random_guess_baselines_match_tables() {
    let nineteen = Label::new(
        "subject",
        (0..19).collect(),
        (0..19).map(|i| i.to_string()).collect(),
    )
    .unwrap();
    let (_, overall) = random_guess_accuracy(&nineteen);
    assert!((overall * 100.0 - 5.26).abs() < 0.01);

    let six = Label::new(
        "activity",
        (0..6).collect(),
        (0..6).map(|i| i.to_string()).collect(),
    )
    .unwrap();
    let (_, overall) = random_guess_accuracy(&six);
    assert!((overall * 100.0 - 16.67).abs() < 0.01);
}
