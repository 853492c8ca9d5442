//! `desense` — desensitize labeled datasets by projecting them onto the
//! privacy-noise subspace of ridge discriminant component analysis, and
//! reproduce the privacy/utility experiments.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use desense::data::Label;
use desense::experiments::{
    emit_table, resolve_data_dir, run_experiment, run_suite, ExperimentConfig, ReportFormat,
    EXPERIMENT_NAMES,
};
use desense::numerics::Matrix;
use desense::rdca::{
    fit_rdca, load_rdca_model, project, save_rdca_model, SubspaceKind, SubspaceProjection,
};
use desense::{Error, ErrorCategory};

#[derive(Parser)]
#[command(
    name = "desense",
    about = "Dataset desensitization by RDCA noise-subspace projection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named experiment and write its report.
    Run(RunArgs),
    /// Run several experiments and write per-experiment reports plus a
    /// summary.
    Suite(SuiteArgs),
    /// Fit an RDCA model on delimited feature and label files.
    Fit(FitArgs),
    /// Project a delimited feature file through a saved model's subspace.
    Transform(TransformArgs),
}

#[derive(Args)]
struct RunArgs {
    /// One of: har, cmu-pose-utility, cmu-glasses-utility, semeion-u04,
    /// semeion-u59.
    #[arg(long)]
    experiment: String,
    /// Dataset root; defaults to $DESENSE_DATA_DIR, then ./data.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = desense::experiments::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (0 = all cores). Does not affect report bytes.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value = "json")]
    format: String,
    /// Report output path; "-" writes to stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    /// Run all five experiments.
    #[arg(long, conflicts_with = "experiments")]
    all: bool,
    /// Comma-separated experiment names.
    #[arg(long, value_delimiter = ',')]
    experiments: Vec<String>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = desense::experiments::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value = "json")]
    format: String,
    /// Directory receiving one report per experiment plus summary.<ext>.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Whitespace- or comma-delimited feature matrix, one sample per line.
    #[arg(long)]
    features: PathBuf,
    /// One class name per line, aligned with the feature rows.
    #[arg(long)]
    labels: PathBuf,
    /// Ridge parameter; defaults to trace(S_T)/M of the training data.
    #[arg(long)]
    rho: Option<f64>,
    /// Label name recorded in the model.
    #[arg(long, default_value = "privacy")]
    label_name: String,
    /// Model output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    /// Model file written by `desense fit`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Which component span to project onto.
    #[arg(long, default_value = "noise")]
    subspace: String,
    /// Output path for the projected matrix; "-" writes to stdout.
    #[arg(long)]
    out: PathBuf,
}

fn read_delimited_matrix(path: &Path) -> Result<Matrix, Error> {
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let reader = BufReader::new(File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?);
    let mut data = Vec::new();
    let mut rows = 0usize;
    let mut cols: Option<usize> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let start = data.len();
        for field in line.split(|ch: char| ch.is_whitespace() || ch == ',') {
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("unparseable number {field:?}"),
            })?;
            data.push(v);
        }
        let width = data.len() - start;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    message: format!("row has {width} fields, expected {c}"),
                });
            }
            _ => {}
        }
        rows += 1;
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

fn read_label_file(path: &Path, name: &str) -> Result<Label, Error> {
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let reader = BufReader::new(File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?);
    let mut raw = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            raw.push(trimmed.to_string());
        }
    }
    let mut class_names: Vec<String> = raw.clone();
    class_names.sort();
    class_names.dedup();
    let classes = raw
        .iter()
        .map(|v| class_names.iter().position(|c| c == v).unwrap())
        .collect();
    Label::new(name, classes, class_names)
}

fn write_output(path: &Path, contents: &str) -> Result<(), Error> {
    if path == Path::new("-") {
        print!("{contents}");
        return Ok(());
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let format: ReportFormat = args.format.parse()?;
    let mut cfg = ExperimentConfig::for_name(&args.experiment, resolve_data_dir(args.data_dir))?;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.format = format;
    cfg.out = Some(args.out.clone());

    let started = Instant::now();
    let report = run_experiment(&cfg)?;
    eprintln!(
        "experiment {} finished in {:.1}s ({} rdca fits, {} svm trainings)",
        cfg.name,
        started.elapsed().as_secs_f64(),
        report.timing.rdca_fits,
        report.timing.svm_trainings
    );
    write_output(&args.out, &emit_table(&report, format))
}

fn cmd_suite(args: SuiteArgs) -> Result<(), Error> {
    let format: ReportFormat = args.format.parse()?;
    let names: Vec<String> = if args.all {
        EXPERIMENT_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        args.experiments
            .iter()
            .filter(|n| !n.is_empty())
            .cloned()
            .collect()
    };
    let data_dir = resolve_data_dir(args.data_dir);
    let started = Instant::now();
    let outcome = run_suite(
        &names,
        &data_dir,
        args.seed,
        args.threads,
        format,
        Some(&args.out_dir),
    )?;
    eprintln!(
        "suite of {} experiment(s) finished in {:.1}s; reports in {}",
        outcome.reports.len(),
        started.elapsed().as_secs_f64(),
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), Error> {
    let x = read_delimited_matrix(&args.features)?;
    let label = read_label_file(&args.labels, &args.label_name)?;
    if label.classes.len() != x.rows() {
        return Err(Error::BadLabel(format!(
            "{} labels for {} feature rows",
            label.classes.len(),
            x.rows()
        )));
    }
    let rho = args
        .rho
        .unwrap_or_else(|| desense::rdca::total_scatter_trace(&x) / x.cols().max(1) as f64);
    let mut model = fit_rdca(&x, &label.classes, rho)?;
    model.set_label_info(&args.label_name, label.class_names.clone());

    let file = File::create(&args.out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    let mut writer = BufWriter::new(file);
    save_rdca_model(&model, &mut writer)?;
    writer.flush().map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    eprintln!(
        "fitted rdca on {}x{} data, {} classes, ridge {:.6e}; model -> {}",
        x.rows(),
        x.cols(),
        model.num_classes,
        rho,
        args.out.display()
    );
    Ok(())
}

fn parse_subspace(name: &str) -> Result<SubspaceKind, Error> {
    match name {
        "noise" => Ok(SubspaceKind::Noise),
        "signal" => Ok(SubspaceKind::Signal),
        "full" => Ok(SubspaceKind::Full),
        other => Err(Error::Config(format!(
            "unknown subspace {other:?}; expected noise, signal or full"
        ))),
    }
}

fn cmd_transform(args: TransformArgs) -> Result<(), Error> {
    let file = File::open(&args.model).map_err(|source| Error::Io {
        path: args.model.clone(),
        source,
    })?;
    let model = load_rdca_model(&mut BufReader::new(file))?;
    let kind = parse_subspace(&args.subspace)?;
    let sub: SubspaceProjection = match kind {
        SubspaceKind::Noise => model.noise_subspace(),
        SubspaceKind::Signal => model.signal_subspace(),
        SubspaceKind::Full => model.full_projection(),
    };
    let x = read_delimited_matrix(&args.features)?;
    let z = project(&x, &sub)?;

    let mut out = String::new();
    for i in 0..z.rows() {
        for (j, v) in z.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{v:.16e}"));
        }
        out.push('\n');
    }
    write_output(&args.out, &out)?;
    eprintln!(
        "projected {} samples onto the {}-dimensional {} subspace of label {:?}",
        z.rows(),
        z.cols(),
        kind.as_str(),
        model.label_name
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Suite(args) => cmd_suite(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Transform(args) => cmd_transform(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            match err.category() {
                ErrorCategory::Config => ExitCode::from(1),
                ErrorCategory::Data => ExitCode::from(2),
                ErrorCategory::Numerical => ExitCode::from(3),
            }
        }
    }
}
