//! `qae`: command-line front end for the QUBO eigensolver.
//!
//! Exit status 0 on success, 1 for bad input (arguments, files, configuration) and 2 when
//! a computation fails.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qae_core::{
    delta_percent, exact_diagonalize, fine_structure_splitting, format_matrix, format_result,
    generate_ci_like_matrix, lambda_scan, mean_std, run_qae, write_trace, QaeError,
    RunConfig, SymmetricMatrix, TopologyKind,
};

#[derive(Parser)]
#[command(name = "qae", version, about = "Lowest eigenvalue of a symmetric matrix by iterative QUBO annealing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the annealing workflow on one matrix.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Result file; the trace goes next to it with a `.trace` suffix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact lowest eigenvalue by Jacobi rotations.
    Diag {
        #[arg(long)]
        matrix: PathBuf,
        /// Print the whole spectrum.
        #[arg(long)]
        all: bool,
    },
    /// Splitting between the ground energies of two matrices.
    Fss {
        #[arg(long)]
        lower: PathBuf,
        #[arg(long)]
        upper: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Repeated runs with seeds `seed + i`, compared against the exact value.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Energy of the functional's stationary point over a grid of λ values.
    LambdaScan {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Write a seeded synthetic matrix with CI-like structure.
    GenMatrix {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        #[arg(long, default_value_t = 0.2)]
        coupling: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct Overrides {
    /// `key = value` configuration; defaults depend on the matrix dimension.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    topology: Option<TopologyKind>,
    #[arg(long)]
    local_search: bool,
}

impl Overrides {
    fn config_for(&self, dim: usize) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::parse(&read_input(path)?, dim)?,
            None => RunConfig::for_dim(dim),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(topology) = self.topology {
            cfg.topology = topology;
        }
        if self.local_search {
            cfg.local_search = true;
        }
        cfg.validate(dim)?;
        Ok(cfg)
    }

    fn check_paths(&self) -> Result<(), CliError> {
        match &self.config {
            Some(path) => require_file(path),
            None => Ok(()),
        }
    }
}

enum CliError {
    Input(String),
    Runtime(String),
}

impl From<QaeError> for CliError {
    fn from(e: QaeError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{}: no such file", path.display())))
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<SymmetricMatrix, CliError> {
    qae_core::parse_matrix(&read_input(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn trace_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".trace");
    PathBuf::from(name)
}

fn solve(run: &RunArgs, out: Option<&Path>) -> Result<String, CliError> {
    require_file(&run.matrix)?;
    run.overrides.check_paths()?;
    let h = read_matrix(&run.matrix)?;
    let cfg = run.overrides.config_for(h.dim())?;
    let result = run_qae(&h, &cfg)?;
    if let Some(out) = out {
        write_output(out, &format_result(&result))?;
        write_trace(&result.trace, trace_path(out))?;
    }
    Ok(format!(
        "final_energy = {:.9}\nrepeats = {}\n",
        result.final_energy,
        result.trace.len()
    ))
}

fn diag(matrix: &Path, all: bool) -> Result<String, CliError> {
    require_file(matrix)?;
    let h = read_matrix(matrix)?;
    let eig = exact_diagonalize(&h)?;
    let mut out = format!("lowest_eigenvalue = {:.9}\n", eig.lowest());
    if all {
        for (k, e) in eig.eigenvalues().iter().enumerate() {
            let _ = writeln!(out, "eigenvalue {k} = {e:.9}");
        }
    }
    Ok(out)
}

fn fss(lower: &Path, upper: &Path, overrides: &Overrides) -> Result<String, CliError> {
    require_file(lower)?;
    require_file(upper)?;
    overrides.check_paths()?;
    let (hl, hu) = (read_matrix(lower)?, read_matrix(upper)?);
    let el = run_qae(&hl, &overrides.config_for(hl.dim())?)?.final_energy;
    let eu = run_qae(&hu, &overrides.config_for(hu.dim())?)?.final_energy;
    Ok(format!(
        "lower_energy = {el:.9}\nupper_energy = {eu:.9}\nfss = {:.9}\n",
        fine_structure_splitting(el, eu)
    ))
}

fn compare(run: &RunArgs, reps: usize) -> Result<String, CliError> {
    if reps == 0 {
        return Err(CliError::Input("--reps must be at least 1".into()));
    }
    require_file(&run.matrix)?;
    run.overrides.check_paths()?;
    let h = read_matrix(&run.matrix)?;
    let base = run.overrides.config_for(h.dim())?;
    let exact = exact_diagonalize(&h)?.lowest();

    let mut out = String::new();
    let mut energies = Vec::with_capacity(reps);
    for i in 0..reps {
        let mut cfg = base.clone();
        cfg.seed = base.seed.wrapping_add(i as u64);
        let e = run_qae(&h, &cfg)?.final_energy;
        let _ = writeln!(out, "run {i} seed {} energy {e:.9}", cfg.seed);
        energies.push(e);
    }
    let (mean, sd) = mean_std(&energies)?;
    let _ = writeln!(out, "mean_energy = {mean:.9}");
    let _ = writeln!(out, "std_dev = {sd:.9}");
    let _ = writeln!(out, "exact_energy = {exact:.9}");
    let _ = writeln!(out, "delta_percent = {:.9}", delta_percent(exact, mean)?);
    Ok(out)
}

fn scan(matrix: &Path, lo: f64, hi: f64, steps: usize) -> Result<String, CliError> {
    if steps < 2 {
        return Err(CliError::Input("--steps must be at least 2".into()));
    }
    require_file(matrix)?;
    let h = read_matrix(matrix)?;
    let mut out = String::from("# lambda energy bounded\n");
    for p in lambda_scan(&h, lo, hi, steps)? {
        let _ = writeln!(out, "{:.9} {:.9} {}", p.lambda, p.energy, p.bounded);
    }
    Ok(out)
}

fn gen_matrix(dim: usize, gap: f64, coupling: f64, seed: u64, out: Option<&Path>) -> Result<String, CliError> {
    let m = generate_ci_like_matrix(dim, gap, coupling, seed)?;
    let text = format_matrix(&m);
    match out {
        Some(path) => {
            write_output(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Solve { run, out } => solve(run, out.as_deref()),
        Command::Diag { matrix, all } => diag(matrix, *all),
        Command::Fss {
            lower,
            upper,
            overrides,
        } => fss(lower, upper, overrides),
        Command::Compare { run, reps } => compare(run, *reps),
        Command::LambdaScan {
            matrix,
            lambda_min,
            lambda_max,
            steps,
        } => scan(matrix, *lambda_min, *lambda_max, *steps),
        Command::GenMatrix {
            dim,
            gap,
            coupling,
            seed,
            out,
        } => gen_matrix(*dim, *gap, *coupling, *seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
