//! `liftkit` command line: single lifts of user matrices, the built-in demo
//! problems, parameter sweeps to CSV, and test-matrix generation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use liftkit::csv::emit_csv;
use liftkit::lift::LiftVectors;
use liftkit::mm::{natural_field, read_matrix, write_matrix, MatrixFile, MmField, MmFormat};
use liftkit::{
    aggregate, build_lift_with_nullvectors, eig_all, left_nullpair, make_2x2, make_large,
    nearest_eigenpair, poisson_block, random_lift_vectors, run_trials, solve_nullpair, sweep,
    CMatrix, Complex64, condition_s0, Error, Problem, ProblemFamily, SweepGrid, SweepRecord,
};

const EXIT_CONDITIONS_FAILED: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_FILE: u8 = 74;

#[derive(Parser)]
#[command(
    name = "liftkit",
    about = "Accurate nullvectors for defective eigenvalue problems via rank-one lifting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a matrix from a Matrix Market file and recover its nullvector
    Lift(LiftArgs),
    /// Run random-lift trials on the 2x2 demo problem and print statistics
    Demo2x2(Demo2x2Args),
    /// Run random-lift trials on the large demo problem and print statistics
    #[command(name = "demoN")]
    DemoN(DemoNArgs),
    /// Sweep an (epsilon, beta) grid and write the statistics table as CSV
    Sweep(SweepArgs),
    /// Generate test matrices as Matrix Market files
    Gen(GenArgs),
}

#[derive(Args)]
struct LiftArgs {
    /// Matrix Market file holding the (unshifted) square matrix
    #[arg(long)]
    matrix: PathBuf,
    /// Shift target `mu` as `RE` or `RE,IM`; the lift runs on `M - mu I`
    #[arg(long)]
    mu: String,
    /// Lifting parameter for the random v block
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Lifting parameter for the random w block
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Seed for the random lift vectors
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Matrix Market file with custom lift vectors: an (N+1) x 2 matrix,
    /// column 1 = (v, eta), column 2 = (w, omega); overrides beta/gamma/seed
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Where to write the recovered nullvector (Matrix Market array)
    #[arg(long, default_value = "nullvector.mtx")]
    out: PathBuf,
}

#[derive(Args)]
struct Demo2x2Args {
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct DemoNArgs {
    /// Problem dimension; 500 reproduces the published large run
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1e-12)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Seed of the similarity transform
    #[arg(long, default_value_t = 1)]
    matrix_seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepProblem {
    Small,
    Large,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    problem: SweepProblem,
    /// Comma-separated epsilon values, e.g. `1e-12,1e-10,1e-8`
    #[arg(long, value_delimiter = ',')]
    epsilons: Vec<f64>,
    /// Comma-separated beta values
    #[arg(long, value_delimiter = ',')]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Dimension of the large problem
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    matrix_seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    M2x2,
    Large,
    Poisson,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Array,
    Coordinate,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: GenFamily,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Dimension of the large family
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Size of the Poisson block
    #[arg(long, default_value_t = 98)]
    m_count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = GenFormat::Array)]
    format: GenFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Lift(args) => cmd_lift(args),
        Command::Demo2x2(args) => cmd_demo2x2(args),
        Command::DemoN(args) => cmd_demo_n(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) | Error::Parse { .. } => EXIT_FILE,
                Error::DegenerateLift { .. } => EXIT_DEGENERATE,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn parse_mu(text: &str) -> Result<Complex64, Error> {
    let mut parts = text.splitn(2, ',');
    let re = parts
        .next()
        .unwrap_or("")
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse {
            line: 0,
            message: format!("cannot parse mu {text:?}"),
        })?;
    let im = match parts.next() {
        Some(s) => s.trim().parse::<f64>().map_err(|_| Error::Parse {
            line: 0,
            message: format!("cannot parse mu {text:?}"),
        })?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

fn fmt_c(z: Complex64) -> String {
    format!("{:e} {:e}", z.re, z.im)
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_lift(args: LiftArgs) -> Result<u8, Error> {
    let m = read_matrix(&args.matrix)?;
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let mu = parse_mu(&args.mu)?;
    let mut a = m;
    for i in 0..n {
        a[(i, i)] -= mu;
    }

    let zero = Complex64::new(0.0, 0.0);
    let pairs = eig_all(&a)?;
    let (_, phi) = nearest_eigenpair(&pairs, zero)?;
    let (_, psi) = left_nullpair(&a, zero)?;

    let lift = match &args.vectors {
        Some(path) => {
            let vw = read_matrix(path)?;
            if vw.nrows() != n + 1 || vw.ncols() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: n + 1,
                    got: vw.nrows(),
                });
            }
            let v = vw.view((0, 0), (n, 1)).iter().cloned().collect::<Vec<_>>();
            let w = vw.view((0, 1), (n, 1)).iter().cloned().collect::<Vec<_>>();
            LiftVectors::custom(
                liftkit::CVector::from_vec(v),
                vw[(n, 0)],
                liftkit::CVector::from_vec(w),
                vw[(n, 1)],
            )
        }
        None => random_lift_vectors(n, args.beta, args.gamma, args.seed),
    };

    let sys = build_lift_with_nullvectors(&a, lift, &phi, &psi)?;
    let checks = &sys.checks;
    println!("n = {n}");
    println!(
        "cond_w_phi = {} (|{:.6e}|)",
        flag(checks.w_phi_ok),
        checks.w_dot_phi.norm()
    );
    println!(
        "cond_psi_v = {} (|{:.6e}|)",
        flag(checks.psi_v_ok),
        checks.psi_dot_v.norm()
    );
    println!(
        "cond_eta_omega = {} (|{:.6e}|)",
        flag(checks.eta_omega_ok),
        checks.eta_omega.norm()
    );
    println!(
        "cond_lifted_inner = {} (|{:.6e}|)",
        flag(checks.lifted_inner_ok),
        checks.lifted_inner.norm()
    );

    match solve_nullpair(&sys) {
        Ok(pair) => {
            println!("lambda0 = {}", fmt_c(pair.lambda0));
            println!("xi = {}", fmt_c(pair.xi));
            println!("zeta = {}", fmt_c(pair.zeta));
            println!("s0 = {:e}", condition_s0(&pair));
            liftkit::mm::write_vector(
                &pair.recovered_right,
                &args.out,
                MmField::Complex,
            )?;
            println!("recovered nullvector written to {}", args.out.display());
            if checks.all_passed() {
                Ok(0)
            } else {
                Ok(EXIT_CONDITIONS_FAILED)
            }
        }
        Err(Error::DegenerateLift { xi_abs, zeta_abs }) => {
            println!("degenerate lift: |xi| = {xi_abs:.3e}, |zeta| = {zeta_abs:.3e}");
            if checks.all_passed() {
                Ok(EXIT_DEGENERATE)
            } else {
                Ok(EXIT_CONDITIONS_FAILED)
            }
        }
        Err(e) => Err(e),
    }
}

fn print_record(rec: &SweepRecord) {
    println!("epsilon = {:e}", rec.epsilon);
    println!("beta = {:e}", rec.beta);
    println!("n_trials = {}", rec.n_trials);
    println!("n_flagged = {}", rec.n_flagged);
    println!("mean_error = {:e}", rec.mean_error);
    println!("rms_error = {:e}", rec.rms_error);
    println!("mean_lambda0_abs = {:e}", rec.mean_lambda0_abs);
    println!("mean_cond_recip = {:e}", rec.mean_cond_recip);
    println!("baseline_error = {:e}", rec.baseline_error);
}

fn cmd_demo2x2(args: Demo2x2Args) -> Result<u8, Error> {
    let problem = Problem::Small {
        epsilon: args.epsilon,
    };
    let outcomes = run_trials(&problem, args.beta, args.trials, args.seed)?;
    print_record(&aggregate(args.epsilon, args.beta, &outcomes));
    Ok(0)
}

fn cmd_demo_n(args: DemoNArgs) -> Result<u8, Error> {
    let problem = Problem::Large {
        n: args.n,
        epsilon: args.epsilon,
        matrix_seed: args.matrix_seed,
    };
    let outcomes = run_trials(&problem, args.beta, args.trials, args.seed)?;
    println!("n = {}", args.n);
    println!("matrix_seed = {}", args.matrix_seed);
    print_record(&aggregate(args.epsilon, args.beta, &outcomes));
    Ok(0)
}

fn threads_from_env() -> usize {
    std::env::var("LIFTKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0)
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, Error> {
    if args.epsilons.is_empty() || args.betas.is_empty() {
        return Err(Error::InvalidArgument {
            context: "sweep needs at least one epsilon and one beta",
        });
    }
    let family = match args.problem {
        SweepProblem::Small => ProblemFamily::Small,
        SweepProblem::Large => ProblemFamily::Large {
            n: args.n,
            matrix_seed: args.matrix_seed,
        },
    };
    let grid = SweepGrid {
        epsilons: args.epsilons.clone(),
        betas: args.betas.clone(),
    };
    let records = sweep(&grid, family, args.trials, args.seed, threads_from_env())?;
    emit_csv(&records, &args.out)?;
    for epsilon in &args.epsilons {
        let best = records
            .iter()
            .filter(|r| r.epsilon == *epsilon && r.mean_error.is_finite())
            .min_by(|a, b| a.mean_error.total_cmp(&b.mean_error));
        if let Some(rec) = best {
            println!(
                "epsilon = {:e}: optimal beta = {:e} (mean error = {:e})",
                epsilon, rec.beta, rec.mean_error
            );
        }
    }
    println!("wrote {} records to {}", records.len(), args.out.display());
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Error> {
    let format = match args.format {
        GenFormat::Array => MmFormat::Array,
        GenFormat::Coordinate => MmFormat::Coordinate,
    };
    let matrix: CMatrix = match args.family {
        GenFamily::M2x2 => {
            let fam = make_2x2(args.epsilon);
            println!("mu_plus = {}", fmt_c(fam.mu_plus));
            fam.m
        }
        GenFamily::Large => {
            let tm = make_large(args.n, args.epsilon, args.seed)?;
            // write the unshifted matrix; lift it with `--mu` set to the
            // printed eigenvalue
            let mut unshifted = tm.a.clone();
            for i in 0..args.n {
                unshifted[(i, i)] += tm.mu_plus;
            }
            println!("mu_plus = {}", fmt_c(tm.mu_plus));
            unshifted
        }
        GenFamily::Poisson => poisson_block(args.m_count),
    };
    let field = natural_field(&matrix);
    write_matrix(
        &matrix,
        &MatrixFile {
            path: args.out.clone(),
            format,
            field,
        },
    )?;
    println!(
        "wrote {}x{} matrix to {}",
        matrix.nrows(),
        matrix.ncols(),
        args.out.display()
    );
    Ok(0)
}
