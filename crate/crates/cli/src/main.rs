use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use revcs_core::bounds::{sharpness_witness, BoundError, InequalityId, Verdict};
use revcs_core::compare::{constant_comparison_study, CSV_HEADER};
use revcs_core::forms::{FormError, OmegaPair, PositiveFunctional};
use revcs_core::harness::{fuzz_run, fuzz_run_parallel, replay, GeneratorConfig, WindowRanges};
use revcs_core::instance::{resolve_tolerance, InstanceFile, ToleranceOverride, ENV_ATOL, ENV_RTOL};
use revcs_core::matalg::{AlgebraElement, Tolerance};
use revcs_core::rng::{complex_gaussian, gaussian_matrix, trial_rng};

mod output;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATED: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "revcs", version, about = "Evaluate reverse Cauchy-Schwarz inequalities for matrix-valued forms")]
struct Cli {
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Relative tolerance (overrides the instance file and REVCS_TOL_RTOL).
    #[arg(long, global = true, value_name = "RTOL")]
    tol_rtol: Option<f64>,
    /// Absolute tolerance (overrides the instance file and REVCS_TOL_ATOL).
    #[arg(long, global = true, value_name = "ATOL")]
    tol_atol: Option<f64>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the inequality described by an instance file.
    Verify { file: PathBuf },
    /// Run a seeded fuzz campaign for one inequality id.
    Fuzz(FuzzArgs),
    /// Build the witness attaining the constant 1/4 in the additive bound.
    Sharpness(SharpnessArgs),
    /// Tabulate which constant of the improved additive bound is smallest.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct FuzzArgs {
    /// Inequality id, e.g. ADD_MATRIX_14.
    id: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Algebra dimensions to draw from.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4])]
    dims: Vec<usize>,
    /// Sequence lengths to draw from.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16])]
    space_dims: Vec<usize>,
    /// Run trials on all cores; the summary is identical to a serial run.
    #[arg(long)]
    parallel: bool,
    /// Re-evaluate one trial and print its full report.
    #[arg(long, value_name = "TRIAL")]
    replay: Option<u64>,
}

#[derive(Args, Debug)]
struct SharpnessArgs {
    /// `re` or `re,im`.
    #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = parse_complex)]
    omega: Complex64,
    #[arg(long = "Omega", default_value = "3", allow_hyphen_values = true, value_parser = parse_complex)]
    big_omega: Complex64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Draw a random functional and y from the seed instead of the vector state at e1.
    #[arg(long)]
    random: bool,
    /// Check this many random instances starting at the seed; reports the largest deviation.
    #[arg(long, value_name = "COUNT")]
    sweep: Option<u64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Sequence length.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Write one row per sample here.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("`{p}` is not a number"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

struct Ctx {
    json: bool,
    explicit: ToleranceOverride,
    seed: u64,
}

impl Ctx {
    fn tolerance(&self, file: Option<ToleranceOverride>) -> Result<Tolerance, String> {
        resolve_tolerance(self.explicit, file)
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::PreconditionFailed => EXIT_PRECONDITION,
    }
}

fn bound_error(ctx: &Ctx, e: &BoundError) -> ExitCode {
    if ctx.json {
        print_json(&serde_json::json!({ "error": e.to_string(), "hypothesis_failure": e.is_hypothesis_failure() }));
    }
    eprintln!("error: {e}");
    ExitCode::from(if e.is_hypothesis_failure() { EXIT_PRECONDITION } else { EXIT_USAGE })
}

fn verify(ctx: &Ctx, path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", path.display())),
    };
    let file = match InstanceFile::parse(&text) {
        Ok(f) => f,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let tol = match ctx.tolerance(file.tolerance) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    match file.evaluate(tol) {
        Ok(report) => {
            if ctx.json {
                print_json(&report);
            } else {
                print!("{}", output::report_table(&report, tol));
            }
            ExitCode::from(verdict_code(report.verdict))
        }
        Err(e) => bound_error(ctx, &e),
    }
}

fn fuzz(ctx: &Ctx, args: &FuzzArgs) -> ExitCode {
    let id: InequalityId = match args.id.parse() {
        Ok(id) => id,
        Err(e) => return fail(e),
    };
    let tolerance = match ctx.tolerance(None) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let config = GeneratorConfig {
        seed: ctx.seed,
        dims: args.dims.clone(),
        space_dims: args.space_dims.clone(),
        trials: args.trials,
        spectrum_range: (0.1, 10.0),
        window_ranges: WindowRanges::default(),
        tolerance,
    };
    if let Err(e) = config.validate() {
        return fail(e);
    }
    if let Some(trial) = args.replay {
        return match replay(&config, id, trial) {
            Ok(report) => {
                if ctx.json {
                    print_json(&report);
                } else {
                    println!("replay of {id} seed {} trial {trial}", ctx.seed);
                    print!("{}", output::report_table(&report, tolerance));
                }
                ExitCode::from(verdict_code(report.verdict))
            }
            Err(e) => fail(e),
        };
    }
    let summary = if args.parallel { fuzz_run_parallel(&config, id) } else { fuzz_run(&config, id) };
    match summary {
        Ok(s) => {
            if ctx.json {
                print_json(&s);
            } else {
                print!("{}", output::fuzz_table(&s));
            }
            ExitCode::from(if s.passed() { EXIT_OK } else { EXIT_VIOLATED })
        }
        Err(e) => fail(e),
    }
}

#[derive(Serialize)]
struct SharpnessOutput {
    omega_pair: OmegaPair,
    witness: Option<revcs_core::bounds::SharpnessWitness>,
    ratio: Option<f64>,
    deviation: Option<f64>,
    degenerate: bool,
}

fn sharpness_instance(seed: u64, dim: usize, random: bool) -> Result<(PositiveFunctional, AlgebraElement), FormError> {
    if !random {
        let mut e1 = vec![Complex64::new(0.0, 0.0); dim];
        e1[0] = Complex64::new(1.0, 0.0);
        let y = AlgebraElement::column_embedding(&e1);
        return Ok((PositiveFunctional::vector_state(e1)?, y));
    }
    let mut rng = trial_rng(seed, 0);
    let v = (0..dim).map(|_| complex_gaussian(&mut rng)).collect();
    let phi = PositiveFunctional::vector_state(v)?;
    Ok((phi, gaussian_matrix(&mut rng, dim)))
}

fn sharpness(ctx: &Ctx, args: &SharpnessArgs) -> ExitCode {
    let tol = match ctx.tolerance(None) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    if args.dim == 0 {
        return fail("--dim must be at least 1");
    }
    let pair = OmegaPair::new(args.omega, args.big_omega);
    let degenerate = args.omega == args.big_omega;
    if degenerate {
        if ctx.json {
            print_json(&SharpnessOutput { omega_pair: pair, witness: None, ratio: None, deviation: None, degenerate: true });
        } else {
            println!("omega = Omega: the disk is a point, x = omega y and the ratio is undefined");
        }
        return ExitCode::from(EXIT_VIOLATED);
    }

    if let Some(count) = args.sweep {
        let mut worst = 0.0_f64;
        for k in 0..count {
            let seed = ctx.seed.wrapping_add(k);
            let result = sharpness_instance(seed, args.dim, true)
                .map_err(BoundError::from)
                .and_then(|(phi, y)| sharpness_witness(&phi, &y, pair, tol));
            match result {
                Ok(w) => worst = worst.max(w.ratio.map_or(f64::INFINITY, |r| (r - 0.25).abs())),
                Err(e) => return degenerate_exit(ctx, &e),
            }
        }
        if ctx.json {
            print_json(&serde_json::json!({ "instances": count, "max_deviation": worst, "omega_pair": pair }));
        } else {
            println!("{count} instances, max |ratio - 0.25| = {worst:.5e}");
        }
        return ExitCode::from(if worst <= 1e-12 { EXIT_OK } else { EXIT_VIOLATED });
    }

    let witness = match sharpness_instance(ctx.seed, args.dim, args.random)
        .map_err(BoundError::from)
        .and_then(|(phi, y)| sharpness_witness(&phi, &y, pair, tol))
    {
        Ok(w) => w,
        Err(e) => return degenerate_exit(ctx, &e),
    };
    let deviation = witness.ratio.map(|r| (r - 0.25).abs());
    let ok = deviation.is_some_and(|d| d <= 1e-12);
    if ctx.json {
        print_json(&SharpnessOutput {
            omega_pair: pair,
            ratio: witness.ratio,
            deviation,
            witness: Some(witness),
            degenerate: false,
        });
    } else {
        print!("{}", output::sharpness_table(&witness, deviation));
    }
    ExitCode::from(if ok { EXIT_OK } else { EXIT_VIOLATED })
}

fn degenerate_exit(ctx: &Ctx, e: &BoundError) -> ExitCode {
    if matches!(e, BoundError::Form(FormError::DegenerateSpace)) {
        if ctx.json {
            print_json(&serde_json::json!({ "degenerate": true, "error": e.to_string() }));
        } else {
            println!("degenerate: {e}");
        }
        ExitCode::from(EXIT_VIOLATED)
    } else {
        fail(e)
    }
}

fn compare(ctx: &Ctx, args: &CompareArgs) -> ExitCode {
    let tol = match ctx.tolerance(None) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    if args.n == 0 {
        return fail("--n must be at least 1");
    }
    let study = match constant_comparison_study(args.n, args.samples, ctx.seed, WindowRanges::default(), tol) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if let Some(path) = &args.csv {
        if let Err(e) = write_csv(path, &study.rows) {
            return fail(format!("cannot write {}: {e}", path.display()));
        }
    }
    if ctx.json {
        print_json(&serde_json::json!({
            "rows": study.rows.len(),
            "argmin_counts": { "C1": study.argmin_counts[0], "C2": study.argmin_counts[1], "C3": study.argmin_counts[2] },
            "all_indices_seen": study.all_indices_seen(),
            "violations": study.violations,
        }));
    } else {
        print!("{}", output::compare_table(&study));
    }
    ExitCode::from(if study.violations == 0 { EXIT_OK } else { EXIT_VIOLATED })
}

fn write_csv(path: &PathBuf, rows: &[revcs_core::compare::CompareRow]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx {
        json: cli.json,
        explicit: ToleranceOverride { rtol: cli.tol_rtol, atol: cli.tol_atol },
        seed: cli.seed,
    };
    // Surface a malformed environment override before doing any work.
    if let Err(e) = ctx.tolerance(None) {
        return fail(format!("{e} (check {ENV_RTOL} / {ENV_ATOL})"));
    }
    match &cli.command {
        Command::Verify { file } => verify(&ctx, file),
        Command::Fuzz(args) => fuzz(&ctx, args),
        Command::Sharpness(args) => sharpness(&ctx, args),
        Command::Compare(args) => compare(&ctx, args),
    }
}
