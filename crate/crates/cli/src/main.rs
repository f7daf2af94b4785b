//! `layered-echo`: pulse trains of layered media on the command line.
//!
//! CSV goes to stdout (or `--out`), summaries to stderr. Exit codes: 0 on
//! success, 1 when a verification run finds a discrepancy, 2 on bad input.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use layered_echo::goupillaud;
use layered_echo::greens::{reflection_green_with, transmission_green_with, Arrivals, TrainOptions};
use layered_echo::medium::{read_medium_str, write_medium};
use layered_echo::oracle::{self, class_counts, predicted_class_count, DEFAULT_SEQUENCE_LIMIT};
use layered_echo::{amplitudes, convolve, Kind, Medium, Wavelet};

#[derive(Parser)]
#[command(
    name = "layered-echo",
    version,
    about = "Exact Green's functions of layered acoustic media"
)]
struct Cli {
    /// Worker threads for amplitude evaluation [default: available parallelism]
    #[arg(long, global = true, env = "LAYERED_ECHO_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection pulse train up to a cutoff time
    Reflect(TrainArgs),
    /// Transmission pulse train up to a cutoff time
    Transmit(TrainArgs),
    /// Convert a physical profile (or any medium file) to the tau-R format
    Convert(ConvertArgs),
    /// Check closed-form amplitudes against brute-force path enumeration
    Oracle(OracleArgs),
    /// Check pulse trains against the equal-travel-time lattice recursion
    Lattice(LatticeArgs),
    /// Render a pulse-train CSV with a wavelet on a regular time grid
    Render(RenderArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    medium: PathBuf,
    /// Last arrival time to include (seconds, inclusive)
    #[arg(long, allow_negative_numbers = true)]
    cutoff: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Merge arrivals closer than this relative tolerance
    #[arg(long, allow_negative_numbers = true)]
    merge_tol: Option<f64>,
    /// Drop terms with |amplitude| below this
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    floor: f64,
    /// Add the transit vector of each term as a third column
    #[arg(long)]
    with_k: bool,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    medium: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Reflection,
    Transmission,
    Both,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    medium: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    cutoff: f64,
    #[arg(long, value_enum, default_value = "both")]
    kind: KindArg,
    /// Largest acceptable relative deviation
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Give up after this many scattering sequences
    #[arg(long, default_value_t = DEFAULT_SEQUENCE_LIMIT)]
    limit: usize,
    /// Scales the closed-form amplitude of the first class (detector check)
    #[arg(long, hide = true)]
    corrupt: Option<f64>,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    medium: PathBuf,
    /// Number of grid periods to simulate
    #[arg(long, default_value_t = 12)]
    steps: usize,
    /// Largest acceptable absolute deviation per sample
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args)]
struct RenderArgs {
    /// Pulse-train CSV as written by `reflect` or `transmit`
    #[arg(long)]
    train: PathBuf,
    /// `spike` or `ricker:FREQ`
    #[arg(long, default_value = "spike")]
    wavelet: Wavelet,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, allow_negative_numbers = true)]
    dt: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Verification(String),
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// A closed stdout (`| head`) ends the run quietly.
fn written(result: io::Result<()>) -> Outcome {
    match result {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(usage(e)),
        _ => Ok(()),
    }
}

fn with_path(path: &Path) -> impl Fn(layered_echo::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_medium(path: &Path) -> Result<Medium, Failure> {
    read_medium_str(&read_text(path)?).map_err(with_path(path))
}

fn check_cutoff(cutoff: f64) -> Outcome {
    if cutoff > 0.0 && cutoff.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("cutoff must be positive, got {cutoff}")))
    }
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn train(args: &TrainArgs, kind: Kind) -> Outcome {
    check_cutoff(args.cutoff)?;
    if !(args.floor >= 0.0) {
        return Err(Failure::Usage(format!(
            "floor must be non-negative, got {}",
            args.floor
        )));
    }
    let medium = load_medium(&args.medium)?;
    let opts = TrainOptions { floor: args.floor };
    let start = Instant::now();
    let mut train = match kind {
        Kind::Reflection => reflection_green_with(&medium, args.cutoff, &opts),
        Kind::Transmission => transmission_green_with(&medium, args.cutoff, &opts),
    }
    .map_err(usage)?;
    if let Some(tol) = args.merge_tol {
        if !(tol >= 0.0) {
            return Err(Failure::Usage(format!(
                "merge tolerance must be non-negative, got {tol}"
            )));
        }
        train = train.merge_ties(tol);
    }
    let elapsed = start.elapsed();
    let mut out = output(&args.out)?;
    written(train.write_csv(&mut out, args.with_k).and_then(|_| out.flush()))?;
    let range = match train.amplitude_range() {
        Some((lo, hi)) => format!("amplitude range [{lo:.6e}, {hi:.6e}]"),
        None => "no amplitudes".into(),
    };
    eprintln!(
        "{kind}: {} terms up to {} s, {range}, {:.3} s",
        train.len(),
        args.cutoff,
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn convert(args: &ConvertArgs) -> Outcome {
    let medium = load_medium(&args.medium)?;
    let mut out = output(&args.out)?;
    written(
        out.write_all(write_medium(&medium).as_bytes())
            .and_then(|_| out.flush()),
    )?;
    eprintln!("converted {} interfaces", medium.interfaces());
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Outcome {
    check_cutoff(args.cutoff)?;
    let medium = load_medium(&args.medium)?;
    let kinds: &[Kind] = match args.kind {
        KindArg::Reflection => &[Kind::Reflection],
        KindArg::Transmission => &[Kind::Transmission],
        KindArg::Both => &[Kind::Reflection, Kind::Transmission],
    };
    let mut problems = Vec::new();
    for &kind in kinds {
        let first = layered_echo::transit::TransitEnumerator::new(&medium, kind, args.cutoff)
            .next()
            .map(|(k, _)| k);
        let cmp = oracle::compare(&medium, kind, args.cutoff, args.limit, |k| {
            let a = amplitudes::amplitude(medium.reflections(), k)?;
            Ok(match args.corrupt {
                Some(f) if Some(k) == first.as_ref() => a * f,
                _ => a,
            })
        })
        .map_err(usage)?;
        let counts = class_counts(&medium, kind, args.cutoff, args.limit).map_err(usage)?;
        let mismatched: Vec<_> = counts
            .iter()
            .filter(|((k, b), &n)| predicted_class_count(k, b) != n.into())
            .collect();
        let worst = cmp.worst.as_ref().map_or("-".into(), |k| k.to_string());
        println!(
            "{kind}: {} classes, {} sequences, max relative deviation {:.3e} (k = {worst}), merged {:.3e}, {} count mismatches, {} unmatched",
            cmp.classes,
            cmp.sequences,
            cmp.max_deviation,
            cmp.merged_max_deviation,
            mismatched.len(),
            cmp.unmatched.len()
        );
        for ((k, b), n) in &mismatched {
            println!(
                "  count mismatch k = {k} b = {:?}: {n} paths, predicted {}",
                b.counts(),
                predicted_class_count(k, b)
            );
        }
        for k in &cmp.unmatched {
            println!("  unmatched k = {k}");
        }
        if !(cmp.max_deviation <= args.tolerance && cmp.merged_max_deviation <= args.tolerance) {
            problems.push(format!("{kind} deviation above {:e}", args.tolerance));
        }
        if !mismatched.is_empty() || !cmp.unmatched.is_empty() {
            problems.push(format!("{kind} class structure differs"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(problems.join("; ")))
    }
}

fn lattice(args: &LatticeArgs) -> Outcome {
    let medium = load_medium(&args.medium)?;
    let cmp = goupillaud::compare(&medium, args.steps).map_err(with_path(&args.medium))?;
    println!(
        "lattice: {} samples over {} periods, max absolute deviation {:.3e}, energy {:.12}",
        cmp.samples, args.steps, cmp.max_abs_deviation, cmp.energy
    );
    if !(cmp.max_abs_deviation <= args.tolerance) {
        return Err(Failure::Verification(format!(
            "deviation above {:e}",
            args.tolerance
        )));
    }
    if cmp.energy > 1.0 + 1e-9 {
        return Err(Failure::Verification(format!(
            "energy {} exceeds the input",
            cmp.energy
        )));
    }
    Ok(())
}

fn render(args: &RenderArgs) -> Outcome {
    let file =
        File::open(&args.train).map_err(|e| Failure::Usage(format!("{}: {e}", args.train.display())))?;
    let arrivals = Arrivals::read_csv(BufReader::new(file)).map_err(with_path(&args.train))?;
    let signal = convolve(&arrivals.0, args.wavelet, args.t0, args.dt, args.n).map_err(usage)?;
    let mut out = output(&args.out)?;
    written(signal.write_csv(&mut out).and_then(|_| out.flush()))?;
    eprintln!("rendered {} arrivals onto {} samples", arrivals.0.len(), args.n);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Reflect(args) => train(args, Kind::Reflection),
        Command::Transmit(args) => train(args, Kind::Transmission),
        Command::Convert(args) => convert(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Lattice(args) => lattice(args),
        Command::Render(args) => render(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
