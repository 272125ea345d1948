use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fatpix::convert::{convert, equivalence_check_against, pad_with_constant_copies};
use fatpix::exact::encode_exact;
use fatpix::formats::{
    read_ifs, read_pgm, read_wfa, write_pgm, write_pyramid, write_wfa, Layout, PgmEncoding,
};
use fatpix::ifs::ifs_decode;
use fatpix::sampling::{random_dense, random_system, SystemShape};
use fatpix::zerotree::{
    commutation_check, dense_matrix, haar_forward, theorem_certificate, zerotree_scan, Band,
    CertificateOptions, ZerotreeViolation,
};
use fatpix::{Error, Image, QuadIfs};

#[derive(Parser)]
#[command(
    name = "fatpix",
    version,
    about = "Fat-pixel automata, quadtree IFS and Haar zerotrees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a WFA1 automaton to a PGM image.
    Render {
        #[arg(long)]
        wfa: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        pgm: PgmArgs,
    },
    /// Decode an IFS1 system on the pixel grid.
    IfsDecode {
        #[arg(long)]
        ifs: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Defaults to the depth.
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, default_value_t = 128.0)]
        init: f64,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        pgm: PgmArgs,
    },
    /// Compile an IFS1 system into a WFA1 automaton.
    Ifs2wfa {
        #[arg(long)]
        ifs: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Pad to 2(k+1) states with copies of the constant state.
        #[arg(long)]
        paper_layout: bool,
        #[arg(long, default_value_t = 128.0)]
        init: f64,
    },
    /// Check that the compiled automaton reproduces the grid decoder.
    Verify {
        #[arg(long)]
        ifs: PathBuf,
        /// Automaton to check instead of compiling the system.
        #[arg(long)]
        wfa: Option<PathBuf>,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 128.0)]
        init: f64,
    },
    /// Scan Haar coefficients for zerotree violations.
    Zerotree(ZerotreeArgs),
    /// Measure the block commutation identity.
    Commute {
        #[arg(long, conflicts_with = "random")]
        wfa: Option<PathBuf>,
        /// Number of random matrices.
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Size of the random matrices.
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value = "all")]
        band: String,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Encode a PGM image exactly as an automaton.
    Encode {
        #[arg(long)]
        image: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct PgmArgs {
    /// Write plain P2 instead of binary P5.
    #[arg(long)]
    ascii: bool,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["image", "ifs", "random"])))]
struct ZerotreeArgs {
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    ifs: Option<PathBuf>,
    /// Number of seeded random systems to certify.
    #[arg(long, requires = "seed")]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Render depth for systems; number of Haar levels for images.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value = "all")]
    band: String,
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
    #[arg(long, default_value_t = 128.0)]
    init: f64,
    /// Largest |alpha| drawn in random mode.
    #[arg(long, default_value_t = 0.8)]
    max_alpha: f64,
    /// Also write the Haar pyramid of the image as PYR1.
    #[arg(long, requires = "image")]
    pyramid: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Result of a subcommand that ran to completion.
struct Outcome {
    report: String,
    passed: bool,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome {
            report,
            passed: true,
        }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!(
                "error[usage]: {}",
                message.join(" ").trim_start_matches("error: ")
            );
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error[usage]: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            let (tag, code) = classify(&e);
            eprintln!("error[{tag}]: {}", single_line(&e.to_string()));
            ExitCode::from(code)
        }
    }
}

fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Structural(_) => ("structural", 2),
        Error::Address(_) => ("address", 2),
        Error::Image(_) => ("image", 2),
        Error::Capacity(_) => ("capacity", 3),
        Error::InvalidIfs(_) => ("invalid-ifs", 2),
        Error::Precondition(_) => ("precondition", 2),
        Error::Format { .. } => ("format", 2),
        Error::Io(_) => ("io", 2),
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Render {
            wfa,
            depth,
            output,
            pgm,
        } => {
            let wfa = read_wfa(&read_text(&wfa)?)?;
            let img = wfa.render(depth)?;
            save_image(&img, &output, pgm.ascii)
        }
        Command::IfsDecode {
            ifs,
            depth,
            iters,
            init,
            output,
            pgm,
        } => {
            let ifs = read_ifs(&read_text(&ifs)?)?;
            let img = ifs_decode(&ifs, depth, iters.unwrap_or(depth), init)?;
            save_image(&img, &output, pgm.ascii)
        }
        Command::Ifs2wfa {
            ifs,
            output,
            paper_layout,
            init,
        } => {
            let ifs = read_ifs(&read_text(&ifs)?)?;
            let mut wfa = convert(&ifs, init)?;
            if paper_layout {
                wfa = pad_with_constant_copies(&wfa, ifs.len())?;
            }
            let text = write_wfa(&wfa, Layout::Native)?;
            write_file(&output, text.as_bytes())?;
            Ok(Outcome::ok(format!(
                "states: {}\nedges: {}\n",
                wfa.states(),
                wfa.nnz()
            )))
        }
        Command::Verify {
            ifs,
            wfa,
            depth,
            tol,
            init,
        } => {
            let ifs = read_ifs(&read_text(&ifs)?)?;
            let wfa = match wfa {
                Some(path) => read_wfa(&read_text(&path)?)?,
                None => convert(&ifs, init)?,
            };
            let report = equivalence_check_against(&wfa, &ifs, depth, init)?;
            let passed = report.max_deviation <= tol;
            let mut out = String::new();
            let _ = writeln!(out, "max_deviation: {:e}", report.max_deviation);
            let _ = writeln!(out, "tol: {tol:e}");
            let _ = writeln!(out, "compared: {}", join(&report.compared));
            let _ = writeln!(out, "skipped: {}", join(&report.skipped));
            if let Some((t, addr)) = &report.worst {
                let _ = writeln!(out, "worst: iteration={t} cell={addr}");
            }
            let _ = writeln!(out, "result: {}", verdict(passed));
            Ok(Outcome {
                report: out,
                passed,
            })
        }
        Command::Zerotree(args) => zerotree(args),
        Command::Commute {
            wfa,
            random,
            seed,
            states,
            band,
            tol,
        } => {
            let bands = parse_bands(&band)?;
            let matrices = match (wfa, random) {
                (Some(path), None) => {
                    let wfa = read_wfa(&read_text(&path)?)?;
                    wfa.matrices().iter().map(dense_matrix).collect::<Vec<_>>()
                }
                (None, Some(count)) => {
                    let mut rng = seeded(seed)?;
                    (0..count)
                        .map(|_| {
                            let rows = random_dense(&mut rng, states);
                            to_matrix(&rows)
                        })
                        .collect::<Result<Vec<_>, Error>>()?
                }
                _ => return Err(Failure::Usage("commute needs --wfa or --random".into())),
            };
            let mut worst = 0.0f64;
            for c in &matrices {
                for b in &bands {
                    worst = worst.max(commutation_check(c, &b.filter()));
                }
            }
            let passed = worst <= tol;
            let report = format!(
                "matrices: {}\nbands: {}\nmax_deviation: {worst:e}\nresult: {}\n",
                matrices.len(),
                join(&bands),
                verdict(passed)
            );
            Ok(Outcome { report, passed })
        }
        Command::Encode { image, output } => {
            let img = read_pgm(&read_bytes(&image)?)?;
            let wfa = encode_exact(&img)?;
            let text = write_wfa(&wfa, Layout::Native)?;
            write_file(&output, text.as_bytes())?;
            Ok(Outcome::ok(format!(
                "states: {}\nedges: {}\n",
                wfa.states(),
                wfa.nnz()
            )))
        }
    }
}

fn zerotree(args: ZerotreeArgs) -> CmdResult {
    let bands = parse_bands(&args.band)?;
    let non_negative = |v: f64| v >= 0.0 && v.is_finite();
    if args.max_alpha.is_nan() || args.max_alpha <= 0.0 || args.max_alpha > 1.0 {
        return Err(Failure::Usage("--max-alpha must lie in (0, 1]".into()));
    }
    if !non_negative(args.tau) || !non_negative(args.slack) {
        return Err(Failure::Usage(
            "--tau and --slack must be non-negative".into(),
        ));
    }
    let options = CertificateOptions {
        bands: bands.clone(),
        y0: args.init,
    };
    let mut out = String::new();
    let _ = writeln!(out, "tau: {:e}", args.tau);
    let _ = writeln!(out, "bands: {}", join(&bands));
    let passed = if let Some(path) = &args.image {
        let img = read_pgm(&read_bytes(path)?)?;
        let levels = args.depth.unwrap_or(img.depth());
        let pyramid = haar_forward(&img, levels)?;
        if let Some(path) = &args.pyramid {
            write_file(path, write_pyramid(&pyramid).as_bytes())?;
        }
        let violations = zerotree_scan(&pyramid, args.tau, &bands, args.slack);
        let _ = writeln!(out, "levels: {levels}");
        list_violations(&mut out, &violations);
        violations.is_empty()
    } else {
        let depth = args
            .depth
            .ok_or_else(|| Failure::Usage("--depth is required for systems".into()))?;
        let _ = writeln!(out, "depth: {depth}");
        if let Some(path) = &args.ifs {
            let ifs = read_ifs(&read_text(path)?)?;
            let report = theorem_certificate(&ifs, depth, args.tau, &options)?;
            let _ = writeln!(out, "residual_bound: {:e}", report.residual_bound);
            list_violations(&mut out, &report.violations);
            report.passed
        } else {
            let count = args.random.expect("clap group guarantees a source");
            let mut rng = seeded(args.seed)?;
            let shape = SystemShape {
                max_abs_alpha: args.max_alpha,
                ..SystemShape::default()
            };
            let systems: Vec<QuadIfs> = (0..count)
                .map(|_| random_system(&mut rng, &shape))
                .collect();
            let mut failed = 0;
            for (i, ifs) in systems.iter().enumerate() {
                let report = theorem_certificate(ifs, depth, args.tau, &options)?;
                if !report.passed {
                    failed += 1;
                    let _ = writeln!(
                        out,
                        "failed_system: index={i} violations={}",
                        report.violations.len()
                    );
                }
            }
            let _ = writeln!(out, "systems: {count}");
            let _ = writeln!(out, "failed: {failed}");
            failed == 0
        }
    };
    let _ = writeln!(out, "result: {}", verdict(passed));
    match &args.output {
        Some(path) => {
            write_file(path, out.as_bytes())?;
            Ok(Outcome {
                report: String::new(),
                passed,
            })
        }
        None => Ok(Outcome {
            report: out,
            passed,
        }),
    }
}

fn list_violations(out: &mut String, violations: &[ZerotreeViolation]) {
    let _ = writeln!(out, "violations: {}", violations.len());
    for v in violations {
        let _ = writeln!(
            out,
            "violation: level={} row={} col={} band={} parent={:e} descendant={:e}",
            v.level, v.row, v.col, v.band, v.parent_magnitude, v.max_descendant
        );
    }
}

fn to_matrix(rows: &[Vec<f64>]) -> Result<nalgebra::DMatrix<f64>, Error> {
    let m = fatpix::ProjectionMatrix::from_dense(rows)?;
    Ok(dense_matrix(&m))
}

fn parse_bands(spec: &str) -> Result<Vec<Band>, Failure> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(Band::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<Band>()
                .map_err(|e| Failure::Usage(e.to_string()))
        })
        .collect()
}

fn seeded(seed: Option<u64>) -> Result<ChaCha8Rng, Failure> {
    seed.map(ChaCha8Rng::seed_from_u64)
        .ok_or_else(|| Failure::Usage("random mode needs an explicit --seed".into()))
}

fn save_image(img: &Image, path: &Path, ascii: bool) -> CmdResult {
    let encoding = if ascii {
        PgmEncoding::Ascii
    } else {
        PgmEncoding::Binary
    };
    let encoded = write_pgm(img, encoding);
    write_file(path, &encoded.bytes)?;
    if encoded.clamped > 0 {
        eprintln!("warning: {} samples clamped to 0..255", encoded.clamped);
    }
    Ok(Outcome::ok(format!(
        "side: {}\nnonzero: {}\nclamped: {}\n",
        img.side(),
        img.count_nonzero(),
        encoded.clamped
    )))
}

fn read_text(path: &Path) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Error> {
    Ok(fs::read(path)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    Ok(fs::write(path, bytes)?)
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}
