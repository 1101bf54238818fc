//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (an axiom violation, a failed
//! check, a cap), 2 usage or parse error. All output is deterministic for a
//! given input, seed and configuration; human-readable decimals are
//! rendering only, files always carry exact rationals.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use ghspace::io::{self, IoError};
use ghspace::nu::RNG_NAME;
use ghspace::rational::Rational;
use ghspace::solver::{gh_distance_exact_with, gh_upper_bound_diam, SolverConfig, SolverError};
use ghspace::space::{delta, FiniteMetricSpace};
use ghspace::{embed, nu, sample};

#[derive(Parser, Debug)]
#[command(
    name = "ghspace",
    about = "Exact Gromov-Hausdorff toolkit for finite metric spaces",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized operation (generator: chacha8).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Maximum points per side for the exact solver.
    #[arg(long, global = true, default_value_t = 8)]
    solver_cap: usize,

    /// Sample count for randomized checks.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,

    /// Decimal digits in human-readable renderings.
    #[arg(long, global = true, default_value_t = 6)]
    precision: u32,

    /// Input/output format (default: sniffed on input, json on output).
    #[arg(long, global = true, value_enum)]
    format: Option<SpaceFormat>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SpaceFormat {
    Json,
    Matrix,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a space file and print its basic invariants.
    Validate { path: PathBuf },
    /// Exact (or diameter-bounded) Gromov-Hausdorff distance of two spaces.
    Dist {
        path_x: PathBuf,
        path_y: PathBuf,
        /// Exact distance via the branch-and-bound solver (default).
        #[arg(long, conflicts_with = "bound")]
        exact: bool,
        /// Print the diameter upper bound instead.
        #[arg(long)]
        bound: bool,
    },
    /// Embed a space into the family of k-point spaces.
    Embed {
        path: PathBuf,
        /// Directory for the embedding JSON and per-image space files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Certify the embedding pairwise with the exact solver.
        #[arg(long)]
        verify: bool,
    },
    /// Emit a random generic space.
    SampleGeneric {
        /// Number of points.
        #[arg(long)]
        n: usize,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk through the strong non-universality counterexample.
    DemoNonuniversality,
    /// Sample the ball around a generic space and certify the local
    /// isometry with the exact solver.
    CheckIsometry {
        path: PathBuf,
        /// File for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its process exit code.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse(_) => Failure::usage(e.to_string()),
            IoError::Metric(_) => Failure::domain(e.to_string()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let config = SolverConfig { max_side: cli.solver_cap, parallel: false };
    match &cli.command {
        Command::Validate { path } => cmd_validate(&cli, path),
        Command::Dist { path_x, path_y, bound, .. } => {
            cmd_dist(&cli, &config, path_x, path_y, *bound)
        }
        Command::Embed { path, out, verify } => {
            cmd_embed(&cli, &config, path, out.as_deref(), *verify)
        }
        Command::SampleGeneric { n, out } => cmd_sample_generic(&cli, *n, out.as_deref()),
        Command::DemoNonuniversality => cmd_demo_nonuniversality(&cli, &config),
        Command::CheckIsometry { path, out } => {
            cmd_check_isometry(&cli, &config, path, out.as_deref())
        }
    }
}

fn load_space(cli: &Cli, path: &Path) -> Result<FiniteMetricSpace, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let space = match cli.format {
        Some(SpaceFormat::Json) => io::parse_json_space(&text)?,
        Some(SpaceFormat::Matrix) => io::parse_matrix_space(&text)?,
        None => io::parse_space_auto(&text)?,
    };
    Ok(space)
}

fn render(cli: &Cli, value: &Rational) -> String {
    format!("{value} (~{})", value.to_decimal_string(cli.precision))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Failure::usage(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn cmd_validate(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let space = load_space(cli, path)?;
    println!("n = {}", space.len());
    println!("diameter = {}", render(cli, &space.diameter()));
    if space.len() >= 2 {
        let margin = delta(&space).map_err(|e| Failure::domain(e.to_string()))?;
        println!("delta = {}", render(cli, &margin.value));
        println!("generic = {}", margin.value.is_positive());
    } else {
        println!("delta = undefined for a single point");
        println!("generic = undefined for a single point");
    }
    Ok(())
}

fn cmd_dist(
    cli: &Cli,
    config: &SolverConfig,
    path_x: &Path,
    path_y: &Path,
    bound: bool,
) -> Result<(), Failure> {
    let x = load_space(cli, path_x)?;
    let y = load_space(cli, path_y)?;
    if bound {
        let b = gh_upper_bound_diam(&x, &y);
        println!("d_GH <= {}", render(cli, &b));
        return Ok(());
    }
    let result = gh_distance_exact_with(&x, &y, config).map_err(|e| match e {
        SolverError::SizeCapExceeded { .. } => {
            Failure::domain(format!("{e}; use --bound or raise --solver-cap"))
        }
    })?;
    println!("d_GH = {}", render(cli, &result.distance));
    println!("distortion = {}", render(cli, &result.distortion));
    let pairs: Vec<String> = result
        .optimal
        .pairs()
        .iter()
        .map(|(i, j)| format!("({},{})", x.label(*i), y.label(*j)))
        .collect();
    println!("optimal correspondence = {{{}}}", pairs.join(", "));
    println!("nodes = {}", result.nodes_explored);
    Ok(())
}

fn cmd_embed(
    cli: &Cli,
    config: &SolverConfig,
    path: &Path,
    out: Option<&Path>,
    verify: bool,
) -> Result<(), Failure> {
    let space = load_space(cli, path)?;
    let result = embed::embed(&space).map_err(|e| Failure::domain(e.to_string()))?;
    println!(
        "k = {}; {} image space(s) of {} points each; anchor margin delta/6 = {}",
        result.k,
        result.images.len(),
        result.k,
        render(cli, &result.anchor.delta_margin)
    );
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
        let full = serde_json::to_string_pretty(&result).expect("embedding serializes");
        write_file(&dir.join("embedding.json"), &full)?;
        write_file(
            &dir.join("anchor.json"),
            &io::write_json_space(&result.anchor.space),
        )?;
        for (i, image) in result.images.iter().enumerate() {
            let name = format!("image_{i:02}.json");
            write_file(&dir.join(name), &io::write_json_space(image))?;
        }
        println!("wrote {} files to {}", result.images.len() + 2, dir.display());
    }
    if verify {
        let report = embed::verify_embedding_with(&space, &result, config)
            .map_err(|e| Failure::domain(format!("{e}; raise --solver-cap")))?;
        for check in &report.pair_checks {
            println!(
                "d_GH(image {}, image {}) = {} expected {} [{}]",
                check.i,
                check.j,
                check.computed,
                check.expected,
                if check.pass { "ok" } else { "MISMATCH" }
            );
        }
        if let Some(dir) = out {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            write_file(&dir.join("verify.json"), &json)?;
        }
        if !report.all_pass {
            return Err(Failure::domain("embedding verification failed"));
        }
        println!("verified: all pairwise distances reproduced exactly");
    }
    Ok(())
}

fn cmd_sample_generic(cli: &Cli, n: usize, out: Option<&Path>) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::usage("--n must be at least 2"));
    }
    let space = sample::sample_generic(n, cli.seed);
    let margin = delta(&space).expect("sampled spaces have n >= 2");
    let rendered = match cli.format {
        Some(SpaceFormat::Matrix) => io::write_matrix_space(&space),
        _ => io::write_json_space(&space),
    };
    let summary = format!(
        "sampled generic space: n = {n}, seed = {}, rng = {RNG_NAME}, delta = {}",
        cli.seed,
        render(cli, &margin.value)
    );
    match out {
        Some(path) => {
            write_file(path, &rendered)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            eprintln!("{summary}");
            println!("{rendered}");
        }
    }
    Ok(())
}

fn cmd_demo_nonuniversality(cli: &Cli, config: &SolverConfig) -> Result<(), Failure> {
    let point = FiniteMetricSpace::point("A");
    let two = FiniteMetricSpace::two_point(Rational::int(1));
    let half = Rational::new(1, 2);

    println!("map A to the one-point space and B to the two-point space of distance 1");
    let d_ab = gh_distance_exact_with(&point, &two, config)
        .map_err(|e| Failure::domain(e.to_string()))?
        .distance;
    println!("d_GH(A, B) = {} (exact solver)", d_ab);
    if d_ab != half {
        return Err(Failure::domain("expected d_GH(A, B) = 1/2"));
    }
    println!("so {{A, B}} with |AB| = 1/2 embeds isometrically");
    println!();
    println!("suppose C extends the embedding with |AC| = 1/2 and |BC| = 2/3:");
    println!("  |AC| = d_GH(A, C) = diam(C)/2 forces diam(C) = 1");
    println!("  but d_GH(B, C) <= max(diam B, diam C)/2 = 1/2 < 2/3 for every such C");
    println!();
    println!(
        "sampling {} spaces with diameter exactly 1 (seed = {}, rng = {RNG_NAME}):",
        cli.samples, cli.seed
    );
    let mut worst = Rational::zero();
    for s in 0..cli.samples {
        let n = 2 + (s % 4); // cycle through 2..=5 points
        let candidate = sample::sample_unit_diameter(n, cli.seed.wrapping_add(s as u64));
        let d = gh_distance_exact_with(&two, &candidate, config)
            .map_err(|e| Failure::domain(e.to_string()))?
            .distance;
        if d > worst {
            worst = d.clone();
        }
        if d > half {
            return Err(Failure::domain(format!(
                "sample {s} violates the diameter bound: d_GH = {d}"
            )));
        }
    }
    println!(
        "  every sampled candidate satisfies d_GH(B, X) <= 1/2 (max observed {})",
        render(cli, &worst)
    );
    println!("no choice of C reaches distance 2/3: the embedding cannot be extended");
    Ok(())
}

fn cmd_check_isometry(
    cli: &Cli,
    config: &SolverConfig,
    path: &Path,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let space = load_space(cli, path)?;
    let report = nu::local_isometry_check_with(&space, cli.samples, cli.seed, config)
        .map_err(|e| Failure::domain(e.to_string()))?;
    println!(
        "checked {} ball samples (seed = {}, rng = {}, radius = {})",
        report.samples.len(),
        report.seed,
        report.rng,
        render(cli, &report.radius)
    );
    let mut failures = 0;
    for (idx, sample) in report.samples.iter().enumerate() {
        if !sample.pass {
            failures += 1;
            let mut line = format!("sample {idx}: FAIL gh = {} linf = {}", sample.gh, sample.linf);
            let _ = write!(line, " cardinality = {}", sample.cardinality);
            println!("{line}");
            println!("  z = {:?}", sample.z);
        }
    }
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &json)?;
        println!("wrote {}", path.display());
    }
    if failures > 0 {
        return Err(Failure::domain(format!("{failures} sample(s) failed")));
    }
    println!("all samples: d_GH equals the max-norm deviation exactly");
    Ok(())
}
