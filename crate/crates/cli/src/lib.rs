//! Argument parsing, dispatch and text/graph export for the `polytree`
//! command-line tool.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use polytree::degeneration::{
    limit_iterate, limit_measure, measure_to_json, sweep_family, verify_kbound, zero_counts_at, FamilySpec,
    SweepRow, DEFAULT_DEPTH,
};
use polytree::gitstab::{
    nd_bound, report_to_json, stability, verify_finite_determination, Rescale, ThmOptions,
};
use polytree::polycore::{BoundaryPoint, Polynomial};
use polytree::treebuild::{build_tree, format_rational, tree_to_json, Tree, TreeMeasure};

/// Exit status for a check that ran but did not hold.
pub const EXIT_CHECK_FAILED: i32 = 2;
/// Exit status for operational and usage errors.
pub const EXIT_ERROR: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "polytree",
    version,
    about = "Dynamical trees and degenerations of complex polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: RawCommand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Json,
    Dot,
}

#[derive(clap::Args, Debug)]
struct FamilyArgs {
    /// Coefficients in t, highest degree first, e.g. "t,1,0,0".
    #[arg(long)]
    family: String,
    /// Parameter schedule, e.g. "10^j, 1..6".
    #[arg(long)]
    schedule: String,
    /// Rescaling λ(t); members become λ f(z/λ).
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Subcommand, Debug)]
enum RawCommand {
    /// Build the truncated tree and its measure.
    Tree {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Report heights divided by M(f).
        #[arg(long)]
        normalized: bool,
        #[arg(long, value_enum, default_value_t = TreeFormat::Json)]
        format: TreeFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit of maximal measures along a family (atoms JSON).
    MeasureLimit {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zeros of f^n in the components cut off by a vertex, against mass·d^n.
    Zeros {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n: usize,
        /// Vertex id; defaults to the base vertex.
        #[arg(long)]
        vertex: Option<usize>,
        /// Tree depth; defaults to n + 1.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projective limit of the m-th iterates, or the k-bound check at N.
    LimitIterate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Check k >= m_T(C_N)·d^N for this N instead.
        #[arg(long)]
        kbound: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// GIT stability of a boundary point "P=..;k=..;b=..;D=..".
    Stability {
        #[arg(long)]
        point: String,
        /// Ambient degree; defaults to the point's own D.
        #[arg(long)]
        degree: Option<usize>,
        /// Print the verdict with witnesses as JSON.
        #[arg(long)]
        json: bool,
    },
    /// The bound N(d).
    Nd {
        #[arg(long)]
        degree: usize,
    },
    /// Finite-determination check of limits of iterates.
    VerifyThm2 {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 2)]
        extra: usize,
        /// Use the members as given instead of rescaling them.
        #[arg(long)]
        no_rescale: bool,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of M(f), basepoint height, regime and atom count over the schedule.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A validated subcommand with its grammar payloads parsed.
#[derive(Debug)]
pub enum Command {
    Tree {
        poly: Polynomial,
        depth: usize,
        normalized: bool,
        format: TreeFormat,
    },
    MeasureLimit {
        spec: FamilySpec,
        depth: usize,
    },
    Zeros {
        poly: Polynomial,
        n: usize,
        vertex: Option<usize>,
        depth: usize,
    },
    LimitIterate {
        spec: FamilySpec,
        m: usize,
        kbound: Option<usize>,
    },
    Stability {
        point: BoundaryPoint,
        degree: usize,
        json: bool,
    },
    Nd {
        degree: usize,
    },
    VerifyThm2 {
        spec: FamilySpec,
        options: ThmOptions,
    },
    Sweep {
        spec: FamilySpec,
        depth: usize,
    },
}

#[derive(Debug)]
pub struct CommandRequest {
    pub command: Command,
    /// Artifact path; standard output when absent.
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum ArgError {
    /// Help or version was requested; the text goes to stdout.
    Info(String),
    Usage(String),
}

impl std::fmt::Display for ArgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArgError::Info(s) | ArgError::Usage(s) => f.write_str(s.trim_end()),
        }
    }
}

impl std::error::Error for ArgError {}

fn family(a: FamilyArgs) -> Result<FamilySpec, ArgError> {
    let spec = FamilySpec::parse(&a.family, &a.schedule)
        .map_err(|e| ArgError::Usage(format!("--family/--schedule: {e}")))?;
    match a.lambda {
        Some(l) => spec
            .with_lambda(&l)
            .map_err(|e| ArgError::Usage(format!("--lambda: {e}"))),
        None => Ok(spec),
    }
}

fn poly(s: &str) -> Result<Polynomial, ArgError> {
    s.parse().map_err(|e| ArgError::Usage(format!("--poly: {e}")))
}

/// Parses `argv` (program name first) into a validated request.
pub fn parse_args<I, T>(argv: I) -> Result<CommandRequest, ArgError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            ArgError::Info(e.to_string())
        }
        _ => ArgError::Usage(e.to_string()),
    })?;
    let (command, out) = match cli.command {
        RawCommand::Tree {
            poly: p,
            depth,
            normalized,
            format,
            out,
        } => (
            Command::Tree {
                poly: poly(&p)?,
                depth,
                normalized,
                format,
            },
            out,
        ),
        RawCommand::MeasureLimit {
            family: f,
            depth,
            out,
        } => (
            Command::MeasureLimit {
                spec: family(f)?,
                depth,
            },
            out,
        ),
        RawCommand::Zeros {
            poly: p,
            n,
            vertex,
            depth,
            out,
        } => {
            if n == 0 {
                return Err(ArgError::Usage("--n must be at least 1".into()));
            }
            let depth = depth.unwrap_or(n + 1);
            (
                Command::Zeros {
                    poly: poly(&p)?,
                    n,
                    vertex,
                    depth,
                },
                out,
            )
        }
        RawCommand::LimitIterate {
            family: f,
            m,
            kbound,
            out,
        } => (
            Command::LimitIterate {
                spec: family(f)?,
                m,
                kbound,
            },
            out,
        ),
        RawCommand::Stability { point, degree, json } => {
            let point: BoundaryPoint = point
                .parse()
                .map_err(|e| ArgError::Usage(format!("--point: {e}")))?;
            let degree = degree.unwrap_or(point.ambient_degree());
            (Command::Stability { point, degree, json }, None)
        }
        RawCommand::Nd { degree } => (Command::Nd { degree }, None),
        RawCommand::VerifyThm2 {
            family: f,
            extra,
            no_rescale,
            depth,
            out,
        } => {
            let options = ThmOptions {
                extra,
                rescale: if no_rescale { Rescale::Off } else { Rescale::Auto },
                depth,
            };
            (
                Command::VerifyThm2 {
                    spec: family(f)?,
                    options,
                },
                out,
            )
        }
        RawCommand::Sweep {
            family: f,
            depth,
            out,
        } => (
            Command::Sweep {
                spec: family(f)?,
                depth,
            },
            out,
        ),
    };
    Ok(CommandRequest { command, out })
}

/// Graphviz description of a tree: one node per vertex labeled with its
/// height, one edge per tree edge labeled `degree / mass`, all in id order.
pub fn tree_to_dot(tree: &Tree, measure: &TreeMeasure) -> String {
    let mut s = String::from("digraph tree {\n  rankdir=TB;\n  node [shape=circle];\n");
    for v in &tree.vertices {
        let shape = if v.id == tree.base {
            ", shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "  v{} [label=\"{:.6}\"{}];",
            v.id,
            tree.vertex_height(v.id),
            shape
        );
    }
    for e in &tree.edges {
        let _ = writeln!(
            s,
            "  v{} -> v{} [label=\"{} / {}\"];",
            e.top,
            e.bottom,
            e.degree,
            format_rational(measure.mass(e.id))
        );
    }
    s.push_str("}\n");
    s
}

/// CSV with header `param,M,basepoint_height,regime,n_atoms`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("param,M,basepoint_height,regime,n_atoms\n");
    for r in rows {
        let regime = r.regime.map_or("undetermined", |c| c.tag());
        let atoms = r.n_atoms.map_or(String::new(), |n| n.to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.param, r.max_rate, r.basepoint_height, regime, atoms
        );
    }
    s
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    CheckFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::CheckFailed => EXIT_CHECK_FAILED,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        }
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout.write_all(text.as_bytes()).context("writing output"),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Runs a request, writing the artifact to `out` or `stdout`.
pub fn run(req: &CommandRequest, stdout: &mut dyn Write) -> Result<Outcome> {
    match &req.command {
        Command::Tree {
            poly,
            depth,
            normalized,
            format,
        } => {
            let (t, m) = build_tree(poly, *depth).context("treebuild")?;
            let t = if *normalized { t.normalize() } else { t };
            let text = match format {
                TreeFormat::Json => with_newline(tree_to_json(&t, &m)),
                TreeFormat::Dot => tree_to_dot(&t, &m),
            };
            emit(&req.out, stdout, &text)?;
            Ok(Outcome::Ok)
        }
        Command::MeasureLimit { spec, depth } => {
            let lm = limit_measure(spec, *depth).context("degeneration")?;
            emit(&req.out, stdout, &with_newline(measure_to_json(&lm)))?;
            Ok(Outcome::Ok)
        }
        Command::Zeros {
            poly,
            n,
            vertex,
            depth,
        } => {
            let (t, m) = build_tree(poly, *depth).context("treebuild")?;
            let v = vertex.unwrap_or(t.base);
            let rows = zero_counts_at(poly, &t, &m, v, *n).context("degeneration")?;
            let pass = rows.iter().all(|r| r.matches);
            let report = serde_json::json!({ "n": n, "vertex": v, "components": rows, "pass": pass });
            emit(
                &req.out,
                stdout,
                &with_newline(serde_json::to_string_pretty(&report)?),
            )?;
            Ok(Outcome::from_pass(pass))
        }
        Command::LimitIterate {
            spec,
            kbound: Some(n),
            ..
        } => {
            let r = verify_kbound(spec, *n).context("degeneration")?;
            emit(&req.out, stdout, &with_newline(serde_json::to_string_pretty(&r)?))?;
            Ok(Outcome::from_pass(r.pass))
        }
        Command::LimitIterate {
            spec,
            m,
            kbound: None,
        } => {
            let li = limit_iterate(spec, *m).context("degeneration")?;
            let report = serde_json::json!({
                "m": li.m,
                "point": li.point.to_string(),
                "source": li.source,
                "deviation": li.deviation,
            });
            match &req.out {
                Some(_) => emit(
                    &req.out,
                    stdout,
                    &with_newline(serde_json::to_string_pretty(&report)?),
                )?,
                None => writeln!(stdout, "{}", li.point)?,
            }
            Ok(Outcome::Ok)
        }
        Command::Stability { point, degree, json } => {
            let v = stability(point, *degree).context("gitstab")?;
            if *json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                writeln!(stdout, "{}", v.tag)?;
                if let Some(alt) = v.alternative {
                    writeln!(stdout, "alternative reading: {alt}")?;
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Nd { degree } => {
            writeln!(stdout, "{}", nd_bound(*degree).context("gitstab")?)?;
            Ok(Outcome::Ok)
        }
        Command::VerifyThm2 { spec, options } => {
            let r = verify_finite_determination(spec, options).context("gitstab")?;
            emit(&req.out, stdout, &with_newline(report_to_json(&r)))?;
            Ok(Outcome::from_pass(r.pass))
        }
        Command::Sweep { spec, depth } => {
            let rows = sweep_family(spec, *depth).context("degeneration")?;
            emit(&req.out, stdout, &sweep_to_csv(&rows))?;
            Ok(Outcome::Ok)
        }
    }
}

/// Parses, runs and maps the result to an exit status, reporting errors on
/// `stderr`.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let req = match parse_args(argv) {
        Ok(r) => r,
        Err(ArgError::Info(s)) => {
            let _ = write!(stdout, "{s}");
            return 0;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    };
    match run(&req, stdout) {
        Ok(o) => o.exit_code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
