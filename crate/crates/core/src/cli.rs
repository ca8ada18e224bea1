//! The `cube-shuffle` command line.
//!
//! Every command prints a JSON report on stdout and a one-line summary on
//! stderr. Exit codes: 0 success, 1 validation or verification failure,
//! 2 usage, parse or i/o error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::domains::validate;
use crate::error::Error;
use crate::io::{read_json, to_json, write_json, DomainFile, PlanFile, Report, Scenario};
use crate::loops::{lattice, Evaluation};
use crate::rational::{parse, serde_rational, Rational};
use crate::render::Frame;
use crate::schedule::{eval_homotopy_many, VerificationReport};

#[derive(Debug, Parser)]
#[command(name = "cube-shuffle", version, about = "Construct, verify, evaluate and render cube shuffles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the cubes of a domain file have disjoint interiors.
    Validate {
        domain: PathBuf,
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Build a shuffle plan for a scenario file.
    Plan {
        scenario: PathBuf,
        /// Plan file to write; the plan goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Indices materialized for infinite plans.
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Check endpoints, all-time disjointness and fixed-cube constancy.
    Verify {
        plan: PathBuf,
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Evaluate the homotopy on a grid of points.
    Eval {
        plan: PathBuf,
        scenario: PathBuf,
        /// Grid side: points `i/(points-1)` per axis.
        #[arg(long, default_value_t = 17)]
        points: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1", value_parser = parse_time)]
        times: Vec<Rational>,
        /// Truncation for times where no locator applies.
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Write one SVG frame per requested time (`n = 2`).
    Render {
        plan: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,1/2,1", value_parser = parse_time)]
        times: Vec<Rational>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 64)]
        bound: usize,
        #[arg(long, default_value_t = 512)]
        size: u32,
    },
}

fn parse_time(s: &str) -> Result<Rational, String> {
    let t = parse(s.trim()).map_err(|e| e.to_string())?;
    if t < crate::rational::zero() || t > crate::rational::one() {
        return Err(format!("time {s} outside [0, 1]"));
    }
    Ok(t)
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    /// The input was read but did not pass its check (exit 1).
    Check(String),
    /// The input could not be read or parsed (exit 2).
    Input(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e @ (Error::Parse(_) | Error::Io(_)) => Failure::Input(e),
            e => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(String, String), Failure>;

#[derive(Serialize)]
struct ValidateBody {
    file: String,
    #[serde(flatten)]
    report: crate::domains::ValidationReport,
}

#[derive(Serialize)]
struct PlanBody {
    out: Option<String>,
    indices: usize,
    stages: usize,
    provenance: usize,
}

#[derive(Serialize)]
struct VerifyBody {
    file: String,
    bound: usize,
    #[serde(flatten)]
    report: VerificationReport,
}

#[derive(Serialize)]
struct EvalPoint {
    #[serde(serialize_with = "ser_point")]
    s: Vec<Rational>,
    #[serde(flatten)]
    eval: Evaluation,
}

fn ser_point<S: serde::Serializer>(p: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(crate::rational::format))
}

#[derive(Serialize)]
struct EvalTime {
    #[serde(with = "serde_rational")]
    t: Rational,
    values: Vec<EvalPoint>,
}

#[derive(Serialize)]
struct EvalBody {
    points: usize,
    times: Vec<EvalTime>,
}

#[derive(Serialize)]
struct RenderBody {
    files: Vec<String>,
    rectangles: Vec<usize>,
}

fn validate_cmd(path: &Path, bound: usize) -> Outcome {
    let file: DomainFile = read_json(path)?;
    let domain = file.build().map_err(|e| Failure::Check(e.to_string()))?;
    let report = validate(&domain, bound);
    let summary = match report.violation {
        Some((a, b)) => format!("invalid: cubes {a} and {b} have overlapping interiors"),
        None => format!("valid ({} pairs checked)", report.checked_pairs),
    };
    let valid = report.valid;
    let json = to_json(&Report::new(
        "validate",
        ValidateBody {
            file: path.display().to_string(),
            report,
        },
    ));
    if valid {
        Ok((json, summary))
    } else {
        println!("{json}");
        Err(Failure::Check(summary))
    }
}

fn plan_cmd(path: &Path, out: Option<&Path>, bound: usize) -> Outcome {
    let scenario: Scenario = read_json(path)?;
    let plan = scenario.plan()?;
    let file = PlanFile::from_plan(&plan, bound)?;
    let body = PlanBody {
        out: out.map(|p| p.display().to_string()),
        indices: file.paths.len(),
        stages: file.stages.len(),
        provenance: file.provenance.len(),
    };
    let summary = format!("plan with {} paths and {} provenance steps", body.indices, body.provenance);
    match out {
        Some(p) => {
            write_json(p, &file)?;
            Ok((to_json(&Report::new("plan", body)), summary))
        }
        None => Ok((to_json(&file), summary)),
    }
}

fn load_plan(path: &Path) -> std::result::Result<(PlanFile, crate::schedule::CubeSchedule), Failure> {
    let file: PlanFile = read_json(path)?;
    let schedule = file.schedule().map_err(|e| match e {
        e @ (Error::Parse(_) | Error::Io(_)) => Failure::Input(e),
        e => Failure::Input(Error::Parse(e.to_string())),
    })?;
    Ok((file, schedule))
}

fn clamp(file: &PlanFile, bound: usize) -> usize {
    file.materialized_bound.map_or(bound, |m| bound.min(m))
}

fn verify_cmd(path: &Path, bound: usize) -> Outcome {
    let (file, schedule) = load_plan(path)?;
    let bound = clamp(&file, bound);
    let report = schedule.verify(bound);
    let summary = if report.pass {
        format!("pass ({} indices, {} pairs)", report.checked_indices, report.checked_pairs)
    } else {
        format!("fail: {:?}", report.failures.first())
    };
    let pass = report.pass;
    let json = to_json(&Report::new(
        "verify",
        VerifyBody {
            file: path.display().to_string(),
            bound,
            report,
        },
    ));
    if pass {
        Ok((json, summary))
    } else {
        println!("{json}");
        Err(Failure::Check(summary))
    }
}

fn eval_cmd(plan: &Path, scenario: &Path, points: usize, times: &[Rational], bound: usize) -> Outcome {
    if points < 2 {
        return Err(Failure::Input(Error::InvalidArgument("--points must be at least 2".into())));
    }
    let (file, schedule) = load_plan(plan)?;
    let sc: Scenario = read_json(scenario)?;
    if sc.n != file.n {
        return Err(Failure::Input(Error::DimensionMismatch {
            expected: file.n,
            found: sc.n,
        }));
    }
    let seq = sc.sequence(schedule.indices())?;
    let grid = lattice(file.n, points as i64 - 1);
    let truncation = clamp(&file, bound);
    let times: Vec<EvalTime> = times
        .iter()
        .map(|t| EvalTime {
            t: t.clone(),
            values: eval_homotopy_many(&schedule, &seq, &grid, t, truncation)
                .into_iter()
                .zip(&grid)
                .map(|(eval, s)| EvalPoint { s: s.clone(), eval })
                .collect(),
        })
        .collect();
    let summary = format!("{} points at {} times", grid.len(), times.len());
    Ok((to_json(&Report::new("eval", EvalBody { points, times })), summary))
}

fn render_cmd(plan: &Path, times: &[Rational], out_dir: &Path, bound: usize, size: u32) -> Outcome {
    let (file, schedule) = load_plan(plan)?;
    let bound = clamp(&file, bound);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let mut body = RenderBody {
        files: vec![],
        rectangles: vec![],
    };
    for (i, t) in times.iter().enumerate() {
        let frame = Frame::of_schedule(&schedule, t, bound).map_err(|e| Failure::Input(e))?;
        let path = out_dir.join(format!("frame-{i:03}.svg"));
        std::fs::write(&path, frame.to_svg(size)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        body.files.push(path.display().to_string());
        body.rectangles.push(frame.cubes.len());
    }
    let summary = format!("wrote {} frames to {}", body.files.len(), out_dir.display());
    Ok((to_json(&Report::new("render", body)), summary))
}

impl Cli {
    fn execute(&self) -> Outcome {
        match &self.command {
            Command::Validate { domain, bound } => validate_cmd(domain, *bound),
            Command::Plan { scenario, out, bound } => plan_cmd(scenario, out.as_deref(), *bound),
            Command::Verify { plan, bound } => verify_cmd(plan, *bound),
            Command::Eval {
                plan,
                scenario,
                points,
                times,
                bound,
            } => eval_cmd(plan, scenario, *points, times, *bound),
            Command::Render {
                plan,
                times,
                out_dir,
                bound,
                size,
            } => render_cmd(plan, times, out_dir, *bound, *size),
        }
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.execute() {
        Ok((json, summary)) => {
            println!("{json}");
            eprintln!("{summary}");
            0
        }
        Err(f) => {
            match &f {
                Failure::Check(msg) => eprintln!("error: {msg}"),
                Failure::Input(e) => eprintln!("error: {e}"),
            }
            f.exit_code()
        }
    }
}
