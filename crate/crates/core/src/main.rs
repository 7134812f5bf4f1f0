use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fanlab::analysis::{classify_endpoint_space, verify_sum_conditions};
use fanlab::config::{JobConfig, RawConfig};
use fanlab::fanmodel::{build_kfan, sum_fans, FanApprox};
use fanlab::format::{parse_fan, write_fan, write_sum};
use fanlab::render::{render_fan, render_intervals, RenderMode};
use fanlab::report::verify_fan;
use fanlab::zerodim::{locate, verify_basis, write_trail};
use fanlab::{FanError, SeqIndex};

/// Build, check and draw truncated 𝒦-fans with exact arithmetic.
#[derive(Parser)]
#[command(name = "fanlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a fan and write its text form.
    Build(JobArgs),
    /// Check a fan; exits 1 if any check fails.
    Verify(JobArgs),
    /// Classify the endpoint space of a fan.
    Classify(JobArgs),
    /// Run the zero-dimensionality locator and write its trail.
    Locate(JobArgs),
    /// Form the sum of several fan files and certify it.
    Sum(JobArgs),
    /// Draw the window as SVG.
    Render(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// 1, 2 or 3.
    #[arg(long)]
    variant: Option<String>,
    /// `canonical` or a path to a family file.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    breadth: Option<String>,
    /// Locator height, `p/q`.
    #[arg(long)]
    a0: Option<String>,
    /// Locator start piece; repeat for a union.
    #[arg(long)]
    u: Vec<String>,
    #[arg(long)]
    nmax: Option<String>,
    /// `intervals` or `fan`.
    #[arg(long)]
    mode: Option<String>,
    /// Input fan file; `sum` takes several.
    #[arg(long)]
    input: Vec<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    height: Option<String>,
    #[arg(long)]
    margin: Option<String>,
    #[arg(long)]
    stroke: Option<String>,
}

enum Failure {
    /// A check ran and failed.
    Check(String),
    /// Bad flags, files or specs.
    Input(String),
}

impl From<FanError> for Failure {
    fn from(e: FanError) -> Self {
        match e {
            FanError::Uncertified(_)
            | FanError::Precondition(_)
            | FanError::WindowTooShallow { .. }
            | FanError::NoFreeBox => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl JobArgs {
    fn job(&self) -> Result<JobConfig, FanError> {
        let mut raw = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| FanError::Invalid(format!("cannot read {}: {e}", p.display())))?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        let mut flags = RawConfig::default();
        let single = [
            ("variant", &self.variant),
            ("family", &self.family),
            ("depth", &self.depth),
            ("breadth", &self.breadth),
            ("a0", &self.a0),
            ("nmax", &self.nmax),
            ("mode", &self.mode),
            ("out", &self.out),
            ("width", &self.width),
            ("height", &self.height),
            ("margin", &self.margin),
            ("stroke", &self.stroke),
        ];
        for (k, v) in single {
            if let Some(v) = v {
                flags.set(k, v)?;
            }
        }
        if !self.u.is_empty() {
            flags.set("u", &self.u.join(";"))?;
        }
        if !self.input.is_empty() {
            flags.set("input", &self.input.join(";"))?;
        }
        raw = raw.overlay(flags);
        JobConfig::from_raw(&raw)
    }
}

fn read(path: &Path) -> Result<String, FanError> {
    fs::read_to_string(path).map_err(|e| FanError::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// The fan named by `--input`, or built from the job flags.
fn load_fan(job: &JobConfig) -> Result<FanApprox, FanError> {
    match job.input.as_slice() {
        [] => build_kfan(&job.spec()?),
        [one] => parse_fan(&read(one)?),
        _ => Err(FanError::Invalid("expected a single --input".into())),
    }
}

fn emit(job: &JobConfig, text: &str) -> Result<(), Failure> {
    match &job.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(e.to_string())),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Build(args) => {
            let job = args.job()?;
            let fan = build_kfan(&job.spec()?)?;
            emit(&job, &write_fan(&fan))
        }
        Command::Verify(args) => {
            let job = args.job()?;
            let fan = load_fan(&job)?;
            let cert = verify_fan(&fan);
            emit(&job, &cert.render())?;
            match cert.first_failure() {
                None => Ok(()),
                Some(l) => Err(Failure::Check(l.to_string())),
            }
        }
        Command::Classify(args) => {
            let job = args.job()?;
            let fan = load_fan(&job)?;
            emit(&job, &format!("{}\n", classify_endpoint_space(&fan)))
        }
        Command::Locate(args) => {
            let job = args.job()?;
            let fan = load_fan(&job)?;
            let a0 = job.a0.clone().ok_or_else(|| Failure::Input("`a0` is required".into()))?;
            let u = if job.u.is_empty() { vec![SeqIndex::empty()] } else { job.u.clone() };
            let result = locate(&fan, &u, &a0, job.nmax)?;
            emit(&job, &write_trail(&result))?;
            let report = verify_basis(&result);
            match report.violation {
                None => Ok(()),
                Some(v) => Err(Failure::Check(v.to_string())),
            }
        }
        Command::Sum(args) => {
            let job = args.job()?;
            if job.input.is_empty() {
                return Err(Failure::Input("`sum` needs at least one --input".into()));
            }
            let fans = job
                .input
                .iter()
                .map(|p| read(p).and_then(|t| parse_fan(&t)))
                .collect::<Result<Vec<_>, _>>()?;
            let sum = sum_fans(&fans)?;
            let cert = verify_sum_conditions(&sum);
            match &job.out {
                Some(_) => {
                    emit(&job, &write_sum(&sum))?;
                    print!("{}", cert.render());
                }
                None => {
                    print!("{}", write_sum(&sum));
                    eprint!("{}", cert.render());
                }
            }
            match cert.first_failure() {
                None => Ok(()),
                Some(l) => Err(Failure::Check(l.to_string())),
            }
        }
        Command::Render(args) => {
            let job = args.job()?;
            let mode = job.mode.ok_or_else(|| Failure::Input("`mode` is required".into()))?;
            let svg = match mode {
                RenderMode::Intervals if job.input.is_empty() => render_intervals(&job.bounds()?, &job.canvas),
                RenderMode::Intervals => render_intervals(&load_fan(&job)?.bounds(), &job.canvas),
                RenderMode::Fan => render_fan(&load_fan(&job)?, &job.canvas),
            };
            emit(&job, &svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
