//! Command-line front end: `latwalk <mode> [flags]`.

pub mod report;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::grid_state::GridDims;
use crate::operators::InterpolationParams;
use crate::search::{
    run_baseline, run_intermediate_walk, run_main_walk, RunConfig, SearchTrajectory, StepPolicy,
};
use crate::secular::CollapsedModel;
use table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Search,
    Spectra,
    Secular,
    Scaling,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Walk {
    /// U on |π⟩.
    Main,
    /// W F₁ on |π_z⟩.
    Intermediate,
    /// U at s = 1 on |π⟩.
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SArg {
    Auto,
    Value(f64),
}

fn parse_s(v: &str) -> std::result::Result<SArg, String> {
    if v == "auto" {
        return Ok(SArg::Auto);
    }
    v.parse::<f64>()
        .map(SArg::Value)
        .map_err(|e| format!("expected 'auto' or a number: {e}"))
}

fn parse_steps(v: &str) -> std::result::Result<StepPolicy, String> {
    if v == "auto" {
        return Ok(StepPolicy::Auto);
    }
    if let Some(m) = v.strip_prefix("sweep:") {
        return m
            .parse()
            .map(StepPolicy::Sweep)
            .map_err(|e| format!("bad sweep length: {e}"));
    }
    v.parse()
        .map(StepPolicy::Fixed)
        .map_err(|e| format!("expected 'auto', an integer or 'sweep:M': {e}"))
}

fn parse_marked(v: &str) -> std::result::Result<(usize, usize), String> {
    let (i, j) = v.split_once(',').ok_or("expected 'i,j'")?;
    Ok((
        i.trim().parse().map_err(|e| format!("{e}"))?,
        j.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "latwalk",
    version,
    about = "Interpolated staggered quantum walk search on the torus"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    #[arg(long, default_value_t = 16)]
    pub rows: usize,
    #[arg(long, default_value_t = 16)]
    pub cols: usize,
    #[arg(long, default_value = "0,0", value_parser = parse_marked)]
    pub marked: (usize, usize),
    /// Selfloop weight; auto = 1 − 1/(N+1) (1 for the baseline walk).
    #[arg(long, default_value = "auto", value_parser = parse_s)]
    pub s: SArg,
    /// auto, a fixed count k, or sweep:M.
    #[arg(long, default_value = "auto", value_parser = parse_steps)]
    pub steps: StepPolicy,
    /// Continue to twice the stopping step to locate the empirical peak.
    #[arg(long)]
    pub scan: bool,
    #[arg(long, value_enum, default_value_t = Walk::Main)]
    pub walk: Walk,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to json for search and secular, csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid side lengths for scaling mode.
    #[arg(long, value_delimiter = ',', default_values_t = vec![16, 32, 64])]
    pub sweep: Vec<usize>,
}

impl Cli {
    fn dims(&self) -> Result<GridDims> {
        let dims = GridDims::new(self.rows, self.cols)?;
        dims.check_vertex(self.marked)?;
        Ok(dims)
    }

    fn params(&self, dims: GridDims) -> Result<InterpolationParams> {
        match self.s {
            SArg::Auto if self.mode == Mode::Search && self.walk == Walk::Baseline => {
                InterpolationParams::new(1.0)
            }
            SArg::Auto => Ok(InterpolationParams::default_for(dims)),
            SArg::Value(s) => InterpolationParams::new(s),
        }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(match self.mode {
            Mode::Search | Mode::Secular => Format::Json,
            _ => Format::Csv,
        })
    }
}

fn search_output(cli: &Cli, dims: GridDims, params: InterpolationParams) -> Result<Table> {
    dims.require_square()?;
    let config = RunConfig::new(dims)
        .with_marked(cli.marked)
        .with_s(params.s())
        .with_policy(cli.steps)
        .with_scan(cli.scan);
    let traj: SearchTrajectory = match cli.walk {
        Walk::Main => run_main_walk(config)?,
        Walk::Intermediate => run_intermediate_walk(config)?,
        Walk::Baseline => run_baseline(config)?,
    };
    if cli.format() == Format::Csv {
        let mut t = Table::new(vec!["step", "p_selfloop", "p_marked", "norm_drift"]);
        for s in &traj.samples {
            t.push(vec![
                s.step.into(),
                s.p_selfloop.into(),
                s.p_marked.into(),
                s.norm_drift.into(),
            ]);
        }
        return Ok(t);
    }
    let (phi1, beta) = match (traj.phi1, traj.beta) {
        (Some(p), Some(b)) => (p, b),
        _ => {
            let m = CollapsedModel::for_search(dims)?;
            (m.phi1().alpha, m.beta()?.alpha)
        }
    };
    Ok(Table::record(vec![
        ("n", dims.n_rows().into()),
        ("N", dims.n().into()),
        ("s", params.s().into()),
        ("policy", traj.config.policy.label().into()),
        ("steps", traj.stop_step.into()),
        ("p_peak", traj.peak_value.into()),
        ("peak_step", traj.peak_step.into()),
        ("phi1", phi1.into()),
        ("beta", beta.into()),
    ]))
}

/// Renders the output for a parsed command line. Returns the bytes and
/// whether every verify check passed.
pub fn render(cli: &Cli) -> Result<(String, bool)> {
    let mut ok = true;
    let table = match cli.mode {
        Mode::Scaling => report::scaling_table(&report::scaling_rows(&cli.sweep)?),
        _ => {
            let dims = cli.dims()?;
            let params = cli.params(dims)?;
            match cli.mode {
                Mode::Search => search_output(cli, dims, params)?,
                Mode::Spectra => report::spectra_table(dims),
                Mode::Secular => report::secular_record(dims, params)?,
                Mode::Verify => {
                    let checks = report::verify_suite(dims, cli.marked, params, cli.seed)?;
                    ok = checks.iter().all(|c| c.pass());
                    report::verify_table(&checks)
                }
                Mode::Scaling => unreachable!(),
            }
        }
    };
    let text = match cli.format() {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    Ok((text, ok))
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("LATWALK_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            Error::Config(format!(
                "LATWALK_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        if n == 0 {
            return Err(Error::Config("LATWALK_THREADS must be positive".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<()> {
    let (text, ok) = thread_pool()?.install(|| render(cli))?;
    match &cli.out {
        Some(p) => write_atomic(p, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    if !ok {
        return Err(Error::Numeric(
            "verify: one or more checks exceeded tolerance".into(),
        ));
    }
    Ok(())
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("latwalk: {e}");
            e.exit_code()
        }
    }
}
