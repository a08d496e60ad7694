//! `headtrack` command-line frontend.
//!
//! Exit codes: 0 on success, 2 for unreadable or malformed input and
//! unwritable output, 3 when the pipeline itself fails an internal check.
//! Output files are written to a temporary file next to the target and
//! renamed into place, so a failing command leaves no partial output.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use tempfile::NamedTempFile;

use crate::io::{self, Config};
use crate::synth::{self, EvalOptions};
use crate::tracker;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "headtrack",
    version,
    about = "Kalman + Hungarian point tracker"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track a detection file and write a track file.
    Track {
        /// Detection file (`frame,x,y[,confidence]`).
        detections: PathBuf,
        /// Output track file.
        #[arg(short, long)]
        out: PathBuf,
        /// Config file with tracker settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Generate a synthetic scenario.
    Synth {
        /// Config file holding the scenario keys.
        spec: PathBuf,
        /// Output detection file.
        #[arg(long)]
        detections: PathBuf,
        /// Output ground-truth file (`frame,gt_id,x,y`).
        #[arg(long)]
        gt: PathBuf,
        /// Overrides the `seed` key.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score a track file against ground truth; prints `key=value` lines.
    Eval {
        /// Track file written by `track`.
        tracks: PathBuf,
        /// Ground-truth file written by `synth`.
        gt: PathBuf,
        /// Match radius in pixels.
        #[arg(long, default_value_t = synth::DEFAULT_MATCH_RADIUS)]
        radius: f64,
        /// Score tentative records too.
        #[arg(long)]
        include_tentative: bool,
    },
    /// Render one SVG overlay per frame of a track file.
    Render {
        /// Track file written by `track`.
        tracks: PathBuf,
        /// Directory for `frame_NNNNNN.svg`; created if missing.
        out_dir: PathBuf,
        /// Canvas size as `WxH`.
        #[arg(long, default_value = "640x480", value_parser = parse_bounds_arg)]
        bounds: (f64, f64),
        /// Optional ground-truth file drawn underneath the tracks.
        #[arg(long)]
        gt: Option<PathBuf>,
    },
}

fn parse_bounds_arg(s: &str) -> Result<(f64, f64), String> {
    io::parse_bounds(s).ok_or_else(|| format!("expected WxH with positive sizes, got `{s}`"))
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    /// Classifies a library error raised while handling `path`.
    fn from_error(path: &Path, err: Error) -> Self {
        let code = match err {
            Error::Parse { .. }
            | Error::Param { .. }
            | Error::Spec(_)
            | Error::Alignment(_)
            | Error::FrameMismatch { .. } => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: format!("{}: {err}", path.display()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> CliResult<Config> {
    match path {
        Some(p) => io::parse_config(&read(p)?).map_err(|e| CliError::from_error(p, e)),
        None => Ok(Config::default()),
    }
}

/// A file staged next to its destination.
struct Staged {
    file: NamedTempFile,
    dest: PathBuf,
}

fn stage(dest: &Path, contents: &str) -> CliResult<Staged> {
    let fail = |e: std::io::Error| CliError::input(format!("{}: {e}", dest.display()));
    let dir = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = NamedTempFile::new_in(dir).map_err(fail)?;
    file.write_all(contents.as_bytes()).map_err(fail)?;
    file.flush().map_err(fail)?;
    Ok(Staged {
        file,
        dest: dest.to_path_buf(),
    })
}

fn commit(staged: Vec<Staged>) -> CliResult<()> {
    for s in staged {
        s.file
            .persist(&s.dest)
            .map_err(|e| CliError::input(format!("{}: {}", s.dest.display(), e.error)))?;
    }
    Ok(())
}

pub fn cmd_track(detections: &Path, config: Option<&Path>, out: &Path) -> CliResult<()> {
    let cfg = load_config(config)?;
    if let Err(e) = cfg.tracker.validate() {
        return Err(CliError::from_error(
            config.unwrap_or(Path::new("<defaults>")),
            e,
        ));
    }
    let stream = io::parse_detections(&read(detections)?)
        .map_err(|e| CliError::from_error(detections, e))?;
    let last = stream.keys().next_back().copied().unwrap_or(0);
    let results = tracker::run(&stream, &cfg.tracker, 1..=last)
        .map_err(|e| CliError::from_error(detections, e))?;
    commit(vec![stage(out, &io::write_tracks(&results))?])
}

pub fn cmd_synth(
    spec: &Path,
    out_detections: &Path,
    out_gt: &Path,
    seed: Option<u64>,
) -> CliResult<()> {
    let mut cfg = load_config(Some(spec))?;
    if let Some(seed) = seed {
        cfg.scenario.seed = seed;
    }
    let (gt, dets) = synth::generate(&cfg.scenario).map_err(|e| CliError::from_error(spec, e))?;
    let staged = vec![
        stage(out_detections, &io::write_detections(&dets))?,
        stage(out_gt, &io::write_ground_truth(&gt))?,
    ];
    commit(staged)
}

/// Returns the metrics as `key=value` lines.
pub fn cmd_eval(tracks: &Path, gt: &Path, opts: EvalOptions) -> CliResult<String> {
    let results = io::parse_tracks(&read(tracks)?).map_err(|e| CliError::from_error(tracks, e))?;
    let truth = io::parse_ground_truth(&read(gt)?).map_err(|e| CliError::from_error(gt, e))?;
    let metrics =
        synth::evaluate(&results, &truth, opts).map_err(|e| CliError::from_error(tracks, e))?;
    Ok(metrics.to_key_values())
}

/// Writes `frame_%06d.svg` files into `out_dir`; returns how many.
pub fn cmd_render(
    tracks: &Path,
    out_dir: &Path,
    bounds: (f64, f64),
    gt: Option<&Path>,
) -> CliResult<usize> {
    let results = io::parse_tracks(&read(tracks)?).map_err(|e| CliError::from_error(tracks, e))?;
    let truth = match gt {
        Some(p) => Some(io::parse_ground_truth(&read(p)?).map_err(|e| CliError::from_error(p, e))?),
        None => None,
    };
    let svgs = io::render_overlay(&results, truth.as_ref(), bounds);
    if svgs.is_empty() {
        return Ok(0);
    }
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::input(format!("{}: {e}", out_dir.display())))?;
    let staged = svgs
        .iter()
        .map(|(frame, svg)| stage(&out_dir.join(format!("frame_{frame:06}.svg")), svg))
        .collect::<CliResult<Vec<_>>>()?;
    let n = staged.len();
    commit(staged)?;
    Ok(n)
}

/// Runs parsed arguments, printing results to stdout and diagnostics to
/// stderr. Returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Track {
            detections,
            out,
            config,
        } => cmd_track(&detections, config.as_deref(), &out),
        Command::Synth {
            spec,
            detections,
            gt,
            seed,
        } => cmd_synth(&spec, &detections, &gt, seed),
        Command::Eval {
            tracks,
            gt,
            radius,
            include_tentative,
        } => cmd_eval(
            &tracks,
            &gt,
            EvalOptions {
                match_radius: radius,
                include_tentative,
            },
        )
        .map(|text| print!("{text}")),
        Command::Render {
            tracks,
            out_dir,
            bounds,
            gt,
        } => cmd_render(&tracks, &out_dir, bounds, gt.as_deref()).map(|_| ()),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("headtrack: {e}");
            e.code
        }
    }
}
