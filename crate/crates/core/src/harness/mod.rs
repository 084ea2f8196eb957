//! Configuration files, presets, and the run / analyze / security / sweep
//! commands behind the `acka` binary.

mod config_file;
mod preset;
mod summary;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config_file::{parse_bases, RunConfigFile, DEFAULT_D, DEFAULT_OUTPUT_DIR, DEFAULT_ROUNDS, KEYS};
pub use preset::{parse_preset_list, Preset};
pub use summary::{RunSummary, SUMMARY_MAGIC};
pub use sweep::{
    mean_std, run_sweep, runs_csv_header, SweepCell, SweepResult, SweepRow, SweepSpec, CELLS_CSV_HEADER,
    REFERENCE_KEYGEN_AGREEMENT, REFERENCE_PASS_RATE,
};

use crate::protocol::{run_protocol, ConfigError, PrivateTranscript, ProtocolError, PublicTranscript, TranscriptError};
use crate::security::{build_report, SecurityError, SecurityInputs, SecurityReport};

pub const TRANSCRIPT_FILE: &str = "transcript.txt";
pub const PRIVATE_FILE: &str = "private.txt";
pub const SUMMARY_TEXT_FILE: &str = "summary.txt";
pub const SUMMARY_CSV_FILE: &str = "summary.csv";
pub const SWEEP_RUNS_FILE: &str = "sweep_runs.csv";
pub const SWEEP_CELLS_FILE: &str = "sweep_cells.csv";
pub const SWEEP_TEXT_FILE: &str = "sweep_summary.txt";

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "ACKA_OUTPUT_DIR";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}`: {message}")]
    Parse { line: usize, key: String, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("{path}: {source}")]
    Transcript { path: String, source: TranscriptError },
    #[error(transparent)]
    Security(#[from] SecurityError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("sweep needs at least one {0}")]
    EmptySweep(&'static str),
}

fn io_err(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn read_file(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub summary: RunSummary,
    pub output_dir: PathBuf,
    pub transcript: PathBuf,
    pub private: PathBuf,
    pub summary_text: PathBuf,
    pub summary_csv: PathBuf,
}

/// Runs a parsed configuration and writes the four output files into
/// `output_dir`, which is created if needed.
pub fn run_to_dir(file: &RunConfigFile, output_dir: &Path) -> Result<RunArtifacts, HarnessError> {
    let outcome = run_protocol(&file.config)?;
    let public = outcome.transcript.to_public();
    let private = outcome.transcript.to_private();
    let summary = RunSummary::from_views(&public, Some(&private));
    ensure_dir(output_dir)?;
    let art = RunArtifacts {
        summary,
        output_dir: output_dir.to_path_buf(),
        transcript: output_dir.join(TRANSCRIPT_FILE),
        private: output_dir.join(PRIVATE_FILE),
        summary_text: output_dir.join(SUMMARY_TEXT_FILE),
        summary_csv: output_dir.join(SUMMARY_CSV_FILE),
    };
    write_file(&art.transcript, &public.render())?;
    write_file(&art.private, &private.render())?;
    write_file(&art.summary_text, &art.summary.render_text())?;
    write_file(&art.summary_csv, &art.summary.render_csv())?;
    Ok(art)
}

/// `run <config>`: the output directory is `override_dir` when given,
/// otherwise the file's `output_dir`.
pub fn cli_run(config_path: &Path, override_dir: Option<&Path>) -> Result<RunArtifacts, HarnessError> {
    let file = RunConfigFile::parse(&read_file(config_path)?)?;
    let dir = override_dir.map_or_else(|| file.output_dir.clone(), Path::to_path_buf);
    run_to_dir(&file, &dir)
}

/// `analyze <public> [private]`: recomputes the summary from files alone.
pub fn cli_analyze(public_path: &Path, private_path: Option<&Path>) -> Result<RunSummary, HarnessError> {
    fn tr(path: &Path) -> impl Fn(TranscriptError) -> HarnessError + '_ {
        move |source| HarnessError::Transcript {
            path: path.display().to_string(),
            source,
        }
    }
    let public = PublicTranscript::parse(&read_file(public_path)?).map_err(tr(public_path))?;
    let private = match private_path {
        None => None,
        Some(p) => {
            let private = PrivateTranscript::parse(&read_file(p)?).map_err(tr(p))?;
            private.check_against(&public).map_err(tr(p))?;
            Some(private)
        }
    };
    Ok(RunSummary::from_views(&public, private.as_ref()))
}

pub fn cli_security(inputs: &SecurityInputs) -> Result<SecurityReport, HarnessError> {
    Ok(build_report(inputs)?)
}

/// Runs a sweep and writes the per-run CSV, per-cell CSV and text summary.
pub fn cli_sweep(spec: &SweepSpec, output_dir: &Path) -> Result<SweepResult, HarnessError> {
    let result = run_sweep(spec)?;
    ensure_dir(output_dir)?;
    write_file(&output_dir.join(SWEEP_RUNS_FILE), &result.runs_csv())?;
    write_file(&output_dir.join(SWEEP_CELLS_FILE), &result.cells_csv())?;
    write_file(&output_dir.join(SWEEP_TEXT_FILE), &result.render_text())?;
    Ok(result)
}
