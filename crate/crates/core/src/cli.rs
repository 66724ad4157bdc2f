//! Command-line front end. [`run`] does the work and returns the exit
//! status so it can be driven from tests; the binary only parses arguments.
//!
//! Exit status: 0 when the analysis completed (whatever the verdict), 1 for
//! usage, I/O and format errors, 3 when the oracle hit its state cap.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::color::{ColoredWorkflowNet, Mode};
use crate::formats::{
    emit_native, emit_report, emit_summary, emit_trace, import_pnml, parse_native, NetOutcome,
};
use crate::net::validate;
use crate::oracle::{
    oracle_is_k_sound, oracle_is_sound, oracle_summary, Soundness, DEFAULT_CAP,
    DEFAULT_COLORED_CAP,
};
use crate::reduction::{reduce, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CAP: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Permissive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cwfnet", version, about = "Soundness and summaries of colored workflow nets")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Override the transformer mode declared in the input.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// State cap for oracle exploration.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Write the reduction trace here.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    /// Write the residual net here instead of standard output.
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub report: ReportFormat,
    /// Check k-soundness instead of soundness (oracle only).
    #[arg(long, global = true)]
    pub k: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report workflow-net violations.
    Validate { files: Vec<PathBuf> },
    /// Reduce and print the verdict with rule counts.
    Check { files: Vec<PathBuf> },
    /// Reduce and print the residual net.
    Reduce { file: PathBuf },
    /// Print the summary of a completely reducible net.
    Summarize { file: PathBuf },
    /// Decide soundness by state-space exploration.
    Oracle { file: PathBuf },
    /// Compare the reduction's summary with the oracle's.
    Equiv { file: PathBuf },
    /// Table of statistics over every .cwf and .pnml file under a directory.
    Batch { dir: PathBuf },
}

/// Reads a native (`.cwf`, default) or PNML (`.pnml`) file.
pub fn load(path: &Path, mode: Option<ModeArg>) -> Result<ColoredWorkflowNet, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let is_pnml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pnml"));
    let cnet = if is_pnml {
        let name = path.file_stem().map_or("net".into(), |s| s.to_string_lossy());
        import_pnml(&text, &name).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        parse_native(&text).map_err(|e| format!("{}: {e}", path.display()))?
    };
    match mode {
        None => Ok(cnet),
        Some(m) => {
            let m = match m {
                ModeArg::Strict => Mode::Strict,
                ModeArg::Permissive => Mode::Permissive,
            };
            let cnet = cnet.with_mode(m);
            cnet.check().map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(cnet)
        }
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::CompletelyReduced { .. } => "SOUND",
        other => other.label(),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(config, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}

fn dispatch(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    let cap = config.cap.unwrap_or(DEFAULT_CAP);
    let colored_cap = config.cap.unwrap_or(DEFAULT_COLORED_CAP);
    match &config.command {
        Command::Validate { files } => {
            for f in files {
                let cnet = load(f, config.mode)?;
                let violations = validate(cnet.net());
                if violations.is_empty() {
                    writeln!(out, "{}: OK", f.display()).map_err(io)?;
                }
                for v in violations {
                    writeln!(out, "{}: {v}", f.display()).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Check { files } => {
            for f in files {
                let cnet = load(f, config.mode)?;
                let r = reduce(&cnet);
                let c = r.counts;
                writeln!(
                    out,
                    "{}: {} (merge={} iteration={} shortcut={} d-shortcut={})",
                    f.display(),
                    verdict_word(&r.verdict),
                    c.merge,
                    c.iteration,
                    c.shortcut,
                    c.d_shortcut
                )
                .map_err(io)?;
                if let Some(path) = &config.trace {
                    write_file(path, &emit_trace(&r.trace, &cnet))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Reduce { file } => {
            let cnet = load(file, config.mode)?;
            let r = reduce(&cnet);
            if let Some(path) = &config.trace {
                write_file(path, &emit_trace(&r.trace, &cnet))?;
            }
            let residual = match &r.verdict {
                Verdict::Malformed { diagnostic } => {
                    writeln!(out, "MALFORMED: {diagnostic}").map_err(io)?;
                    return Ok(EXIT_OK);
                }
                _ => r.trace.replay(&cnet).map_err(|e| e.to_string())?,
            };
            let text = emit_native(&residual);
            match &config.emit {
                Some(path) => {
                    write_file(path, &text)?;
                    writeln!(out, "{}", verdict_word(&r.verdict)).map_err(io)?;
                }
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Summarize { file } => {
            let cnet = load(file, config.mode)?;
            let r = reduce(&cnet);
            if let Some(path) = &config.trace {
                write_file(path, &emit_trace(&r.trace, &cnet))?;
            }
            match r.summary() {
                Some(s) => out.write_all(emit_summary(&s).as_bytes()).map_err(io)?,
                None => writeln!(out, "not completely reduced: {}", r.verdict.label()).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { file } => {
            let cnet = load(file, config.mode)?;
            let v = match config.k {
                Some(0) => return Err("--k must be at least 1".into()),
                Some(k) => oracle_is_k_sound(cnet.net(), k, cap),
                None => oracle_is_sound(cnet.net(), cap),
            };
            writeln!(out, "{}", v.describe(cnet.net())).map_err(io)?;
            match v.soundness {
                Soundness::CapExceeded => Ok(EXIT_CAP),
                _ if config.k.is_some() => Ok(EXIT_OK),
                _ => match oracle_summary(&cnet, colored_cap) {
                    Ok(s) => {
                        out.write_all(emit_summary(&s).as_bytes()).map_err(io)?;
                        Ok(EXIT_OK)
                    }
                    Err(e) => {
                        writeln!(out, "summary: {e}").map_err(io)?;
                        Ok(EXIT_CAP)
                    }
                },
            }
        }
        Command::Equiv { file } => {
            let cnet = load(file, config.mode)?;
            let r = reduce(&cnet);
            let oracle = oracle_is_sound(cnet.net(), cap);
            let Some(sound) = oracle.soundness.as_bool() else {
                writeln!(out, "oracle: cap of {cap} states exceeded").map_err(io)?;
                return Ok(EXIT_CAP);
            };
            let verdicts_agree = match r.verdict.soundness() {
                Some(s) => s == sound,
                None => true,
            };
            let mut differ = Vec::new();
            if let Some(mine) = r.summary() {
                let theirs = match oracle_summary(&cnet, colored_cap) {
                    Ok(s) => s,
                    Err(e) => {
                        writeln!(out, "oracle: {e}").map_err(io)?;
                        return Ok(EXIT_CAP);
                    }
                };
                for (v, w) in mine.symmetric_difference(&theirs) {
                    let side = if mine.contains(&(v.clone(), w.clone())) { "reduction" } else { "oracle" };
                    differ.push(format!("  only in {side}: {v} -> {w}"));
                }
            }
            if verdicts_agree && differ.is_empty() {
                writeln!(out, "equivalent ({}, oracle {})", verdict_word(&r.verdict), oracle.soundness)
                    .map_err(io)?;
            } else {
                writeln!(out, "not equivalent ({}, oracle {})", verdict_word(&r.verdict), oracle.soundness)
                    .map_err(io)?;
                for line in differ {
                    writeln!(out, "{line}").map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Batch { dir } => {
            if !dir.is_dir() {
                return Err(format!("{}: not a directory", dir.display()));
            }
            let mut files: Vec<PathBuf> = walkdir::WalkDir::new(dir)
                .into_iter()
                .filter_map(Result::ok)
                .map(|e| e.into_path())
                .filter(|p| {
                    p.is_file()
                        && p.extension().is_some_and(|e| {
                            e.eq_ignore_ascii_case("cwf") || e.eq_ignore_ascii_case("pnml")
                        })
                })
                .collect();
            files.sort();
            let results: Vec<Result<NetOutcome, String>> = files
                .par_iter()
                .map(|f| {
                    let cnet = load(f, config.mode)?;
                    if let Some(v) = validate(cnet.net()).first() {
                        return Err(format!("{}: {v}", f.display()));
                    }
                    Ok(NetOutcome::new(&cnet, &reduce(&cnet)))
                })
                .collect();
            let mut outcomes = Vec::new();
            for r in results {
                match r {
                    Ok(o) => outcomes.push(o),
                    Err(e) => writeln!(err, "skipped {e}").map_err(io)?,
                }
            }
            let report = emit_report(&outcomes);
            let text = match config.report {
                ReportFormat::Text => &report.text,
                ReportFormat::Csv => &report.csv,
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` and runs, printing to the process streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&config, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let config = RunConfig::try_parse_from(std::iter::once("cwfnet").chain(args.iter().copied()))
            .expect("valid arguments");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&config, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn check_and_summarize_small_loop() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("small-loop.cwf");
        fs::write(&path, emit_native(&models::small_loop_colored())).unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = run_args(&["check", p]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("SOUND (merge=1 iteration=1 shortcut=1 d-shortcut=2)"), "{out}");
        let (_, out, _) = run_args(&["summarize", p]);
        // x may grow by one per round up to 3: 4 + 3 + 2 + 1 pairs.
        assert_eq!(out.lines().count(), 10);
        let (_, out, _) = run_args(&["equiv", p]);
        assert!(out.starts_with("equivalent"), "{out}");
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (code, _, err) = run_args(&["check", "/nonexistent/x.cwf"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn cap_exceeded_has_its_own_code() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ins.cwf");
        fs::write(&path, emit_native(&models::insurance())).unwrap();
        let (code, out, _) = run_args(&["oracle", "--cap", "3", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_CAP, "{out}");
    }
}
