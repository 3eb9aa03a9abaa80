//! `pvstab` command-line front end.
//!
//! Exit codes: 0 success, 1 domain verdict outside the implemented theory
//! (inapplicable energy method, unsupported case), 2 invalid input or usage,
//! 3 runtime failure (I/O, consistency check).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::energy::{check_sufficient_stability, StabilityVerdict, EIG_TOL};
use crate::error::Error;
use crate::jsonfmt;
use crate::matrices::dump_matrices;
use crate::scan::{
    export_grid, label_regions, scan_plane_with_threads, write_atomic, ExportFormat, Range, ScanSpec,
};
use crate::spectral::{find_unstable_roots, ModeProblem, Tolerances, Variant};
use crate::state::EquilibriumState;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

const STATE_SCHEMA: &str = r#"state JSON keys: p, v[3], H[3], Hv[3], E (number E1 or [E1, E2?, E3?]), S (default 0),
kappa, epsilon, rho (default 1), a (default 1); constraints v1 = kappa <= 0, H1 = Hv1 = 0,
E2 = epsilon*kappa*Hv3, E3 = -epsilon*kappa*Hv2, 0 < epsilon < 1, epsilon*|v| < 1"#;

#[derive(Debug, Parser)]
#[command(name = "pvstab", version, about = "Stability of a planar plasma-vacuum interface")]
pub struct Cli {
    /// Compact machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for scans.
    #[arg(long, global = true, env = "PV_STAB_THREADS")]
    pub threads: Option<usize>,

    /// JSON file with default settings; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the energy-method sufficient stability condition.
    CheckStability {
        #[command(flatten)]
        input: StateInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growing normal modes for one wave-vector angle.
    Roots {
        #[command(flatten)]
        input: StateInput,
        /// Wave-vector angle in radians.
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<f64>,
        /// h2hat-zero, pcase-2d or static-general-angle; chosen automatically if absent.
        #[arg(long)]
        variant: Option<String>,
        #[command(flatten)]
        tol: TolOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a grid of the (E1, Hv2) plane and label the stability regions.
    Scan {
        #[arg(long = "H3")]
        h3: Option<f64>,
        /// Grid size as E1xH2 point counts, e.g. 100x100.
        #[arg(long)]
        grid: Option<String>,
        /// E1 interval as MIN:MAX.
        #[arg(long, allow_hyphen_values = true)]
        e1_range: Option<String>,
        /// Hv2 interval as MIN:MAX.
        #[arg(long, allow_hyphen_values = true)]
        h2_range: Option<String>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        psi_step: Option<f64>,
        #[command(flatten)]
        tol: TolOverrides,
        /// Output file; the format follows the extension (.csv, .json, .gp).
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv, json or plotscript.
        #[arg(long)]
        format: Option<String>,
    },
    /// Print every system matrix for a state.
    DumpMatrices {
        #[command(flatten)]
        input: StateInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct StateInput {
    /// Path to a state JSON file.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Inline state JSON.
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct TolOverrides {
    #[arg(long)]
    pub tau_tol: Option<f64>,
    #[arg(long)]
    pub r_tol: Option<f64>,
    #[arg(long)]
    pub xi_tol: Option<f64>,
}

/// Settings file. Every key is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "H3")]
    pub h3: Option<f64>,
    pub epsilon: Option<f64>,
    pub grid: Option<String>,
    pub e1_range: Option<[f64; 2]>,
    pub h2_range: Option<[f64; 2]>,
    pub psi_step: Option<f64>,
    pub psi: Option<f64>,
    pub threads: Option<usize>,
    pub tau_tol: Option<f64>,
    pub r_tol: Option<f64>,
    pub xi_tol: Option<f64>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnsupportedCase(_) | Error::CollinearFields(_) | Error::NotPCase => EXIT_DOMAIN,
            Error::Io(_) | Error::ConsistencyViolation { .. } | Error::DegenerateDenominator { .. } => {
                EXIT_RUNTIME
            }
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parse `argv` (including the program name), execute, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            if code == EXIT_INPUT {
                eprintln!("\n{STATE_SCHEMA}");
            }
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match dispatch(&cli, &mut stdout) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == EXIT_INPUT {
                eprintln!("\n{STATE_SCHEMA}");
            }
            f.code
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("invalid config {}: {e}", path.display())))
}

fn read_state(input: &StateInput) -> Result<EquilibriumState, Failure> {
    let text = match (&input.input, &input.state) {
        (Some(p), None) => std::fs::read_to_string(p)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display())))?,
        (None, Some(s)) => s.clone(),
        _ => return Err(Failure::input("give exactly one of --in PATH or --state JSON")),
    };
    let state = EquilibriumState::from_json(&text)?;
    Ok(state.validate()?)
}

fn tolerances(o: &TolOverrides, cfg: &ConfigFile) -> Result<Tolerances, Failure> {
    let d = Tolerances::default();
    let t = Tolerances {
        tau_tol: o.tau_tol.or(cfg.tau_tol).unwrap_or(d.tau_tol),
        r_tol: o.r_tol.or(cfg.r_tol).unwrap_or(d.r_tol),
        xi_tol: o.xi_tol.or(cfg.xi_tol).unwrap_or(d.xi_tol),
    };
    t.validate()?;
    Ok(t)
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::input(format!("grid must look like 100x100, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_interval(s: &str) -> Result<[f64; 2], Failure> {
    let bad = || Failure::input(format!("interval must look like MIN:MAX, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

fn parse_variant(s: &str) -> Result<Variant, Failure> {
    match s {
        "h2hat-zero" | "H2hatZero" => Ok(Variant::H2hatZero),
        "pcase-2d" | "PCase2D" => Ok(Variant::PCase2D),
        "static-general-angle" | "StaticGeneralAngle" => Ok(Variant::StaticGeneralAngle),
        _ => Err(Failure::input(format!("unknown variant {s:?}"))),
    }
}

fn emit(
    out: &mut dyn Write,
    path: Option<&Path>,
    value: &serde_json::Value,
    compact: bool,
) -> Result<(), Failure> {
    let mut text = jsonfmt::to_string(value, !compact);
    text.push('\n');
    match path {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::from(Error::from(e)))?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load_config(cli.config.as_deref())?;
    let threads = cli.threads.or(cfg.threads);
    match &cli.command {
        Command::CheckStability { input, out: path } => {
            let state = read_state(input)?;
            let report = check_sufficient_stability(&state);
            let mut doc = serde_json::to_value(&report).expect("report serializes");
            doc["config"] = json!({ "eig_tol": EIG_TOL, "state": state });
            emit(out, path.as_deref(), &doc, cli.json)?;
            Ok(if report.verdict == StabilityVerdict::Inapplicable {
                EXIT_DOMAIN
            } else {
                EXIT_OK
            })
        }
        Command::Roots {
            input,
            psi,
            variant,
            tol,
            out: path,
        } => {
            let state = read_state(input)?;
            let psi = psi.or(cfg.psi).unwrap_or(0.0);
            let tol = tolerances(tol, &cfg)?;
            let problem = match variant {
                Some(v) => ModeProblem::new(state, psi, parse_variant(v)?)?,
                None => ModeProblem::auto(state, psi)?,
            };
            let roots = find_unstable_roots(&problem, &tol);
            let doc = json!({
                "variant": problem.variant,
                "psi": psi,
                "roots": roots,
                "config": { "psi": psi, "tolerances": tol, "variant": problem.variant, "state": state },
            });
            emit(out, path.as_deref(), &doc, cli.json)?;
            Ok(EXIT_OK)
        }
        Command::DumpMatrices { input, out: path } => {
            let state = read_state(input)?;
            let dump = dump_matrices(&state)?;
            let mut doc = serde_json::to_value(&dump).expect("dump serializes");
            doc["config"] = json!({ "state": state });
            emit(out, path.as_deref(), &doc, cli.json)?;
            Ok(EXIT_OK)
        }
        Command::Scan {
            h3,
            grid,
            e1_range,
            h2_range,
            epsilon,
            psi_step,
            tol,
            out: path,
            format,
        } => {
            let d = ScanSpec::default();
            let (n_e1, n_h2) = match grid.as_deref().or(cfg.grid.as_deref()) {
                Some(g) => parse_grid(g)?,
                None => (d.e1_range.count, d.h2_range.count),
            };
            let e1 = match e1_range {
                Some(s) => parse_interval(s)?,
                None => cfg.e1_range.unwrap_or([d.e1_range.min, d.e1_range.max]),
            };
            let h2 = match h2_range {
                Some(s) => parse_interval(s)?,
                None => cfg.h2_range.unwrap_or([d.h2_range.min, d.h2_range.max]),
            };
            let spec = ScanSpec {
                h3: h3.or(cfg.h3).unwrap_or(d.h3),
                epsilon: epsilon.or(cfg.epsilon).unwrap_or(d.epsilon),
                e1_range: Range::new(e1[0], e1[1], n_e1),
                h2_range: Range::new(h2[0], h2[1], n_h2),
                psi_step: psi_step.or(cfg.psi_step).unwrap_or(d.psi_step),
                tolerances: tolerances(tol, &cfg)?,
            };
            spec.validate()?;
            let fmt = match (format, path) {
                (Some(f), _) => ExportFormat::parse(f)
                    .ok_or_else(|| Failure::input(format!("unknown format {f:?}")))?,
                (None, Some(p)) => ExportFormat::from_path(p).unwrap_or(ExportFormat::Csv),
                (None, None) => ExportFormat::Csv,
            };
            let grid = label_regions(scan_plane_with_threads(&spec, threads)?)?;
            let text = export_grid(&grid, fmt)?;
            let counts: Vec<usize> = (1..=4).map(|k| grid.count_label(k)).collect();
            let config = json!({ "spec": spec, "threads": threads, "format": fmt });
            match path {
                Some(p) => {
                    write_atomic(p, text.as_bytes())?;
                    if fmt == ExportFormat::Csv {
                        let meta = jsonfmt::to_string(&config, true) + "\n";
                        write_atomic(&meta_path(p), meta.as_bytes())?;
                    }
                    let summary = json!({
                        "out": p,
                        "points": grid.cells.len(),
                        "label_counts": counts,
                        "config": config,
                    });
                    if cli.json {
                        emit(out, None, &summary, true)?;
                    } else {
                        let _ = writeln!(
                            out,
                            "wrote {} ({} points; regions 1-4: {:?})",
                            p.display(),
                            grid.cells.len(),
                            counts
                        );
                    }
                }
                None => {
                    out.write_all(text.as_bytes())
                        .map_err(|e| Failure::from(Error::from(e)))?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// Sidecar holding the effective configuration of a CSV export.
pub fn meta_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_interval_parsing() {
        assert_eq!(parse_grid("100x80").unwrap(), (100, 80));
        assert!(parse_grid("100").is_err());
        assert_eq!(parse_interval("-1:2.5").unwrap(), [-1.0, 2.5]);
    }

    #[test]
    fn precedence_flag_over_config() {
        let cfg = ConfigFile {
            tau_tol: Some(1e-6),
            r_tol: Some(1e-7),
            ..Default::default()
        };
        let o = TolOverrides {
            tau_tol: Some(1e-5),
            ..Default::default()
        };
        let t = tolerances(&o, &cfg).unwrap();
        assert_eq!(t.tau_tol, 1e-5);
        assert_eq!(t.r_tol, 1e-7);
        assert_eq!(t.xi_tol, Tolerances::default().xi_tol);
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::UnsupportedCase("x".into())).code, EXIT_DOMAIN);
        assert_eq!(Failure::from(Error::ExpansionViolated(0.1)).code, EXIT_INPUT);
        assert_eq!(Failure::from(Error::Io("x".into())).code, EXIT_RUNTIME);
    }

    #[test]
    fn meta_sidecar_name() {
        assert_eq!(meta_path(Path::new("a/map.csv")), PathBuf::from("a/map.csv.meta.json"));
    }
}
