use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::energy::{inertial_analysis, landauer_context, mems_density, DragModel, InertialModel};
use crate::gates::DualRailValue;

use super::render::{chain_frames, lock_frames, write_frames};
use super::{CliError, Loaded, ReverseResult, RunResult, ISOLATION_BOUND};

#[derive(Debug, Parser)]
#[command(name = "linklogic", version, about = "Simulate mechanical logic built from links and rotary joints")]
pub struct Cli {
    /// Emit one JSON record per line instead of aligned text.
    #[arg(long, global = true)]
    pub json_lines: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a test vector through a netlist.
    Run {
        file: PathBuf,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        cycles: Option<usize>,
        /// Write the element trace as JSON lines to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the truth table of a combinational netlist.
    TruthTable { file: PathBuf },
    /// Validate the clock, the netlist and the force-isolation bound.
    Check { file: PathBuf },
    /// Recover inputs from outputs, or run a chain forward and back.
    Reverse {
        file: PathBuf,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        cycles: Option<usize>,
    },
    /// Energy, inertia and density estimates.
    Energy {
        #[command(subcommand)]
        model: EnergyCommand,
    },
    /// Write SVG frames of the lock states or of a chain running forward and back.
    Render {
        /// Netlist with a single chain, or the source of geometry overrides with --lock.
        file: Option<PathBuf>,
        #[arg(long)]
        lock: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        cycles: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EnergyCommand {
    /// Drag dissipation per joint and per operation.
    Drag {
        #[arg(long, default_value_t = DragModel::default().k_rd)]
        k_rd: f64,
        #[arg(long, default_value_t = DragModel::default().joints_per_op)]
        joints: u32,
        #[arg(long, default_value_t = DragModel::default().phi)]
        phi: f64,
        #[arg(long, default_value_t = 100e6)]
        frequency: f64,
    },
    /// Peak velocity, acceleration, force and joint deflection.
    Inertia {
        #[arg(long, default_value_t = InertialModel::default().mass)]
        mass: f64,
        #[arg(long, default_value_t = InertialModel::default().amplitude)]
        amplitude: f64,
        #[arg(long, default_value_t = InertialModel::default().frequency)]
        frequency: f64,
        #[arg(long, default_value_t = InertialModel::default().k_lateral)]
        k_lateral: f64,
    },
    /// kT and kT ln 2, with the drag energy for comparison.
    Landauer {
        #[arg(long, default_value_t = 300.0)]
        temperature: f64,
    },
    /// Transistor equivalents of a die tiled with cells.
    Mems {
        #[arg(long, default_value_t = 2.8e-2)]
        die: f64,
        #[arg(long, default_value_t = 640e-6)]
        cell_w: f64,
        #[arg(long, default_value_t = 1070e-6)]
        cell_h: f64,
        #[arg(long, default_value_t = 2)]
        per_cell: u64,
    },
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Loaded::from_text(&text).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}:{m}", path.display())),
        e => e,
    })
}

/// Pads columns to a common width.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn values_json(m: &BTreeMap<String, DualRailValue>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect())
}

fn json_line(v: Value) -> String {
    format!("{v}\n")
}

fn run_table(result: &RunResult, step_label: &str) -> String {
    let Some(first) = result.steps.first() else {
        return format!("vector {}: empty\n", result.vector);
    };
    let mut header = vec![step_label.to_string()];
    header.extend(first.inputs.keys().cloned());
    header.push("|".into());
    header.extend(first.outputs.keys().cloned());
    let mut rows = vec![header];
    for s in &result.steps {
        let mut row = vec![s.step.to_string()];
        row.extend(s.inputs.values().map(|v| v.to_string()));
        row.push("|".into());
        row.extend(s.outputs.values().map(|v| v.to_string()));
        rows.push(row);
    }
    format!("vector {}\n{}", result.vector, table(&rows))
}

fn run_json(result: &RunResult, step_label: &str) -> String {
    result
        .steps
        .iter()
        .map(|s| {
            json_line(json!({
                "vector": result.vector,
                step_label: s.step,
                "inputs": values_json(&s.inputs),
                "outputs": values_json(&s.outputs),
            }))
        })
        .collect()
}

fn quantities(rows: &[(&str, f64, &str)], json_lines: bool) -> String {
    if json_lines {
        rows.iter()
            .map(|(q, v, u)| json_line(json!({"quantity": q, "value": v, "unit": u})))
            .collect()
    } else {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|(q, v, u)| vec![q.to_string(), format!("{v:.4e}"), u.to_string()])
            .collect();
        table(&rows)
    }
}

fn energy(model: &EnergyCommand, json_lines: bool) -> Result<String, CliError> {
    Ok(match *model {
        EnergyCommand::Drag {
            k_rd,
            joints,
            phi,
            frequency,
        } => {
            let m = DragModel {
                k_rd,
                joints_per_op: joints,
                phi,
            };
            quantities(
                &[
                    ("energy_per_joint", m.energy_per_joint(frequency)?, "J"),
                    ("energy_per_op", m.energy_per_op(frequency)?, "J"),
                    ("energy_time_product", m.energy_time_product()?, "J*s"),
                ],
                json_lines,
            )
        }
        EnergyCommand::Inertia {
            mass,
            amplitude,
            frequency,
            k_lateral,
        } => {
            let r = inertial_analysis(&InertialModel {
                mass,
                amplitude,
                frequency,
                k_lateral,
            })?;
            quantities(
                &[
                    ("v_max", r.v_max, "m/s"),
                    ("a_max", r.a_max, "m/s^2"),
                    ("f_max", r.f_max, "N"),
                    ("deflection", r.deflection, "m"),
                ],
                json_lines,
            )
        }
        EnergyCommand::Landauer { temperature } => {
            let (kt, kt2) = landauer_context(temperature)?;
            let drag = DragModel::default().energy_per_joint(100e6)?;
            quantities(
                &[
                    ("kT", kt, "J"),
                    ("kT_ln2", kt2, "J"),
                    ("drag_per_joint_100MHz", drag, "J"),
                    ("drag_over_kT", drag / kt, "1"),
                ],
                json_lines,
            )
        }
        EnergyCommand::Mems {
            die,
            cell_w,
            cell_h,
            per_cell,
        } => {
            let n = mems_density(die, cell_w, cell_h, per_cell)?;
            if json_lines {
                json_line(json!({"quantity": "transistor_equivalents", "value": n, "unit": "1"}))
            } else {
                table(&[vec!["transistor_equivalents".into(), n.to_string()]])
            }
        }
    })
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let jl = cli.json_lines;
    match &cli.command {
        Command::Run {
            file,
            vector,
            cycles,
            trace,
        } => {
            let loaded = load(file)?;
            let names = match vector {
                Some(v) => vec![v.clone()],
                None => loaded.vector_names(false),
            };
            if names.is_empty() {
                return Err(CliError::Validation(format!("{} has no input test vectors", file.display())));
            }
            let mut out = String::new();
            let mut traces = String::new();
            let label = if loaded.doc.is_sequential() { "cycle" } else { "step" };
            for name in &names {
                let (result, t) = loaded.run(Some(name), *cycles)?;
                out.push_str(&if jl { run_json(&result, label) } else { run_table(&result, label) });
                traces.push_str(&t.to_json_lines());
            }
            if let Some(path) = trace {
                fs::write(path, traces).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(out)
        }
        Command::TruthTable { file } => {
            let t = load(file)?.truth_table()?;
            let b = |v: &bool| if *v { "1".to_string() } else { "0".to_string() };
            if jl {
                let out = t
                    .rows
                    .iter()
                    .map(|(i, o)| {
                        let ins: serde_json::Map<String, Value> =
                            t.inputs.iter().zip(i).map(|(n, v)| (n.clone(), Value::String(b(v)))).collect();
                        let outs: serde_json::Map<String, Value> =
                            t.outputs.iter().zip(o).map(|(n, v)| (n.clone(), Value::String(b(v)))).collect();
                        json_line(json!({"inputs": ins, "outputs": outs}))
                    })
                    .collect();
                return Ok(out);
            }
            let mut header = t.inputs.clone();
            header.push("|".into());
            header.extend(t.outputs.iter().cloned());
            let mut rows = vec![header];
            for (i, o) in &t.rows {
                let mut r: Vec<String> = i.iter().map(b).collect();
                r.push("|".into());
                r.extend(o.iter().map(b));
                rows.push(r);
            }
            Ok(table(&rows))
        }
        Command::Check { file } => {
            let report = load(file)?.check()?;
            let passed = report.passed();
            let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
            let iso_ok = report.isolation <= ISOLATION_BOUND;
            let out = if jl {
                let mut s = String::new();
                if let Some(c) = &report.clock {
                    s.push_str(&json_line(json!({
                        "check": "clock", "passed": c.passed, "overlap": c.overlap, "dwell": c.dwell,
                        "failures": c.failures,
                    })));
                }
                s.push_str(&json_line(json!({
                    "check": "netlist", "passed": true, "rails": report.rails,
                    "elements": report.elements, "cells": report.cells,
                })));
                s.push_str(&json_line(json!({
                    "check": "isolation", "passed": iso_ok, "max_cells": report.isolation,
                    "bound": ISOLATION_BOUND,
                })));
                s
            } else {
                let mut rows = Vec::new();
                if let Some(c) = &report.clock {
                    rows.push(vec!["clock".to_string(), c.to_string()]);
                }
                rows.push(vec![
                    "netlist".into(),
                    format!("PASS rails={} elements={} cells={}", report.rails, report.elements, report.cells),
                ]);
                rows.push(vec![
                    "isolation".into(),
                    format!("{} max_cells={} bound={ISOLATION_BOUND}", verdict(iso_ok), report.isolation),
                ]);
                rows.push(vec!["result".into(), verdict(passed).into()]);
                table(&rows)
            };
            if !passed {
                return Err(CliError::Validation(format!(
                    "check failed: {}",
                    out.lines().filter(|l| l.contains("FAIL") || l.contains("false")).collect::<Vec<_>>().join("; ")
                )));
            }
            Ok(out)
        }
        Command::Reverse { file, vector, cycles } => {
            let loaded = load(file)?;
            match loaded.reverse(vector.as_deref(), *cycles)? {
                ReverseResult::Table(r) => Ok(if jl { run_json(&r, "step") } else { run_table(&r, "step") }),
                ReverseResult::Chain { trip, trace } => {
                    let outs: Vec<String> = trip.outputs.iter().map(|v| v.to_string()).collect();
                    let out = if jl {
                        let mut s = trace.to_json_lines();
                        s.push_str(&json_line(json!({
                            "outputs": outs, "events": trip.forward.len(), "restored": trip.restored,
                        })));
                        s
                    } else {
                        table(&[
                            vec!["outputs".into(), outs.join(",")],
                            vec!["events".into(), trip.forward.len().to_string()],
                            vec!["restored".into(), if trip.restored { "yes" } else { "no" }.into()],
                        ])
                    };
                    if !trip.restored {
                        return Err(CliError::Simulation("reverse run did not restore the initial state".into()));
                    }
                    Ok(out)
                }
            }
        }
        Command::Energy { model } => Ok(energy(model, jl)?),
        Command::Render {
            file,
            lock,
            out,
            vector,
            cycles,
        } => {
            let frames = if *lock {
                let geom = match file {
                    Some(f) => load(f)?.doc.geometry(),
                    None => Default::default(),
                };
                lock_frames(&geom)
            } else {
                let Some(f) = file else {
                    return Err(CliError::Validation("render needs a netlist file or --lock".into()));
                };
                let loaded = load(f)?;
                let trip = loaded.chain_round_trip(vector.as_deref(), *cycles)?;
                let steps: Vec<_> = trip.forward.iter().chain(&trip.backward).cloned().collect();
                chain_frames(&loaded.doc.geometry(), &trip.initial, &steps)
            };
            let paths = write_frames(out, &frames).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            let text = paths
                .iter()
                .map(|p| {
                    if jl {
                        json_line(json!({"frame": p.display().to_string()}))
                    } else {
                        format!("{}\n", p.display())
                    }
                })
                .collect();
            Ok(text)
        }
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let summary: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let _ = writeln!(stderr, "error[usage]: {}", summary.join(" ").trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if stdout.write_all(out.as_bytes()).is_err() {
                return 5;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}
