//! Command-line front end: build catalog netlists, simulate them against
//! stimuli, print truth tables, verify against the reference models, report
//! cost metrics, and run physical cell layouts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qca::behavioral::{simulate, SimOptions};
use qca::cell::{build_primitive, CellEngine, EngineParams, PRIMITIVE_NAMES};
use qca::circuits::{build, CircuitHandle, CATALOG_NAMES};
use qca::metrics::{latency_matches_reference, netlist_metrics, render_csv, render_table};
use qca::oracle::{
    cff_truth_points, cpg_truth_points, dcc_truth_points, mux21_truth_points,
    run_full_verification, verify_truth_table, xnor_truth_points, TruthDomainPoint,
};
use qca::textio::{
    parse_layout, parse_netlist, parse_stimuli, render_netlist, trace_to_csv, trace_to_vcd,
};
use qca::trace::Stimuli;

#[derive(Parser)]
#[command(name = "qca", about = "Clocked QCA circuit toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a catalog circuit and print its netlist.
    Build {
        /// Catalog name, e.g. `cff` or `counter_shift:3`.
        circuit: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate a netlist (catalog name or netlist file) against stimuli.
    Simulate {
        /// Catalog name or path to a netlist file.
        circuit: String,
        /// Stimuli table file (header row of signal names, one 0/1 row
        /// per cycle). CLK may be omitted; it defaults to a square wave.
        #[arg(short, long)]
        stimuli: Option<PathBuf>,
        /// Number of clock cycles (4 ticks each). Defaults to the
        /// stimulus length.
        #[arg(short, long)]
        cycles: Option<usize>,
        /// Start all state from 0 instead of undriven X.
        #[arg(long)]
        init_zero: bool,
        /// Emit VCD instead of CSV.
        #[arg(long)]
        vcd: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the steady-state truth table of a circuit, checked against
    /// its reference model.
    Truthtable {
        /// One of: xnor, mux21, cff, cpg, dcc.
        circuit: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Verify circuits against the independent reference models.
    Verify {
        /// Verify the whole catalog.
        #[arg(long, conflicts_with = "circuit")]
        all: bool,
        /// A single catalog circuit to verify.
        circuit: Option<String>,
        /// Seed for the randomized stimuli (overrides QCA_SEED).
        #[arg(long)]
        seed: Option<u64>,
        /// Line-oriented machine output instead of the text report.
        #[arg(long)]
        machine: bool,
    },
    /// Cost metrics of catalog circuits.
    Metrics {
        /// Circuits to report on; defaults to the whole catalog.
        circuits: Vec<String>,
        /// Emit CSV instead of the aligned table.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Relax a physical cell layout under the zone clock.
    LayoutSim {
        /// Built-in primitive name or path to a layout file.
        layout: String,
        /// Stimuli table file (one row per cycle).
        #[arg(short, long)]
        stimuli: Option<PathBuf>,
        /// Quarter-cycle ticks to run.
        #[arg(short, long, default_value_t = 8)]
        ticks: usize,
        /// Emit VCD instead of CSV.
        #[arg(long)]
        vcd: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn emit(out: &OutputArgs, content: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn load_circuit(name: &str) -> Result<(String, qca::netlist::GateNetlist, Option<CircuitHandle>)> {
    if Path::new(name).is_file() {
        let text = fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
        let net = parse_netlist(&text).with_context(|| format!("parsing {name}"))?;
        let report = qca::netlist::validate_netlist(&net);
        if !report.is_ok() {
            bail!("netlist violates the clocking discipline:\n{report}");
        }
        Ok((name.to_string(), net, None))
    } else {
        let handle = build(name)
            .with_context(|| format!("`{name}` is neither a file nor a catalog circuit"))?;
        Ok((handle.name.clone(), handle.netlist.clone(), Some(handle)))
    }
}

fn seed_from(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| std::env::var("QCA_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0x51C4)
}

fn truth_points(circuit: &str) -> Result<(Vec<TruthDomainPoint>, SimOptions)> {
    let zero = SimOptions { init_zero: true };
    Ok(match circuit {
        "xnor" => (xnor_truth_points(), SimOptions::default()),
        "mux21" => (mux21_truth_points(), SimOptions::default()),
        "cff" => (cff_truth_points(), zero),
        "cpg" => (cpg_truth_points(), SimOptions::default()),
        "dcc" => (dcc_truth_points(), SimOptions::default()),
        other => bail!(
            "no steady-state truth table for `{other}` (available: xnor, mux21, cff, cpg, dcc)"
        ),
    })
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Build { circuit, out } => {
            let handle = build(&circuit).with_context(|| {
                format!("unknown circuit `{circuit}` (catalog: {})", CATALOG_NAMES.join(", "))
            })?;
            emit(&out, &render_netlist(&handle.netlist))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { circuit, stimuli, cycles, init_zero, vcd, out } => {
            let (_, net, _) = load_circuit(&circuit)?;
            let stim = match &stimuli {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    parse_stimuli(&text)?
                }
                None => Stimuli::new(),
            };
            let n_cycles = cycles
                .or_else(|| stim.inputs().values().map(|v| v.len()).min())
                .context("pass --cycles when no stimuli file is given")?;
            let trace = simulate(&net, &stim, n_cycles, SimOptions { init_zero })?;
            let text = if vcd { trace_to_vcd(&trace, &circuit) } else { trace_to_csv(&trace) };
            emit(&out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Truthtable { circuit, out } => {
            let handle = build(&circuit)?;
            let (points, opts) = truth_points(&circuit)?;
            let report = verify_truth_table(&handle, &points, opts)?;
            let mut text = String::new();
            for check in &report.checks {
                let verdict = if check.pass { "ok" } else { "MISMATCH" };
                text.push_str(&format!("{:<44} [{verdict}] {}\n", check.label, check.detail));
            }
            text.push_str(&format!(
                "{}: {}/{} rows as modeled\n",
                circuit,
                report.checks.len() - report.n_failed(),
                report.checks.len()
            ));
            emit(&out, &text)?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Verify { all, circuit, seed, machine } => {
            let seed = seed_from(seed);
            let reports = if all || circuit.is_none() {
                run_full_verification(seed)?
            } else {
                let name = circuit.unwrap();
                run_full_verification(seed)?
                    .into_iter()
                    .filter(|r| r.circuit == name)
                    .collect::<Vec<_>>()
            };
            if reports.is_empty() {
                bail!("nothing to verify (unknown circuit?)");
            }
            let mut ok = true;
            for r in &reports {
                ok &= r.passed();
                if machine {
                    print!("{}", r.render_machine());
                } else {
                    print!("{r}");
                }
            }
            if !machine {
                let total: usize = reports.iter().map(|r| r.checks.len()).sum();
                let failed: usize = reports.iter().map(|r| r.n_failed()).sum();
                println!(
                    "verification {}: {}/{} checks passed (seed {seed})",
                    if ok { "PASSED" } else { "FAILED" },
                    total - failed,
                    total
                );
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Metrics { circuits, csv, out } => {
            let names: Vec<String> = if circuits.is_empty() {
                ["xnor", "mux21", "jk", "cff", "ram1", "cpg", "dcc", "ecff"]
                    .iter()
                    .map(|s| s.to_string())
                    .chain((2..=3).map(|n| format!("counter_shift:{n}")))
                    .collect()
            } else {
                circuits
            };
            let mut records = Vec::new();
            for name in &names {
                let handle = build(name)?;
                let record = netlist_metrics(&handle);
                if latency_matches_reference(&record) == Some(false) {
                    bail!("latency of `{name}` deviates from the reference figure");
                }
                records.push(record);
            }
            let text = if csv { render_csv(&records) } else { render_table(&records) };
            emit(&out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::LayoutSim { layout, stimuli, ticks, vcd, out } => {
            let cell_layout = if Path::new(&layout).is_file() {
                let text = fs::read_to_string(&layout)
                    .with_context(|| format!("reading {layout}"))?;
                parse_layout(&text)?
            } else {
                build_primitive(&layout).with_context(|| {
                    format!(
                        "`{layout}` is neither a file nor a primitive ({})",
                        PRIMITIVE_NAMES.join(", ")
                    )
                })?
            };
            let stim = match &stimuli {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    parse_stimuli(&text)?
                }
                None => Stimuli::new(),
            };
            let engine = CellEngine::new(cell_layout, EngineParams::default())?;
            let run = engine.run(&stim, ticks)?;
            let text =
                if vcd { trace_to_vcd(&run.logic, "layout") } else { trace_to_csv(&run.logic) };
            emit(&out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
