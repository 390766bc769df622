use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinnet::analysis::{
    find_peaks, geary_permutation_null, geary_table_with, position_group_stats, similarity_grid,
    Subset, TimeSelector,
};
use spinnet::dynamics::DEFAULT_SAMPLES;
use spinnet::exec::Exec;
use spinnet::experiment::{grid_configs, run, InitialSpec, NetworkSelector, Run, RunConfig};
use spinnet::hamiltonian::{build_hamiltonian, CouplingKind, CouplingMode};
use spinnet::ingest::{load_dataset, DataFormat, Parameter};
use spinnet::output::{self, fmt_float};
use spinnet::topology::NodeId;
use spinnet::Error;

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

const AFTER_HELP: &str = "\
Networks:
  max-lengths | min-max | mid-lengths   built-in 8-node test networks
  chimera:<rows>x<cols>                  full Chimera graph
  file:<path>                            network JSON as written by `network --format json`

Exit codes:
  0  success
  1  runtime error (no-peak, zero-variance, malformed input file, I/O), cause printed to stderr
  2  usage error (unknown subcommand, flag, network, coupling or selector)";

#[derive(Parser)]
#[command(name = "spinnet", version, about = "Single-excitation spin network simulator", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output file (directory for `reproduce`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Time samples over [0, 1/J_min].
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES, value_parser = parse_samples)]
    samples: usize,
    /// Seed for permutation tests.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn parse_samples(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("expected an integer >= 2, got {s:?}")),
    }
}

fn parse_j0(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|&j| j > 0.0 && j <= 1.0)
        .ok_or_else(|| format!("J0 must lie in (0, 1], got {s:?}"))
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, alias = "kind", value_name = "NETWORK")]
    network: NetworkSelector,
    #[arg(long, default_value = "constant")]
    coupling: CouplingKind,
    #[arg(long, default_value_t = 1.0, value_parser = parse_j0)]
    j0: f64,
    /// localized[:<label>] or superposition; labels are canonical indices for file networks.
    #[arg(long, default_value = "localized")]
    initial: InitialSpec,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write the fidelity trace.
    Simulate(SimArgs),
    /// First and maximum fidelity peaks, injection node excluded.
    Peaks(SimArgs),
    /// Edge similarities at a selected time.
    Similarity {
        #[command(flatten)]
        sim: SimArgs,
        /// first-peak, max-peak or t=<value>
        #[arg(long, default_value = "first-peak")]
        at: TimeSelector,
    },
    /// Geary's C of qubit parameters over a network.
    Geary {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "chimera:16x16")]
        network: NetworkSelector,
        #[arg(long)]
        param: Option<Parameter>,
        #[arg(long)]
        subset: Option<Subset>,
        /// Also report a permutation null with this many shuffles (stderr).
        #[arg(long)]
        shuffles: Option<usize>,
    },
    /// Parameter summaries by position within the unit cell.
    Positions {
        #[arg(long)]
        data: PathBuf,
    },
    /// Write a network (and optionally its coupling matrix).
    Network {
        #[arg(long, alias = "kind", value_name = "NETWORK")]
        network: NetworkSelector,
        #[arg(long)]
        with_hamiltonian: bool,
        #[arg(long, default_value = "constant")]
        coupling: CouplingKind,
        #[arg(long, default_value_t = 1.0, value_parser = parse_j0)]
        j0: f64,
    },
    /// Run the 3 x 2 x 2 experiment grid into a directory tree.
    Reproduce,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn exec_of(g: &Global) -> Exec {
    if g.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn with_output(
    out: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> Result<(), Error>,
) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn simulate(sim: &SimArgs, g: &Global) -> Result<Run, Error> {
    let cfg = RunConfig {
        network: sim.network.clone(),
        coupling: CouplingMode::new(sim.coupling, sim.j0)?,
        initial: sim.initial,
        samples: g.samples,
    };
    let r = run(&cfg, exec_of(g))?;
    report_metadata(&r);
    Ok(r)
}

fn report_metadata(r: &Run) {
    let m = &r.metadata;
    eprintln!(
        "network={} nodes={} edges={} coupling={} j0={} initial={} J_min={} t_max={} samples={}",
        m.network,
        r.network.len(),
        r.network.edges().len(),
        m.coupling,
        fmt_float(m.j0),
        m.initial,
        fmt_float(m.j_min),
        fmt_float(m.t_max),
        m.samples
    );
}

fn write_trace(r: &Run, format: Format, w: &mut dyn Write) -> Result<(), Error> {
    match format {
        Format::Csv => output::write_trace_csv(&r.trace, r.labels(), w),
        Format::Json => output::write_trace_json(&r.trace, r.labels(), &r.metadata, w),
    }
}

fn write_peaks(r: &Run, format: Format, w: &mut dyn Write) -> Result<(), Error> {
    let report = find_peaks(&r.trace, r.trace.initial().injection_site())?.into_result()?;
    match format {
        Format::Csv => output::write_peaks_csv(&report, r.labels(), w),
        Format::Json => output::write_peaks_json(&report, r.labels(), w),
    }
}

fn write_similarity(
    r: &Run,
    at: TimeSelector,
    format: Format,
    w: &mut dyn Write,
) -> Result<(), Error> {
    let grid = similarity_grid(&r.network, &r.trace, at)?;
    eprintln!("similarity at {} (t={})", at, fmt_float(grid.at.time));
    match format {
        Format::Csv => output::write_similarity_csv(&grid, w),
        Format::Json => output::write_similarity_json(&grid, w),
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    let g = &cli.global;
    let out = g.out.as_deref();
    match &cli.command {
        Command::Simulate(sim) => {
            let r = simulate(sim, g)?;
            with_output(out, |w| write_trace(&r, g.format, w))
        }
        Command::Peaks(sim) => {
            let r = simulate(sim, g)?;
            with_output(out, |w| write_peaks(&r, g.format, w))
        }
        Command::Similarity { sim, at } => {
            let r = simulate(sim, g)?;
            with_output(out, |w| write_similarity(&r, *at, g.format, w))
        }
        Command::Geary {
            data,
            network,
            param,
            subset,
            shuffles,
        } => {
            let dataset = load_dataset(data, DataFormat::from_path(data))?;
            let net = network.load()?;
            let table = geary_table_with(&dataset, &net, exec_of(g))?;
            let keep = |c: &spinnet::analysis::GearyResult| {
                param.is_none_or(|p| p == c.parameter) && subset.is_none_or(|s| s == c.subset)
            };
            eprintln!(
                "dataset={} qubits={} network={} nodes={}",
                dataset.source(),
                dataset.len(),
                network,
                net.len()
            );
            if let Some(m) = shuffles {
                for p in Parameter::ALL
                    .into_iter()
                    .filter(|&p| param.is_none_or(|q| q == p))
                {
                    for s in Subset::ALL
                        .into_iter()
                        .filter(|&s| subset.is_none_or(|q| q == s))
                    {
                        let edges: Vec<(NodeId, NodeId)> = net
                            .edges()
                            .iter()
                            .filter(|e| s.admits(e.class))
                            .map(|e| (e.a, e.b))
                            .collect();
                        let null = geary_permutation_null(
                            &dataset.values(p),
                            &edges,
                            *m,
                            g.seed,
                            exec_of(g),
                        )?;
                        eprintln!(
                            "null {p}/{s}: mean={} std_error={} shuffles={}",
                            fmt_float(null.mean),
                            fmt_float(null.std_error),
                            null.shuffles
                        );
                    }
                }
            }
            with_output(out, |w| match g.format {
                Format::Csv => output::write_geary_csv(&table, keep, w),
                Format::Json => output::write_geary_json(&table, keep, w),
            })
        }
        Command::Positions { data } => {
            let dataset = load_dataset(data, DataFormat::from_path(data))?;
            let stats = position_group_stats(&dataset);
            with_output(out, |w| match g.format {
                Format::Csv => output::write_positions_csv(&stats, w),
                Format::Json => output::write_json(&stats, w),
            })
        }
        Command::Network {
            network,
            with_hamiltonian,
            coupling,
            j0,
        } => {
            let net = network.load()?;
            let h = if *with_hamiltonian {
                Some(build_hamiltonian(&net, CouplingMode::new(*coupling, *j0)?)?)
            } else {
                None
            };
            eprintln!(
                "network={} nodes={} edges={}",
                network,
                net.len(),
                net.edges().len()
            );
            with_output(out, |w| match g.format {
                Format::Csv => output::write_network_csv(&net, w),
                Format::Json => output::write_network_json(&net, h.as_ref(), w),
            })
        }
        Command::Reproduce => reproduce(g),
    }
}

/// Writes `<out>/<network>/network.json` and, per cell,
/// `<out>/<network>/<coupling>/<initial>/{trace,peaks,similarity}.<ext>`,
/// plus an `index.csv` summarizing every cell.
fn reproduce(g: &Global) -> Result<(), Error> {
    let root = g
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("spinnet-out"));
    let cfgs = grid_configs(g.samples);
    let exec = exec_of(g);
    let runs: Vec<Result<Run, Error>> =
        exec.map_indexed(cfgs.len(), |k| run(&cfgs[k], Exec::Sequential));
    let mut index =
        String::from("network,coupling,initial,j_min,t_max,first_peak_t,first_peak_node\n");
    for r in runs {
        let r = r?;
        report_metadata(&r);
        let m = &r.metadata;
        let net_dir = root.join(&m.network);
        let initial = if m.initial == "superposition" {
            "superposition"
        } else {
            "localized"
        };
        let dir = net_dir.join(&m.coupling).join(initial);
        fs::create_dir_all(&dir)?;
        with_output(Some(&net_dir.join("network.json")), |w| {
            output::write_network_json(&r.network, None, w)
        })?;
        let ext = g.format.ext();
        with_output(Some(&dir.join(format!("trace.{ext}"))), |w| {
            write_trace(&r, g.format, w)
        })?;
        let peak = find_peaks(&r.trace, r.trace.initial().injection_site())?;
        let (pt, pn) = match peak.report() {
            Some(p) => {
                with_output(Some(&dir.join(format!("peaks.{ext}"))), |w| {
                    write_peaks(&r, g.format, w)
                })?;
                with_output(Some(&dir.join(format!("similarity.{ext}"))), |w| {
                    write_similarity(&r, TimeSelector::FirstPeak, g.format, w)
                })?;
                (fmt_float(p.t_first), r.labels()[p.node_first].to_string())
            }
            None => ("none".to_string(), String::new()),
        };
        index.push_str(&format!(
            "{},{},{},{},{},{pt},{pn}\n",
            m.network,
            m.coupling,
            m.initial,
            fmt_float(m.j_min),
            fmt_float(m.t_max)
        ));
    }
    fs::write(root.join("index.csv"), index)?;
    eprintln!("wrote {}", root.display());
    Ok(())
}
