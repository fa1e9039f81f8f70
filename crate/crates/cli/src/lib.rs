//! Command-line front end for the factory simulator.
//!
//! Exit codes: 0 when everything requested passed, 1 when a check failed or a
//! simulation could not complete, 2 on bad arguments or config files.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use msd_core::circuits::{
    catalog, simulate_circuit, undetected_error_sets, verify_circuit_equivalence, verify_equivalence, CircuitError,
    CircuitKind, CircuitNoise,
};
use msd_core::factory::{
    simulate_factory, sweep, sweep_configs, ConsumptionPrefactor, DistanceSet, FactoryConfig, FactoryError,
    FactoryReport, Family, Level1Cache, SweepRanges,
};
use msd_core::gadgets::{verify_gadget, GadgetKind};
use msd_core::noise::{Distances, PhysicalNoise};
use msd_core::pauli::{PauliProduct, Rotation};
use msd_core::reference::{relative_deviation, ReferenceRow, ReferenceTable, CYCLES_BAND, P_OUT_BAND};
use serde::Serialize;
use thiserror::Error;

pub mod config;
pub mod output;

pub use config::{load_config, parse_config};
pub use output::{emit, parse_csv, CsvRow, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{origin}:{line}: {}", located(field, message))]
    Config {
        origin: String,
        line: usize,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Factory(#[from] FactoryError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn located(field: &str, message: &str) -> String {
    if field.is_empty() {
        message.to_string()
    } else {
        format!("{field}: {message}")
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Config { .. } => 2,
            CliError::Factory(
                FactoryError::UnknownFamily(_)
                | FactoryError::MissingLevel2(_)
                | FactoryError::MissingBlockCount(_)
                | FactoryError::UnexpectedLevel2(_)
                | FactoryError::Noise(_),
            ) => 2,
            CliError::Circuit(
                CircuitError::UnknownKind(_) | CircuitError::NoiseSpec(_) | CircuitError::NoiseRange(_),
            ) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "msd", version, about = "Magic state distillation factory simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one distillation circuit under circuit-level noise.
    Circuit(CircuitArgs),
    /// Simulate factories given on the command line or in a config file.
    Factory(FactoryArgs),
    /// Regenerate a reference table and compare it row by row.
    Table(TableArgs),
    /// Search a distance grid for the cheapest factories below a target error.
    Sweep(SweepArgs),
    /// Check circuit identities, undetected-error counts and gadgets.
    Verify,
}

#[derive(Debug, Args)]
pub struct CircuitArgs {
    /// identity16, 15to1, 20to4, identity15_4q, 8toccz or ccz7.
    #[arg(long)]
    pub kind: CircuitKind,
    /// z:P, pauli:P or coherent:RADIANS.
    #[arg(long, default_value = "z:1e-4")]
    pub noise: CircuitNoise,
    /// Also count undetected Z-error sets of this size.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn parse_distances(s: &str) -> Result<Distances, String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, z, m] => Distances::new(x, z, m).map_err(|e| e.to_string()),
        _ => Err(format!("expected dX,dZ,dm, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct FactoryArgs {
    /// TOML file listing protocols; replaces the per-protocol flags.
    #[arg(long, conflicts_with_all = ["family", "d", "d2", "n_l1", "pphys", "ct", "consumption"])]
    pub config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub family: Option<Family>,
    /// Level-1 distances dX,dZ,dm.
    #[arg(long, value_parser = parse_distances, required_unless_present = "config")]
    pub d: Option<Distances>,
    /// Level-2 distances dX2,dZ2,dm2.
    #[arg(long, value_parser = parse_distances)]
    pub d2: Option<Distances>,
    /// Number of level-1 blocks feeding level 2.
    #[arg(long)]
    pub n_l1: Option<u32>,
    /// Physical error rate.
    #[arg(long, required_unless_present = "config")]
    pub pphys: Option<f64>,
    /// Multiplier on the faulty-T-measurement error rate.
    #[arg(long)]
    pub ct: Option<f64>,
    /// Prefactor on output errors picked up while a level-2 state is consumed.
    #[arg(long)]
    pub consumption: Option<ConsumptionPrefactor>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// table1 (faulty T measurements at p_phys) or table2 (at 10 p_phys).
    #[arg(long)]
    pub name: ReferenceTable,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Odd distances given as `a:b` (inclusive) or a comma-separated list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(pub Vec<u32>);

fn parse_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values: Vec<u32> = match s.split_once(':') {
            Some((a, b)) => {
                let (a, b) = (parse_list(a)?, parse_list(b)?);
                match (a.as_slice(), b.as_slice()) {
                    (&[a], &[b]) if a <= b => (a..=b).filter(|v| v % 2 == 1).collect(),
                    _ => return Err(format!("bad range {s:?}")),
                }
            }
            None => parse_list(s)?,
        };
        if let Some(v) = values.iter().find(|v| *v % 2 == 0) {
            return Err(format!("distance {v} is even"));
        }
        if values.is_empty() {
            return Err(format!("no odd values in {s:?}"));
        }
        Ok(Grid(values))
    }
}

/// Comma-separated level-1 block counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts(pub Vec<u32>);

impl std::str::FromStr for Counts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(Counts)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub pphys: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ct: f64,
    /// Largest acceptable output error per state.
    #[arg(long, default_value_t = 1.0)]
    pub target: f64,
    /// Level-1 dX values, as `a:b` (odd values in range) or a list.
    #[arg(long)]
    pub dx: Grid,
    #[arg(long)]
    pub dz: Grid,
    #[arg(long)]
    pub dm: Grid,
    #[arg(long)]
    pub dx2: Option<Grid>,
    #[arg(long)]
    pub dz2: Option<Grid>,
    #[arg(long)]
    pub dm2: Option<Grid>,
    /// Level-1 block counts to try, comma separated.
    #[arg(long)]
    pub n_l1: Option<Counts>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Regular output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(passed) => u8::from(!passed),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command. `Ok(false)` means a check failed.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Circuit(a) => circuit(a, out),
        Command::Factory(a) => factory(a, out),
        Command::Table(a) => table(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::Verify => verify(out),
    }
}

fn noise_text(n: CircuitNoise) -> String {
    match n {
        CircuitNoise::ZOnly(p) => format!("z:{p:e}"),
        CircuitNoise::RandomPauli(p) => format!("pauli:{p:e}"),
        CircuitNoise::Coherent(phi) => format!("coherent:{phi:e}"),
    }
}

#[derive(Serialize)]
struct CircuitSummary {
    kind: CircuitKind,
    noise: String,
    qubits: usize,
    rotations: usize,
    outputs: usize,
    p_out: f64,
    p_fail: f64,
    order: Option<usize>,
    undetected: Option<usize>,
}

fn circuit(a: &CircuitArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let c = catalog(a.kind);
    let outcome = simulate_circuit(&c, a.noise)?;
    let undetected = a.order.map(|k| undetected_error_sets(&c, k)).transpose()?;
    let s = CircuitSummary {
        kind: a.kind,
        noise: noise_text(a.noise),
        qubits: c.n,
        rotations: c.rotations.len(),
        outputs: c.outputs,
        p_out: outcome.p_out,
        p_fail: outcome.p_fail,
        order: a.order,
        undetected,
    };
    match a.format {
        Format::Plain => {
            writeln!(
                out,
                "circuit  {} ({} qubits, {} rotations)",
                s.kind, s.qubits, s.rotations
            )?;
            writeln!(out, "noise    {}", s.noise)?;
            writeln!(
                out,
                "p_out    {:.4e}  (per output state, {} outputs)",
                s.p_out, s.outputs
            )?;
            writeln!(out, "p_fail   {:.4e}", s.p_fail)?;
            if let (Some(k), Some(u)) = (s.order, s.undetected) {
                writeln!(out, "undetected error sets of size {k}: {u}")?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &s)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(&s)?;
            w.flush()?;
        }
    }
    Ok(true)
}

fn factory_configs(a: &FactoryArgs) -> Result<Vec<FactoryConfig>, CliError> {
    if let Some(path) = &a.config {
        return load_config(path);
    }
    let missing = |flag: &str| CliError::Usage(format!("--{flag} is required without --config"));
    let family = a.family.ok_or_else(|| missing("family"))?;
    let d1 = a.d.ok_or_else(|| missing("d"))?;
    let distances = match a.d2 {
        Some(d2) => DistanceSet::two_level(d1, d2, a.n_l1),
        None => DistanceSet {
            n_l1: a.n_l1,
            ..DistanceSet::level1(d1)
        },
    };
    let noise = PhysicalNoise::new(a.pphys.ok_or_else(|| missing("pphys"))?, a.ct.unwrap_or(1.0))
        .map_err(FactoryError::from)?;
    let config = FactoryConfig {
        family,
        distances,
        noise,
        consumption: a.consumption.unwrap_or_default(),
    };
    config.validate()?;
    Ok(vec![config])
}

fn factory(a: &FactoryArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let reports = factory_configs(a)?
        .iter()
        .map(simulate_factory)
        .collect::<Result<Vec<_>, _>>()?;
    emit(&reports, a.format, out)?;
    Ok(true)
}

/// Simulated report next to its reference row.
pub struct RowComparison {
    pub reference: ReferenceRow,
    pub report: FactoryReport,
    pub p_out_ok: bool,
    pub qubits_ok: bool,
    pub cycles_ok: bool,
}

impl RowComparison {
    pub fn passed(&self) -> bool {
        self.qubits_ok && self.cycles_ok && (self.p_out_ok || !self.reference.banded)
    }
}

pub fn compare_table(t: ReferenceTable) -> Result<Vec<RowComparison>, CliError> {
    t.rows()
        .iter()
        .map(|r| {
            let report = simulate_factory(&r.config()?)?;
            Ok(RowComparison {
                reference: *r,
                p_out_ok: relative_deviation(report.p_out, r.p_out).abs() <= P_OUT_BAND,
                qubits_ok: relative_deviation(report.qubits as f64, r.qubits).abs() <= r.qubits_band(),
                cycles_ok: relative_deviation(report.cycles, r.cycles).abs() <= CYCLES_BAND,
                report,
            })
        })
        .collect()
}

fn percent(value: f64, reference: f64) -> String {
    format!("{:+.1}%", 100.0 * relative_deviation(value, reference))
}

fn table(a: &TableArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let rows = compare_table(a.name)?;
    let passed = rows.iter().all(RowComparison::passed);
    if a.format != Format::Plain {
        let reports: Vec<FactoryReport> = rows.into_iter().map(|r| r.report).collect();
        emit(&reports, a.format, out)?;
        return Ok(passed);
    }
    let header = [
        "Protocol",
        "p_phys",
        "c_T",
        "p_out",
        "ref",
        "dev",
        "Qubits",
        "ref",
        "Cycles",
        "ref",
        "Qubitcycles",
        "ref",
        "100 qubits",
        "10,000 qubits",
        "status",
    ];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|c| {
            let (r, s) = (&c.reference, &c.report);
            let dev = percent(s.p_out, r.p_out);
            vec![
                s.protocol.clone(),
                format!("{:e}", r.p_phys),
                format!("{}", r.c_t),
                output::p_out_text(s.p_out),
                output::p_out_text(r.p_out),
                if r.banded { dev } else { format!("({dev})") },
                output::sig(s.qubits as f64, 3),
                output::sig(r.qubits, 3),
                output::sig(s.cycles, 3),
                output::sig(r.cycles, 3),
                output::sig(s.qubitcycles_per_state, 3),
                output::sig(r.qubitcycles, 3),
                output::full_distance_text(s.cost_d3_100, s.d_full_100),
                output::full_distance_text(s.cost_d3_10k, s.d_full_10k),
                if c.passed() { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    out.write_all(output::render_table(&header, &cells).as_bytes())?;
    writeln!(
        out,
        "p_out held to ±{:.0}% on rows without parentheses; qubits ±{:.1}% (±{:.1}% small two-level), cycles ±{:.0}% on all rows",
        100.0 * P_OUT_BAND,
        100.0 * msd_core::reference::QUBITS_BAND,
        100.0 * msd_core::reference::SMALL_TWO_LEVEL_QUBITS_BAND,
        100.0 * CYCLES_BAND
    )?;
    let failed = rows.iter().filter(|c| !c.passed()).count();
    writeln!(
        out,
        "{}: {} of {} rows pass",
        a.name.name(),
        rows.len() - failed,
        rows.len()
    )?;
    Ok(passed)
}

fn run_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let family = a.family;
    let level2 = |v: &Option<Grid>, flag: &str| -> Result<Vec<u32>, CliError> {
        match (family.is_two_level(), v) {
            (true, Some(v)) => Ok(v.0.clone()),
            (true, None) => Err(CliError::Usage(format!("{family} sweeps need --{flag}"))),
            (false, Some(_)) => Err(CliError::Usage(format!("{family} takes no --{flag}"))),
            (false, None) => Ok(Vec::new()),
        }
    };
    let n_l1 = match (family.needs_block_count(), &a.n_l1) {
        (true, Some(v)) => v.0.clone(),
        (true, None) => return Err(CliError::Usage(format!("{family} sweeps need --n-l1"))),
        (false, Some(_)) => return Err(CliError::Usage(format!("{family} takes no --n-l1"))),
        (false, None) => Vec::new(),
    };
    let ranges = SweepRanges {
        dx: a.dx.0.clone(),
        dz: a.dz.0.clone(),
        dm: a.dm.0.clone(),
        dx2: level2(&a.dx2, "dx2")?,
        dz2: level2(&a.dz2, "dz2")?,
        dm2: level2(&a.dm2, "dm2")?,
        n_l1,
    };
    let noise = PhysicalNoise::new(a.pphys, a.ct).map_err(FactoryError::from)?;
    let evaluated = sweep_configs(family, &ranges, noise).len();
    let front = sweep(family, &ranges, noise, a.target, &Level1Cache::default())?;
    if a.format == Format::Plain {
        writeln!(
            out,
            "{evaluated} valid configurations, {} on the Pareto front below p_out = {:e}",
            front.len(),
            a.target
        )?;
    }
    emit(&front, a.format, out)?;
    Ok(true)
}

fn verify(out: &mut dyn Write) -> Result<bool, CliError> {
    let mut all = true;
    let mut report = |name: &str, ok: bool| -> std::io::Result<()> {
        all &= ok;
        writeln!(out, "{} {name}", if ok { "✓" } else { "✗" })
    };
    for kind in [CircuitKind::Identity16, CircuitKind::Identity15FourQubit] {
        let c = catalog(kind);
        report(
            &format!("{kind} ∝ identity"),
            verify_equivalence(c.n, &c.rotations, &[])?,
        )?;
    }
    let fifteen = catalog(CircuitKind::FifteenToOne);
    let target = PauliProduct::z_on(fifteen.n, &[0])
        .and_then(|z| Rotation::new(z, -1))
        .map_err(CircuitError::from)?;
    report(
        "15-to-1 ≡ Z_{-π/8} on its output",
        verify_equivalence(fifteen.n, &fifteen.rotations, &[target])?,
    )?;
    let twenty = simulate_circuit(&catalog(CircuitKind::TwentyToFour), CircuitNoise::ZOnly(0.0))?;
    report(
        "20-to-4 prepares |m̃⟩⊗4 ⊗ |+⟩⊗3 noiselessly",
        twenty.p_out <= 1e-10 && twenty.p_fail <= 1e-10,
    )?;
    report(
        "8-to-CCZ ≡ 7-rotation CCZ",
        verify_circuit_equivalence(&catalog(CircuitKind::EightToCcz), &catalog(CircuitKind::Ccz7))?,
    )?;
    for (kind, order, expected) in [
        (CircuitKind::FifteenToOne, 1, 0),
        (CircuitKind::FifteenToOne, 2, 0),
        (CircuitKind::FifteenToOne, 3, 35),
        (CircuitKind::TwentyToFour, 1, 0),
        (CircuitKind::TwentyToFour, 2, 22),
        (CircuitKind::EightToCcz, 1, 0),
        (CircuitKind::EightToCcz, 2, 28),
    ] {
        let got = undetected_error_sets(&catalog(kind), order)?;
        report(
            &format!("{kind}: {got} undetected error sets of size {order} (expected {expected})"),
            got == expected,
        )?;
    }
    for g in GadgetKind::ALL {
        report(&format!("gadget {g} correct on every branch"), verify_gadget(g))?;
    }
    writeln!(out, "{}", if all { "all checks passed" } else { "some checks FAILED" })?;
    Ok(all)
}
