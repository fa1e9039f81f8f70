//! Report rendering: aligned plain text, CSV and JSON.

use std::io::Write;

use clap::ValueEnum;
use msd_core::factory::FactoryReport;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Csv,
    Json,
}

/// The CSV projection of a [`FactoryReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub protocol: String,
    pub p_phys: f64,
    pub p_out: f64,
    pub qubits: u64,
    pub cycles: f64,
    pub qubitcycles_per_state: f64,
    pub d_full_100: Option<u32>,
    pub cost_d3_100: Option<f64>,
    pub d_full_10k: Option<u32>,
    pub cost_d3_10k: Option<f64>,
}

pub const CSV_HEADER: &str =
    "protocol,p_phys,p_out,qubits,cycles,qubitcycles_per_state,d_full_100,cost_d3_100,d_full_10k,cost_d3_10k";

impl From<&FactoryReport> for CsvRow {
    fn from(r: &FactoryReport) -> Self {
        Self {
            protocol: r.protocol.clone(),
            p_phys: r.p_phys,
            p_out: r.p_out,
            qubits: r.qubits,
            cycles: r.cycles,
            qubitcycles_per_state: r.qubitcycles_per_state,
            d_full_100: r.d_full_100,
            cost_d3_100: r.cost_d3_100,
            d_full_10k: r.d_full_10k,
            cost_d3_10k: r.cost_d3_10k,
        }
    }
}

/// Rounds to `digits` significant digits. Values of 1000 and above get
/// thousands separators.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let rounded: f64 = format!("{x:.*e}", digits.saturating_sub(1)).parse().unwrap_or(x);
    // Rounding can carry into the next decade (9.99 -> 10.0).
    let exp = exp.max(rounded.abs().log10().floor() as i32);
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    if exp < -3 {
        return format!("{x:.*e}", digits.saturating_sub(1));
    }
    let text = format!("{rounded:.decimals$}");
    if decimals > 0 || rounded.abs() < 1000.0 {
        return text;
    }
    let (sign, digits) = text.split_at(usize::from(text.starts_with('-')));
    let mut grouped = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(c);
    }
    format!("{sign}{grouped}")
}

/// `p_out` with two significant digits in scientific notation.
pub fn p_out_text(p: f64) -> String {
    if p == 0.0 {
        "0".into()
    } else {
        format!("{p:.1e}")
    }
}

pub fn full_distance_text(cost: Option<f64>, d: Option<u32>) -> String {
    match (cost, d) {
        (Some(c), Some(d)) => format!("{}d^3 / d={d}", sig(c, 3)),
        _ => "-".into(),
    }
}

/// Left-aligns the first column and right-aligns the rest.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i == 0 {
                s.push_str(&format!("{cell:<w$}"));
            } else {
                s.push_str(&format!("  {cell:>w$}"));
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(&mut header.iter().copied());
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
        out.push('\n');
    }
    out
}

pub fn plain_table(reports: &[FactoryReport]) -> String {
    let header = [
        "Protocol",
        "p_phys",
        "p_out",
        "Qubits",
        "Cycles",
        "Qubitcycles",
        "100 qubits",
        "10,000 qubits",
    ];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.protocol.clone(),
                format!("{:e}", r.p_phys),
                p_out_text(r.p_out),
                sig(r.qubits as f64, 3),
                sig(r.cycles, 3),
                sig(r.qubitcycles_per_state, 3),
                full_distance_text(r.cost_d3_100, r.d_full_100),
                full_distance_text(r.cost_d3_10k, r.d_full_10k),
            ]
        })
        .collect();
    render_table(&header, &rows)
}

pub fn emit(reports: &[FactoryReport], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Plain => out.write_all(plain_table(reports).as_bytes())?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, reports)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER.split(','))?;
            for r in reports {
                w.serialize(CsvRow::from(r))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(CliError::Usage(format!("unexpected CSV header {:?}", header.join(","))));
    }
    Ok(r.deserialize().collect::<Result<Vec<CsvRow>, _>>()?)
}
