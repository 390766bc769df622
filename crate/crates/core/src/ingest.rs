//! Per-qubit parameter datasets keyed by native qubit ID.
//!
//! CSV files carry the header `qubit_id,beta,b,gamma,eta`; JSON files are an
//! array of objects with the same keys. Dead qubits are simply absent.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::topology::{EdgeClass, Network, NodeId};

/// Qubits on a full 16x16 Chimera chip.
pub const DEFAULT_CHIP_QUBITS: u32 = 2048;

pub const CSV_HEADER: [&str; 5] = ["qubit_id", "beta", "b", "gamma", "eta"];

/// One of the four fitted single-qubit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    /// Inverse temperature.
    Beta,
    /// Bias.
    B,
    /// Transverse field gain.
    Gamma,
    /// Noise.
    Eta,
}

impl Parameter {
    pub const ALL: [Parameter; 4] = [
        Parameter::Beta,
        Parameter::B,
        Parameter::Gamma,
        Parameter::Eta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Beta => "beta",
            Parameter::B => "b",
            Parameter::Gamma => "gamma",
            Parameter::Eta => "eta",
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown parameter {s:?} (expected beta, b, gamma or eta)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitRecord {
    #[serde(rename = "qubit_id")]
    pub qubit: NodeId,
    pub beta: f64,
    pub b: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl QubitRecord {
    pub fn get(&self, p: Parameter) -> f64 {
        match p {
            Parameter::Beta => self.beta,
            Parameter::B => self.b,
            Parameter::Gamma => self.gamma,
            Parameter::Eta => self.eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitDataset {
    records: BTreeMap<NodeId, QubitRecord>,
    source: String,
}

impl QubitDataset {
    /// Builds a dataset from records in file order; diagnostics name them
    /// `record N`.
    pub fn from_records(
        records: Vec<QubitRecord>,
        source: impl Into<String>,
        chip: u32,
    ) -> Result<Self, IngestError> {
        let locations: Vec<String> = (1..=records.len()).map(|i| format!("record {i}")).collect();
        Self::collect(records, &locations, source.into(), chip)
    }

    fn collect(
        records: Vec<QubitRecord>,
        locations: &[String],
        source: String,
        chip: u32,
    ) -> Result<Self, IngestError> {
        if records.is_empty() {
            return Err(IngestError::Empty(source));
        }
        let mut map = BTreeMap::new();
        for (r, loc) in records.into_iter().zip(locations) {
            if r.qubit.0 >= chip {
                return Err(IngestError::OutOfRange {
                    source_name: source,
                    location: loc.clone(),
                    qubit: r.qubit.0,
                    chip,
                });
            }
            for (name, v) in [
                ("beta", r.beta),
                ("b", r.b),
                ("gamma", r.gamma),
                ("eta", r.eta),
            ] {
                if !v.is_finite() {
                    return Err(IngestError::BadRow {
                        source_name: source,
                        location: loc.clone(),
                        message: format!("{name} is not a finite number"),
                    });
                }
            }
            if map.insert(r.qubit, r).is_some() {
                return Err(IngestError::Duplicate {
                    source_name: source,
                    location: loc.clone(),
                    qubit: r.qubit.0,
                });
            }
        }
        Ok(QubitDataset {
            records: map,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn get(&self, qubit: NodeId) -> Option<&QubitRecord> {
        self.records.get(&qubit)
    }

    pub fn contains(&self, qubit: NodeId) -> bool {
        self.records.contains_key(&qubit)
    }

    /// Records in ascending qubit order.
    pub fn records(&self) -> impl Iterator<Item = &QubitRecord> {
        self.records.values()
    }

    pub fn values(&self, p: Parameter) -> BTreeMap<NodeId, f64> {
        self.records.iter().map(|(&q, r)| (q, r.get(p))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<QubitDataset, IngestError> {
    load_dataset_for_chip(path, format, DEFAULT_CHIP_QUBITS)
}

pub fn load_dataset_for_chip(
    path: &Path,
    format: DataFormat,
    chip: u32,
) -> Result<QubitDataset, IngestError> {
    let source = path.display().to_string();
    let file = File::open(path)?;
    match format {
        DataFormat::Csv => parse_csv(file, &source, chip),
        DataFormat::Json => {
            let mut text = String::new();
            let mut file = file;
            file.read_to_string(&mut text)?;
            parse_json(&text, &source, chip)
        }
    }
}

pub fn parse_csv<R: Read>(reader: R, source: &str, chip: u32) -> Result<QubitDataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(IngestError::BadHeader {
            source_name: source.to_string(),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut records = Vec::new();
    let mut locations = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            IngestError::BadRow {
                source_name: source.to_string(),
                location: format!("line {line}"),
                message: e.to_string(),
            }
        })?;
        let location = format!("line {}", row.position().map(|p| p.line()).unwrap_or(0));
        let bad = |message: String| IngestError::BadRow {
            source_name: source.to_string(),
            location: location.clone(),
            message,
        };
        let qubit: u32 = row[0].parse().map_err(|_| {
            bad(format!(
                "qubit_id {:?} is not a non-negative integer",
                &row[0]
            ))
        })?;
        let mut vals = [0.0; 4];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = &row[k + 1];
            *v = field
                .parse()
                .map_err(|_| bad(format!("{} {:?} is not a number", CSV_HEADER[k + 1], field)))?;
        }
        records.push(QubitRecord {
            qubit: NodeId(qubit),
            beta: vals[0],
            b: vals[1],
            gamma: vals[2],
            eta: vals[3],
        });
        locations.push(location);
    }
    QubitDataset::collect(records, &locations, source.to_string(), chip)
}

pub fn parse_json(text: &str, source: &str, chip: u32) -> Result<QubitDataset, IngestError> {
    let bad = |location: String, message: String| IngestError::BadRow {
        source_name: source.to_string(),
        location,
        message,
    };
    let items: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| {
        bad(
            format!("line {}", e.line()),
            format!("expected a JSON array: {e}"),
        )
    })?;
    let mut records = Vec::with_capacity(items.len());
    let mut locations = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        let location = format!("record {}", i + 1);
        let r: QubitRecord =
            serde_json::from_value(item).map_err(|e| bad(location.clone(), e.to_string()))?;
        records.push(r);
        locations.push(location);
    }
    QubitDataset::collect(records, &locations, source.to_string(), chip)
}

/// Writes the CSV schema with shortest round-trip floats.
pub fn write_csv<W: Write>(data: &QubitDataset, writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in data.records() {
        w.write_record([
            r.qubit.0.to_string(),
            r.beta.to_string(),
            r.b.to_string(),
            r.gamma.to_string(),
            r.eta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(data: &QubitDataset, writer: W) -> Result<(), IngestError> {
    let records: Vec<&QubitRecord> = data.records().collect();
    serde_json::to_writer_pretty(writer, &records).map_err(std::io::Error::from)?;
    Ok(())
}

/// Coverage of a network by a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Dataset qubits that are not nodes of the network.
    pub not_in_network: Vec<NodeId>,
    /// Network nodes without a record (dead qubits).
    pub dead: Vec<NodeId>,
    pub usable_internal: usize,
    pub usable_external: usize,
}

impl ValidationReport {
    pub fn usable_edges(&self) -> usize {
        self.usable_internal + self.usable_external
    }
}

pub fn validate_against(data: &QubitDataset, net: &Network) -> ValidationReport {
    let not_in_network = data
        .records()
        .map(|r| r.qubit)
        .filter(|q| net.index_of(*q).is_none())
        .collect();
    let dead = net
        .nodes()
        .iter()
        .copied()
        .filter(|n| !data.contains(*n))
        .collect();
    let usable = |class| {
        net.edges()
            .iter()
            .filter(|e| e.class == class && data.contains(e.a) && data.contains(e.b))
            .count()
    };
    ValidationReport {
        not_in_network,
        dead,
        usable_internal: usable(EdgeClass::Internal),
        usable_external: usable(EdgeClass::External),
    }
}
