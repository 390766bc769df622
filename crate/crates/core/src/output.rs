//! Deterministic writers for traces, analysis tables and network documents.
//!
//! Every float is rounded to 12 significant digits and printed in its
//! shortest round-trip form, so repeated runs produce byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analysis::{GearyTable, PeakReport, PositionGroupStats, SimilarityGrid};
use crate::dynamics::FidelityTrace;
use crate::error::{Error, TopologyError};
use crate::hamiltonian::HamiltonianMatrix;
use crate::topology::{Edge, EdgeClass, Network, NetworkKind, NodeId};

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// 12 significant digits, shortest representation; scientific notation
/// outside `[1e-4, 1e15)`.
pub fn fmt_float(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    if !r.is_finite() {
        return r.to_string();
    }
    if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Run description written next to every trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub network: String,
    pub coupling: String,
    pub j0: f64,
    pub initial: String,
    pub j_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

/// CSV with header `time,f_<label>,...`; one row per sample.
pub fn write_trace_csv<W: Write + ?Sized>(
    trace: &FidelityTrace,
    labels: &[NodeId],
    w: &mut W,
) -> Result<(), Error> {
    let mut header = vec!["time".to_string()];
    header.extend(labels.iter().map(|l| format!("f_{l}")));
    writeln!(w, "{}", header.join(","))?;
    for (t, row) in trace.times().iter().zip(trace.rows()) {
        let mut line = fmt_float(*t);
        for f in row {
            line.push(',');
            line.push_str(&fmt_float(*f));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn round_value(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn write_json<W: Write + ?Sized, T: Serialize + ?Sized>(
    value: &T,
    w: &mut W,
) -> Result<(), Error> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    serde_json::to_writer_pretty(&mut *w, &v)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct TraceDocument<'a> {
    metadata: &'a TraceMetadata,
    labels: &'a [NodeId],
    times: &'a [f64],
    fidelities: &'a [Vec<f64>],
}

pub fn write_trace_json<W: Write + ?Sized>(
    trace: &FidelityTrace,
    labels: &[NodeId],
    metadata: &TraceMetadata,
    w: &mut W,
) -> Result<(), Error> {
    write_json(
        &TraceDocument {
            metadata,
            labels,
            times: trace.times(),
            fidelities: trace.rows(),
        },
        w,
    )
}

#[derive(Serialize)]
struct PeaksDocument {
    t_first: f64,
    node_first: NodeId,
    value_first: f64,
    t_max_peak: f64,
    node_max: NodeId,
    value_max: f64,
    excluded: Option<NodeId>,
    window: [f64; 2],
}

/// JSON peak report with nodes shown by label.
pub fn write_peaks_json<W: Write + ?Sized>(
    report: &PeakReport,
    labels: &[NodeId],
    w: &mut W,
) -> Result<(), Error> {
    let doc = PeaksDocument {
        t_first: report.t_first,
        node_first: labels[report.node_first],
        value_first: report.value_first,
        t_max_peak: report.t_max_peak,
        node_max: labels[report.node_max],
        value_max: report.value_max,
        excluded: report.excluded.map(|i| labels[i]),
        window: [0.0, report.window],
    };
    write_json(&doc, w)
}

/// `peak,time,node,value` with one `first` and one `max` row.
pub fn write_peaks_csv<W: Write + ?Sized>(
    report: &PeakReport,
    labels: &[NodeId],
    w: &mut W,
) -> Result<(), Error> {
    writeln!(w, "peak,time,node,value")?;
    for (name, t, node, v) in [
        (
            "first",
            report.t_first,
            report.node_first,
            report.value_first,
        ),
        ("max", report.t_max_peak, report.node_max, report.value_max),
    ] {
        writeln!(
            w,
            "{name},{},{},{}",
            fmt_float(t),
            labels[node],
            fmt_float(v)
        )?;
    }
    Ok(())
}

/// Rows `a,b,length,sim` for edges, then `i,i,,fidelity` for the diagonal.
pub fn write_similarity_csv<W: Write + ?Sized>(
    grid: &SimilarityGrid,
    w: &mut W,
) -> Result<(), Error> {
    writeln!(w, "a,b,length,sim")?;
    for e in &grid.entries {
        writeln!(
            w,
            "{},{},{},{}",
            e.a,
            e.b,
            fmt_float(e.length),
            fmt_float(e.sim)
        )?;
    }
    for (n, f) in &grid.diagonal {
        writeln!(w, "{n},{n},,{}", fmt_float(*f))?;
    }
    Ok(())
}

pub fn write_similarity_json<W: Write + ?Sized>(
    grid: &SimilarityGrid,
    w: &mut W,
) -> Result<(), Error> {
    write_json(grid, w)
}

/// `parameter,subset,C,n,edges_used,strong_flag`; failed cells print the
/// error name in the `C` column and leave the counts empty.
pub fn write_geary_csv<W: Write + ?Sized>(
    table: &GearyTable,
    keep: impl Fn(&crate::analysis::GearyResult) -> bool,
    w: &mut W,
) -> Result<(), Error> {
    writeln!(w, "parameter,subset,C,n,edges_used,strong_flag")?;
    for cell in table.cells.iter().filter(|c| keep(c)) {
        match &cell.outcome {
            Ok(s) => writeln!(
                w,
                "{},{},{},{},{},{}",
                cell.parameter,
                cell.subset,
                fmt_float(s.c),
                s.n,
                s.edges_used,
                cell.strong
            )?,
            Err(e) => writeln!(
                w,
                "{},{},{:?},,,false",
                cell.parameter,
                cell.subset,
                e.to_string()
            )?,
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GearyRow {
    parameter: crate::ingest::Parameter,
    subset: crate::analysis::Subset,
    #[serde(rename = "C")]
    c: Option<f64>,
    n: Option<usize>,
    edges_used: Option<usize>,
    strong_flag: bool,
    error: Option<String>,
}

pub fn write_geary_json<W: Write + ?Sized>(
    table: &GearyTable,
    keep: impl Fn(&crate::analysis::GearyResult) -> bool,
    w: &mut W,
) -> Result<(), Error> {
    let rows: Vec<GearyRow> = table
        .cells
        .iter()
        .filter(|c| keep(c))
        .map(|cell| {
            let ok = cell.outcome.as_ref().ok();
            GearyRow {
                parameter: cell.parameter,
                subset: cell.subset,
                c: ok.map(|s| s.c),
                n: ok.map(|s| s.n),
                edges_used: ok.map(|s| s.edges_used),
                strong_flag: cell.strong,
                error: cell.outcome.as_ref().err().map(|e| e.to_string()),
            }
        })
        .collect();
    write_json(&rows, w)
}

/// `group,parameter,count,mean,std,q1,median,q3`: positions `0`-`7`, then the
/// shore groups `0-3` and `4-7`.
pub fn write_positions_csv<W: Write + ?Sized>(
    stats: &PositionGroupStats,
    w: &mut W,
) -> Result<(), Error> {
    writeln!(w, "group,parameter,count,mean,std,q1,median,q3")?;
    for group in stats.positions.iter().chain(&stats.shores) {
        for (p, s) in &group.params {
            match s {
                Some(s) => writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    group.label,
                    p,
                    s.count,
                    fmt_float(s.mean),
                    fmt_float(s.std),
                    fmt_float(s.q1),
                    fmt_float(s.median),
                    fmt_float(s.q3)
                )?,
                None => writeln!(w, "{},{},0,,,,,", group.label, p)?,
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
    pub class: EdgeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianDocument {
    pub n: usize,
    /// Native IDs in row/column order.
    pub index: Vec<NodeId>,
    /// Row-major entries.
    pub entries: Vec<f64>,
}

/// JSON form of a network, optionally with its coupling matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeDocument>,
    /// Canonical index to native label.
    pub labels: BTreeMap<usize, NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianDocument>,
}

impl NetworkDocument {
    pub fn new(net: &Network, hamiltonian: Option<&HamiltonianMatrix>) -> Self {
        NetworkDocument {
            nodes: net.nodes().to_vec(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeDocument {
                    a: e.a,
                    b: e.b,
                    length: e.length,
                    class: e.class,
                })
                .collect(),
            labels: net.nodes().iter().copied().enumerate().collect(),
            hamiltonian: hamiltonian.map(|h| HamiltonianDocument {
                n: h.dim(),
                index: h.index_map().natives().to_vec(),
                entries: h.entries().to_vec(),
            }),
        }
    }

    /// Rebuilds a custom network. Lengths are rescaled so the shortest is 1.
    pub fn into_network(self) -> Result<Network, TopologyError> {
        let edges = self
            .edges
            .into_iter()
            .map(|e| Edge {
                a: e.a,
                b: e.b,
                length: e.length,
                class: e.class,
            })
            .collect();
        Network::new(self.nodes, edges, None, NetworkKind::Custom)
    }
}

/// Edge list CSV `a,b,length,class`.
pub fn write_network_csv<W: Write + ?Sized>(net: &Network, w: &mut W) -> Result<(), Error> {
    writeln!(w, "a,b,length,class")?;
    for e in net.edges() {
        writeln!(
            w,
            "{},{},{},{}",
            e.a,
            e.b,
            fmt_float(e.length),
            e.class.as_str()
        )?;
    }
    Ok(())
}

pub fn write_network_json<W: Write + ?Sized>(
    net: &Network,
    hamiltonian: Option<&HamiltonianMatrix>,
    w: &mut W,
) -> Result<(), Error> {
    write_json(&NetworkDocument::new(net, hamiltonian), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{builtin_network, BuiltinKind};

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(0.125), "0.125");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(24.897088000000004), "24.897088");
        assert_eq!(fmt_float(1.5e-7), "1.5e-7");
        assert_eq!(fmt_float(0.1 + 0.2), "0.3");
        assert_eq!(fmt_float(2.0f64.sqrt()), "1.41421356237");
    }

    #[test]
    fn network_document_round_trip() {
        let net = builtin_network(BuiltinKind::MidLengths);
        let mut buf = Vec::new();
        write_network_json(&net, None, &mut buf).unwrap();
        let doc: NetworkDocument = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc.labels.len(), 8);
        assert_eq!(doc.labels[&0], NodeId(1));
        let back = doc.into_network().unwrap();
        assert_eq!(back.nodes(), net.nodes());
        assert_eq!(back.edges(), net.edges());
        assert_eq!(back.kind(), NetworkKind::Custom);
    }
}
