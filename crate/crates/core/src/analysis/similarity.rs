use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::peaks::find_peaks;
use crate::dynamics::FidelityTrace;
use crate::error::AnalysisError;
use crate::topology::{Network, NodeId};

// Fidelities this far outside [0, 1] are rounding noise and get clamped.
const RANGE_SLACK: f64 = 1e-9;

fn checked(f: f64) -> Result<f64, AnalysisError> {
    if (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&f) {
        Ok(f.clamp(0.0, 1.0))
    } else {
        Err(AnalysisError::OutOfRange(f))
    }
}

/// `1 - |f_i - f_j|`.
pub fn similarity(f_i: f64, f_j: f64) -> Result<f64, AnalysisError> {
    Ok(1.0 - (checked(f_i)? - checked(f_j)?).abs())
}

/// Which instant a similarity grid is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "t")]
pub enum TimeSelector {
    FirstPeak,
    MaxPeak,
    Explicit(f64),
}

impl fmt::Display for TimeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSelector::FirstPeak => f.write_str("first-peak"),
            TimeSelector::MaxPeak => f.write_str("max-peak"),
            TimeSelector::Explicit(t) => write!(f, "t={t}"),
        }
    }
}

impl FromStr for TimeSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first-peak" => Ok(TimeSelector::FirstPeak),
            "max-peak" => Ok(TimeSelector::MaxPeak),
            _ => s
                .strip_prefix("t=")
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|t| t.is_finite())
                .map(TimeSelector::Explicit)
                .ok_or_else(|| {
                    format!(
                        "invalid time selector {s:?} (expected first-peak, max-peak or t=<value>)"
                    )
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectedTime {
    pub selector: TimeSelector,
    pub sample: usize,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimilarityEntry {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
    pub sim: f64,
}

/// Edge similarities and node fidelities at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityGrid {
    pub entries: Vec<SimilarityEntry>,
    pub diagonal: Vec<(NodeId, f64)>,
    pub at: SelectedTime,
}

impl SimilarityGrid {
    pub fn entry(&self, a: NodeId, b: NodeId) -> Option<&SimilarityEntry> {
        self.entries
            .iter()
            .find(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a))
    }
}

/// Similarity of every edge of `net` at the selected time.
///
/// Peak selectors use the network-wide peak report with the trace's
/// injection node excluded.
pub fn similarity_grid(
    net: &Network,
    trace: &FidelityTrace,
    at: TimeSelector,
) -> Result<SimilarityGrid, AnalysisError> {
    if trace.nodes() != net.len() {
        return Err(AnalysisError::ShapeMismatch {
            trace: trace.nodes(),
            network: net.len(),
        });
    }
    let sample = match at {
        TimeSelector::Explicit(t) => {
            let (lo, hi) = (trace.times()[0], trace.t_max());
            if !(lo..=hi).contains(&t) {
                return Err(AnalysisError::TimeOutOfWindow(t));
            }
            trace.nearest_sample(t)
        }
        TimeSelector::FirstPeak | TimeSelector::MaxPeak => {
            let report = find_peaks(trace, trace.initial().injection_site())?.into_result()?;
            if at == TimeSelector::FirstPeak {
                report.sample_first
            } else {
                report.sample_max
            }
        }
    };
    let row = &trace.rows()[sample];
    let entries = net
        .edges()
        .iter()
        .zip(net.index_pairs())
        .map(|(e, (i, j))| {
            Ok(SimilarityEntry {
                a: e.a,
                b: e.b,
                length: e.length,
                sim: similarity(row[i], row[j])?,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let diagonal = net
        .nodes()
        .iter()
        .zip(row)
        .map(|(&n, &f)| Ok((n, checked(f)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(SimilarityGrid {
        entries,
        diagonal,
        at: SelectedTime {
            selector: at,
            sample,
            time: trace.times()[sample],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::InitialCondition;
    use crate::topology::{builtin_network, BuiltinKind};

    #[test]
    fn similarity_examples() {
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(similarity(x, x).unwrap(), 1.0);
        }
        assert_eq!(similarity(1.0, 0.0).unwrap(), 0.0);
        assert!((similarity(0.6, 0.4).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(similarity(1.5, 0.0), Err(AnalysisError::OutOfRange(1.5)));
        assert!(similarity(-0.2, 0.0).is_err());
        assert_eq!(similarity(1.0 + 1e-12, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("first-peak".parse(), Ok(TimeSelector::FirstPeak));
        assert_eq!("max-peak".parse(), Ok(TimeSelector::MaxPeak));
        assert_eq!("t=2.5".parse(), Ok(TimeSelector::Explicit(2.5)));
        assert!("t=abc".parse::<TimeSelector>().is_err());
        assert!("later".parse::<TimeSelector>().is_err());
    }

    #[test]
    fn equal_fidelities_give_unit_similarity() {
        let net = builtin_network(BuiltinKind::MaxLengths);
        let rows = vec![vec![0.125; 8]; 3];
        let tr =
            FidelityTrace::new(vec![0.0, 1.0, 2.0], rows, InitialCondition::Superposition).unwrap();
        let g = similarity_grid(&net, &tr, TimeSelector::Explicit(1.2)).unwrap();
        assert_eq!(g.at.sample, 1);
        assert_eq!(g.entries.len(), 8);
        assert!(g.entries.iter().all(|e| e.sim == 1.0));
        assert!(g.diagonal.iter().all(|d| d.1 == 0.125));
        // flat traces have no peak
        assert_eq!(
            similarity_grid(&net, &tr, TimeSelector::FirstPeak),
            Err(AnalysisError::NoPeak)
        );
        assert_eq!(
            similarity_grid(&net, &tr, TimeSelector::Explicit(5.0)),
            Err(AnalysisError::TimeOutOfWindow(5.0))
        );
    }
}
