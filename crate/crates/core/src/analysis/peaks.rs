use serde::Serialize;

use crate::dynamics::FidelityTrace;
use crate::error::AnalysisError;

/// Minimum prominence for a local maximum to count as a peak.
pub const PEAK_PROMINENCE: f64 = 1e-3;

// Peak values closer than this are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// A local maximum of one node's fidelity series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub sample: usize,
    pub time: f64,
    pub value: f64,
    pub prominence: f64,
}

/// Network-wide first and maximum peaks over all non-excluded nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakReport {
    pub t_first: f64,
    pub sample_first: usize,
    pub node_first: usize,
    pub value_first: f64,
    pub t_max_peak: f64,
    pub sample_max: usize,
    pub node_max: usize,
    pub value_max: f64,
    pub excluded: Option<usize>,
    /// End of the time window searched.
    pub window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeakOutcome {
    Found(PeakReport),
    NoPeak,
}

impl PeakOutcome {
    pub fn report(&self) -> Option<&PeakReport> {
        match self {
            PeakOutcome::Found(r) => Some(r),
            PeakOutcome::NoPeak => None,
        }
    }

    pub fn into_result(self) -> Result<PeakReport, AnalysisError> {
        match self {
            PeakOutcome::Found(r) => Ok(r),
            PeakOutcome::NoPeak => Err(AnalysisError::NoPeak),
        }
    }
}

/// Interior local maxima (`f[k] > f[k-1]`, `f[k] >= f[k+1]`) whose
/// prominence reaches `min_prominence`.
///
/// Prominence is the height of the peak above the higher of the two lowest
/// points reached before the series climbs above the peak on either side
/// (or runs out).
pub fn series_peaks(series: &[f64], min_prominence: f64) -> Vec<(usize, f64)> {
    let n = series.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    for k in 1..n - 1 {
        let v = series[k];
        if !(v > series[k - 1] && v >= series[k + 1]) {
            continue;
        }
        let mut left_min = v;
        for &x in series[..k].iter().rev() {
            if x > v {
                break;
            }
            left_min = left_min.min(x);
        }
        let mut right_min = v;
        for &x in &series[k + 1..] {
            if x > v {
                break;
            }
            right_min = right_min.min(x);
        }
        let prominence = v - left_min.max(right_min);
        if prominence >= min_prominence {
            out.push((k, prominence));
        }
    }
    out
}

/// Peaks of every node, for comparing per-node timing against the
/// network-wide report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePeaks {
    pub node: usize,
    pub first: Option<Peak>,
    pub max: Option<Peak>,
    pub count: usize,
}

fn node_peak_list(trace: &FidelityTrace, node: usize) -> Vec<Peak> {
    let series = trace.node_series(node);
    series_peaks(&series, PEAK_PROMINENCE)
        .into_iter()
        .map(|(k, prominence)| Peak {
            sample: k,
            time: trace.times()[k],
            value: series[k],
            prominence,
        })
        .collect()
}

fn check_node(trace: &FidelityTrace, node: Option<usize>) -> Result<(), AnalysisError> {
    match node {
        Some(i) if i >= trace.nodes() => Err(AnalysisError::NodeOutOfRange {
            index: i,
            n: trace.nodes(),
        }),
        _ => Ok(()),
    }
}

pub fn per_node_peaks(
    trace: &FidelityTrace,
    exclude: Option<usize>,
) -> Result<Vec<NodePeaks>, AnalysisError> {
    check_node(trace, exclude)?;
    Ok((0..trace.nodes())
        .filter(|&i| Some(i) != exclude)
        .map(|node| {
            let peaks = node_peak_list(trace, node);
            let max = peaks.iter().copied().reduce(|best, p| {
                if p.value > best.value + TIE_TOLERANCE {
                    p
                } else {
                    best
                }
            });
            NodePeaks {
                node,
                first: peaks.first().copied(),
                max,
                count: peaks.len(),
            }
        })
        .collect())
}

/// First and maximum fidelity peaks over all nodes except `exclude`.
///
/// Ties on time go to the lowest node index; ties on value (within 1e-12) go
/// to the earliest time, then the lowest node index.
pub fn find_peaks(
    trace: &FidelityTrace,
    exclude: Option<usize>,
) -> Result<PeakOutcome, AnalysisError> {
    check_node(trace, exclude)?;
    let mut first: Option<(usize, Peak)> = None;
    let mut max: Option<(usize, Peak)> = None;
    for node in (0..trace.nodes()).filter(|&i| Some(i) != exclude) {
        for p in node_peak_list(trace, node) {
            if first.is_none_or(|(_, f)| p.sample < f.sample) {
                first = Some((node, p));
            }
            let better = match max {
                None => true,
                Some((_, m)) => {
                    p.value > m.value + TIE_TOLERANCE
                        || ((p.value - m.value).abs() <= TIE_TOLERANCE && p.sample < m.sample)
                }
            };
            if better {
                max = Some((node, p));
            }
        }
    }
    Ok(match (first, max) {
        (Some((nf, f)), Some((nm, m))) => PeakOutcome::Found(PeakReport {
            t_first: f.time,
            sample_first: f.sample,
            node_first: nf,
            value_first: f.value,
            t_max_peak: m.time,
            sample_max: m.sample,
            node_max: nm,
            value_max: m.value,
            excluded: exclude,
            window: trace.t_max(),
        }),
        _ => PeakOutcome::NoPeak,
    })
}
