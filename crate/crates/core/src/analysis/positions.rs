use serde::Serialize;

use crate::ingest::{Parameter, QubitDataset};
use crate::topology::{QUBITS_PER_CELL, SHORE};

/// Count, mean, sample standard deviation and quartiles (linear
/// interpolation between order statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let quantile = |q: f64| {
            let h = q * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        };
        Some(Summary {
            count: n,
            mean,
            std,
            q1: quantile(0.25),
            median: quantile(0.5),
            q3: quantile(0.75),
        })
    }
}

/// Statistics for one group of qubits; `params` follows [`Parameter::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionSummary {
    pub label: String,
    pub count: usize,
    pub params: Vec<(Parameter, Option<Summary>)>,
}

impl PositionSummary {
    pub fn get(&self, p: Parameter) -> Option<&Summary> {
        self.params
            .iter()
            .find(|(q, _)| *q == p)
            .and_then(|(_, s)| s.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionGroupStats {
    /// One entry per position 0-7 within the unit cell.
    pub positions: Vec<PositionSummary>,
    /// Positions 0-3 and 4-7.
    pub shores: Vec<PositionSummary>,
}

fn summarize(data: &QubitDataset, label: String, keep: impl Fn(u32) -> bool) -> PositionSummary {
    let recs: Vec<_> = data
        .records()
        .filter(|r| keep(r.qubit.position()))
        .collect();
    let params = Parameter::ALL
        .iter()
        .map(|&p| {
            let xs: Vec<f64> = recs.iter().map(|r| r.get(p)).collect();
            (p, Summary::of(&xs))
        })
        .collect();
    PositionSummary {
        label,
        count: recs.len(),
        params,
    }
}

/// Summaries of the four parameters grouped by position within the unit cell,
/// plus the two-shore split.
pub fn position_group_stats(data: &QubitDataset) -> PositionGroupStats {
    let positions = (0..QUBITS_PER_CELL)
        .map(|pos| summarize(data, pos.to_string(), |p| p == pos))
        .collect();
    let shores = vec![
        summarize(data, "0-3".to_string(), |p| p < SHORE),
        summarize(data, "4-7".to_string(), |p| p >= SHORE),
    ];
    PositionGroupStats { positions, shores }
}
