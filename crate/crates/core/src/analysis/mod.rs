//! Post-processing of fidelity traces and qubit datasets.

mod geary;
mod peaks;
mod positions;
mod similarity;

pub use geary::{
    geary_permutation_null, geary_table, geary_table_with, gearys_c, GearyResult, GearyStatistic,
    GearyTable, NullSummary, Subset, STRONG_DEVIATION,
};
pub use peaks::{
    find_peaks, per_node_peaks, series_peaks, NodePeaks, Peak, PeakOutcome, PeakReport,
    PEAK_PROMINENCE,
};
pub use positions::{position_group_stats, PositionGroupStats, PositionSummary, Summary};
pub use similarity::{
    similarity, similarity_grid, SelectedTime, SimilarityEntry, SimilarityGrid, TimeSelector,
};
