//! Independent checks on solver output: oracles, monitors and bounds.

mod bounds;
mod monitor;
mod oracles;

pub use bounds::{compute_bound, TheoryConstants};
pub use monitor::{lemma_monitor, MonitorAccumulator, MonitorEntry, MonitorReport, MONITOR_RTOL};
pub use oracles::{
    finite_diff_check, function_range, grid_extremum, rate_slope, saddle_oracle_quadratic,
    FdReport, FunctionRange, GridExtremum, SaddleOracle, FD_RTOL, GRID_POINT_LIMIT,
};
