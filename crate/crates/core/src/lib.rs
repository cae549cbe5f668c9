//! Selection of multi-day representative periods from a year of hourly
//! data.
//!
//! The pipeline is: ingest and scale an [`AnnualSeries`], cut it with a
//! [`SliceGeometry`], build the day-aligned [`DistanceMatrix`], then pick
//! `k` periods with one of the solvers in [`select`]. [`kmeans`] provides a
//! clustering baseline for single days and [`evaluation`] produces elbow
//! curves and fidelity reports.

pub mod distance;
pub mod error;
pub mod evaluation;
pub mod export;
pub mod geometry;
pub mod ingest;
pub mod kmeans;
pub mod par;
pub mod select;
pub mod series;
pub mod synthetic;

pub use distance::{build_matrix, build_matrix_with, day_distance, DayNorm, DistanceMatrix};
pub use error::{Error, ErrorCategory, Result};
pub use evaluation::{elbow, fidelity, ElbowCurve, ElbowPoint, FidelityReport};
pub use geometry::SliceGeometry;
pub use ingest::load_csv;
pub use kmeans::kmeans_medoid;
pub use par::Execution;
pub use select::{
    assign, brute_force, local_search_swap, solve_exact, solve_exact_with, solve_greedy,
    ExactOptions, Method, Optimality, Selection,
};
pub use series::{AnnualSeries, NormalizeMethod, Scaling};
