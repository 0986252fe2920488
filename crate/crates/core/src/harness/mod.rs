//! Configuration-driven Monte Carlo experiments comparing sampled variances with
//! the closed forms in [`crate::analytic`].

pub mod cell;
pub mod config;
pub mod replication;
pub mod sweep;
pub mod validate;

pub use cell::{Cell, SoDraw, SpinBranch, BACKEND_TOL};
pub use config::{Backend, Group, Mode, Overrides, SweepConfig};
pub use replication::{
    adjudicate_coefficient, adjudicate_denominator, replicate_grid, Adjudication, ReplicationConfig, ReplicationReport,
    Verdict,
};
pub use sweep::{
    csv_string, emit_csv, format_g, run_cells, run_sweep, tolerance, write_sidecar, ToleranceSummary, VarianceReport,
    CSV_HEADER,
};
pub use validate::{validate_backends, ValidationReport, ValidationRow};
