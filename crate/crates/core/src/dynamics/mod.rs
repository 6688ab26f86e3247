//! Time evolution of the increment lattice.

mod engine;
mod quadrature;
mod state;

pub use engine::{
    centered_w, drift, euler_step, h_step, init_stationary, NoObserver, StepObserver, StepView,
    Stepper,
};
pub use quadrature::{
    log_partition_recursion, quadrature_partition, GridPaths, MAX_QUADRATURE_LEVEL,
};
pub use state::{HState, LatticeState, NoiseBlock};
