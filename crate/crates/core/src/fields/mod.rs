//! Test functions in the moving frame and the trajectory functionals built
//! from them.

mod discrete;
mod generator;
mod test_function;
mod tracker;

pub use discrete::{
    block_average, cubic_q_stat, discretize, field_x, field_xtilde, grad_n, lap_n, q_stat, Frame,
};
pub use generator::{generator_monomial, Monomial};
pub use test_function::{TestFunction, CATALOG};
pub use tracker::{
    eps_to_l, FieldTracker, TrackerConfig, TrackerSet, TrajectoryFunctionals, DEFAULT_EPS_GRID,
};
