#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod entropy;
pub mod error;
pub mod gauge;
pub mod grid;
pub mod nfpe;
pub mod nse;
pub mod ode;
pub mod scenario;
pub mod verify;

pub use entropy::{DriftChoice, EntropyKind, EntropyModel};
pub use error::{Error, Result};
pub use grid::{ComplexWavefunction, Grid1D, Grid2D, HydroPair};
