//! Lamb-wave acoustic delay line modelling on thin piezoelectric plates.
//!
//! The crate covers the whole chain from material constants to a measured
//! two-port: plate dispersion, electrode loading, transducer response,
//! S-parameter synthesis with Touchstone I/O, and the inverse problem of
//! extracting group velocity and propagation loss from a family of devices.

pub mod dispersion;
pub mod error;
pub mod extraction;
pub mod loading;
pub mod materials;
pub mod network;
pub mod roots;
pub mod transducer;

pub use dispersion::{Bc, PlateSpec, Symmetry};
pub use error::{Error, Result};
