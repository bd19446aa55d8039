pub mod error;
pub mod greens;
pub mod hamiltonians;
pub mod dispersion;
pub mod edge_analysis;
pub mod lattice;
pub mod linalg;
pub mod spectral;
pub mod topology;
pub mod walks;

pub use error::{Error, Result};

/// Library version, echoed into run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
