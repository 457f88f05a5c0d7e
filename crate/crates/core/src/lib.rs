pub mod cli_io;
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod field_ops;
pub mod grid;
pub mod init;
pub mod nonlinear;
pub mod oracle;
pub mod stepper;
pub mod tensor;

pub use constitutive::ConstitutiveLaw;
pub use error::{Error, Result};
pub use field::{SpectralField, SpectralTensorField, SpectralVectorField};
pub use grid::{make_grid, Grid};
