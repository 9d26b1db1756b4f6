pub mod error;
pub mod fock;
pub mod gaussian;
pub mod hartree_fock;
pub mod lindblad;
pub mod numerics;
pub mod scenario;
pub mod su11;
pub mod tfd;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, C64};
