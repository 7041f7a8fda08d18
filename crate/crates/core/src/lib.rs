//! Exact-rational algebra for double Poisson algebras and double Poisson vertex algebras.

pub mod adler;
pub mod cli;
pub mod complexes;
pub mod doublepoisson;
pub mod dpva;
pub mod error;
pub mod linear;
pub mod ncpoly;
pub mod psido;
pub mod repmat;
pub mod report;
pub mod series;
pub mod tensoralg;

pub use error::{Error, Result};
pub use linear::{Lin, Q};
pub use ncpoly::{Algebra, NcPoly, Sym, Word};
pub use tensoralg::{Tensor2, Tensor3, TensorMatrix};
