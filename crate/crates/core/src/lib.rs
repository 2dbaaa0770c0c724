//! Hermitian connections, holonomy algebras and curvature identities on
//! concrete complex manifold models.

pub mod conn;
pub mod error;
pub mod fiber;
pub mod hol;
pub mod kforms;
pub mod linalg;
pub mod models;
pub mod rep;
pub mod verify;

pub use error::{Error, Result};
