//! Löwner, anti-Löwner and sign-perturbed divided-difference matrices:
//! construction, PSD classification, verification of the associated
//! positivity results, and the Lyapunov-type equation `AX + XA = g(A)B + Bg(A)`.

pub mod analysis;
pub mod builders;
pub mod error;
pub mod functions;
pub mod json;
pub mod linalg;
pub mod lyapunov;

pub use error::{Error, Result};
