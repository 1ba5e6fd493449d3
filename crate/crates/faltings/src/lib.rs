//! Stable Faltings heights of elliptic curves from j-invariant minimal
//! polynomials, the explicit gap constant behind Deligne's minimum, numerical
//! certification of the supporting inequalities, and the Eisenstein-polynomial
//! curve families whose heights approach the minimum.

pub mod certify;
pub mod construct;
pub mod error;
pub mod gap;
pub mod heights;
pub mod modular;
pub mod numctx;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
