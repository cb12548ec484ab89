//! Matrix apportionment: similarity transforms that make every entry of a
//! matrix equal in magnitude, together with the combinatorial constructions
//! (graceful and ρ-labelings, cyclic blowups, masked interlacing families,
//! edge-labeling polynomials) that produce or obstruct them.

pub mod blowup;
pub mod certify;
mod error;
pub mod interlace;
pub mod io;
pub mod labelings;
pub mod linalg;
pub mod rank_one;
pub mod recovery;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use report::{ApportionReport, Status};
