//! Exact WKB analysis toolkit: symbolic WKB recursion over exact coefficient
//! fields, Stokes geometry, Borel-Pade summation, Voros symbols and
//! connection matrices, topological recursion, and the Painleve I
//! tau-function built from its spectral curve.

pub mod error;
pub mod qq;
pub mod mpoly;
pub mod param;
pub mod poly;
pub mod sqrtext;
pub mod series;
pub mod exppoly;
pub mod lxy;
pub mod bigfloat;
pub mod wkb;
pub mod ratint;
pub mod genus0;
pub mod stokes;
pub mod borel;
pub mod connection;
pub mod tr;
pub mod elliptic;
pub mod trell;
pub mod painleve;
pub mod accept;

pub use error::{Result, WkbError};
