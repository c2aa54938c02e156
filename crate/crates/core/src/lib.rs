//! Exact truncated arithmetic in finitely ramified p-adic fields and their
//! valued hyperfields K/(1+m^n).

pub mod arith;
pub mod axioms;
pub mod elem;
pub mod error;
pub mod field;
pub mod gauss;
pub mod hyperfield;
pub mod kelem;
pub mod morphisms;
pub mod poly;
pub mod ramification;
pub mod representatives;
pub mod residue;

pub use elem::FieldElem;
pub use error::{Error, Result};
pub use field::{FieldDef, FieldModel};
pub use residue::{ResElem, ResidueField};
