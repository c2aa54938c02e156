//! First-order languages over valued hyperfields and valued fields: parsing,
//! the positive-existential translation, and bounded evaluation.

pub mod ast;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod translate;

pub use ast::{Binder, FTerm, Formula, GTerm, RTerm, Sort, ValAtom, ValFormula, VhfAtom, VhfFormula, VhfTerm};
pub use error::{Error, Result};
pub use parser::{parse_val, parse_vhf};
pub use translate::translate;
pub use eval::{check_witness, eval_val, eval_vhf, EvalConfig, Outcome, TriBool};
pub use corpus::{agreement_harness, generate_corpus, AgreementReport, AgreementRow};
