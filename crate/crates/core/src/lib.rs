#![allow(clippy::needless_range_loop)]

pub mod ahol;
pub mod error;
pub mod exactnum;
pub mod forms;
pub mod harness;
pub mod hecke;
pub mod hyperalg;
pub mod linalg;
pub mod qexp;
pub mod reps;
pub mod sl2;

pub use ahol::AholForm;
pub use error::{Error, Result};
pub use exactnum::{bernoulli, CycNum, Rational};
pub use forms::VVForm;
pub use hecke::{DeltaCoset, HeckeRep};
pub use hyperalg::FormSpan;
pub use linalg::{Matrix, Subspace};
pub use qexp::QExp;
pub use reps::{Rep, RepRegistry};
