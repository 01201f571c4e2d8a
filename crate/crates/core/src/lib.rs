//! Finite-horizon numerics for singular traces on Marcinkiewicz-type ideals.
//!
//! The crate is organised bottom-up:
//!
//! * [`sequences`]: lazily evaluated nonnegative sequences, rearrangement,
//!   prefix sums and the dilation operators.
//! * [`spectra`]: singular values of small dense matrices and the
//!   submajorization sandwich for sums of operators.
//! * [`majorization`]: Hardy–Littlewood submajorization, the wedge of two
//!   singular value sequences and certified additive decompositions.
//! * [`ideals`]: concave renormalization functions, Marcinkiewicz norms and
//!   the named model sequences.
//! * [`limits`]: finite-horizon surrogates for dilation-invariant singular
//!   states together with residual diagnostics.
//! * [`dixmier`]: the Dixmier prefunctional, trace estimates, the additivity
//!   criterion and the normal-part machinery.
//!
//! Every infinite object is represented with an explicit horizon; every
//! "limit" is reported as an estimate with a band, never as a limit.

pub mod dixmier;
pub mod error;
pub mod ideals;
pub mod io;
pub mod limits;
pub mod majorization;
pub mod sequences;
pub mod spectra;
pub mod summation;

pub use error::{Error, Result};
pub use ideals::{PsiFunction, PsiSpec};
pub use limits::{LimitKind, LimitProcedure};
pub use sequences::{DecreasingSequence, SequenceModel};
