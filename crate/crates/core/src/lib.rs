//! Exact q-expansions of generalized eta-quotients at arbitrary cusps, counts
//! of distinct-part partitions restricted to residue classes, and the two
//! verification pipelines for shifted partition identities: comparison of
//! principal parts at every cusp, and coefficient comparison up to the Sturm
//! bound.

pub mod error;
pub mod etaq;
pub mod exact;
pub mod identities;
pub mod partitions;
pub mod qseries;

pub use error::{Error, Result};
