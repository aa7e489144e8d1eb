//! Headline computations built on the functors.

pub mod cofree;
pub mod homology;
pub mod koszulness;
pub mod minimize;
pub mod null;
pub mod random;
pub mod regrade;

pub use koszulness::{ext_betti, koszulness_check, KoszulnessReport, StrandResult};
