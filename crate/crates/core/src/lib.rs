//! Time-frequency biphoton states and generalized Hong-Ou-Mandel sensing.
//!
//! The crate covers phase-matching families ([`statefamilies`]), their
//! chronocyclic Wigner functions ([`chronocyclic`]), quantum Fisher
//! information ([`qfi`]), the lossy HOM measurement model ([`hommodel`]) and
//! maximum-likelihood estimation on simulated counts ([`estimator`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chronocyclic;
pub mod error;
pub mod estimator;
pub mod hommodel;
pub mod numerics;
pub mod qfi;
pub mod statefamilies;
mod terms;

pub use error::{Error, Result};
pub use estimator::{SearchWindow, TrialCounts, Which};
pub use hommodel::{DetectionModel, FisherMatrix, HomModel, OutcomeProbabilities};
pub use qfi::{Convention, CrCovariance, QfiMatrix};
pub use statefamilies::{BiphotonState, Chirp, ChirpSign, CombForm, Family, PhaseMatchingSpec, PureState};
