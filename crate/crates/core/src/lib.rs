//! Single-subject abnormality testing with the skewed Student t distribution.
//!
//! The crate is layered bottom-up: [`special`] supplies the special functions,
//! [`skewt`] the distribution itself, [`priors`] the objective priors built on
//! its Fisher information, [`mh`] the sampler, and [`single_subject`] the
//! BIGPAST decision procedure. [`baselines`], [`gof`] and [`simlab`] hold the
//! comparison tests, the goodness-of-fit check and the simulation harness.

pub mod baselines;
pub mod error;
pub mod gof;
pub mod mh;
pub mod optim;
pub mod priors;
mod quad;
pub mod rng;
pub mod simlab;
pub mod single_subject;
pub mod skewt;
pub mod special;

pub use error::{Error, Result};
pub use single_subject::{Alternative, CredibleInterval, Method, TestConfig, TestResult};
pub use skewt::{Sample, SkewTParams};

