//! Boolean multi-party processes without causal order, the product-state
//! ensembles they induce, and the protocols connecting the two.
//!
//! The crate is organized around one correspondence. A Boolean function
//! ω: {0,1}^n → {0,1}^n that hands bit ω_i(x) to party i and takes bit x_i
//! back is a *classical process* when the loop p = ω(μ(p)) has a unique
//! solution for every tuple μ of local interventions ([`process`]). Labelling
//! each word x with basis bits ω(x) and x bits x turns such a function into
//! `2^n` product states ([`ensemble`]); whenever the process lets every party
//! receive a signal from another party, those states form an orthonormal
//! basis that local operations under a definite causal order cannot
//! perfectly discriminate. The [`protocols`] module runs both directions of
//! the correspondence on a dense simulator ([`statevector`]): measuring in
//! the induced basis with the process as the communication resource, and
//! simulating the process's channel from such a measurement. [`search`]
//! enumerates or samples process tables to generate corpora.
//!
//! Entry points: [`ProcessTable::afbw`] for the canonical three-party
//! process, [`Ensemble::shift`] for its induced basis, and the `.proc` /
//! `.ens` text formats on [`ProcessTable`] and [`Ensemble`].

pub mod bits;
mod error;
pub mod ensemble;
pub mod process;
pub mod protocols;
pub mod rng;
pub mod search;
pub mod statevector;

pub use error::{Error, Result};

pub use ensemble::{Ensemble, StateLabel};
pub use process::{
    DoubleFixedPointWitness, Intervention, ProcessTable, ProcessViolation, SignalingMatrix,
    UnaryFn,
};
pub use protocols::{ChannelRun, FaithfulnessReport, MeasurementRecord};
pub use search::SearchReport;
pub use statevector::{OutcomeDistribution, StateVector};
