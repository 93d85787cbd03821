//! The two protocols connecting a process to its induced ensemble.
//!
//! *Measurement*: parties holding a joint state |ψ⟩ each receive a bit from
//! the process, apply a Hadamard if it is 1, measure in the computational
//! basis, feed the outcome back, and re-apply the Hadamard layer. The loop's
//! fixed-point consistency leaves exactly one (basis, outcome) pair per
//! ensemble state, so the statistics collapse to the Born distribution over
//! the induced basis: p(x) = |⟨x|H^(ω(x))|ψ⟩|². That sum is what
//! [`measurement_distribution`] computes; no event-level scheduler is
//! simulated.
//!
//! *Channel*: parties encode chosen bits as |x⟩, measure in the induced
//! basis, and map each observed label character through f: 0,1 ↦ 0 and
//! +,- ↦ 1. Since f reads off exactly the basis bit, a run outputs the basis
//! word of the observed state; for the three-party process above this
//! reproduces ω(x) deterministically even though intermediate outcomes may
//! be random.

use crate::bits;
use crate::ensemble::{Ensemble, StateLabel};
use crate::error::{Error, Result};
use crate::process::ProcessTable;
use crate::rng::child_seed;
use crate::statevector::{OutcomeDistribution, StateVector};

/// Tolerance for calling a probability exactly 0 or 1 in faithfulness checks.
pub const FAITHFUL_TOLERANCE: f64 = 1e-9;

/// One round of the measurement protocol: the basis word the parties
/// received, the outcome word they measured, and the post-measurement state
/// H^basis|outcome⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub basis: u16,
    pub outcome: u16,
    pub label: StateLabel,
}

/// One sampled run of the channel protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelRun {
    /// The bits the parties chose to send.
    pub input: u16,
    /// The label of the post-measurement state they observed.
    pub label: StateLabel,
    /// f applied per position: the basis bits of `label`.
    pub output: u16,
}

/// Faithfulness verdict for the simulated channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulnessReport {
    pub faithful: bool,
    /// Inputs whose output distribution is not a point mass at ω(input).
    pub violations: Vec<(u16, OutcomeDistribution)>,
}

fn check_dims(omega: &ProcessTable, psi: &StateVector) -> Result<()> {
    if omega.n() != psi.n() {
        return Err(Error::DimensionMismatch(format!(
            "process on {} parties, state on {} qubits",
            omega.n(),
            psi.n()
        )));
    }
    Ok(())
}

fn induced_orthonormal(omega: &ProcessTable) -> Result<Ensemble> {
    let ensemble = Ensemble::from_process(omega);
    if let Some((j, k)) = ensemble.first_non_orthogonal_pair() {
        return Err(Error::NonOrthonormal(
            ensemble.states()[j],
            ensemble.states()[k],
        ));
    }
    Ok(ensemble)
}

/// Raw weights |⟨x|H^(ω(x))|ψ⟩|² for every outcome word, with their records.
///
/// Does not require the induced ensemble to be orthonormal; when it is not,
/// the weights need not sum to one. [`measurement_distribution`] is the
/// checked variant.
pub fn measurement_weights(
    omega: &ProcessTable,
    psi: &StateVector,
) -> Result<Vec<(MeasurementRecord, f64)>> {
    check_dims(omega, psi)?;
    let n = omega.n();
    Ok((0..bits::word_count(n) as u16)
        .map(|x| {
            let basis = omega.row(x);
            let label = StateLabel::from_bits(n, basis, x).expect("bits fit by construction");
            let state = StateVector::from_label(&label);
            let weight = state
                .overlap(psi)
                .expect("dimensions checked above")
                .norm_sqr();
            (
                MeasurementRecord {
                    basis,
                    outcome: x,
                    label,
                },
                weight,
            )
        })
        .collect())
}

/// The Born distribution of the induced-basis measurement on |ψ⟩.
///
/// Errors unless the induced ensemble is orthonormal, since otherwise the
/// weights do not form a distribution; use [`measurement_weights`] to look
/// at the raw numbers anyway.
pub fn measurement_distribution(
    omega: &ProcessTable,
    psi: &StateVector,
) -> Result<Vec<(MeasurementRecord, f64)>> {
    induced_orthonormal(omega)?;
    measurement_weights(omega, psi)
}

/// Samples one record from [`measurement_distribution`]; same seed, same
/// record.
pub fn run_measurement(
    omega: &ProcessTable,
    psi: &StateVector,
    seed: u64,
) -> Result<MeasurementRecord> {
    let dist = measurement_distribution(omega, psi)?;
    let probs = dist.iter().map(|(_, p)| *p).collect();
    let outcome = OutcomeDistribution::from_probs_unchecked(omega.n(), probs).sample(seed);
    Ok(dist[outcome as usize].0.clone())
}

/// Prepares the `secret`-th state of the induced ensemble, measures it, and
/// returns the index of the ensemble state matching the observed
/// (basis, outcome) pair. For an orthonormal induced ensemble this equals
/// `secret` with certainty.
pub fn discriminate(omega: &ProcessTable, secret: usize, seed: u64) -> Result<usize> {
    let ensemble = induced_orthonormal(omega)?;
    let states = ensemble.states();
    if secret >= states.len() {
        return Err(Error::input(format!(
            "secret index {secret} out of range for {} states",
            states.len()
        )));
    }
    let psi = StateVector::from_label(&states[secret]);
    let record = run_measurement(omega, &psi, seed)?;
    states
        .iter()
        .position(|s| s.basis_bits() == record.basis && s.xbits() == record.outcome)
        .ok_or_else(|| Error::input("measured a record outside the ensemble"))
}

/// Exact output distribution of the simulated channel on one input word.
pub fn channel_distribution(omega: &ProcessTable, input: u16) -> Result<OutcomeDistribution> {
    let n = omega.n();
    if input as usize >= bits::word_count(n) {
        return Err(Error::input(format!(
            "input {input:#x} out of range for n = {n}"
        )));
    }
    let psi = StateVector::basis_state(n, input)?;
    let dist = measurement_distribution(omega, &psi)?;
    let mut probs = vec![0.0; bits::word_count(n)];
    for (record, p) in dist {
        // f maps each label character to its basis bit.
        probs[record.basis as usize] += p;
    }
    Ok(OutcomeDistribution::from_probs_unchecked(n, probs))
}

/// One sampled channel run with the observed label.
pub fn run_channel(omega: &ProcessTable, input: u16, seed: u64) -> Result<ChannelRun> {
    let n = omega.n();
    if input as usize >= bits::word_count(n) {
        return Err(Error::input(format!(
            "input {input:#x} out of range for n = {n}"
        )));
    }
    let psi = StateVector::basis_state(n, input)?;
    let record = run_measurement(omega, &psi, seed)?;
    Ok(ChannelRun {
        input,
        label: record.label,
        output: record.basis,
    })
}

/// Checks whether the simulated channel reproduces ω deterministically:
/// every input's output distribution must be a point mass at ω(input),
/// each probability within `tolerance` of 0 or 1.
pub fn channel_is_faithful_with(omega: &ProcessTable, tolerance: f64) -> Result<FaithfulnessReport> {
    let n = omega.n();
    let mut violations = Vec::new();
    for input in 0..bits::word_count(n) as u16 {
        let dist = channel_distribution(omega, input)?;
        let expected = omega.row(input) as usize;
        let pointlike = dist
            .probs()
            .iter()
            .enumerate()
            .all(|(out, &p)| {
                let target = if out == expected { 1.0 } else { 0.0 };
                (p - target).abs() <= tolerance
            });
        if !pointlike {
            violations.push((input, dist));
        }
    }
    Ok(FaithfulnessReport {
        faithful: violations.is_empty(),
        violations,
    })
}

/// [`channel_is_faithful_with`] at the default `1e-9` tolerance.
pub fn channel_is_faithful(omega: &ProcessTable) -> Result<FaithfulnessReport> {
    channel_is_faithful_with(omega, FAITHFUL_TOLERANCE)
}

/// Runs `trials` seeded discriminations of every ensemble member and tallies
/// successes. Trial t of secret s uses the derived seed `child_seed(seed,
/// s * trials + t)`, so results are reproducible and order-independent.
pub fn discrimination_tally(
    omega: &ProcessTable,
    trials: u64,
    seed: u64,
) -> Result<Vec<(StateLabel, u64)>> {
    let ensemble = induced_orthonormal(omega)?;
    let states = ensemble.states();
    let mut tally = Vec::with_capacity(states.len());
    for (secret, state) in states.iter().enumerate() {
        let mut successes = 0u64;
        for trial in 0..trials {
            let trial_seed = child_seed(seed, secret as u64 * trials + trial);
            if discriminate(omega, secret, trial_seed)? == secret {
                successes += 1;
            }
        }
        tally.push((*state, successes));
    }
    Ok(tally)
}
