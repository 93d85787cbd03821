//! Dense n-qubit state vectors: product-state preparation, per-party
//! Hadamard layers, Born distributions, seeded sampling and Gram matrices.
//!
//! This is the floating-point cross-check for the integer-exact ensemble
//! predicates and the engine behind the measurement and channel protocols.
//! Amplitudes are indexed by words in the usual convention (party 1 is the
//! most significant bit). Intended for small n; vectors stay dense and no
//! attempt is made to scale past a few thousand amplitudes.

pub use num_complex::Complex64;

use crate::bits;
use crate::ensemble::{Ensemble, StateLabel};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Construction-time tolerance on the squared norm.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Dense cap: `2^12` amplitudes mirrors the search limits elsewhere.
pub const MAX_QUBITS: usize = 12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A normalized vector of `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be `2^n` for some n ≤ 12 and
    /// the squared norm must be within `1e-9` of one.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::input(format!(
                "amplitude count must be a power of two, got {len}"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "dense state vectors",
                n,
                max: MAX_QUBITS,
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::input(format!(
                "state is not normalized: squared norm {norm_sq}"
            )));
        }
        Ok(StateVector { n, amps })
    }

    /// The product state named by a label: each party contributes |0⟩, |1⟩,
    /// |+⟩ or |-⟩. All amplitudes are 0 or ±2^(-h/2) with h the number of
    /// Hadamard-basis positions.
    pub fn from_label(label: &StateLabel) -> StateVector {
        let n = label.n();
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for p in 0..n {
            let factor: [f64; 2] = match label.char_at(p) {
                '0' => [1.0, 0.0],
                '1' => [0.0, 1.0],
                '+' => [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
                _ => [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            };
            let mut next = Vec::with_capacity(amps.len() * 2);
            for amp in &amps {
                next.push(amp * factor[0]);
                next.push(amp * factor[1]);
            }
            amps = next;
        }
        StateVector { n, amps }
    }

    /// Computational basis state |x⟩.
    pub fn basis_state(n: usize, x: u16) -> Result<StateVector> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "dense state vectors",
                n,
                max: MAX_QUBITS,
            });
        }
        let size = bits::word_count(n);
        if x as usize >= size {
            return Err(Error::input(format!(
                "basis index {x:#x} out of range for n = {n}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        amps[x as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Applies a Hadamard at every party whose bit is set in `mask`.
    /// Involutive up to roundoff (H² = 1).
    pub fn apply_hadamards(&self, mask: u16) -> StateVector {
        let mut amps = self.amps.clone();
        for p in 0..self.n {
            if !bits::bit(mask, self.n, p) {
                continue;
            }
            let stride = 1usize << (self.n - 1 - p);
            let mut base = 0;
            while base < amps.len() {
                for low in base..base + stride {
                    let a = amps[low];
                    let b = amps[low + stride];
                    amps[low] = (a + b) * FRAC_1_SQRT_2;
                    amps[low + stride] = (a - b) * FRAC_1_SQRT_2;
                }
                base += 2 * stride;
            }
        }
        StateVector { n: self.n, amps }
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Born probabilities in the computational basis.
    pub fn computational_distribution(&self) -> Result<OutcomeDistribution> {
        let probs: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::input(format!(
                "state norm drifted too far for a distribution: squared norm {total}"
            )));
        }
        Ok(OutcomeDistribution { n: self.n, probs })
    }
}

/// Probabilities over the `2^n` outcome words.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::input(format!(
                "outcome count must be a power of two, got {len}"
            )));
        }
        if let Some(p) = probs.iter().find(|&&p| !(0.0..=1.0 + 1e-12).contains(&p)) {
            return Err(Error::input(format!("probability {p} out of range")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::input(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(OutcomeDistribution {
            n: len.trailing_zeros() as usize,
            probs,
        })
    }

    pub(crate) fn from_probs_unchecked(n: usize, probs: Vec<f64>) -> Self {
        OutcomeDistribution { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF draw using one uniform from a SplitMix64 stream.
    /// The same seed always returns the same outcome.
    pub fn sample(&self, seed: u64) -> u16 {
        let u = SplitMix64::new(seed).next_f64();
        let mut acc = 0.0;
        for (x, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return x as u16;
            }
        }
        (self.probs.len() - 1) as u16
    }

    /// Total-variation distance to another distribution on the same outcomes.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} outcome bits",
                self.n, other.n
            )));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0)
    }
}

/// All pairwise overlaps ⟨E_j|E_k⟩ of an ensemble's states.
pub fn gram_matrix(ensemble: &Ensemble) -> Vec<Vec<Complex64>> {
    let vectors: Vec<StateVector> = ensemble.states().iter().map(StateVector::from_label).collect();
    vectors
        .iter()
        .map(|a| {
            vectors
                .iter()
                .map(|b| a.overlap(b).expect("equal dimensions by construction"))
                .collect()
        })
        .collect()
}

/// Largest entrywise deviation of a Gram matrix from the identity.
pub fn gram_identity_deviation(gram: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (j, row) in gram.iter().enumerate() {
        for (k, entry) in row.iter().enumerate() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((entry - target).norm());
        }
    }
    worst
}
