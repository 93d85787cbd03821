//! Product-state labels and the ensembles induced by Boolean processes.
//!
//! A label is a string over {0,1,+,-}, one character per party. Characters
//! split into two views: the *basis bit* (0 for computational `0`/`1`, 1 for
//! Hadamard `+`/`-`) and the *x bit* (0 for `0`/`+`, 1 for `1`/`-`). A process
//! table turns into an ensemble by labelling each input word x with basis
//! bits ω(x) and x bits x; reading the two views back off a label inverts the
//! construction. All checks here are integer-only.

use std::fmt;
use std::str::FromStr;

use crate::bits;
use crate::error::{Error, Result};
use crate::process::{content_lines, parse_header, ProcessTable};

/// A product state over n parties, e.g. `"01+"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateLabel {
    n: usize,
    xbits: u16,
    basis: u16,
}

impl StateLabel {
    /// Builds a label from its two bit views.
    pub fn from_bits(n: usize, basis: u16, xbits: u16) -> Result<Self> {
        if n == 0 || n > bits::MAX_PARTIES {
            return Err(Error::input(format!(
                "party count must be between 1 and {}, got {n}",
                bits::MAX_PARTIES
            )));
        }
        let limit = bits::word_count(n) as u32;
        if (basis as u32) >= limit || (xbits as u32) >= limit {
            return Err(Error::input(format!("bits do not fit in {n} positions")));
        }
        Ok(StateLabel { n, xbits, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Which basis element per position: 0 for `0`/`+`, 1 for `1`/`-`.
    pub fn xbits(&self) -> u16 {
        self.xbits
    }

    /// Which basis per position: 0 for `0`/`1`, 1 for `+`/`-`.
    pub fn basis_bits(&self) -> u16 {
        self.basis
    }

    pub fn char_at(&self, position: usize) -> char {
        match (
            bits::bit(self.basis, self.n, position),
            bits::bit(self.xbits, self.n, position),
        ) {
            (false, false) => '0',
            (false, true) => '1',
            (true, false) => '+',
            (true, true) => '-',
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.n {
            write!(f, "{}", self.char_at(p))?;
        }
        Ok(())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > bits::MAX_PARTIES {
            return Err(Error::input(format!(
                "label must have between 1 and {} characters",
                bits::MAX_PARTIES
            )));
        }
        let mut xbits = 0u16;
        let mut basis = 0u16;
        for (p, c) in s.chars().enumerate() {
            let (b, x) = match c {
                '0' => (false, false),
                '1' => (false, true),
                '+' => (true, false),
                '-' => (true, true),
                other => {
                    return Err(Error::input(format!(
                        "invalid label character {other:?} (expected 0, 1, + or -)"
                    )))
                }
            };
            basis = bits::with_bit(basis, n, p, b);
            xbits = bits::with_bit(xbits, n, p, x);
        }
        Ok(StateLabel { n, xbits, basis })
    }
}

/// Canonical order: by x bits, then by basis bits.
impl Ord for StateLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.xbits, self.basis).cmp(&(other.n, other.xbits, other.basis))
    }
}

impl PartialOrd for StateLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A collection of `2^n` product states on n parties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    n: usize,
    states: Vec<StateLabel>,
}

impl Ensemble {
    pub fn new(n: usize, states: Vec<StateLabel>) -> Result<Self> {
        if n == 0 || n > bits::MAX_PARTIES {
            return Err(Error::input(format!(
                "party count must be between 1 and {}, got {n}",
                bits::MAX_PARTIES
            )));
        }
        if states.len() != bits::word_count(n) {
            return Err(Error::input(format!(
                "ensemble for n = {n} needs {} states, got {}",
                bits::word_count(n),
                states.len()
            )));
        }
        if let Some(bad) = states.iter().find(|s| s.n() != n) {
            return Err(Error::input(format!(
                "state {bad} has {} parties, expected {n}",
                bad.n()
            )));
        }
        Ok(Ensemble { n, states })
    }

    /// The ensemble induced by a process: state number x carries x bits x and
    /// basis bits ω(x), listed in lexicographic x order.
    pub fn from_process(omega: &ProcessTable) -> Ensemble {
        let n = omega.n();
        let states = (0..bits::word_count(n) as u16)
            .map(|x| StateLabel::from_bits(n, omega.row(x), x).expect("bits fit by construction"))
            .collect();
        Ensemble { n, states }
    }

    /// Reads the process back off the labels: table[xbits(s)] = basisbits(s).
    ///
    /// Requires the x bits of the states to enumerate every word exactly
    /// once; a collision names both offending states.
    pub fn to_process(&self) -> Result<ProcessTable> {
        let rows = bits::word_count(self.n);
        let mut seen: Vec<Option<usize>> = vec![None; rows];
        let mut table = vec![0u16; rows];
        for (idx, state) in self.states.iter().enumerate() {
            let x = state.xbits() as usize;
            if let Some(prev) = seen[x] {
                return Err(Error::input(format!(
                    "states {} and {} share the x bits {}",
                    self.states[prev],
                    state,
                    bits::format_word(state.xbits(), self.n)
                )));
            }
            seen[x] = Some(idx);
            table[x] = state.basis_bits();
        }
        ProcessTable::new(self.n, table)
    }

    /// The eight-state three-qubit SHIFT basis.
    pub fn shift() -> Ensemble {
        Ensemble::from_process(&ProcessTable::afbw())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[StateLabel] {
        &self.states
    }

    /// First pair of states (by index) whose inner product is nonzero.
    ///
    /// Two product states are orthogonal exactly when some position is in the
    /// same basis on both sides but carries different x bits: that position
    /// contributes a factor 0 to the product of single-party overlaps, and
    /// every other kind of position contributes δ or ±1/√2, never 0.
    pub fn first_non_orthogonal_pair(&self) -> Option<(usize, usize)> {
        for j in 0..self.states.len() {
            for k in (j + 1)..self.states.len() {
                if !orthogonal(&self.states[j], &self.states[k]) {
                    return Some((j, k));
                }
            }
        }
        None
    }

    /// True iff all `2^n` states are mutually orthogonal (integer check).
    pub fn is_orthonormal_exact(&self) -> bool {
        self.first_non_orthogonal_pair().is_none()
    }

    /// Per-party witness that no first local measurement can distinguish the
    /// ensemble: entry i is true when party i sees both bases across the
    /// ensemble, so any fine-grained first measurement at i disturbs some
    /// member. An all-true vector is necessary for nonlocality without
    /// entanglement; this is a witness, not a full indistinguishability
    /// decision.
    pub fn local_obstruction_report(&self) -> Vec<bool> {
        (0..self.n)
            .map(|i| {
                let mut saw_computational = false;
                let mut saw_hadamard = false;
                for state in &self.states {
                    if bits::bit(state.basis_bits(), self.n, i) {
                        saw_hadamard = true;
                    } else {
                        saw_computational = true;
                    }
                }
                saw_computational && saw_hadamard
            })
            .collect()
    }

    /// States sorted into canonical order (by x bits, then basis bits).
    pub fn sorted(&self) -> Ensemble {
        let mut states = self.states.clone();
        states.sort();
        Ensemble { n: self.n, states }
    }

    /// Equality as unordered collections.
    pub fn set_eq(&self, other: &Ensemble) -> bool {
        self.n == other.n && self.sorted().states == other.sorted().states
    }

    /// Serializes to the `.ens` text format, states in stored order.
    pub fn to_ens_string(&self) -> String {
        let mut out = format!("ensemble n={}\n", self.n);
        for state in &self.states {
            out.push_str(&state.to_string());
            out.push('\n');
        }
        out
    }

    /// Strict parser for the `.ens` text format: an `ensemble n=<N>` header,
    /// then exactly `2^N` labels, one per line. `#` starts a comment.
    pub fn from_ens_str(text: &str) -> Result<Ensemble> {
        let mut lines = content_lines(text);
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing `ensemble n=<N>` header"))?;
        let n = parse_header(line_no, &header, "ensemble")?;
        if n == 0 || n > bits::MAX_PARTIES {
            return Err(Error::parse(
                line_no,
                format!("party count must be between 1 and {}", bits::MAX_PARTIES),
            ));
        }
        let expected = bits::word_count(n);
        let mut states = Vec::with_capacity(expected);
        let mut last_line = line_no;
        for _ in 0..expected {
            let (line_no, row) = lines.next().ok_or_else(|| {
                Error::parse(
                    last_line,
                    format!("expected {expected} states, found {}", states.len()),
                )
            })?;
            last_line = line_no;
            let state: StateLabel = row
                .parse()
                .map_err(|e| Error::parse(line_no, format!("{e}")))?;
            if state.n() != n {
                return Err(Error::parse(
                    line_no,
                    format!("state has {} characters, expected {n}", state.n()),
                ));
            }
            states.push(state);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(
                line_no,
                format!("expected exactly {expected} states"),
            ));
        }
        Ensemble::new(n, states)
    }
}

fn orthogonal(a: &StateLabel, b: &StateLabel) -> bool {
    let n = a.n();
    let same_basis = !(a.basis_bits() ^ b.basis_bits());
    let differing_x = a.xbits() ^ b.xbits();
    let mask = (bits::word_count(n) - 1) as u16;
    same_basis & differing_x & mask != 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(s: &str) -> StateLabel {
        s.parse().unwrap()
    }

    #[test]
    fn label_views_and_round_trip() {
        let l = label("01+-");
        assert_eq!(l.xbits(), 0b0101);
        assert_eq!(l.basis_bits(), 0b0011);
        assert_eq!(l.to_string(), "01+-");
        assert_eq!(StateLabel::from_bits(4, 0b0011, 0b0101).unwrap(), l);
    }

    #[test]
    fn label_rejects_bad_characters() {
        assert!("01x".parse::<StateLabel>().is_err());
        assert!("".parse::<StateLabel>().is_err());
    }

    #[test]
    fn shift_is_the_induced_ensemble_of_afbw() {
        let shift = Ensemble::shift();
        let expected: Vec<StateLabel> = ["000", "111", "+01", "-01", "1+0", "1-0", "01+", "01-"]
            .iter()
            .map(|s| label(s))
            .collect();
        let as_set = Ensemble::new(3, expected).unwrap();
        assert!(shift.set_eq(&as_set));
        assert!(shift.states().contains(&label("01+")));
    }

    #[test]
    fn all_zero_process_gives_the_computational_basis() {
        let omega = ProcessTable::constant(3, 0).unwrap();
        let ens = Ensemble::from_process(&omega);
        for (x, state) in ens.states().iter().enumerate() {
            assert_eq!(state.basis_bits(), 0);
            assert_eq!(state.xbits(), x as u16);
        }
        assert!(ens.is_orthonormal_exact());
        assert!(ens.local_obstruction_report().iter().all(|&b| !b));
    }

    #[test]
    fn read_off_inverts_the_construction() {
        let omega = ProcessTable::afbw();
        let ens = Ensemble::from_process(&omega);
        assert_eq!(ens.to_process().unwrap(), omega);

        let computational: Vec<StateLabel> = ["00", "01", "10", "11"]
            .iter()
            .map(|s| label(s))
            .collect();
        let ens = Ensemble::new(2, computational).unwrap();
        assert_eq!(
            ens.to_process().unwrap(),
            ProcessTable::constant(2, 0).unwrap()
        );
    }

    #[test]
    fn read_off_names_colliding_states() {
        let states = vec![label("00"), label("0+"), label("10"), label("11")];
        // "0+" has x bits 00, clashing with "00".
        let ens = Ensemble::new(2, states).unwrap();
        let err = ens.to_process().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("00") && msg.contains("0+"), "{msg}");
    }

    #[test]
    fn shift_is_orthonormal_and_obstructed_everywhere() {
        let shift = Ensemble::shift();
        assert!(shift.is_orthonormal_exact());
        assert_eq!(shift.local_obstruction_report(), vec![true, true, true]);
    }

    #[test]
    fn zero_and_plus_are_not_orthogonal() {
        let ens = Ensemble::new(1, vec![label("0"), label("+")]).unwrap();
        assert!(!ens.is_orthonormal_exact());
        assert_eq!(ens.first_non_orthogonal_pair(), Some((0, 1)));
    }

    #[test]
    fn ens_round_trip_and_strict_errors() {
        let shift = Ensemble::shift();
        let text = shift.to_ens_string();
        assert_eq!(Ensemble::from_ens_str(&text).unwrap(), shift);

        let err = Ensemble::from_ens_str("ensemble n=1\n0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");

        let err = Ensemble::from_ens_str("ensemble n=1\n0\n1\n+\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");

        let err = Ensemble::from_ens_str("ensemble n=2\n00\n011\n10\n11\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

        let err = Ensemble::from_ens_str("process n=1\n0\n1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }
}
