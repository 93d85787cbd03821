//! Boolean multi-party functions and the unique-fixed-point process property.
//!
//! A function ω: {0,1}^n → {0,1}^n exchanges one bit with each of n parties:
//! party i receives ω_i(x) and contributes x_i. ω is a *classical process*
//! when for every tuple μ of local interventions (each party mapping its
//! received bit to its sent bit) the loop equation p = ω(μ(p)) has exactly
//! one solution. This is the consistency condition for communication that
//! does not presuppose a causal order among the parties.

use std::collections::BTreeSet;
use std::fmt;

use crate::bits;
use crate::error::{Error, Result};

/// One party's local intervention: a unary Boolean function.
///
/// These four functions are the whole set of maps {0,1} → {0,1}. The declared
/// order (`Const0 < Const1 < Id < Not`) fixes the lexicographic enumeration
/// of intervention tuples and therefore which counterexample a failed
/// verification reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryFn {
    Const0,
    Const1,
    Id,
    Not,
}

impl UnaryFn {
    pub const ALL: [UnaryFn; 4] = [UnaryFn::Const0, UnaryFn::Const1, UnaryFn::Id, UnaryFn::Not];

    #[inline]
    pub fn apply(self, bit: bool) -> bool {
        match self {
            UnaryFn::Const0 => false,
            UnaryFn::Const1 => true,
            UnaryFn::Id => bit,
            UnaryFn::Not => !bit,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Const0 => "const0",
            UnaryFn::Const1 => "const1",
            UnaryFn::Id => "id",
            UnaryFn::Not => "not",
        }
    }

    fn from_code(code: u8) -> UnaryFn {
        Self::ALL[code as usize & 3]
    }
}

/// An n-tuple of local interventions, one [`UnaryFn`] per party.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Intervention {
    funcs: Vec<UnaryFn>,
}

impl Intervention {
    pub fn new(funcs: Vec<UnaryFn>) -> Self {
        assert!(!funcs.is_empty(), "intervention needs at least one party");
        Intervention { funcs }
    }

    /// Decodes the `index`-th tuple in lexicographic order: party 1 is the
    /// most significant base-4 digit, digits are the [`UnaryFn::ALL`] codes.
    pub fn from_index(n: usize, index: u64) -> Self {
        debug_assert!(index < 1u64 << (2 * n));
        let funcs = (0..n)
            .map(|i| UnaryFn::from_code(((index >> (2 * (n - 1 - i))) & 3) as u8))
            .collect();
        Intervention { funcs }
    }

    /// Inverse of [`Intervention::from_index`].
    pub fn index(&self) -> u64 {
        self.funcs
            .iter()
            .fold(0u64, |acc, f| (acc << 2) | *f as u64)
    }

    /// All `4^n` interventions in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Intervention> {
        (0..1u64 << (2 * n)).map(move |i| Intervention::from_index(n, i))
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn funcs(&self) -> &[UnaryFn] {
        &self.funcs
    }

    /// True when every component ignores its input.
    pub fn is_constant(&self) -> bool {
        self.funcs
            .iter()
            .all(|f| matches!(f, UnaryFn::Const0 | UnaryFn::Const1))
    }

    /// Applies the tuple componentwise: bit i of the result is μ_i(p_i).
    pub fn apply(&self, p: u16) -> u16 {
        let n = self.funcs.len();
        let mut out = 0u16;
        for (i, f) in self.funcs.iter().enumerate() {
            out = bits::with_bit(out, n, i, f.apply(bits::bit(p, n, i)));
        }
        out
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for func in &self.funcs {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}", func.name())?;
            first = false;
        }
        Ok(())
    }
}

/// Witness that a table is not a classical process: an intervention whose
/// loop equation has a number of solutions different from one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessViolation {
    pub intervention: Intervention,
    pub fixed_points: Vec<u16>,
}

/// Which parties can signal to which: entry (i, k) says whether party i's
/// received bit depends on party k's contributed bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalingMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl SignalingMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// True iff ω_i depends on x_k (both 0-indexed).
    pub fn receives(&self, i: usize, k: usize) -> bool {
        self.entries[i * self.n + k]
    }

    /// Row i as a 0/1 string over senders k.
    pub fn row_string(&self, i: usize) -> String {
        (0..self.n)
            .map(|k| if self.receives(i, k) { '1' } else { '0' })
            .collect()
    }
}

/// A Boolean n-party function as an explicit lookup table.
///
/// `table[x]` is ω(x); words follow the [`bits`] convention (party 1 is the
/// leftmost character, string order equals numeric order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessTable {
    n: usize,
    table: Vec<u16>,
}

impl ProcessTable {
    pub fn new(n: usize, table: Vec<u16>) -> Result<Self> {
        if n == 0 || n > bits::MAX_PARTIES {
            return Err(Error::input(format!(
                "party count must be between 1 and {}, got {n}",
                bits::MAX_PARTIES
            )));
        }
        if table.len() != bits::word_count(n) {
            return Err(Error::input(format!(
                "table for n = {n} needs {} rows, got {}",
                bits::word_count(n),
                table.len()
            )));
        }
        if let Some(bad) = table.iter().position(|&w| w as usize >= bits::word_count(n)) {
            return Err(Error::input(format!(
                "table entry at x = {} does not fit in {n} bits",
                bits::format_word(bad as u16, n)
            )));
        }
        Ok(ProcessTable { n, table })
    }

    /// The constant function x ↦ value.
    pub fn constant(n: usize, value: u16) -> Result<Self> {
        let rows = bits::word_count(n);
        Self::new(n, vec![value; rows])
    }

    /// The identity function x ↦ x.
    pub fn identity(n: usize) -> Result<Self> {
        let rows = bits::word_count(n);
        Self::new(n, (0..rows as u16).collect())
    }

    /// The three-party process a = (y⊕1)z, b = (z⊕1)x, c = (x⊕1)y.
    ///
    /// Every pair of parties can signal to the third in a single round, so
    /// each party acts in the causal future of the other two; the loop is
    /// nevertheless logically consistent (a unique fixed point under every
    /// intervention).
    pub fn afbw() -> ProcessTable {
        let table = (0..8u16)
            .map(|w| {
                let x = (w >> 2) & 1;
                let y = (w >> 1) & 1;
                let z = w & 1;
                let a = (y ^ 1) & z;
                let b = (z ^ 1) & x;
                let c = (x ^ 1) & y;
                (a << 2) | (b << 1) | c
            })
            .collect();
        ProcessTable { n: 3, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows, `2^n`.
    pub fn rows(&self) -> usize {
        self.table.len()
    }

    pub fn entries(&self) -> &[u16] {
        &self.table
    }

    /// ω(x).
    pub fn eval(&self, x: u16) -> Result<u16> {
        self.table
            .get(x as usize)
            .copied()
            .ok_or_else(|| Error::input(format!("input {x:#x} out of range for n = {}", self.n)))
    }

    #[inline]
    pub(crate) fn row(&self, x: u16) -> u16 {
        self.table[x as usize]
    }

    /// All solutions of p = ω(μ(p)), by scanning every candidate word.
    pub fn fixed_points(&self, mu: &Intervention) -> Vec<u16> {
        assert_eq!(mu.len(), self.n, "intervention arity must match the table");
        (0..self.table.len() as u16)
            .filter(|&p| self.row(mu.apply(p)) == p)
            .collect()
    }

    /// Checks the unique-fixed-point condition over all `4^n` interventions.
    ///
    /// Interventions are scanned in lexicographic order and the scan stops at
    /// the first violation, so the reported counterexample is deterministic.
    /// Cost is O(4^n · 2^n · n); practical up to n ≈ 8.
    pub fn classical_process_violation(&self) -> Option<ProcessViolation> {
        for mu in Intervention::all(self.n) {
            let mut count = 0usize;
            for p in 0..self.table.len() as u16 {
                if self.row(mu.apply(p)) == p {
                    count += 1;
                    if count > 1 {
                        break;
                    }
                }
            }
            if count != 1 {
                let fixed_points = self.fixed_points(&mu);
                return Some(ProcessViolation {
                    intervention: mu,
                    fixed_points,
                });
            }
        }
        None
    }

    /// True iff every intervention tuple admits exactly one fixed point.
    pub fn is_classical_process(&self) -> bool {
        self.classical_process_violation().is_none()
    }

    /// True iff every party can receive a signal through the process.
    ///
    /// Party i receives a signal from party k when some input x exists with
    /// ω_i(x) ≠ ω_i(x with bit k flipped). By default the sender must be a
    /// *different* party (k ≠ i); pass `allow_self = true` to also accept
    /// dependence on the party's own bit.
    pub fn has_no_global_past(&self, allow_self: bool) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).any(|k| (allow_self || k != i) && self.depends_on(i, k))
        })
    }

    fn depends_on(&self, i: usize, k: usize) -> bool {
        let out_mask = bits::position_mask(self.n, i);
        let in_mask = bits::position_mask(self.n, k);
        (0..self.table.len() as u16)
            .any(|x| (self.row(x) ^ self.row(x ^ in_mask)) & out_mask != 0)
    }

    /// The full dependence matrix: entry (i, k) true iff ω_i depends on x_k.
    pub fn signaling_relation(&self) -> SignalingMatrix {
        let mut entries = vec![false; self.n * self.n];
        for i in 0..self.n {
            for k in 0..self.n {
                entries[i * self.n + k] = self.depends_on(i, k);
            }
        }
        SignalingMatrix { n: self.n, entries }
    }

    /// Restricts ω to the parties in `keep`, pinning every other party's
    /// input bit to the value given in `fixed`.
    ///
    /// `keep` is treated as a set; the reduced process orders its parties by
    /// ascending original position. `fixed` must assign exactly the
    /// complement of `keep`. Component j of the result is the component of ω
    /// at the j-th smallest kept position, evaluated on the embedded input.
    pub fn reduce(&self, keep: &[usize], fixed: &[(usize, bool)]) -> Result<ProcessTable> {
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        if keep_set.is_empty() {
            return Err(Error::input("reduction must keep at least one position"));
        }
        if keep_set.len() != keep.len() {
            return Err(Error::input("kept positions contain a duplicate"));
        }
        if let Some(&bad) = keep_set.iter().find(|&&p| p >= self.n) {
            return Err(Error::input(format!(
                "kept position {bad} out of range for n = {}",
                self.n
            )));
        }
        let mut pinned = vec![None; self.n];
        for &(pos, value) in fixed {
            if pos >= self.n {
                return Err(Error::input(format!(
                    "fixed position {pos} out of range for n = {}",
                    self.n
                )));
            }
            if keep_set.contains(&pos) {
                return Err(Error::input(format!(
                    "position {pos} is both kept and fixed"
                )));
            }
            if pinned[pos].replace(value).is_some() {
                return Err(Error::input(format!("position {pos} fixed twice")));
            }
        }
        for (pos, value) in pinned.iter().enumerate() {
            if !keep_set.contains(&pos) && value.is_none() {
                return Err(Error::input(format!(
                    "position {pos} is neither kept nor fixed"
                )));
            }
        }

        let kept: Vec<usize> = keep_set.into_iter().collect();
        let k = kept.len();
        let mut base = 0u16;
        for (pos, value) in pinned.iter().enumerate() {
            if let Some(true) = value {
                base = bits::with_bit(base, self.n, pos, true);
            }
        }
        let table = (0..bits::word_count(k) as u16)
            .map(|z| {
                let mut input = base;
                for (j, &pos) in kept.iter().enumerate() {
                    input = bits::with_bit(input, self.n, pos, bits::bit(z, k, j));
                }
                let full = self.row(input);
                let mut out = 0u16;
                for (j, &pos) in kept.iter().enumerate() {
                    out = bits::with_bit(out, k, j, bits::bit(full, self.n, pos));
                }
                out
            })
            .collect();
        ProcessTable::new(k, table)
    }

    /// Builds the intervention that exhibits two fixed points whenever a pair
    /// of inputs breaks the shared-basis orthogonality rule.
    ///
    /// Precondition: `x ≠ y` and ω_i(x) ≠ ω_i(y) at *every* position i where
    /// x and y differ. Let D be the differing positions, ω̃ the reduction of ω
    /// to D with the remaining bits pinned to x's values, x' = x|D and
    /// ā = ω̃(x'). The returned intervention α(w) = x' ⊕ ā ⊕ w (identity where
    /// x'⊕ā is 0, negation where it is 1) makes both ā and ω̃(y|D) fixed
    /// points of ω̃ ∘ α, which rules out the classical-process property. The
    /// two fixed points are verified by scan before returning.
    pub fn double_fixed_point_witness(&self, x: u16, y: u16) -> Result<DoubleFixedPointWitness> {
        let rows = self.table.len() as u16;
        if x >= rows || y >= rows {
            return Err(Error::input(format!(
                "inputs must be {n}-bit words",
                n = self.n
            )));
        }
        if x == y {
            return Err(Error::input("witness needs two distinct inputs"));
        }
        let positions: Vec<usize> = (0..self.n)
            .filter(|&i| bits::bit(x ^ y, self.n, i))
            .collect();
        if let Some(&i) = positions
            .iter()
            .find(|&&i| !bits::bit(self.row(x) ^ self.row(y), self.n, i))
        {
            return Err(Error::input(format!(
                "orthogonality holds for this pair: position {i} differs in the inputs \
                 but ω_{party} agrees on both",
                party = i + 1
            )));
        }

        let fixed: Vec<(usize, bool)> = (0..self.n)
            .filter(|p| !positions.contains(p))
            .map(|p| (p, bits::bit(x, self.n, p)))
            .collect();
        let reduced = self.reduce(&positions, &fixed)?;
        let k = positions.len();

        let project = |w: u16| -> u16 {
            let mut out = 0u16;
            for (j, &pos) in positions.iter().enumerate() {
                out = bits::with_bit(out, k, j, bits::bit(w, self.n, pos));
            }
            out
        };
        let x_prime = project(x);
        let a = reduced.row(x_prime);
        let b = reduced.row(project(y));

        let pattern = x_prime ^ a;
        let funcs = (0..k)
            .map(|j| {
                if bits::bit(pattern, k, j) {
                    UnaryFn::Not
                } else {
                    UnaryFn::Id
                }
            })
            .collect();
        let intervention = Intervention::new(funcs);

        let fixed_points = reduced.fixed_points(&intervention);
        debug_assert!(fixed_points.contains(&a) && fixed_points.contains(&b));
        assert!(
            fixed_points.len() >= 2,
            "witness construction must yield at least two fixed points"
        );
        Ok(DoubleFixedPointWitness {
            positions,
            reduced,
            intervention,
            fixed_points,
        })
    }

    /// Relabels parties by `perm` and flips input/output bits: the result is
    /// x ↦ P(ω(P⁻¹(x) ⊕ in_flip) ⊕ out_flip) where P moves position i to
    /// position `perm[i]` simultaneously on inputs and outputs.
    ///
    /// These transformations preserve the classical-process property and the
    /// no-global-past property; they generate the symmetry group used for
    /// canonical forms.
    pub fn transformed(&self, perm: &[usize], in_flip: u16, out_flip: u16) -> ProcessTable {
        assert_eq!(perm.len(), self.n);
        let permute = |w: u16| -> u16 {
            let mut out = 0u16;
            for (i, &target) in perm.iter().enumerate() {
                out = bits::with_bit(out, self.n, target, bits::bit(w, self.n, i));
            }
            out
        };
        let inv = |w: u16| -> u16 {
            let mut out = 0u16;
            for (i, &target) in perm.iter().enumerate() {
                out = bits::with_bit(out, self.n, i, bits::bit(w, self.n, target));
            }
            out
        };
        let table = (0..self.table.len() as u16)
            .map(|x| permute(self.row(inv(x) ^ in_flip) ^ out_flip))
            .collect();
        ProcessTable { n: self.n, table }
    }

    /// Serializes to the `.proc` text format.
    pub fn to_proc_string(&self) -> String {
        let mut out = format!("process n={}\n", self.n);
        for x in 0..self.table.len() as u16 {
            out.push_str(&bits::format_word(x, self.n));
            out.push(' ');
            out.push_str(&bits::format_word(self.row(x), self.n));
            out.push('\n');
        }
        out
    }

    /// Strict parser for the `.proc` text format.
    ///
    /// Expected layout: a `process n=<N>` header, then exactly `2^N` rows
    /// `<xbits> <wbits>` in lexicographic x order. `#` starts a comment,
    /// blank lines are skipped, all other deviations error with their line
    /// number.
    pub fn from_proc_str(text: &str) -> Result<ProcessTable> {
        let mut lines = content_lines(text);
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing `process n=<N>` header"))?;
        let n = parse_header(line_no, &header, "process")?;
        if n == 0 || n > bits::MAX_PARTIES {
            return Err(Error::parse(
                line_no,
                format!("party count must be between 1 and {}", bits::MAX_PARTIES),
            ));
        }
        let rows = bits::word_count(n);
        let mut table = Vec::with_capacity(rows);
        let mut last_line = line_no;
        for expected in 0..rows as u16 {
            let (line_no, row) = lines.next().ok_or_else(|| {
                Error::parse(
                    last_line,
                    format!("expected {rows} rows, found {}", expected),
                )
            })?;
            last_line = line_no;
            let mut parts = row.split_whitespace();
            let xs = parts
                .next()
                .ok_or_else(|| Error::parse(line_no, "empty row"))?;
            let ws = parts
                .next()
                .ok_or_else(|| Error::parse(line_no, "row needs `<xbits> <wbits>`"))?;
            if parts.next().is_some() {
                return Err(Error::parse(line_no, "trailing fields after `<xbits> <wbits>`"));
            }
            let x = bits::parse_word(xs, n).map_err(|e| Error::parse(line_no, e))?;
            let w = bits::parse_word(ws, n).map_err(|e| Error::parse(line_no, e))?;
            if x != expected {
                let msg = if (x as usize) < table.len() {
                    format!(
                        "duplicate or out-of-order row: expected x={}, found x={}",
                        bits::format_word(expected, n),
                        bits::format_word(x, n)
                    )
                } else {
                    format!(
                        "rows must be in lexicographic order: expected x={}, found x={}",
                        bits::format_word(expected, n),
                        bits::format_word(x, n)
                    )
                };
                return Err(Error::parse(line_no, msg));
            }
            table.push(w);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(line_no, format!("expected exactly {rows} rows")));
        }
        ProcessTable::new(n, table)
    }
}

/// Result of [`ProcessTable::double_fixed_point_witness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleFixedPointWitness {
    /// Positions where the two inputs differ, ascending; the reduced process
    /// and the intervention live on these parties.
    pub positions: Vec<usize>,
    pub reduced: ProcessTable,
    pub intervention: Intervention,
    /// At least two solutions of p = ω̃(α(p)), ascending.
    pub fixed_points: Vec<u16>,
}

/// Iterator over non-comment, non-blank lines with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            None
        } else {
            Some((idx + 1, line.to_string()))
        }
    })
}

/// Parses a `<kind> n=<N>` header line.
pub(crate) fn parse_header(line_no: usize, line: &str, kind: &str) -> Result<usize> {
    let rest = line
        .strip_prefix(kind)
        .ok_or_else(|| Error::parse(line_no, format!("expected `{kind} n=<N>` header")))?
        .trim();
    let n = rest
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::parse(line_no, format!("expected `{kind} n=<N>` header")))?;
    Ok(n)
}
