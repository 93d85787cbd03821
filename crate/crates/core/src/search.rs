//! Exhaustive and sampled searches over Boolean n-party functions.
//!
//! Exhaustive enumeration walks every table in lexicographic order (row 0 is
//! the most significant digit of the table counter) and keeps those passing
//! the unique-fixed-point check. Three parties means 8^8 = 16,777,216
//! candidates, which stays fast because the inner check uses precomputed
//! intervention maps, probes candidates with table lookups only, and aborts
//! on the first intervention whose fixed-point count is not one. Four
//! parties (16^16 tables) is out of reach for exhaustion; use
//! [`sample_functions`].
//!
//! Parallel runs split the space by the value of table row 0 and merge the
//! per-partition results in partition order, so counts and representative
//! lists do not depend on the worker count.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use itertools::Itertools;

use crate::bits;
use crate::error::{Error, Result};
use crate::process::{Intervention, ProcessTable};
use crate::rng::SplitMix64;

/// Largest party count for exhaustive enumeration.
pub const ENUMERATION_MAX_PARTIES: usize = 3;

/// Largest party count for random sampling.
pub const SAMPLING_MAX_PARTIES: usize = 12;

/// Party count limit for the precomputed intervention maps (4^n maps of
/// 2^n entries each).
const MAP_MAX_PARTIES: usize = 8;

/// Most representatives a sampling run retains.
pub const SAMPLE_REPRESENTATIVE_CAP: usize = 64;

/// Outcome of an exhaustive or sampled search.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub n: usize,
    /// Tables examined.
    pub total_candidates: u64,
    /// Tables passing the unique-fixed-point check.
    pub process_count: u64,
    /// Of those, tables where every party receives a signal from another.
    pub no_global_past_count: u64,
    /// Symmetry classes of the no-global-past set.
    pub canonical_class_count: u64,
    pub elapsed: Duration,
    /// Canonical class representatives, lexicographically sorted. Sampling
    /// runs cap this list at [`SAMPLE_REPRESENTATIVE_CAP`].
    pub representatives: Vec<ProcessTable>,
}

/// Precomputed p ↦ μ(p) maps for the non-constant interventions, in
/// lexicographic μ order. All-constant tuples are omitted: they force the
/// unique fixed point p = ω(c) on every table, so they can never reject and
/// never become the reported counterexample.
struct InterventionMaps {
    rows: usize,
    maps: Vec<u16>,
}

impl InterventionMaps {
    fn new(n: usize) -> Self {
        assert!(n <= MAP_MAX_PARTIES);
        let rows = bits::word_count(n);
        let mut maps = Vec::new();
        for mu in Intervention::all(n) {
            if mu.is_constant() {
                continue;
            }
            for p in 0..rows as u16 {
                maps.push(mu.apply(p));
            }
        }
        InterventionMaps { rows, maps }
    }

    /// Unique-fixed-point check on a packed table.
    fn passes(&self, table: &[u16]) -> bool {
        for map in self.maps.chunks_exact(self.rows) {
            let mut count = 0u32;
            for (p, &mp) in map.iter().enumerate() {
                if table[mp as usize] == p as u16 {
                    count += 1;
                    if count == 2 {
                        break;
                    }
                }
            }
            if count != 1 {
                return false;
            }
        }
        true
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    if n == 0 || n > ENUMERATION_MAX_PARTIES {
        return Err(Error::TooLarge {
            what: "exhaustive enumeration (use sampling instead)",
            n,
            max: ENUMERATION_MAX_PARTIES,
        });
    }
    Ok(())
}

/// Total number of tables on n parties: (2^n)^(2^n).
fn candidate_count(n: usize) -> u64 {
    1u64 << (n * bits::word_count(n))
}

fn decode_table(counter: u64, n: usize, buf: &mut [u16]) {
    let rows = bits::word_count(n);
    let mask = (rows - 1) as u64;
    for (x, slot) in buf.iter_mut().enumerate() {
        *slot = ((counter >> (n * (rows - 1 - x))) & mask) as u16;
    }
}

/// No-global-past check on a packed table (default sender-must-differ rule).
fn packed_no_global_past(table: &[u16], n: usize) -> bool {
    (0..n).all(|i| {
        let out_mask = bits::position_mask(n, i);
        (0..n).any(|k| {
            k != i && {
                let in_mask = bits::position_mask(n, k);
                (0..table.len() as u16)
                    .any(|x| (table[x as usize] ^ table[(x ^ in_mask) as usize]) & out_mask != 0)
            }
        })
    })
}

/// All classical processes on n ≤ 3 parties, in lexicographic table order.
pub fn enumerate_classical_processes(n: usize) -> Result<impl Iterator<Item = ProcessTable>> {
    check_enumerable(n)?;
    let maps = InterventionMaps::new(n);
    let total = candidate_count(n);
    let mut buf = vec![0u16; bits::word_count(n)];
    Ok((0..total).filter_map(move |counter| {
        decode_table(counter, n, &mut buf);
        if maps.passes(&buf) {
            Some(ProcessTable::new(n, buf.clone()).expect("decoded tables are well formed"))
        } else {
            None
        }
    }))
}

/// The classical processes on n ≤ 3 parties in which every party receives a
/// signal from another party, in lexicographic table order.
pub fn enumerate_no_global_past(n: usize) -> Result<impl Iterator<Item = ProcessTable>> {
    Ok(enumerate_classical_processes(n)?.filter(|omega| omega.has_no_global_past(false)))
}

/// Lexicographically minimal table in the symmetry orbit of ω.
///
/// The group combines simultaneous party permutations of inputs and outputs
/// with independent per-party input and output bit flips; all of these
/// preserve the classical-process and no-global-past properties. Idempotent
/// by construction.
pub fn canonicalize(omega: &ProcessTable) -> ProcessTable {
    let n = omega.n();
    let flips = bits::word_count(n) as u16;
    let mut best: Option<ProcessTable> = None;
    for perm in (0..n).permutations(n) {
        for in_flip in 0..flips {
            for out_flip in 0..flips {
                let candidate = omega.transformed(&perm, in_flip, out_flip);
                if best.as_ref().is_none_or(|b| candidate < *b) {
                    best = Some(candidate);
                }
            }
        }
    }
    best.expect("orbit contains at least the identity image")
}

struct PartitionOutcome {
    processes: u64,
    no_global_past: u64,
    canonical: BTreeSet<ProcessTable>,
}

fn scan_partition(n: usize, first_row: u16, maps: &InterventionMaps) -> PartitionOutcome {
    let rows = bits::word_count(n);
    let per_partition = 1u64 << (n * (rows - 1));
    let base = (first_row as u64) << (n * (rows - 1));
    let mut buf = vec![0u16; rows];
    let mut outcome = PartitionOutcome {
        processes: 0,
        no_global_past: 0,
        canonical: BTreeSet::new(),
    };
    for counter in base..base + per_partition {
        decode_table(counter, n, &mut buf);
        if !maps.passes(&buf) {
            continue;
        }
        outcome.processes += 1;
        if packed_no_global_past(&buf, n) {
            outcome.no_global_past += 1;
            let omega = ProcessTable::new(n, buf.clone()).expect("decoded tables are well formed");
            outcome.canonical.insert(canonicalize(&omega));
        }
    }
    outcome
}

/// Exhaustive census over all tables on n ≤ 3 parties.
///
/// `jobs` worker threads each scan whole first-row partitions; any worker
/// count yields identical counts and representative lists, and `jobs = 1`
/// runs fully on the calling thread.
pub fn exhaustive_search(n: usize, jobs: usize) -> Result<SearchReport> {
    check_enumerable(n)?;
    let start = Instant::now();
    let maps = InterventionMaps::new(n);
    let partitions = bits::word_count(n);
    let jobs = jobs.max(1).min(partitions);

    let outcomes: Vec<PartitionOutcome> = if jobs == 1 {
        (0..partitions)
            .map(|p| scan_partition(n, p as u16, &maps))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let maps = &maps;
            let handles: Vec<_> = (0..jobs)
                .map(|worker| {
                    scope.spawn(move || {
                        (worker..partitions)
                            .step_by(jobs)
                            .map(|p| (p, scan_partition(n, p as u16, maps)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut indexed: Vec<(usize, PartitionOutcome)> = handles
                .into_iter()
                .flat_map(|h| h.join().expect("search worker panicked"))
                .collect();
            indexed.sort_by_key(|(p, _)| *p);
            indexed.into_iter().map(|(_, o)| o).collect()
        })
    };

    let mut process_count = 0;
    let mut no_global_past_count = 0;
    let mut canonical = BTreeSet::new();
    for outcome in outcomes {
        process_count += outcome.processes;
        no_global_past_count += outcome.no_global_past;
        canonical.extend(outcome.canonical);
    }
    Ok(SearchReport {
        n,
        total_candidates: candidate_count(n),
        process_count,
        no_global_past_count,
        canonical_class_count: canonical.len() as u64,
        elapsed: start.elapsed(),
        representatives: canonical.into_iter().collect(),
    })
}

/// Examines `count` uniformly random tables on n ≤ 12 parties.
///
/// Table entries are drawn from the SplitMix64 stream seeded with `seed`,
/// one raw output per row, so reports are reproducible bit for bit. The
/// representatives list holds canonical forms of the no-global-past hits,
/// capped at [`SAMPLE_REPRESENTATIVE_CAP`]. Beyond 8 parties the check
/// falls back to on-the-fly intervention evaluation and slows considerably.
pub fn sample_functions(n: usize, count: u64, seed: u64) -> Result<SearchReport> {
    if n == 0 || n > SAMPLING_MAX_PARTIES {
        return Err(Error::TooLarge {
            what: "random sampling",
            n,
            max: SAMPLING_MAX_PARTIES,
        });
    }
    let start = Instant::now();
    let maps = (n <= MAP_MAX_PARTIES).then(|| InterventionMaps::new(n));
    let rows = bits::word_count(n);
    let mut rng = SplitMix64::new(seed);
    let mut buf = vec![0u16; rows];
    let mut process_count = 0;
    let mut no_global_past_count = 0;
    let mut canonical = BTreeSet::new();
    for _ in 0..count {
        for slot in buf.iter_mut() {
            *slot = rng.next_word(n);
        }
        let passes = match &maps {
            Some(maps) => maps.passes(&buf),
            None => ProcessTable::new(n, buf.clone())
                .expect("sampled tables are well formed")
                .is_classical_process(),
        };
        if !passes {
            continue;
        }
        process_count += 1;
        if packed_no_global_past(&buf, n) {
            no_global_past_count += 1;
            let omega = ProcessTable::new(n, buf.clone()).expect("sampled tables are well formed");
            canonical.insert(canonicalize(&omega));
        }
    }
    let canonical_class_count = canonical.len() as u64;
    Ok(SearchReport {
        n,
        total_candidates: count,
        process_count,
        no_global_past_count,
        canonical_class_count,
        elapsed: start.elapsed(),
        representatives: canonical
            .into_iter()
            .take(SAMPLE_REPRESENTATIVE_CAP)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_party_processes_are_the_two_constants() {
        let found: Vec<ProcessTable> = enumerate_classical_processes(1).unwrap().collect();
        assert_eq!(
            found,
            vec![
                ProcessTable::constant(1, 0).unwrap(),
                ProcessTable::constant(1, 1).unwrap(),
            ]
        );
        assert_eq!(enumerate_no_global_past(1).unwrap().count(), 0);
    }

    #[test]
    fn packed_check_agrees_with_the_general_one_on_all_two_party_tables() {
        let maps = InterventionMaps::new(2);
        let mut buf = vec![0u16; 4];
        let mut processes = 0u32;
        for counter in 0..candidate_count(2) {
            decode_table(counter, 2, &mut buf);
            let omega = ProcessTable::new(2, buf.clone()).unwrap();
            let fast = maps.passes(&buf);
            assert_eq!(fast, omega.is_classical_process(), "table {buf:?}");
            assert_eq!(
                packed_no_global_past(&buf, 2),
                omega.has_no_global_past(false),
                "table {buf:?}"
            );
            if fast {
                processes += 1;
            }
        }
        assert!(processes > 0);
    }

    #[test]
    fn packed_check_agrees_on_random_three_party_tables() {
        let maps = InterventionMaps::new(3);
        let mut rng = SplitMix64::new(5);
        for _ in 0..200 {
            let table: Vec<u16> = (0..8).map(|_| rng.next_word(3)).collect();
            let omega = ProcessTable::new(3, table.clone()).unwrap();
            assert_eq!(maps.passes(&table), omega.is_classical_process());
        }
    }

    /// The cyclic four-party table w_i = (x_{i+1} xor 1)(x_{i+2} xor 1)
    /// x_{i+3}, indices mod 4.
    fn cyclic4() -> ProcessTable {
        let table = (0..16u16)
            .map(|x| {
                let b = |i: usize| (x >> (3 - (i % 4))) & 1;
                (0..4).fold(0u16, |w, i| {
                    w | ((b(i + 1) ^ 1) & (b(i + 2) ^ 1) & b(i + 3)) << (3 - i)
                })
            })
            .collect();
        ProcessTable::new(4, table).unwrap()
    }

    #[test]
    fn packed_check_agrees_on_four_party_tables() {
        // The sampling path relies on the packed maps beyond n = 3.
        let maps = InterventionMaps::new(4);
        let cyclic = cyclic4();
        assert!(maps.passes(cyclic.entries()));
        assert!(cyclic.is_classical_process());
        assert!(packed_no_global_past(cyclic.entries(), 4));

        let mut rng = SplitMix64::new(9);
        for _ in 0..50 {
            let table: Vec<u16> = (0..16).map(|_| rng.next_word(4)).collect();
            let omega = ProcessTable::new(4, table.clone()).unwrap();
            assert_eq!(maps.passes(&table), omega.is_classical_process());
            assert_eq!(
                packed_no_global_past(&table, 4),
                omega.has_no_global_past(false)
            );
        }
    }

    #[test]
    fn two_party_enumeration_has_processes_but_no_global_past_violations() {
        let processes: Vec<ProcessTable> = enumerate_classical_processes(2).unwrap().collect();
        assert!(!processes.is_empty());
        // Bipartite processes always leave some party without an incoming
        // signal.
        for omega in &processes {
            let rel = omega.signaling_relation();
            let some_party_receives_nothing = (0..2).any(|i| (0..2).all(|k| k == i || !rel.receives(i, k)));
            assert!(some_party_receives_nothing, "{omega:?}");
        }
        assert_eq!(enumerate_no_global_past(2).unwrap().count(), 0);
    }

    #[test]
    fn enumeration_rejects_large_party_counts() {
        assert!(matches!(
            enumerate_classical_processes(4),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn canonicalize_is_idempotent_and_permutation_stable() {
        let afbw = ProcessTable::afbw();
        let canon = canonicalize(&afbw);
        assert_eq!(canonicalize(&canon), canon);

        for perm in (0..3).permutations(3) {
            let image = afbw.transformed(&perm, 0, 0);
            assert_eq!(canonicalize(&image), canon, "perm {perm:?}");
        }

        let zero = ProcessTable::constant(3, 0).unwrap();
        assert_eq!(canonicalize(&zero), zero);
    }

    #[test]
    fn exhaustive_counts_are_worker_independent_on_two_parties() {
        let baseline = exhaustive_search(2, 1).unwrap();
        assert_eq!(baseline.total_candidates, 256);
        assert_eq!(baseline.no_global_past_count, 0);
        assert_eq!(baseline.canonical_class_count, 0);
        for jobs in 2..=5 {
            let report = exhaustive_search(2, jobs).unwrap();
            assert_eq!(report.process_count, baseline.process_count);
            assert_eq!(report.no_global_past_count, baseline.no_global_past_count);
            assert_eq!(report.representatives, baseline.representatives);
        }
    }

    #[test]
    fn sampling_is_reproducible_and_respects_zero_count() {
        let a = sample_functions(4, 2_000, 7).unwrap();
        let b = sample_functions(4, 2_000, 7).unwrap();
        assert_eq!(a.process_count, b.process_count);
        assert_eq!(a.no_global_past_count, b.no_global_past_count);
        assert_eq!(a.representatives, b.representatives);
        assert_eq!(a.total_candidates, 2_000);

        let empty = sample_functions(4, 0, 7).unwrap();
        assert_eq!(empty.total_candidates, 0);
        assert_eq!(empty.process_count, 0);
        assert_eq!(empty.no_global_past_count, 0);
        assert!(empty.representatives.is_empty());
    }
}
