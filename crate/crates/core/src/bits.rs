//! Bit-string words and the position convention used throughout the crate.
//!
//! An `n`-party word is packed into a `u16` so that party 1 occupies the most
//! significant of the low `n` bits. Under this packing the integer value of a
//! word equals its binary string read left to right, so lexicographic order on
//! strings coincides with numeric order on words. Party positions are
//! 0-indexed in the API: position 0 is party 1, the leftmost character.

/// Largest supported party count for packed words.
pub const MAX_PARTIES: usize = 16;

/// Number of words on `n` parties, i.e. `2^n`.
#[inline]
pub fn word_count(n: usize) -> usize {
    1usize << n
}

/// Bit of `word` at `position` (0 = leftmost character = party 1).
#[inline]
pub fn bit(word: u16, n: usize, position: usize) -> bool {
    debug_assert!(position < n);
    (word >> (n - 1 - position)) & 1 == 1
}

/// `word` with the bit at `position` set to `value`.
#[inline]
pub fn with_bit(word: u16, n: usize, position: usize, value: bool) -> u16 {
    let mask = 1u16 << (n - 1 - position);
    if value {
        word | mask
    } else {
        word & !mask
    }
}

/// Mask selecting the bit at `position`.
#[inline]
pub fn position_mask(n: usize, position: usize) -> u16 {
    1u16 << (n - 1 - position)
}

/// Renders `word` as an `n`-character binary string, party 1 leftmost.
pub fn format_word(word: u16, n: usize) -> String {
    (0..n)
        .map(|p| if bit(word, n, p) { '1' } else { '0' })
        .collect()
}

/// Parses an `n`-character binary string, party 1 leftmost.
///
/// Returns a description of the offending character on failure.
pub fn parse_word(s: &str, n: usize) -> Result<u16, String> {
    if s.len() != n {
        return Err(format!("expected {n} bits, found {}", s.len()));
    }
    let mut word = 0u16;
    for c in s.chars() {
        word = (word << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                other => return Err(format!("invalid bit {other:?}")),
            };
    }
    Ok(word)
}
