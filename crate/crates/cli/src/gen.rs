//! Reproducible input generation for matching and benchmarking.

use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenError {
    EmptyAlphabet,
    /// The requested copies of the literal do not fit in the input.
    PlantOverflow {
        required: usize,
        length: usize,
    },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::EmptyAlphabet => write!(f, "alphabet is empty"),
            GenError::PlantOverflow { required, length } => {
                write!(
                    f,
                    "planting needs {required} bytes but the input is {length}"
                )
            }
        }
    }
}

impl std::error::Error for GenError {}

/// Uniform value in `0..n` by rejection, so the distribution does not
/// depend on any library's range implementation. `n` is tiny here.
fn uniform_u32(rng: &mut ChaCha8Rng, n: u32) -> u32 {
    debug_assert!(n > 0);
    let limit = u32::MAX - u32::MAX % n;
    loop {
        let x = rng.next_u32();
        if x < limit {
            return x % n;
        }
    }
}

fn uniform_u64(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    debug_assert!(n > 0);
    let limit = u64::MAX - u64::MAX % n;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % n;
        }
    }
}

/// Generates `length` bytes drawn uniformly from `alphabet`, then
/// optionally overwrites `occurrences` non-overlapping copies of a
/// literal at uniformly chosen positions (sorted-gap placement).
///
/// Output is a pure function of `(length, alphabet, seed, plant)`:
/// the stream cipher behind the RNG and the two uniform samplers
/// above are fixed, so the same arguments give the same bytes on any
/// platform. The background is drawn first, then the positions, which
/// keeps the background identical with and without planting.
pub fn gen_input(
    length: usize,
    alphabet: &[u8],
    seed: u64,
    plant: Option<(&[u8], usize)>,
) -> Result<Vec<u8>, GenError> {
    if alphabet.is_empty() {
        return Err(GenError::EmptyAlphabet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = alphabet.len() as u32;
    let mut out = vec![0u8; length];
    for byte in out.iter_mut() {
        *byte = alphabet[uniform_u32(&mut rng, n) as usize];
    }

    if let Some((literal, occurrences)) = plant {
        if literal.is_empty() || occurrences == 0 {
            return Ok(out);
        }
        let required = literal.len().saturating_mul(occurrences);
        if required > length {
            return Err(GenError::PlantOverflow { required, length });
        }
        // Draw the sizes of the gaps between consecutive copies: with
        // the i-th smallest draw shifted by i literal lengths, copies
        // land in order and cannot overlap.
        let slack = (length - required) as u64;
        let mut gaps: Vec<u64> = (0..occurrences)
            .map(|_| uniform_u64(&mut rng, slack + 1))
            .collect();
        gaps.sort_unstable();
        for (i, &gap) in gaps.iter().enumerate() {
            let pos = gap as usize + i * literal.len();
            out[pos..pos + literal.len()].copy_from_slice(literal);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occurrences_of(haystack: &[u8], needle: &[u8]) -> usize {
        if haystack.len() < needle.len() {
            return 0;
        }
        (0..=haystack.len() - needle.len())
            .filter(|&i| &haystack[i..i + needle.len()] == needle)
            .count()
    }

    #[test]
    fn same_arguments_same_bytes() {
        let a = gen_input(10_000, b"parel", 42, Some((b"parallel", 3))).unwrap();
        let b = gen_input(10_000, b"parel", 42, Some((b"parallel", 3))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = gen_input(1000, b"ab", 1, None).unwrap();
        let b = gen_input(1000, b"ab", 2, None).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn output_stays_in_the_alphabet() {
        let out = gen_input(5000, b"xyz", 7, None).unwrap();
        assert_eq!(out.len(), 5000);
        assert!(out.iter().all(|b| b"xyz".contains(b)));
    }

    #[test]
    fn planted_copies_are_present_and_non_overlapping() {
        // an alphabet without 'l' makes accidental occurrences of the
        // literal impossible, so the count is exactly the plant count
        let out = gen_input(2000, b"pare", 9, Some((b"ll", 40))).unwrap();
        assert_eq!(occurrences_of(&out, b"ll"), 40);
    }

    #[test]
    fn planting_at_full_capacity_tiles_the_input() {
        let out = gen_input(12, b"ab", 3, Some((b"ab", 6))).unwrap();
        assert_eq!(
            out,
            b"ababababab"
                .iter()
                .chain(b"ab")
                .copied()
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn plant_overflow_is_an_error() {
        assert_eq!(
            gen_input(10, b"ab", 1, Some((b"abc", 4))),
            Err(GenError::PlantOverflow {
                required: 12,
                length: 10
            })
        );
    }

    #[test]
    fn empty_alphabet_is_an_error() {
        assert_eq!(gen_input(5, b"", 0, None), Err(GenError::EmptyAlphabet));
    }

    #[test]
    fn zero_length_is_fine() {
        assert_eq!(gen_input(0, b"ab", 0, None).unwrap(), Vec::<u8>::new());
    }
}
