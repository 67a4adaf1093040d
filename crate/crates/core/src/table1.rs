//! The seven-message worked example: initial keys, the round-24
//! regenerating vector and the coefficient matrix derived from them.
//!
//! Key 6 as published maps two positions to index 2 and is therefore not a
//! permutation. [`KEY6_CORRECTED_PERM`] replaces the second occurrence with
//! the missing index 1; because the mask has equal bits at positions 1 and 2
//! the corrected key yields the same row. Row 6 is still reported separately
//! and left out of the pass/fail verdict.

use crate::gf2::{BitMatrix, BitVector};
use crate::keying::{base_row, InitialKey, KeySet, Permutation};

pub const N: usize = 7;

/// One-based permutations `π_i` as printed. Entry 5 (key 6) is not a bijection.
pub const PERMS: [[usize; N]; N] = [
    [2, 7, 6, 4, 1, 5, 3],
    [4, 3, 5, 1, 2, 6, 7],
    [5, 2, 4, 7, 3, 1, 6],
    [3, 1, 7, 6, 5, 4, 2],
    [2, 1, 6, 5, 7, 4, 3],
    [3, 2, 5, 6, 7, 2, 4],
    [1, 3, 7, 5, 4, 2, 6],
];

pub const MASKS: [[u8; N]; N] = [
    [1, 1, 0, 1, 0, 0, 1],
    [1, 1, 1, 0, 0, 1, 0],
    [0, 1, 0, 0, 1, 0, 0],
    [1, 0, 1, 0, 1, 1, 1],
    [0, 1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 0, 1, 0],
    [1, 0, 1, 0, 1, 0, 1],
];

pub const KEY6_CORRECTED_PERM: [usize; N] = [3, 2, 5, 6, 7, 1, 4];

pub const NU_24: [u8; N] = [1, 0, 0, 0, 1, 0, 0];

pub const PRINTED_A24: [[u8; N]; N] = [
    [0, 1, 0, 1, 0, 0, 0],
    [1, 1, 0, 1, 0, 1, 0],
    [0, 1, 0, 0, 1, 0, 0],
    [0, 1, 1, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 1, 0],
    [1, 1, 0, 1, 1, 1, 1],
    [0, 1, 1, 1, 1, 0, 0],
];

/// Zero-based rows whose keys are well formed as printed.
pub const VERIFIED_ROWS: [usize; 6] = [0, 1, 2, 3, 4, 6];

/// Zero-based index of the erratum row.
pub const ERRATUM_ROW: usize = 5;

/// Demand sets of the four clients, one-based.
pub const DEMANDS: [&[usize]; 4] = [&[2, 4, 7], &[1, 3, 6], &[1, 2, 3, 5, 6], &[2, 5, 6, 7]];

pub fn printed_matrix() -> BitMatrix {
    BitMatrix::from_bit_rows(&PRINTED_A24).expect("7x7 literal")
}

pub fn nu_24() -> BitVector {
    BitVector::from_bits(&NU_24)
}

/// Key `i` (zero-based) as printed, or `None` for the malformed key 6.
pub fn printed_key(i: usize) -> Option<InitialKey> {
    let perm = Permutation::from_one_based(&PERMS[i]).ok()?;
    InitialKey::new(perm, BitVector::from_bits(&MASKS[i])).ok()
}

/// All seven keys with key 6 replaced by its corrected permutation.
pub fn corrected_keyset() -> KeySet {
    let keys = (0..N)
        .map(|i| {
            printed_key(i).unwrap_or_else(|| {
                let perm = Permutation::from_one_based(&KEY6_CORRECTED_PERM).expect("bijection");
                InitialKey::new(perm, BitVector::from_bits(&MASKS[i])).expect("width 7")
            })
        })
        .collect();
    KeySet::new(keys).expect("seven keys of width seven")
}

/// Row `i` obtained by applying the printed map literally, bijective or not.
pub fn literal_row(i: usize) -> BitVector {
    let mut row = BitVector::zeros(N);
    for j in 0..N {
        row.set(j, (MASKS[i][PERMS[i][j] - 1] == 1) ^ (NU_24[j] == 1));
    }
    row
}

/// Row `i` of the round-24 matrix derived from a well-formed key.
pub fn derived_row(key: &InitialKey) -> BitVector {
    &base_row(key) ^ &nu_24()
}
