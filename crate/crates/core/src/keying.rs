//! Initial keys, regenerating vectors and coefficient-row derivation.
//!
//! Each message `i` owns a fixed key `(π_i, κ_i)`: a permutation of the
//! message indices and a uniform mask. The key's *base row* has entry `j`
//! equal to `κ_i(π_i(j))`. Every round the base station broadcasts a public
//! regenerating vector `ν`, and the decoding coefficients for message `i` are
//! `base_row_i ⊕ ν`. The same `ν` is applied to all keys.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::{BitMatrix, BitVector};
use crate::{Error, Result};

/// A bijection of `{0..n}`. Stored in one-line notation: `map[j] = π(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(Error::InvalidPermutation(format!(
                    "entry {} outside 1..={n}",
                    v + 1
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!(
                    "entry {} appears more than once",
                    v + 1
                )));
            }
        }
        Ok(Self { map })
    }

    /// Parses one-based one-line notation, e.g. `[2, 7, 6, 4, 1, 5, 3]`.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        let zero = map
            .iter()
            .map(|&v| {
                v.checked_sub(1)
                    .ok_or_else(|| Error::InvalidPermutation("entry 0 in one-based map".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Uniform over all `n!` permutations (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InitialKey {
    perm: Permutation,
    mask: BitVector,
}

impl InitialKey {
    pub fn new(perm: Permutation, mask: BitVector) -> Result<Self> {
        if perm.len() != mask.len() {
            return Err(Error::DimensionMismatch {
                expected: perm.len(),
                actual: mask.len(),
            });
        }
        Ok(Self { perm, mask })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn mask(&self) -> &BitVector {
        &self.mask
    }
}

/// Uniform permutation and independent uniform mask bits.
pub fn keygen<R: Rng + ?Sized>(n: usize, rng: &mut R) -> InitialKey {
    assert!(n >= 1, "keys need at least one message");
    let perm = Permutation::random(n, rng);
    let mask = BitVector::random(n, rng);
    InitialKey { perm, mask }
}

/// The ν-free part of the coefficient row: entry `j` is `mask[perm(j)]`.
pub fn base_row(key: &InitialKey) -> BitVector {
    let mut row = BitVector::zeros(key.n());
    for j in 0..key.n() {
        row.set(j, key.mask.get(key.perm.apply(j)));
    }
    row
}

/// Public per-round vector broadcast ahead of the coded data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegenVector {
    pub round: usize,
    pub bits: BitVector,
}

impl RegenVector {
    pub fn new(round: usize, bits: BitVector) -> Self {
        Self { round, bits }
    }

    pub fn zeros(round: usize, n: usize) -> Self {
        Self::new(round, BitVector::zeros(n))
    }

    pub fn random<R: Rng + ?Sized>(round: usize, n: usize, rng: &mut R) -> Self {
        Self::new(round, BitVector::random(n, rng))
    }
}

/// Decoding coefficients for one message in one round.
pub fn derive_row(key: &InitialKey, nu: &RegenVector) -> Result<BitVector> {
    if key.n() != nu.bits.len() {
        return Err(Error::DimensionMismatch {
            expected: key.n(),
            actual: nu.bits.len(),
        });
    }
    Ok(&base_row(key) ^ &nu.bits)
}

/// One key per message, all over the same `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySet {
    keys: Vec<InitialKey>,
}

impl KeySet {
    /// Requires exactly `n` keys of width `n`. Pairwise distinctness of base
    /// rows is checked separately by [`validate_keyset`].
    pub fn new(keys: Vec<InitialKey>) -> Result<Self> {
        let n = keys.len();
        if n == 0 {
            return Err(Error::Config("key set is empty".into()));
        }
        for k in &keys {
            if k.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: k.n(),
                });
            }
        }
        Ok(Self { keys })
    }

    /// Draws whole key sets until one passes validation and admits a
    /// nonsingular round matrix.
    pub fn generate<R: Rng + ?Sized>(n: usize, rng: &mut R, max_attempts: usize) -> Result<Self> {
        for _ in 0..max_attempts.max(1) {
            let set = Self {
                keys: (0..n).map(|_| keygen(n, &mut *rng)).collect(),
            };
            let report = validate_keyset(&set);
            if report.passed && report.affinely_independent {
                return Ok(set);
            }
        }
        Err(Error::KeySetIncoherent {
            attempts: max_attempts.max(1),
        })
    }

    pub fn n(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[InitialKey] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> &InitialKey {
        &self.keys[i]
    }

    pub fn base_rows(&self) -> Vec<BitVector> {
        self.keys.iter().map(base_row).collect()
    }

    /// The keys a client with the given demand is entitled to hold.
    pub fn subset(&self, demand: impl IntoIterator<Item = usize>) -> BTreeMap<usize, InitialKey> {
        demand.into_iter().map(|i| (i, self.keys[i].clone())).collect()
    }

    pub fn to_file(&self) -> KeySetFile {
        KeySetFile {
            n: self.n(),
            keys: self
                .keys
                .iter()
                .map(|k| KeyEntry {
                    perm: k.perm.to_one_based(),
                    mask: k.mask.to_bits(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &KeySetFile) -> Result<Self> {
        if file.keys.len() != file.n {
            return Err(Error::Config(format!(
                "key set declares n = {} but lists {} keys",
                file.n,
                file.keys.len()
            )));
        }
        let keys = file
            .keys
            .iter()
            .enumerate()
            .map(|(i, e)| {
                if e.mask.iter().any(|&b| b > 1) {
                    return Err(Error::Config(format!("key {}: mask entries must be 0 or 1", i + 1)));
                }
                let perm = Permutation::from_one_based(&e.perm)
                    .map_err(|err| Error::Config(format!("key {}: {err}", i + 1)))?;
                InitialKey::new(perm, BitVector::from_bits(&e.mask))
                    .map_err(|err| Error::Config(format!("key {}: {err}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(keys)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("key set serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KeySetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk key set: one-based permutations, 0/1 masks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeySetFile {
    pub n: usize,
    pub keys: Vec<KeyEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyEntry {
    pub perm: Vec<usize>,
    pub mask: Vec<u8>,
}

/// Matrix whose row `i` is `derive_row(keys[i], nu)`. May be singular.
pub fn assemble_matrix(keys: &KeySet, nu: &RegenVector) -> Result<BitMatrix> {
    if keys.n() != nu.bits.len() {
        return Err(Error::DimensionMismatch {
            expected: keys.n(),
            actual: nu.bits.len(),
        });
    }
    let mut m = BitMatrix::from_rows(&keys.base_rows())?;
    m.xor_each_row(&nu.bits)?;
    Ok(m)
}

pub fn default_max_retries(n: usize) -> usize {
    64 * n
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundMatrix {
    pub nu: RegenVector,
    pub matrix: BitMatrix,
    /// Regenerating vectors discarded because they gave a singular matrix.
    pub rejections: usize,
}

/// Draws `ν` until the assembled matrix is nonsingular. Keys never change;
/// only `ν` is redrawn. Fails after `max_retries` redraws.
pub fn sample_round_matrix<R: Rng + ?Sized>(
    keys: &KeySet,
    round: usize,
    rng: &mut R,
    max_retries: usize,
) -> Result<RoundMatrix> {
    let base = BitMatrix::from_rows(&keys.base_rows())?;
    for rejections in 0..=max_retries {
        let nu = RegenVector::random(round, keys.n(), rng);
        let mut matrix = base.clone();
        matrix.xor_each_row(&nu.bits)?;
        if matrix.is_nonsingular() {
            return Ok(RoundMatrix {
                nu,
                matrix,
                rejections,
            });
        }
    }
    Err(Error::KeySetIncoherent {
        attempts: max_retries + 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    /// Zero-based message pairs `(i, j)`, `i < j`, with equal base rows.
    pub duplicate_pairs: Vec<(usize, usize)>,
    /// Whether some `ν` makes the round matrix nonsingular. Not part of
    /// `passed`; see [`affinely_independent`].
    pub affinely_independent: bool,
}

/// Rows `b_i ⊕ ν` are independent for some `ν` iff the differences
/// `b_i ⊕ b_0` have rank `len - 1`, and then for exactly half of all `ν`.
pub fn affinely_independent(rows: &[BitVector]) -> bool {
    let Some((first, rest)) = rows.split_first() else {
        return true;
    };
    if rest.is_empty() {
        return true;
    }
    let diffs: Vec<BitVector> = rest.iter().map(|r| r ^ first).collect();
    BitMatrix::from_rows(&diffs).map(|m| m.rank() == rest.len()).unwrap_or(false)
}

/// Screens for pairs of keys with identical base rows. Such pairs stay equal
/// after XOR with any common `ν`, so every round matrix would be singular.
pub fn validate_keyset(keys: &KeySet) -> ValidationReport {
    let rows = keys.base_rows();
    let mut by_row: BTreeMap<&BitVector, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        by_row.entry(r).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for idx in by_row.values() {
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_unstable();
    ValidationReport {
        passed: pairs.is_empty(),
        duplicate_pairs: pairs,
        affinely_independent: affinely_independent(&rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use crate::table1;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn key(perm: &[usize], mask: &[u8]) -> InitialKey {
        InitialKey::new(Permutation::from_one_based(perm).unwrap(), BitVector::from_bits(mask)).unwrap()
    }

    fn nu24() -> RegenVector {
        RegenVector::new(24, BitVector::from_bits(&table1::NU_24))
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert!(Permutation::from_one_based(&[3, 2, 5, 6, 7, 2, 4]).is_err());
        assert!(Permutation::from_one_based(&[1, 2, 4]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::from_one_based(&[2, 1, 3]).is_ok());
    }

    #[test]
    fn keygen_size_one() {
        let k = keygen(1, &mut seed::rng(1, "k", 0));
        assert_eq!(k.perm().to_one_based(), vec![1]);
        assert_eq!(k.mask().len(), 1);
    }

    #[test]
    fn keygen_is_deterministic() {
        let a = keygen(12, &mut seed::rng(77, "k", 0));
        let b = keygen(12, &mut seed::rng(77, "k", 0));
        assert_eq!(a, b);
    }

    #[test]
    fn keygen_permutations_are_uniform() {
        let mut rng = seed::rng(8, "shuffle", 0);
        let draws = 60_000;
        let mut counts: HashMap<Vec<usize>, u32> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(keygen(3, &mut rng).perm().to_one_based()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            let f = *c as f64 / draws as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "frequency {f}");
        }
    }

    #[test]
    fn base_row_table_one_examples() {
        let k1 = key(&[2, 7, 6, 4, 1, 5, 3], &[1, 1, 0, 1, 0, 0, 1]);
        assert_eq!(base_row(&k1).to_bits(), vec![1, 1, 0, 1, 1, 0, 0]);
        let k4 = key(&[3, 1, 7, 6, 5, 4, 2], &[1, 0, 1, 0, 1, 1, 1]);
        assert_eq!(base_row(&k4).to_bits(), vec![1, 1, 1, 1, 1, 0, 0]);
        let mask = BitVector::from_bits(&[1, 0, 0, 1]);
        let id = InitialKey::new(Permutation::identity(4), mask.clone()).unwrap();
        assert_eq!(base_row(&id), mask);
    }

    #[test]
    fn derive_row_table_one_examples() {
        let k1 = key(&[2, 7, 6, 4, 1, 5, 3], &[1, 1, 0, 1, 0, 0, 1]);
        assert_eq!(derive_row(&k1, &nu24()).unwrap().to_bits(), vec![0, 1, 0, 1, 0, 0, 0]);
        let k5 = key(&[2, 1, 6, 5, 7, 4, 3], &[0, 1, 0, 1, 0, 1, 1]);
        assert_eq!(derive_row(&k5, &nu24()).unwrap().to_bits(), vec![0, 0, 1, 0, 0, 1, 0]);
        assert_eq!(derive_row(&k5, &RegenVector::zeros(0, 7)).unwrap(), base_row(&k5));
        assert!(matches!(
            derive_row(&k5, &RegenVector::zeros(0, 6)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn assemble_matches_printed_rows() {
        let keys = table1::corrected_keyset();
        let a = assemble_matrix(&keys, &nu24()).unwrap();
        let printed = table1::printed_matrix();
        for r in table1::VERIFIED_ROWS {
            assert_eq!(a.row(r), printed.row(r), "row {}", r + 1);
        }
        let zero = assemble_matrix(&keys, &RegenVector::zeros(0, 7)).unwrap();
        assert_eq!(zero, BitMatrix::from_rows(&keys.base_rows()).unwrap());
        assert_eq!(a, assemble_matrix(&keys, &nu24()).unwrap());
    }

    fn identity_keyset(n: usize) -> KeySet {
        // perm = identity and mask = e_i gives base row e_i.
        KeySet::new(
            (0..n)
                .map(|i| InitialKey::new(Permutation::identity(n), BitVector::unit(n, i)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Always returns zero.
    struct ZeroRng;
    impl rand::RngCore for ZeroRng {
        fn next_u32(&mut self) -> u32 {
            0
        }
        fn next_u64(&mut self) -> u64 {
            0
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            dest.fill(0)
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
            dest.fill(0);
            Ok(())
        }
    }

    #[test]
    fn identity_base_rows_accept_zero_nu() {
        let keys = identity_keyset(5);
        let rm = sample_round_matrix(&keys, 1, &mut ZeroRng, 10).unwrap();
        assert_eq!(rm.rejections, 0);
        assert!(rm.nu.bits.is_zero());
        assert_eq!(rm.matrix, BitMatrix::identity(5));
    }

    #[test]
    fn equal_base_rows_are_incoherent() {
        let zero = InitialKey::new(Permutation::identity(2), BitVector::zeros(2)).unwrap();
        let keys = KeySet::new(vec![zero.clone(), zero]).unwrap();
        let err = sample_round_matrix(&keys, 0, &mut seed::rng(1, "nu", 0), 20).unwrap_err();
        assert_eq!(err, Error::KeySetIncoherent { attempts: 21 });
        let report = validate_keyset(&keys);
        assert!(!report.passed);
        assert_eq!(report.duplicate_pairs, vec![(0, 1)]);
    }

    #[test]
    fn table_one_with_corrected_key_six_is_accepted() {
        let keys = table1::corrected_keyset();
        let a = assemble_matrix(&keys, &nu24()).unwrap();
        assert_eq!(a.rank(), 7);
        assert!(validate_keyset(&keys).passed);
        let rm = sample_round_matrix(&keys, 24, &mut seed::rng(2, "nu", 0), 64 * 7).unwrap();
        assert!(rm.matrix.is_nonsingular());
    }

    #[test]
    fn validate_examples() {
        assert!(validate_keyset(&identity_keyset(6)).passed);
        let k = keygen(3, &mut seed::rng(4, "k", 0));
        let other = keygen(3, &mut seed::rng(5, "k", 0));
        let set = KeySet::new(vec![k.clone(), other, k]).unwrap();
        let r = validate_keyset(&set);
        assert!(!r.passed);
        assert!(r.duplicate_pairs.contains(&(0, 2)));
    }

    #[test]
    fn table_one_verified_rows_are_distinct() {
        let keys = table1::corrected_keyset();
        let rows = keys.base_rows();
        for (a, &i) in table1::VERIFIED_ROWS.iter().enumerate() {
            for &j in &table1::VERIFIED_ROWS[a + 1..] {
                assert_ne!(rows[i], rows[j]);
            }
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let keys = KeySet::generate(7, &mut seed::rng(3, "keys", 0), 8).unwrap();
        let text = keys.to_json();
        assert_eq!(KeySet::from_json(&text).unwrap(), keys);
        assert!(text.contains("\"perm\""));
        let bad = r#"{"n": 2, "keys": [{"perm": [1, 1], "mask": [0, 1]}, {"perm": [1, 2], "mask": [1, 1]}]}"#;
        assert!(matches!(KeySet::from_json(bad), Err(Error::Config(_))));
        let short = r#"{"n": 2, "keys": [{"perm": [1, 2], "mask": [0, 1]}]}"#;
        assert!(KeySet::from_json(short).is_err());
    }

    #[test]
    fn base_row_bits_are_unbiased_whatever_the_permutation() {
        // Chi-square on the 16 joint patterns, n = 4, fixed non-identity perm.
        let perm = Permutation::from_one_based(&[3, 1, 4, 2]).unwrap();
        let mut rng = seed::rng(10, "chi", 0);
        let draws = 100_000;
        let mut counts = [0u32; 16];
        for _ in 0..draws {
            let k = InitialKey::new(perm.clone(), BitVector::random(4, &mut rng)).unwrap();
            counts[base_row(&k).to_u64() as usize] += 1;
        }
        let expected = draws as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 15 degrees of freedom; 99.9th percentile is about 37.7.
        assert!(chi2 < 37.7, "chi-square {chi2}");
    }

    #[test]
    fn affine_independence_decides_coherence() {
        // Exhaustive over base-row triples for n = 3: some ν works iff the
        // rows are affinely independent, and then exactly half of all ν do.
        for idx in 0..1u64 << 9 {
            let rows: Vec<BitVector> = (0..3).map(|r| BitVector::from_u64(3, idx >> (3 * r) & 7)).collect();
            let base = BitMatrix::from_rows(&rows).unwrap();
            let good = (0..8u64)
                .filter(|&nu| {
                    let mut m = base.clone();
                    m.xor_each_row(&BitVector::from_u64(3, nu)).unwrap();
                    m.is_nonsingular()
                })
                .count();
            assert_eq!(affinely_independent(&rows), good > 0, "rows {idx:o}");
            assert!(good == 0 || good == 4);
        }
    }

    #[test]
    fn distinct_but_dependent_rows_are_incoherent() {
        let rows = [0b000u64, 0b011, 0b101, 0b110].map(|r| BitVector::from_u64(4, r));
        let keys = KeySet::new(rows.iter().map(|r| InitialKey::new(Permutation::identity(4), r.clone()).unwrap()).collect()).unwrap();
        let report = validate_keyset(&keys);
        assert!(report.passed);
        assert!(!report.affinely_independent);
        assert!(matches!(
            sample_round_matrix(&keys, 0, &mut seed::rng(0, "nu", 0), 32),
            Err(Error::KeySetIncoherent { attempts: 33 })
        ));
    }

    #[test]
    fn generated_sets_are_coherent() {
        for s in 0..50 {
            let keys = KeySet::generate(6, &mut seed::rng(s, "keys", 0), 64).unwrap();
            assert!(validate_keyset(&keys).affinely_independent);
        }
    }

    #[test]
    fn key_derived_law_is_uniform_over_gl2() {
        // All (perm, mask) per row and all nu: 8 * 8 * 4 = 256 configurations.
        let n = 2;
        let keys_1: Vec<InitialKey> = [vec![0, 1], vec![1, 0]]
            .into_iter()
            .flat_map(|p| {
                (0..4u64).map(move |m| {
                    InitialKey::new(Permutation::new(p.clone()).unwrap(), BitVector::from_u64(n, m)).unwrap()
                })
            })
            .collect();
        let mut counts: HashMap<u64, u32> = HashMap::new();
        let mut configs = 0;
        for a in &keys_1 {
            for b in &keys_1 {
                let set = KeySet::new(vec![a.clone(), b.clone()]).unwrap();
                for nu in 0..4u64 {
                    configs += 1;
                    let m = assemble_matrix(&set, &RegenVector::new(0, BitVector::from_u64(n, nu))).unwrap();
                    if m.is_nonsingular() {
                        *counts.entry(m.to_index()).or_default() += 1;
                    }
                }
            }
        }
        assert_eq!(configs, 256);
        assert_eq!(counts.len(), 6);
        let first = *counts.values().next().unwrap();
        assert!(counts.values().all(|&c| c == first));
    }

    proptest! {
        #[test]
        fn derive_row_inverts_with_nu(n in 1usize..40, s in any::<u64>()) {
            let mut rng = seed::rng(s, "p", 0);
            let k = keygen(n, &mut rng);
            let nu = RegenVector::random(0, n, &mut rng);
            let row = derive_row(&k, &nu).unwrap();
            prop_assert_eq!(&row ^ &nu.bits, base_row(&k));
        }

        #[test]
        fn generation_is_deterministic(n in 1usize..12, s in any::<u64>()) {
            let a = KeySet::generate(n, &mut seed::rng(s, "keys", 0), 64);
            let b = KeySet::generate(n, &mut seed::rng(s, "keys", 0), 64);
            prop_assert_eq!(a, b);
        }
    }
}
