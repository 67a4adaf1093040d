//! Base-station encoding and client decoding over whole sessions.
//!
//! A session carries `n` message streams of `T` bits. Round `t` (zero-based
//! here, bit position `t` of every stream) takes the column `X(t)`, derives
//! `A(t)` from the keys and the current regenerating vector, and broadcasts
//! the solution `P(t)` of `A(t)·P(t) = X(t)`.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::{BitMatrix, BitVector};
use crate::keying::{
    assemble_matrix, base_row, default_max_retries, sample_round_matrix, validate_keyset, InitialKey, KeySet,
    RegenVector,
};
use crate::par::{self, Execution};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageSet {
    streams: Vec<BitVector>,
}

impl MessageSet {
    pub fn new(streams: Vec<BitVector>) -> Result<Self> {
        let Some(first) = streams.first() else {
            return Err(Error::Config("message set needs at least one stream".into()));
        };
        let t = first.len();
        if t == 0 {
            return Err(Error::Config("message streams must be non-empty".into()));
        }
        if let Some(bad) = streams.iter().find(|s| s.len() != t) {
            return Err(Error::DimensionMismatch {
                expected: t,
                actual: bad.len(),
            });
        }
        Ok(Self { streams })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rounds: usize, rng: &mut R) -> Self {
        Self {
            streams: (0..n).map(|_| BitVector::random(rounds, rng)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.streams.len()
    }

    pub fn rounds(&self) -> usize {
        self.streams[0].len()
    }

    pub fn streams(&self) -> &[BitVector] {
        &self.streams
    }

    pub fn stream(&self, i: usize) -> &BitVector {
        &self.streams[i]
    }

    /// Column `X(t)`.
    pub fn round_vector(&self, t: usize) -> BitVector {
        column(&self.streams, t)
    }

    pub fn to_json(&self) -> String {
        let file = MessageFile {
            n: self.n(),
            rounds: self.rounds(),
            streams: self.streams.iter().map(BitVector::to_bit_string).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("message set serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MessageFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.streams.len() != file.n {
            return Err(Error::Config(format!(
                "message file declares n = {} but has {} streams",
                file.n,
                file.streams.len()
            )));
        }
        let streams = file
            .streams
            .iter()
            .map(|s| BitVector::parse_bit_string(s))
            .collect::<Result<Vec<_>>>()?;
        if let Some(s) = streams.iter().find(|s| s.len() != file.rounds) {
            return Err(Error::Config(format!(
                "message file declares T = {} but a stream has {} bits",
                file.rounds,
                s.len()
            )));
        }
        Self::new(streams)
    }

    /// Splits a byte buffer into `n` equal consecutive streams. Bits are read
    /// most significant first, so round 1 is the top bit of each stream's
    /// first byte.
    pub fn from_raw_bytes(bytes: &[u8], n: usize) -> Result<Self> {
        if n == 0 || bytes.is_empty() || !bytes.len().is_multiple_of(n) {
            return Err(Error::Config(format!(
                "{} bytes cannot be split into {n} equal non-empty streams",
                bytes.len()
            )));
        }
        let per = bytes.len() / n;
        let streams = bytes.chunks(per).map(|chunk| bits_from_bytes_msb(chunk, per * 8)).collect();
        Self::new(streams)
    }

    /// Inverse of [`MessageSet::from_raw_bytes`]; requires `T` to be a
    /// multiple of 8.
    pub fn to_raw_bytes(&self) -> Result<Vec<u8>> {
        if !self.rounds().is_multiple_of(8) {
            return Err(Error::Config(format!("T = {} is not a whole number of bytes", self.rounds())));
        }
        Ok(self.streams.iter().flat_map(bits_to_bytes_msb).collect())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MessageFile {
    n: usize,
    #[serde(rename = "T")]
    rounds: usize,
    streams: Vec<String>,
}

/// Packs bits most significant first, zero-padding the final byte.
pub fn bits_to_bytes_msb(v: &BitVector) -> Vec<u8> {
    let mut out = vec![0u8; v.len().div_ceil(8)];
    for (j, b) in v.iter().enumerate() {
        if b {
            out[j / 8] |= 0x80 >> (j % 8);
        }
    }
    out
}

pub fn bits_from_bytes_msb(bytes: &[u8], len: usize) -> BitVector {
    let mut v = BitVector::zeros(len);
    for j in 0..len {
        v.set(j, bytes[j / 8] & (0x80 >> (j % 8)) != 0);
    }
    v
}

fn column(streams: &[BitVector], t: usize) -> BitVector {
    let mut v = BitVector::zeros(streams.len());
    for (i, s) in streams.iter().enumerate() {
        v.set(i, s.get(t));
    }
    v
}

/// Turns `T` round vectors of length `n` into `n` streams of length `T`.
fn transpose(rounds: &[BitVector], n: usize) -> Vec<BitVector> {
    let mut streams = vec![BitVector::zeros(rounds.len()); n];
    for (t, p) in rounds.iter().enumerate() {
        for (i, s) in streams.iter_mut().enumerate() {
            if p.get(i) {
                s.set(t, true);
            }
        }
    }
    streams
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedSession {
    /// `coded[i]` is the stream `P_i`, bit `t` being `P_i(t)`.
    pub coded: Vec<BitVector>,
    /// One regenerating vector per round; repeated within a period.
    pub nus: Vec<RegenVector>,
    /// Regenerating vectors discarded for producing a singular matrix.
    pub singular_rejections: usize,
    /// Distinct regenerating vectors broadcast.
    pub nu_updates: usize,
}

impl CodedSession {
    pub fn n(&self) -> usize {
        self.coded.len()
    }

    pub fn rounds(&self) -> usize {
        self.nus.len()
    }

    pub fn round_vector(&self, t: usize) -> BitVector {
        column(&self.coded, t)
    }

    /// Checks `A(t)·P(t) == X(t)` for every round.
    pub fn verify(&self, msgs: &MessageSet, keys: &KeySet) -> Result<bool> {
        for t in 0..self.rounds() {
            let a = assemble_matrix(keys, &self.nus[t])?;
            if a.mat_vec_mul(&self.round_vector(t))? != msgs.round_vector(t) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// How each round's system is solved. Both give bitwise-identical output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveStrategy {
    /// Gaussian elimination on `A(t)` every round.
    PerRound,
    /// Invert `A` once per regenerating-vector period, then multiply.
    #[default]
    PeriodInverse,
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub nu_period: usize,
    /// Defaults to [`default_max_retries`] when `None`.
    pub max_retries: Option<usize>,
    pub strategy: SolveStrategy,
    pub execution: Execution,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            nu_period: 1,
            max_retries: None,
            strategy: SolveStrategy::default(),
            execution: Execution::default(),
        }
    }
}

pub fn encode_round(x: &BitVector, a: &BitMatrix) -> Result<BitVector> {
    a.solve(x)
}

pub fn encode_session<R: Rng + ?Sized>(
    msgs: &MessageSet,
    keys: &KeySet,
    rng: &mut R,
    nu_period: usize,
) -> Result<CodedSession> {
    let opts = EncodeOptions {
        nu_period,
        ..EncodeOptions::default()
    };
    encode_session_with(msgs, keys, rng, &opts)
}

/// Samples the regenerating-vector schedule sequentially from `rng`, then
/// solves the rounds (in parallel when enabled). A trailing partial period
/// is kept short rather than padded.
pub fn encode_session_with<R: Rng + ?Sized>(
    msgs: &MessageSet,
    keys: &KeySet,
    rng: &mut R,
    opts: &EncodeOptions,
) -> Result<CodedSession> {
    check_inputs(msgs, keys)?;
    if opts.nu_period == 0 {
        return Err(Error::Config("nu_period must be at least 1".into()));
    }
    let validation = validate_keyset(keys);
    if !validation.passed {
        return Err(Error::KeySetInvalid {
            pairs: validation.duplicate_pairs,
        });
    }
    let rounds = msgs.rounds();
    let max_retries = opts.max_retries.unwrap_or_else(|| default_max_retries(keys.n()));
    let mut periods = Vec::new();
    let mut nus = Vec::with_capacity(rounds);
    let mut rejections = 0;
    let mut start = 0;
    while start < rounds {
        let end = (start + opts.nu_period).min(rounds);
        let rm = sample_round_matrix(keys, start, rng, max_retries)?;
        rejections += rm.rejections;
        nus.extend((start..end).map(|t| RegenVector::new(t, rm.nu.bits.clone())));
        periods.push((start..end, rm.matrix));
        start = end;
    }
    let nu_updates = periods.len();
    let coded = solve_periods(msgs, &periods, opts.strategy, opts.execution)?;
    Ok(CodedSession {
        coded,
        nus,
        singular_rejections: rejections,
        nu_updates,
    })
}

/// Encodes against a caller-supplied per-round regenerating-vector schedule.
/// Fails with [`Error::Singular`] if any round's matrix is singular.
pub fn encode_with_nus(
    msgs: &MessageSet,
    keys: &KeySet,
    nus: &[RegenVector],
    strategy: SolveStrategy,
    execution: Execution,
) -> Result<CodedSession> {
    check_inputs(msgs, keys)?;
    if nus.len() != msgs.rounds() {
        return Err(Error::DimensionMismatch {
            expected: msgs.rounds(),
            actual: nus.len(),
        });
    }
    let mut periods: Vec<(Range<usize>, BitMatrix)> = Vec::new();
    for (t, nu) in nus.iter().enumerate() {
        if t > 0 && nu.bits == nus[t - 1].bits {
            periods.last_mut().expect("previous period").0.end = t + 1;
        } else {
            periods.push((t..t + 1, assemble_matrix(keys, nu)?));
        }
    }
    let nu_updates = periods.len();
    let coded = solve_periods(msgs, &periods, strategy, execution)?;
    Ok(CodedSession {
        coded,
        nus: nus.to_vec(),
        singular_rejections: 0,
        nu_updates,
    })
}

fn check_inputs(msgs: &MessageSet, keys: &KeySet) -> Result<()> {
    if msgs.n() != keys.n() {
        return Err(Error::DimensionMismatch {
            expected: keys.n(),
            actual: msgs.n(),
        });
    }
    Ok(())
}

fn solve_periods(
    msgs: &MessageSet,
    periods: &[(Range<usize>, BitMatrix)],
    strategy: SolveStrategy,
    execution: Execution,
) -> Result<Vec<BitVector>> {
    let per_period = par::map_items(execution, periods, |_, (range, a)| -> Result<Vec<BitVector>> {
        match strategy {
            SolveStrategy::PerRound => range.clone().map(|t| encode_round(&msgs.round_vector(t), a)).collect(),
            SolveStrategy::PeriodInverse => {
                let inv = a.invert()?;
                range.clone().map(|t| inv.mat_vec_mul(&msgs.round_vector(t))).collect()
            }
        }
    });
    let mut rounds = Vec::with_capacity(msgs.rounds());
    for p in per_period {
        rounds.extend(p?);
    }
    Ok(transpose(&rounds, msgs.n()))
}

/// `row · P` over GF(2).
pub fn decode_element(row: &BitVector, p: &BitVector) -> Result<bool> {
    row.dot(p)
}

/// A client and the zero-based message indices it wants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemandProfile {
    pub client: usize,
    pub demand: BTreeSet<usize>,
}

impl DemandProfile {
    pub fn new(client: usize, demand: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let demand: BTreeSet<usize> = demand.into_iter().collect();
        if let Some(&bad) = demand.iter().find(|&&i| i >= n) {
            return Err(Error::Config(format!(
                "client {} demands message {} but n = {n}",
                client + 1,
                bad + 1
            )));
        }
        Ok(Self { client, demand })
    }
}

/// Privileged sets `R_j`: the clients demanding message `j`.
pub fn privileged_sets(profiles: &[DemandProfile], n: usize) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); n];
    for p in profiles {
        for &i in &p.demand {
            sets[i].insert(p.client);
        }
    }
    sets
}

/// Recovers the demanded streams and nothing else. Keys for undemanded
/// messages, if supplied, are ignored.
pub fn decode_client(
    profile: &DemandProfile,
    keys: &BTreeMap<usize, InitialKey>,
    nus: &[RegenVector],
    coded: &[Option<BitVector>],
) -> Result<BTreeMap<usize, BitVector>> {
    if profile.demand.is_empty() {
        return Ok(BTreeMap::new());
    }
    let rows = profile
        .demand
        .iter()
        .map(|&i| keys.get(&i).map(|k| (i, base_row(k))).ok_or(Error::MissingKey(i)))
        .collect::<Result<Vec<_>>>()?;
    let streams = coded
        .iter()
        .enumerate()
        .map(|(i, s)| s.clone().ok_or(Error::IncompleteReception(i)))
        .collect::<Result<Vec<_>>>()?;
    let n = streams.len();
    let rounds = nus.len();
    if let Some(s) = streams.iter().find(|s| s.len() != rounds) {
        return Err(Error::DimensionMismatch {
            expected: rounds,
            actual: s.len(),
        });
    }
    let ps: Vec<BitVector> = (0..rounds).map(|t| column(&streams, t)).collect();
    let mut out = BTreeMap::new();
    for (i, base) in rows {
        if base.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: base.len(),
            });
        }
        let mut stream = BitVector::zeros(rounds);
        for t in 0..rounds {
            let row = &base ^ &nus[t].bits;
            stream.set(t, decode_element(&row, &ps[t])?);
        }
        out.insert(i, stream);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keying::{InitialKey, Permutation};
    use crate::{seed, table1};
    use proptest::prelude::*;

    fn identity_keyset(n: usize) -> KeySet {
        KeySet::new(
            (0..n)
                .map(|i| InitialKey::new(Permutation::identity(n), BitVector::unit(n, i)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn a24() -> BitMatrix {
        table1::printed_matrix()
    }

    #[test]
    fn encode_round_examples() {
        let x = BitVector::from_bits(&[1, 0, 1]);
        assert_eq!(encode_round(&x, &BitMatrix::identity(3)).unwrap(), x);
        let a = BitMatrix::from_bit_rows(&[[1u8, 1], [0, 1]]).unwrap();
        let p = encode_round(&BitVector::from_bits(&[1, 1]), &a).unwrap();
        assert_eq!(p.to_bits(), vec![0, 1]);
        assert!(matches!(encode_round(&x, &BitMatrix::zeros(3, 3)), Err(Error::Singular)));
    }

    #[test]
    fn encode_round_unit_vector_brute_force() {
        let a = a24();
        let e1 = BitVector::unit(7, 0);
        let candidates: Vec<u64> = (0..128u64)
            .filter(|&c| a.mat_vec_mul(&BitVector::from_u64(7, c)).unwrap() == e1)
            .collect();
        assert_eq!(candidates.len(), 1);
        let p = encode_round(&e1, &a).unwrap();
        assert_eq!(p.to_u64(), candidates[0]);
        assert_eq!(p, a.invert().unwrap().column(0));
    }

    #[test]
    fn identity_keys_with_zero_nu_pass_messages_through() {
        let n = 4;
        let msgs = MessageSet::random(n, 20, &mut seed::rng(1, "m", 0));
        let nus: Vec<RegenVector> = (0..20).map(|t| RegenVector::zeros(t, n)).collect();
        let s = encode_with_nus(&msgs, &identity_keyset(n), &nus, SolveStrategy::PerRound, Execution::Sequential)
            .unwrap();
        assert_eq!(s.coded, msgs.streams());
        assert_eq!(s.nu_updates, 1);
    }

    #[test]
    fn full_demand_round_trip() {
        let n = 7;
        let keys = KeySet::generate(n, &mut seed::rng(2, "keys", 0), 16).unwrap();
        let msgs = MessageSet::random(n, 64, &mut seed::rng(2, "m", 0));
        let s = encode_session(&msgs, &keys, &mut seed::rng(2, "nu", 0), 1).unwrap();
        assert!(s.verify(&msgs, &keys).unwrap());
        let profile = DemandProfile::new(0, 0..n, n).unwrap();
        let coded: Vec<Option<BitVector>> = s.coded.iter().cloned().map(Some).collect();
        let out = decode_client(&profile, &keys.subset(0..n), &s.nus, &coded).unwrap();
        for i in 0..n {
            assert_eq!(&out[&i], msgs.stream(i));
        }
    }

    #[test]
    fn single_period_reuses_nu() {
        let n = 5;
        let keys = KeySet::generate(n, &mut seed::rng(3, "keys", 0), 16).unwrap();
        let msgs = MessageSet::random(n, 30, &mut seed::rng(3, "m", 0));
        let s = encode_session(&msgs, &keys, &mut seed::rng(3, "nu", 0), 30).unwrap();
        assert_eq!(s.nu_updates, 1);
        assert!(s.nus.iter().all(|nu| nu.bits == s.nus[0].bits));
        // Truncated final period: 30 rounds with period 7 gives 5 updates.
        let s = encode_session(&msgs, &keys, &mut seed::rng(3, "nu", 0), 7).unwrap();
        assert_eq!(s.nu_updates, 5);
        assert!(s.verify(&msgs, &keys).unwrap());
    }

    #[test]
    fn invalid_keyset_is_refused() {
        let k = InitialKey::new(Permutation::identity(2), BitVector::zeros(2)).unwrap();
        let keys = KeySet::new(vec![k.clone(), k]).unwrap();
        let msgs = MessageSet::random(2, 4, &mut seed::rng(1, "m", 0));
        assert!(matches!(
            encode_session(&msgs, &keys, &mut seed::rng(1, "nu", 0), 1),
            Err(Error::KeySetInvalid { .. })
        ));
    }

    #[test]
    fn decode_element_examples() {
        let p = BitVector::from_bits(&[0, 1, 0, 1, 1, 0, 0]);
        for j in 0..7 {
            assert_eq!(decode_element(&BitVector::unit(7, j), &p).unwrap(), p.get(j));
        }
        assert!(!decode_element(&BitVector::zeros(7), &p).unwrap());
        let row1 = a24().row(0);
        let mut two = BitVector::zeros(7);
        two.set(1, true);
        two.set(3, true);
        assert!(!decode_element(&row1, &two).unwrap());
        assert!(decode_element(&row1, &BitVector::zeros(6)).is_err());
    }

    #[test]
    fn client_one_of_worked_example_gets_only_its_streams() {
        let keys = table1::corrected_keyset();
        let n = 7;
        let msgs = MessageSet::random(n, 64, &mut seed::rng(4, "m", 0));
        let s = encode_session(&msgs, &keys, &mut seed::rng(4, "nu", 0), 1).unwrap();
        let demand = [1usize, 3, 6];
        let profile = DemandProfile::new(0, demand, n).unwrap();
        let coded: Vec<Option<BitVector>> = s.coded.iter().cloned().map(Some).collect();
        let out = decode_client(&profile, &keys.subset(demand), &s.nus, &coded).unwrap();
        assert_eq!(out.keys().copied().collect::<Vec<_>>(), demand.to_vec());
        for i in demand {
            assert_eq!(&out[&i], msgs.stream(i));
        }
    }

    #[test]
    fn decode_errors() {
        let n = 3;
        let keys = KeySet::generate(n, &mut seed::rng(5, "keys", 0), 64).unwrap();
        let msgs = MessageSet::random(n, 8, &mut seed::rng(5, "m", 0));
        let s = encode_session(&msgs, &keys, &mut seed::rng(5, "nu", 0), 1).unwrap();
        let mut coded: Vec<Option<BitVector>> = s.coded.iter().cloned().map(Some).collect();
        let profile = DemandProfile::new(0, [0, 2], n).unwrap();
        assert_eq!(
            decode_client(&profile, &keys.subset([0]), &s.nus, &coded),
            Err(Error::MissingKey(2))
        );
        coded[1] = None;
        assert_eq!(
            decode_client(&profile, &keys.subset([0, 2]), &s.nus, &coded),
            Err(Error::IncompleteReception(1))
        );
        let empty = DemandProfile::new(1, [], n).unwrap();
        assert!(decode_client(&empty, &BTreeMap::new(), &s.nus, &coded).unwrap().is_empty());
        assert!(DemandProfile::new(0, [3], n).is_err());
    }

    #[test]
    fn message_formats() {
        let msgs = MessageSet::random(3, 16, &mut seed::rng(6, "m", 0));
        assert_eq!(MessageSet::from_json(&msgs.to_json()).unwrap(), msgs);
        let raw = msgs.to_raw_bytes().unwrap();
        assert_eq!(raw.len(), 6);
        assert_eq!(MessageSet::from_raw_bytes(&raw, 3).unwrap(), msgs);

        let m = MessageSet::from_raw_bytes(&[0b1000_0001, 0xff], 2).unwrap();
        assert_eq!(m.stream(0).to_bit_string(), "10000001");
        assert_eq!(m.rounds(), 8);
        assert!(MessageSet::from_raw_bytes(&[1, 2, 3], 2).is_err());

        let json = r#"{"n": 2, "T": 3, "streams": ["101", "011"]}"#;
        let m = MessageSet::from_json(json).unwrap();
        assert_eq!(m.round_vector(0).to_bits(), vec![1, 0]);
        assert!(MessageSet::from_json(r#"{"n": 2, "T": 3, "streams": ["101", "01"]}"#).is_err());
        assert!(MessageSet::from_json(r#"{"n": 1, "T": 2, "streams": ["1x"]}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn demanded_subset_round_trips(n in 1usize..=16, rounds in 1usize..=256, period in 1usize..=8, s in any::<u64>()) {
            let keys = KeySet::generate(n, &mut seed::rng(s, "keys", 0), 256).unwrap();
            let msgs = MessageSet::random(n, rounds, &mut seed::rng(s, "m", 0));
            let session = encode_session(&msgs, &keys, &mut seed::rng(s, "nu", 0), period).unwrap();
            prop_assert!(session.verify(&msgs, &keys).unwrap());
            let demand: Vec<usize> = (0..n).filter(|i| (s >> (i % 64)) & 1 == 1).collect();
            let profile = DemandProfile::new(0, demand.iter().copied(), n).unwrap();
            let coded: Vec<Option<BitVector>> = session.coded.iter().cloned().map(Some).collect();
            let with_extra = decode_client(&profile, &keys.subset(0..n), &session.nus, &coded).unwrap();
            let confined = decode_client(&profile, &keys.subset(demand.iter().copied()), &session.nus, &coded).unwrap();
            prop_assert_eq!(&with_extra, &confined);
            prop_assert_eq!(confined.len(), demand.len());
            for i in demand {
                prop_assert_eq!(&confined[&i], msgs.stream(i));
            }
        }

        #[test]
        fn strategies_are_bitwise_identical(n in 1usize..=12, rounds in 1usize..=64, period in 1usize..=5, s in any::<u64>()) {
            let keys = KeySet::generate(n, &mut seed::rng(s, "keys", 0), 256).unwrap();
            let msgs = MessageSet::random(n, rounds, &mut seed::rng(s, "m", 0));
            let mut outs = Vec::new();
            for strategy in [SolveStrategy::PerRound, SolveStrategy::PeriodInverse] {
                for execution in [Execution::Sequential, Execution::Parallel] {
                    let opts = EncodeOptions { nu_period: period, max_retries: None, strategy, execution };
                    outs.push(encode_session_with(&msgs, &keys, &mut seed::rng(s, "nu", 0), &opts).unwrap());
                }
            }
            for o in &outs[1..] {
                prop_assert_eq!(o, &outs[0]);
            }
        }
    }
}
