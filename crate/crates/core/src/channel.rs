//! Packetization and the per-client broadcast erasure channel.
//!
//! Packet `i` bundles the whole coded stream `P_i` with component `i` of
//! every regenerating vector, so a client needs all `n` packets before it can
//! decode anything. Erasures are drawn per packet and per client.
//!
//! Wire format of one packet (bit-exact, used for trace files):
//!
//! ```text
//! session_id  8 bytes
//! index       2 bytes, big-endian, one-based
//! T           4 bytes, big-endian
//! coded_bits  ceil(T/8) bytes, most significant bit first, zero padded
//! nu_bits     ceil(T/8) bytes, same packing
//! ```

use std::collections::BTreeSet;

use rand::Rng;

use crate::codec::{bits_from_bytes_msb, bits_to_bytes_msb, CodedSession};
use crate::gf2::BitVector;
use crate::keying::RegenVector;
use crate::seed::SimRng;
use crate::{Error, Result};

pub type SessionId = [u8; 8];

const HEADER_LEN: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packet {
    /// Zero-based stream index.
    pub index: usize,
    pub session_id: SessionId,
    pub coded_bits: BitVector,
    pub nu_bits: BitVector,
}

impl Packet {
    pub fn rounds(&self) -> usize {
        self.coded_bits.len()
    }

    pub fn payload_bits(&self) -> usize {
        self.coded_bits.len() + self.nu_bits.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let index = u16::try_from(self.index + 1).expect("packet index fits in 16 bits");
        let rounds = u32::try_from(self.rounds()).expect("T fits in 32 bits");
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * self.rounds().div_ceil(8));
        out.extend_from_slice(&self.session_id);
        out.extend_from_slice(&index.to_be_bytes());
        out.extend_from_slice(&rounds.to_be_bytes());
        out.extend(bits_to_bytes_msb(&self.coded_bits));
        out.extend(bits_to_bytes_msb(&self.nu_bits));
        out
    }

    /// Parses one packet from the front of `bytes`, returning it and the
    /// number of bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Packet, usize)> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Parse("truncated packet header".into()));
        }
        let session_id: SessionId = bytes[..8].try_into().unwrap();
        let index = u16::from_be_bytes([bytes[8], bytes[9]]) as usize;
        if index == 0 {
            return Err(Error::Parse("packet index 0 in one-based header".into()));
        }
        let rounds = u32::from_be_bytes(bytes[10..14].try_into().unwrap()) as usize;
        let body = rounds.div_ceil(8);
        let total = HEADER_LEN + 2 * body;
        if bytes.len() < total {
            return Err(Error::Parse(format!(
                "packet {index} needs {total} bytes, {} available",
                bytes.len()
            )));
        }
        let coded_bits = bits_from_bytes_msb(&bytes[HEADER_LEN..HEADER_LEN + body], rounds);
        let nu_bits = bits_from_bytes_msb(&bytes[HEADER_LEN + body..total], rounds);
        Ok((
            Packet {
                index: index - 1,
                session_id,
                coded_bits,
                nu_bits,
            },
            total,
        ))
    }
}

/// Serializes packets back to back.
pub fn write_trace(packets: &[Packet]) -> Vec<u8> {
    packets.iter().flat_map(Packet::to_bytes).collect()
}

pub fn read_trace(mut bytes: &[u8]) -> Result<Vec<Packet>> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        let (p, used) = Packet::from_bytes(bytes)?;
        out.push(p);
        bytes = &bytes[used..];
    }
    Ok(out)
}

pub fn packetize(session: &CodedSession, session_id: SessionId) -> Vec<Packet> {
    let rounds = session.rounds();
    (0..session.n())
        .map(|i| {
            let mut nu_bits = BitVector::zeros(rounds);
            for (t, nu) in session.nus.iter().enumerate() {
                nu_bits.set(t, nu.bits.get(i));
            }
            Packet {
                index: i,
                session_id,
                coded_bits: session.coded[i].clone(),
                nu_bits,
            }
        })
        .collect()
}

/// Reassembles coded streams and per-round regenerating vectors from a
/// complete set of `n` packets, in any order.
pub fn depacketize(packets: &[Packet], n: usize) -> Result<(Vec<BitVector>, Vec<RegenVector>)> {
    let mut slots: Vec<Option<&Packet>> = vec![None; n];
    for p in packets {
        if p.index >= n {
            return Err(Error::Inconsistent(format!("packet index {} exceeds n = {n}", p.index + 1)));
        }
        if slots[p.index].replace(p).is_some() {
            return Err(Error::Inconsistent(format!("packet {} appears twice", p.index + 1)));
        }
    }
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(Error::IncompleteSet(missing));
    }
    let slots: Vec<&Packet> = slots.into_iter().flatten().collect();
    let first = slots[0];
    for p in &slots {
        if p.session_id != first.session_id {
            return Err(Error::Inconsistent("session ids disagree".into()));
        }
        if p.coded_bits.len() != first.rounds() || p.nu_bits.len() != first.rounds() {
            return Err(Error::Inconsistent(format!(
                "packet {} carries {} coded and {} nu bits, expected {}",
                p.index + 1,
                p.coded_bits.len(),
                p.nu_bits.len(),
                first.rounds()
            )));
        }
    }
    let rounds = first.rounds();
    let coded = slots.iter().map(|p| p.coded_bits.clone()).collect();
    let nus = (0..rounds)
        .map(|t| {
            let mut bits = BitVector::zeros(n);
            for (i, p) in slots.iter().enumerate() {
                bits.set(i, p.nu_bits.get(t));
            }
            RegenVector::new(t, bits)
        })
        .collect();
    Ok((coded, nus))
}

/// Independent per-client packet erasures.
#[derive(Clone, Debug)]
pub struct ErasureChannel {
    erasure_probs: Vec<f64>,
    rng: SimRng,
}

impl ErasureChannel {
    pub fn new(erasure_probs: Vec<f64>, rng: SimRng) -> Result<Self> {
        if let Some(p) = erasure_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::DomainError(format!("erasure probability {p} outside [0, 1]")));
        }
        Ok(Self { erasure_probs, rng })
    }

    pub fn clients(&self) -> usize {
        self.erasure_probs.len()
    }

    pub fn erasure_probs(&self) -> &[f64] {
        &self.erasure_probs
    }

    /// Sends each listed packet once. Draws are made client-major, then in
    /// the order of `indices`. Returns per client the indices it received.
    pub fn transmit(&mut self, indices: &[usize]) -> Vec<BTreeSet<usize>> {
        self.erasure_probs
            .iter()
            .map(|&p| {
                indices
                    .iter()
                    .copied()
                    .filter(|_| self.rng.gen::<f64>() >= p)
                    .collect()
            })
            .collect()
    }

    /// One erasure indicator per client for a single transmission.
    pub fn pattern(&mut self) -> BTreeSet<usize> {
        self.transmit(&[0])
            .into_iter()
            .enumerate()
            .filter(|(_, got)| !got.is_empty())
            .map(|(u, _)| u)
            .collect()
    }
}

pub fn broadcast(packets: &[Packet], ch: &mut ErasureChannel) -> Vec<BTreeSet<usize>> {
    let indices: Vec<usize> = packets.iter().map(|p| p.index).collect();
    ch.transmit(&indices)
}
