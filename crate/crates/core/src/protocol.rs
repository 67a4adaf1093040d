//! Session orchestration: key establishment, broadcast, NACK recovery and
//! decoding, plus opportunistic key sharing over the erasure channel.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{self, ErasureChannel, Packet};
use crate::codec::{self, privileged_sets, DemandProfile, EncodeOptions, MessageSet};
use crate::gf2::BitVector;
use crate::keying::{affinely_independent, base_row, keygen, InitialKey, KeySet};
use crate::par::Execution;
use crate::seed;
use crate::{Error, Result};

fn default_nu_period() -> usize {
    1
}

fn default_max_recovery_rounds() -> usize {
    100
}

fn default_keyshare_budget() -> usize {
    100_000
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyMode {
    #[default]
    OutOfBand,
    Opportunistic,
}

/// Session input as read from JSON. Demand sets are one-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub demands: Vec<Vec<usize>>,
    pub erasure_probs: Vec<f64>,
    pub seed: u64,
    #[serde(default = "default_nu_period")]
    pub nu_period: usize,
    #[serde(default = "default_max_recovery_rounds")]
    pub max_recovery_rounds: usize,
    #[serde(default)]
    pub key_mode: KeyMode,
    #[serde(default = "default_keyshare_budget")]
    pub keyshare_budget: usize,
    /// Adds coded-bit balance statistics to the report.
    #[serde(default)]
    pub audit: bool,
}

impl SessionConfig {
    /// Parses and validates. Parse errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SessionConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.k == 0 || self.rounds == 0 {
            return fail("n, k and T must all be positive".into());
        }
        if self.n > u16::MAX as usize {
            return fail(format!("n = {} exceeds the 16-bit packet index", self.n));
        }
        if self.demands.len() != self.k {
            return fail(format!("k = {} but {} demand sets given", self.k, self.demands.len()));
        }
        if self.erasure_probs.len() != self.k {
            return fail(format!(
                "k = {} but {} erasure probabilities given",
                self.k,
                self.erasure_probs.len()
            ));
        }
        for (u, d) in self.demands.iter().enumerate() {
            if let Some(&bad) = d.iter().find(|&&i| i == 0 || i > self.n) {
                return fail(format!("demands[{u}]: message {bad} outside 1..={}", self.n));
            }
        }
        if let Some((u, p)) = self
            .erasure_probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return fail(format!("erasure_probs[{u}] = {p} outside [0, 1]"));
        }
        if self.nu_period == 0 {
            return fail("nu_period must be at least 1".into());
        }
        if self.max_recovery_rounds == 0 {
            return fail("max_recovery_rounds must be at least 1".into());
        }
        if self.keyshare_budget == 0 {
            return fail("keyshare_budget must be at least 1".into());
        }
        Ok(())
    }

    /// Zero-based demand profiles.
    pub fn profiles(&self) -> Vec<DemandProfile> {
        self.demands
            .iter()
            .enumerate()
            .map(|(u, d)| DemandProfile::new(u, d.iter().map(|i| i - 1), self.n).expect("validated"))
            .collect()
    }

    /// Zero-based indices of messages nobody demands.
    pub fn unused_messages(&self) -> Vec<usize> {
        privileged_sets(&self.profiles(), self.n)
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_empty())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClientState {
    pub id: usize,
    pub demand: BTreeSet<usize>,
    held_keys: BTreeMap<usize, InitialKey>,
    pub received: BTreeSet<usize>,
    pub decoded: BTreeMap<usize, BitVector>,
}

impl ClientState {
    pub fn new(profile: &DemandProfile) -> Self {
        Self {
            id: profile.client,
            demand: profile.demand.clone(),
            held_keys: BTreeMap::new(),
            received: BTreeSet::new(),
            decoded: BTreeMap::new(),
        }
    }

    /// Refuses keys for messages outside the demand set.
    pub fn install_key(&mut self, message: usize, key: InitialKey) -> Result<()> {
        if !self.demand.contains(&message) {
            return Err(Error::DomainError(format!(
                "client {} is not privileged for message {}",
                self.id + 1,
                message + 1
            )));
        }
        self.held_keys.insert(message, key);
        Ok(())
    }

    pub fn held_keys(&self) -> &BTreeMap<usize, InitialKey> {
        &self.held_keys
    }

    pub fn profile(&self) -> DemandProfile {
        DemandProfile {
            client: self.id,
            demand: self.demand.clone(),
        }
    }
}

/// Every missing packet, whether demanded or not. Filtering by demand would
/// reveal which coefficients of the client's rows are nonzero.
pub fn nack(state: &ClientState, n: usize) -> BTreeSet<usize> {
    missing(&state.received, n)
}

fn missing(received: &BTreeSet<usize>, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|j| !received.contains(j)).collect()
}

/// Chooses what the base station sends in a recovery round.
pub trait RetransmissionStrategy {
    fn name(&self) -> &'static str;

    /// Packet indices to send, given each client's NACK set.
    fn select(&self, nacks: &[BTreeSet<usize>]) -> Vec<usize>;
}

/// Resends the original packets named in any NACK, in index order.
#[derive(Clone, Copy, Debug, Default)]
pub struct PlainRebroadcast;

impl RetransmissionStrategy for PlainRebroadcast {
    fn name(&self) -> &'static str {
        "plain_rebroadcast"
    }

    fn select(&self, nacks: &[BTreeSet<usize>]) -> Vec<usize> {
        let all: BTreeSet<usize> = nacks.iter().flatten().copied().collect();
        all.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryOutcome {
    pub receptions: Vec<BTreeSet<usize>>,
    /// Packets sent during recovery, counted once per transmission.
    pub retransmissions: usize,
    pub rounds_used: usize,
    /// False when `max_rounds` ran out first.
    pub complete: bool,
}

impl RecoveryOutcome {
    pub fn budget_exceeded(&self) -> bool {
        !self.complete
    }
}

pub fn recovery_loop(
    receptions: Vec<BTreeSet<usize>>,
    packets: &[Packet],
    ch: &mut ErasureChannel,
    max_rounds: usize,
) -> RecoveryOutcome {
    recovery_loop_with(&PlainRebroadcast, receptions, packets.len(), ch, max_rounds)
}

pub fn recovery_loop_with(
    strategy: &dyn RetransmissionStrategy,
    mut receptions: Vec<BTreeSet<usize>>,
    n: usize,
    ch: &mut ErasureChannel,
    max_rounds: usize,
) -> RecoveryOutcome {
    let mut retransmissions = 0;
    let mut rounds_used = 0;
    loop {
        let nacks: Vec<BTreeSet<usize>> = receptions.iter().map(|r| missing(r, n)).collect();
        if nacks.iter().all(BTreeSet::is_empty) {
            return RecoveryOutcome {
                receptions,
                retransmissions,
                rounds_used,
                complete: true,
            };
        }
        if rounds_used == max_rounds {
            return RecoveryOutcome {
                receptions,
                retransmissions,
                rounds_used,
                complete: false,
            };
        }
        let resend = strategy.select(&nacks);
        retransmissions += resend.len();
        rounds_used += 1;
        for (have, got) in receptions.iter_mut().zip(ch.transmit(&resend)) {
            have.extend(got);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyshareOutcome {
    /// Bound key per message; `None` if still unkeyed.
    pub keys: Vec<Option<InitialKey>>,
    pub broadcasts: usize,
    /// Broadcasts whose reception pattern matched an unkeyed message.
    pub matches: usize,
    /// Matches discarded because the candidate's base row was affinely
    /// dependent on those already bound, which would leave every round
    /// matrix singular.
    pub rejected: usize,
}

impl KeyshareOutcome {
    pub fn complete(&self) -> bool {
        self.keys.iter().all(Option::is_some)
    }

    pub fn unkeyed(&self) -> usize {
        self.keys.iter().filter(|k| k.is_none()).count()
    }
}

/// Broadcasts random candidate keys until every message `i` has been bound
/// to a candidate heard by exactly the clients in `privileged[i]`, or the
/// budget runs out. Returns the partial outcome either way.
///
/// Messages listed in `preinstalled` are already keyed and are skipped; their
/// privileged set may be empty. When several unkeyed messages share a
/// privileged set, the lowest index is keyed first.
pub fn run_keyshare<R: Rng + ?Sized>(
    privileged: &[BTreeSet<usize>],
    preinstalled: &BTreeMap<usize, InitialKey>,
    ch: &mut ErasureChannel,
    rng: &mut R,
    budget: usize,
) -> Result<KeyshareOutcome> {
    let n = privileged.len();
    let mut keys: Vec<Option<InitialKey>> = (0..n).map(|i| preinstalled.get(&i).cloned()).collect();
    for (i, r) in privileged.iter().enumerate() {
        if keys[i].is_none() && r.is_empty() {
            return Err(Error::Config(format!(
                "message {} has no privileged recipient to share a key with",
                i + 1
            )));
        }
    }
    let mut bound_rows: Vec<BitVector> = keys.iter().flatten().map(base_row).collect();
    let mut out = KeyshareOutcome {
        keys: Vec::new(),
        broadcasts: 0,
        matches: 0,
        rejected: 0,
    };
    while out.broadcasts < budget && keys.iter().any(Option::is_none) {
        let candidate = keygen(n, rng);
        let heard = ch.pattern();
        out.broadcasts += 1;
        let Some(i) = (0..n).find(|&i| keys[i].is_none() && privileged[i] == heard) else {
            continue;
        };
        out.matches += 1;
        bound_rows.push(base_row(&candidate));
        if !affinely_independent(&bound_rows) {
            bound_rows.pop();
            out.rejected += 1;
            continue;
        }
        keys[i] = Some(candidate);
    }
    out.keys = keys;
    Ok(out)
}

/// Locally generated keys for `messages`, redrawn until their base rows are
/// affinely independent.
fn local_keys<R: Rng + ?Sized>(messages: &[usize], n: usize, rng: &mut R) -> BTreeMap<usize, InitialKey> {
    let mut rows = Vec::new();
    let mut out = BTreeMap::new();
    for &i in messages {
        loop {
            let key = keygen(n, rng);
            rows.push(base_row(&key));
            if affinely_independent(&rows) {
                out.insert(i, key);
                break;
            }
            rows.pop();
        }
    }
    out
}

/// Like [`run_keyshare`] with nothing preinstalled, failing with
/// [`Error::KeyshareBudgetExceeded`] if some message stays unkeyed.
pub fn opportunistic_keyshare<R: Rng + ?Sized>(
    privileged: &[BTreeSet<usize>],
    ch: &mut ErasureChannel,
    rng: &mut R,
    budget: usize,
) -> Result<KeyshareOutcome> {
    let out = run_keyshare(privileged, &BTreeMap::new(), ch, rng, budget)?;
    if out.complete() {
        Ok(out)
    } else {
        Err(Error::KeyshareBudgetExceeded {
            budget,
            unkeyed: out.unkeyed(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionPhase {
    KeysEstablished,
    Broadcast,
    Recovered,
    Decoded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClientReport {
    /// One-based.
    pub client: usize,
    /// One-based.
    pub demand: Vec<usize>,
    pub received_packets: usize,
    pub decode_success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    /// `max_i |freq(P_i = 1) - 1/2|` over the session's rounds.
    pub max_coded_bit_bias: f64,
    /// Rounds whose coded vector was all zeros.
    pub zero_coded_rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionReport {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub seed: u64,
    pub key_mode: KeyMode,
    pub nu_period: usize,
    pub decode_success: Vec<bool>,
    pub all_decoded: bool,
    pub broadcast_count: usize,
    pub retransmission_count: usize,
    pub recovery_rounds: usize,
    pub recovery_budget_exceeded: bool,
    pub nu_updates: usize,
    pub nu_overhead_bits: usize,
    pub singular_rejections: usize,
    pub keyshare_broadcasts: usize,
    /// One-based.
    pub unused_messages: Vec<usize>,
    pub clients: Vec<ClientReport>,
    pub audit_summary: Option<AuditSummary>,
}

impl SessionReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Everything a session produced, including the on-air packets.
#[derive(Clone, Debug)]
pub struct SessionOutcome {
    pub report: SessionReport,
    pub packets: Vec<Packet>,
    pub clients: Vec<ClientState>,
}

type Inspector<'a> = Box<dyn FnMut(SessionPhase, &[ClientState]) + 'a>;

/// Runs one session. Messages and out-of-band keys default to seeded random
/// draws; either can be supplied instead.
pub struct SessionRunner<'a> {
    cfg: SessionConfig,
    messages: Option<MessageSet>,
    keys: Option<KeySet>,
    execution: Execution,
    inspector: Option<Inspector<'a>>,
}

impl<'a> SessionRunner<'a> {
    pub fn new(cfg: SessionConfig) -> Self {
        Self {
            cfg,
            messages: None,
            keys: None,
            execution: Execution::default(),
            inspector: None,
        }
    }

    pub fn messages(mut self, messages: MessageSet) -> Self {
        self.messages = Some(messages);
        self
    }

    /// Installs a key set out of band. Ignored in opportunistic mode.
    pub fn keys(mut self, keys: KeySet) -> Self {
        self.keys = Some(keys);
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Called with every client's state after each phase.
    pub fn inspect(mut self, f: impl FnMut(SessionPhase, &[ClientState]) + 'a) -> Self {
        self.inspector = Some(Box::new(f));
        self
    }

    pub fn run(mut self) -> Result<SessionOutcome> {
        let cfg = self.cfg.clone();
        cfg.validate()?;
        let n = cfg.n;
        let master = cfg.seed;
        let profiles = cfg.profiles();
        let privileged = privileged_sets(&profiles, n);
        let unused = cfg.unused_messages();

        let msgs = match self.messages.take() {
            Some(m) => {
                if m.n() != n || m.rounds() != cfg.rounds {
                    return Err(Error::Config(format!(
                        "messages are {}x{} but config says n = {n}, T = {}",
                        m.n(),
                        m.rounds(),
                        cfg.rounds
                    )));
                }
                m
            }
            None => MessageSet::random(n, cfg.rounds, &mut seed::rng(master, "messages", 0)),
        };

        let mut clients: Vec<ClientState> = profiles.iter().map(ClientState::new).collect();
        let mut keyshare_broadcasts = 0;
        let keys = match cfg.key_mode {
            KeyMode::OutOfBand => {
                let keys = match self.keys.take() {
                    Some(k) if k.n() == n => k,
                    Some(k) => {
                        return Err(Error::Config(format!("key set has n = {} but config has n = {n}", k.n())))
                    }
                    None => KeySet::generate(n, &mut seed::rng(master, "keys", 0), 64)?,
                };
                for c in &mut clients {
                    for &i in &c.demand.clone() {
                        c.install_key(i, keys.key(i).clone())?;
                    }
                }
                keys
            }
            KeyMode::Opportunistic => {
                // Unused messages still need a key to build A; nobody hears it.
                let mut local_rng = seed::rng(master, "keyshare-local", 0);
                let preinstalled = local_keys(&unused, n, &mut local_rng);
                let mut ks_channel =
                    ErasureChannel::new(cfg.erasure_probs.clone(), seed::rng(master, "keyshare-channel", 0))?;
                let out = run_keyshare(
                    &privileged,
                    &preinstalled,
                    &mut ks_channel,
                    &mut seed::rng(master, "keyshare-candidates", 0),
                    cfg.keyshare_budget,
                )?;
                if !out.complete() {
                    return Err(Error::KeyshareBudgetExceeded {
                        budget: cfg.keyshare_budget,
                        unkeyed: out.unkeyed(),
                    });
                }
                keyshare_broadcasts = out.broadcasts;
                let keys = KeySet::new(out.keys.into_iter().map(|k| k.expect("complete")).collect())?;
                for (i, r) in privileged.iter().enumerate() {
                    for &u in r {
                        clients[u].install_key(i, keys.key(i).clone())?;
                    }
                }
                keys
            }
        };
        self.notify(SessionPhase::KeysEstablished, &clients);

        let opts = EncodeOptions {
            nu_period: cfg.nu_period,
            max_retries: None,
            strategy: Default::default(),
            execution: self.execution,
        };
        let session = codec::encode_session_with(&msgs, &keys, &mut seed::rng(master, "nu", 0), &opts)?;
        let packets = channel::packetize(&session, seed::session_id(master));

        let mut ch = ErasureChannel::new(cfg.erasure_probs.clone(), seed::rng(master, "channel", 0))?;
        let first = channel::broadcast(&packets, &mut ch);
        for (c, got) in clients.iter_mut().zip(&first) {
            c.received.clone_from(got);
        }
        self.notify(SessionPhase::Broadcast, &clients);

        let recovery = recovery_loop(first, &packets, &mut ch, cfg.max_recovery_rounds);
        for (c, got) in clients.iter_mut().zip(&recovery.receptions) {
            c.received.clone_from(got);
        }
        self.notify(SessionPhase::Recovered, &clients);

        let mut success = Vec::with_capacity(cfg.k);
        for c in &mut clients {
            let coded: Vec<Option<BitVector>> = (0..n)
                .map(|j| c.received.contains(&j).then(|| packets[j].coded_bits.clone()))
                .collect();
            let complete = c.received.len() == n;
            let ok = if complete {
                // Clients rebuild the regenerating vectors from the packets.
                let (_, nus) = channel::depacketize(&packets, n)?;
                match codec::decode_client(&c.profile(), c.held_keys(), &nus, &coded) {
                    Ok(out) => {
                        let exact = out.iter().all(|(i, s)| s == msgs.stream(*i));
                        c.decoded = out;
                        exact
                    }
                    Err(_) => false,
                }
            } else {
                false
            };
            success.push(ok);
        }
        self.notify(SessionPhase::Decoded, &clients);

        let audit_summary = cfg.audit.then(|| summarize(&session.coded));
        let report = SessionReport {
            n,
            k: cfg.k,
            rounds: cfg.rounds,
            seed: master,
            key_mode: cfg.key_mode,
            nu_period: cfg.nu_period,
            all_decoded: success.iter().all(|&s| s),
            clients: clients
                .iter()
                .zip(&success)
                .map(|(c, &ok)| ClientReport {
                    client: c.id + 1,
                    demand: c.demand.iter().map(|i| i + 1).collect(),
                    received_packets: c.received.len(),
                    decode_success: ok,
                })
                .collect(),
            decode_success: success,
            broadcast_count: packets.len(),
            retransmission_count: recovery.retransmissions,
            recovery_rounds: recovery.rounds_used,
            recovery_budget_exceeded: recovery.budget_exceeded(),
            nu_updates: session.nu_updates,
            nu_overhead_bits: n * session.nu_updates,
            singular_rejections: session.singular_rejections,
            keyshare_broadcasts,
            unused_messages: unused.iter().map(|i| i + 1).collect(),
            audit_summary,
        };
        Ok(SessionOutcome {
            report,
            packets,
            clients,
        })
    }

    fn notify(&mut self, phase: SessionPhase, clients: &[ClientState]) {
        if let Some(f) = self.inspector.as_mut() {
            f(phase, clients);
        }
    }
}

fn summarize(coded: &[BitVector]) -> AuditSummary {
    let rounds = coded.first().map_or(0, BitVector::len);
    let max_coded_bit_bias = coded
        .iter()
        .map(|s| (s.weight() as f64 / rounds as f64 - 0.5).abs())
        .fold(0.0, f64::max);
    let zero_coded_rounds = (0..rounds).filter(|&t| coded.iter().all(|s| !s.get(t))).count();
    AuditSummary {
        max_coded_bit_bias,
        zero_coded_rounds,
    }
}

pub fn run_session(cfg: &SessionConfig) -> Result<SessionReport> {
    SessionRunner::new(cfg.clone()).run().map(|o| o.report)
}
