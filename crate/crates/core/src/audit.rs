//! Measurement of the scheme's secrecy claims.
//!
//! Three questions are answered numerically, by exhaustive enumeration for
//! small `n` and by Monte Carlo sampling otherwise:
//!
//! - the XOR of independent biased bits ([`gallager_prob`]);
//! - the law of the coefficients expressing the last unknown of `A·P = X` in
//!   terms of `X` ([`coefficient_distribution`]);
//! - what the coded vector `P` reveals about a single message bit `x_i`
//!   given side information on other messages ([`leakage`]).
//!
//! Under nonsingular rejection `P = 0` happens exactly when `X = 0`, so the
//! unconditional leakage is small but nonzero. Conditioned on `P ≠ 0` the
//! coded vector is independent of `X`, and the reports carry both numbers.
//!
//! Exact results are tallied with integer counts and only converted to
//! floating point at the end. Monte Carlo trials are split into fixed-size
//! chunks with one derived seed each, so results do not depend on thread
//! count.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::gf2::{enumerate_invertible, BitMatrix, BitVector};
use crate::keying::{assemble_matrix, keygen, KeySet, RegenVector};
use crate::par::{self, Execution};
use crate::seed::{self, SimRng};
use crate::{Error, Result};

pub const IDEALIZED_EXACT_LIMIT: usize = 4;
pub const KEY_DERIVED_EXACT_LIMIT: usize = 3;
const MC_CHUNK: u64 = 8192;
const HISTOGRAM_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSource {
    /// Uniform over invertible matrices.
    #[default]
    IdealizedUniformNonsingular,
    /// Uniform keys and regenerating vector, conditioned on nonsingularity.
    KeyDerived,
}

impl MatrixSource {
    fn exact_limit(self) -> usize {
        match self {
            MatrixSource::IdealizedUniformNonsingular => IDEALIZED_EXACT_LIMIT,
            MatrixSource::KeyDerived => KEY_DERIVED_EXACT_LIMIT,
        }
    }
}

/// How many samples and which seed a Monte Carlo run uses.
#[derive(Clone, Copy, Debug)]
pub struct Sampling {
    pub trials: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl Sampling {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            execution: Execution::default(),
        }
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// `2^(n-1) / (2^n - 1)`: the probability that a fixed coordinate of a
/// uniformly random nonzero vector is 1.
pub fn closed_form_coefficient(n: usize) -> f64 {
    let full = (n as f64).exp2();
    (full / 2.0) / (full - 1.0)
}

/// Unconditional leakage `I(x_i; P)` with no side information, under a
/// uniform invertible matrix and uniform messages.
pub fn reference_leakage_bits(n: usize) -> f64 {
    1.0 - (1.0 - (-(n as f64)).exp2()) * binary_entropy(closed_form_coefficient(n))
}

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - mag);
    (x * scale).round() / scale
}

fn report_value(method: Method, x: f64) -> f64 {
    match method {
        Method::Exact => round_sig(x, 12),
        Method::MonteCarlo => x,
    }
}

/// `Prob(s = 1)` for `s = ⊕_{i: m_i = 1} β_i` with independent
/// `Prob(β_i = 1) = δ_i`. Terms with `m_i = 0` drop out of the product.
pub fn gallager_prob(deltas: &[f64], m: &BitVector) -> Result<f64> {
    if deltas.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            actual: deltas.len(),
        });
    }
    if let Some(d) = deltas.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::DomainError(format!("probability {d} outside [0, 1]")));
    }
    let prod: f64 = deltas
        .iter()
        .zip(m.iter())
        .filter(|(_, on)| *on)
        .map(|(d, _)| 1.0 - 2.0 * d)
        .product();
    Ok((1.0 - prod) / 2.0)
}

/// A weighted collection of invertible matrices.
#[derive(Clone, Debug)]
pub struct MatrixLaw {
    pub n: usize,
    pub entries: Vec<(BitMatrix, u64)>,
    pub total_weight: u64,
    /// Configurations enumerated, singular ones included.
    pub configurations: u64,
}

impl MatrixLaw {
    pub fn idealized(n: usize) -> Result<Self> {
        check_exact(n, IDEALIZED_EXACT_LIMIT)?;
        let entries: Vec<(BitMatrix, u64)> = enumerate_invertible(n).into_iter().map(|a| (a, 1)).collect();
        Ok(Self {
            n,
            total_weight: entries.len() as u64,
            configurations: 1u64 << (n * n),
            entries,
        })
    }

    /// Enumerates every `(π, κ)` per row and every `ν`. Rows are
    /// independent, so the per-row base-row histogram is computed once from
    /// all `n!·2^n` keys and combined across rows.
    pub fn key_derived(n: usize) -> Result<Self> {
        check_exact(n, KEY_DERIVED_EXACT_LIMIT)?;
        let hist = base_row_histogram(n);
        let keys_per_row: u64 = hist.iter().sum();
        let mut entries = Vec::new();
        let mut total = 0u64;
        for idx in 0..1u64 << (n * n) {
            let a = BitMatrix::from_index(n, idx);
            if !a.is_nonsingular() {
                continue;
            }
            let rows: Vec<u64> = (0..n).map(|r| a.row(r).to_u64()).collect();
            let weight: u64 = (0..1u64 << n)
                .map(|nu| rows.iter().map(|&r| hist[(r ^ nu) as usize]).product::<u64>())
                .sum();
            if weight > 0 {
                total += weight;
                entries.push((a, weight));
            }
        }
        Ok(Self {
            n,
            entries,
            total_weight: total,
            configurations: keys_per_row.pow(n as u32) << n,
        })
    }

    pub fn for_source(n: usize, source: MatrixSource) -> Result<Self> {
        match source {
            MatrixSource::IdealizedUniformNonsingular => Self::idealized(n),
            MatrixSource::KeyDerived => Self::key_derived(n),
        }
    }
}

fn check_exact(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        Err(Error::InfeasibleEnumeration { n, limit })
    } else {
        Ok(())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Number of `(π, κ)` keys producing each base row.
fn base_row_histogram(n: usize) -> Vec<u64> {
    let mut hist = vec![0u64; 1 << n];
    for perm in permutations(n) {
        for mask in 0..1u64 << n {
            let row = (0..n).fold(0u64, |acc, j| acc | ((mask >> perm[j]) & 1) << j);
            hist[row as usize] += 1;
        }
    }
    hist
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixLawReport {
    pub n: usize,
    pub total_variation: f64,
    /// `total_variation = numerator / denominator` exactly.
    pub tv_numerator: u128,
    pub tv_denominator: u128,
    pub configurations: u64,
    pub nonsingular_configurations: u64,
    pub invertible_matrices: usize,
}

/// Total variation between the key-derived nonsingular law and the uniform
/// law over invertible matrices.
pub fn matrix_law_distance(n: usize) -> Result<MatrixLawReport> {
    let derived = MatrixLaw::key_derived(n)?;
    let ideal = MatrixLaw::idealized(n)?;
    let weights: BTreeMap<u64, u64> = derived.entries.iter().map(|(a, w)| (a.to_index(), *w)).collect();
    let g = ideal.entries.len() as u128;
    let w = derived.total_weight as u128;
    // TV = (1/2) Σ |w_A/W - 1/G| = Σ |w_A·G - W| / (2·W·G)
    let numerator: u128 = ideal
        .entries
        .iter()
        .map(|(a, _)| {
            let wa = *weights.get(&a.to_index()).unwrap_or(&0) as u128;
            (wa * g).abs_diff(w)
        })
        .sum();
    let denominator = 2 * w * g;
    Ok(MatrixLawReport {
        n,
        total_variation: numerator as f64 / denominator as f64,
        tv_numerator: numerator,
        tv_denominator: denominator,
        configurations: derived.configurations,
        nonsingular_configurations: derived.total_weight,
        invertible_matrices: ideal.entries.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EliminationVariant {
    /// Matrices, drawn uniformly with no rejection, for which elimination
    /// determines the last unknown.
    pub success_count: u64,
    pub sample_count: u64,
    /// `Prob(γ_j = 1 | success)` per coordinate.
    pub estimates: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientDistReport {
    pub n: usize,
    pub method: Method,
    pub sample_count: u64,
    /// `Prob(γ_j = 1)` for row `n` of `A⁻¹`, `A` uniform invertible.
    pub estimates: Vec<f64>,
    /// Exact mode: `estimates[j] = numerators[j] / sample_count`.
    pub numerators: Option<Vec<u64>>,
    pub closed_form: f64,
    pub claimed: f64,
    pub max_deviation_from_closed_form: f64,
    pub max_deviation_from_claimed: f64,
    pub elimination_variant: EliminationVariant,
}

/// Row of the elimination transform that expresses the last unknown, if the
/// last column is a pivot column.
fn last_unknown_coefficients(a: &BitMatrix) -> Option<BitVector> {
    let n = a.cols();
    let (_, transform, pivots) = a.row_reduce();
    pivots.iter().position(|&c| c == n - 1).map(|r| transform.row(r))
}

fn tally_ones(tally: &mut [u64], v: &BitVector) {
    for (j, t) in tally.iter_mut().enumerate() {
        *t += v.get(j) as u64;
    }
}

pub fn coefficient_distribution(n: usize, method: Method, sampling: Sampling) -> Result<CoefficientDistReport> {
    if n == 0 {
        return Err(Error::DomainError("n must be positive".into()));
    }
    let (ones, samples, elim_ones, elim_success, elim_samples) = match method {
        Method::Exact => {
            let law = MatrixLaw::idealized(n)?;
            let parts = par::map_chunks(sampling.execution, law.entries.len() as u64, 1024, |_, r| {
                let mut t = vec![0u64; n];
                for idx in r {
                    let inv = law.entries[idx as usize].0.invert().expect("invertible");
                    tally_ones(&mut t, &inv.row(n - 1));
                }
                t
            });
            let total = 1u64 << (n * n);
            let elim = par::map_chunks(sampling.execution, total, 4096, |_, r| {
                let mut t = vec![0u64; n + 1];
                for idx in r {
                    if let Some(g) = last_unknown_coefficients(&BitMatrix::from_index(n, idx)) {
                        t[n] += 1;
                        tally_ones(&mut t[..n], &g);
                    }
                }
                t
            });
            let elim = par::sum_tallies(elim);
            (par::sum_tallies(parts), law.total_weight, elim[..n].to_vec(), elim[n], total)
        }
        Method::MonteCarlo => {
            let parts = par::map_chunks(sampling.execution, sampling.trials, MC_CHUNK, |c, r| {
                let mut rng = seed::rng(sampling.seed, "audit-coefficients", c);
                let mut t = vec![0u64; 2 * n + 1];
                for _ in r {
                    let (a, _) = BitMatrix::random_nonsingular(n, &mut rng);
                    tally_ones(&mut t[..n], &a.invert().expect("invertible").row(n - 1));
                    let u = BitMatrix::random_matrix(n, &mut rng);
                    if let Some(g) = last_unknown_coefficients(&u) {
                        t[2 * n] += 1;
                        tally_ones(&mut t[n..2 * n], &g);
                    }
                }
                t
            });
            let t = par::sum_tallies(parts);
            let t = if t.is_empty() { vec![0; 2 * n + 1] } else { t };
            (t[..n].to_vec(), sampling.trials, t[n..2 * n].to_vec(), t[2 * n], sampling.trials)
        }
    };
    let frac = |c: u64, of: u64| if of == 0 { 0.0 } else { c as f64 / of as f64 };
    let raw: Vec<f64> = ones.iter().map(|&c| frac(c, samples)).collect();
    let closed_form = closed_form_coefficient(n);
    let max_dev = |target: f64| raw.iter().map(|e| (e - target).abs()).fold(0.0, f64::max);
    Ok(CoefficientDistReport {
        n,
        method,
        sample_count: samples,
        numerators: (method == Method::Exact).then(|| ones.clone()),
        closed_form: report_value(method, closed_form),
        claimed: 0.5,
        max_deviation_from_closed_form: report_value(method, max_dev(closed_form)),
        max_deviation_from_claimed: report_value(method, max_dev(0.5)),
        elimination_variant: EliminationVariant {
            success_count: elim_success,
            sample_count: elim_samples,
            estimates: elim_ones
                .iter()
                .map(|&c| report_value(method, frac(c, elim_success)))
                .collect(),
        },
        estimates: raw.iter().map(|&e| report_value(method, e)).collect(),
    })
}

/// Joint counts of `(X, P)` as packed integers, `X` being bit `i` = `x_i`.
#[derive(Clone, Debug)]
pub struct JointCounts {
    pub n: usize,
    pub method: Method,
    counts: BTreeMap<(u64, u64), u64>,
    pub total: u64,
}

impl JointCounts {
    /// Every matrix of the law crossed with every message vector.
    pub fn exact(n: usize, source: MatrixSource, execution: Execution) -> Result<Self> {
        let law = MatrixLaw::for_source(n, source)?;
        let size = 1usize << n;
        let parts = par::map_chunks(execution, law.entries.len() as u64, 512, |_, r| {
            let mut t = vec![0u64; size * size];
            for idx in r {
                let (a, w) = &law.entries[idx as usize];
                let inv = a.invert().expect("invertible");
                for x in 0..size as u64 {
                    let p = inv.mat_vec_mul(&BitVector::from_u64(n, x)).expect("square").to_u64();
                    t[(x as usize) * size + p as usize] += w;
                }
            }
            t
        });
        let dense = par::sum_tallies(parts);
        let counts = dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (((k / size) as u64, (k % size) as u64), c))
            .collect();
        Ok(Self {
            n,
            method: Method::Exact,
            counts,
            total: law.total_weight * size as u64,
        })
    }

    /// Uniform `X`, matrix drawn from `source`, `P = A⁻¹X`.
    pub fn monte_carlo(n: usize, source: MatrixSource, sampling: Sampling) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::DomainError(format!("n = {n} outside 1..=64")));
        }
        let parts = par::map_chunks(sampling.execution, sampling.trials, MC_CHUNK, |c, r| {
            let mut rng = seed::rng(sampling.seed, "audit-joint", c);
            let mut t: BTreeMap<(u64, u64), u64> = BTreeMap::new();
            for _ in r {
                let a = sample_matrix(n, source, &mut rng);
                let x = BitVector::random(n, &mut rng);
                let p = a.solve(&x).expect("nonsingular");
                *t.entry((x.to_u64(), p.to_u64())).or_default() += 1;
            }
            t
        });
        let mut counts = BTreeMap::new();
        for part in parts {
            for (k, v) in part {
                *counts.entry(k).or_default() += v;
            }
        }
        Ok(Self {
            n,
            method: Method::MonteCarlo,
            counts,
            total: sampling.trials,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.counts.iter().map(|(&(x, p), &c)| (x, p, c))
    }

    /// Counts of each coded vector.
    pub fn packet_marginal(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for (_, p, c) in self.iter() {
            *out.entry(p).or_default() += c;
        }
        out
    }

    /// `max_j |Prob(P_j = 1) - 1/2|`.
    pub fn packet_marginal_bias(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let mut ones = vec![0u64; self.n];
        for (_, p, c) in self.iter() {
            for (j, o) in ones.iter_mut().enumerate() {
                if p >> j & 1 == 1 {
                    *o += c;
                }
            }
        }
        ones.iter()
            .map(|&o| (o as f64 / self.total as f64 - 0.5).abs())
            .fold(0.0, f64::max)
    }

    /// `I(x_target; P | x_G)` in bits, optionally restricted to `P ≠ 0`.
    /// Returns the value and the sample mass it was computed over.
    pub fn conditional_mi(&self, target: usize, known: &[usize], nonzero_p_only: bool) -> (f64, u64) {
        let g_of = |x: u64| known.iter().enumerate().fold(0u64, |acc, (b, &i)| acc | (x >> i & 1) << b);
        let mut c_gxp: BTreeMap<(u64, u64, u64), u64> = BTreeMap::new();
        let mut c_gx: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        let mut c_gp: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        let mut c_g: BTreeMap<u64, u64> = BTreeMap::new();
        let mut mass = 0u64;
        for (x, p, c) in self.iter() {
            if nonzero_p_only && p == 0 {
                continue;
            }
            let g = g_of(x);
            let xi = x >> target & 1;
            *c_gxp.entry((g, xi, p)).or_default() += c;
            *c_gx.entry((g, xi)).or_default() += c;
            *c_gp.entry((g, p)).or_default() += c;
            *c_g.entry(g).or_default() += c;
            mass += c;
        }
        if mass == 0 {
            return (0.0, 0);
        }
        let mut mi = 0.0;
        for (&(g, xi, p), &c) in &c_gxp {
            let num = c as u128 * c_g[&g] as u128;
            let den = c_gx[&(g, xi)] as u128 * c_gp[&(g, p)] as u128;
            if num != den {
                mi += c as f64 / mass as f64 * (num as f64 / den as f64).log2();
            }
        }
        (mi.max(0.0), mass)
    }
}

fn sample_matrix(n: usize, source: MatrixSource, rng: &mut SimRng) -> BitMatrix {
    match source {
        MatrixSource::IdealizedUniformNonsingular => BitMatrix::random_nonsingular(n, rng).0,
        MatrixSource::KeyDerived => loop {
            // Keys and ν are redrawn together, matching the conditioned law.
            let keys = KeySet::new((0..n).map(|_| keygen(n, rng)).collect()).expect("n keys of width n");
            let nu = RegenVector::random(0, n, rng);
            let a = assemble_matrix(&keys, &nu).expect("matching widths");
            if a.is_nonsingular() {
                break a;
            }
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PacketDistReport {
    pub n: usize,
    pub method: Method,
    pub sample_count: u64,
    /// Count of each coded vector, indexed by its packed value; omitted for
    /// large `n`.
    pub histogram: Option<Vec<u64>>,
    pub max_marginal_bias: f64,
    /// Exact mode: every coded vector has probability exactly `2^-n`.
    pub exactly_uniform: Option<bool>,
}

pub fn packet_distribution(n: usize, method: Method, sampling: Sampling) -> Result<PacketDistReport> {
    let source = MatrixSource::IdealizedUniformNonsingular;
    let joint = match method {
        Method::Exact => {
            if n > IDEALIZED_EXACT_LIMIT {
                return Err(Error::InfeasibleEnumeration {
                    n,
                    limit: IDEALIZED_EXACT_LIMIT,
                });
            }
            JointCounts::exact(n, source, sampling.execution)?
        }
        Method::MonteCarlo => JointCounts::monte_carlo(n, source, sampling)?,
    };
    let marginal = joint.packet_marginal();
    let histogram =
        (n <= HISTOGRAM_LIMIT).then(|| (0..1u64 << n).map(|p| *marginal.get(&p).unwrap_or(&0)).collect::<Vec<_>>());
    let exactly_uniform = (method == Method::Exact).then(|| {
        (0..1u64 << n).all(|p| (*marginal.get(&p).unwrap_or(&0) as u128) << n == joint.total as u128)
    });
    Ok(PacketDistReport {
        n,
        method,
        sample_count: joint.total,
        histogram,
        max_marginal_bias: report_value(method, joint.packet_marginal_bias()),
        exactly_uniform,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakageReport {
    pub n: usize,
    /// One-based.
    pub target: usize,
    /// One-based.
    pub known: Vec<usize>,
    pub matrix_source: MatrixSource,
    pub method: Method,
    pub sample_count: u64,
    pub mutual_information_bits: f64,
    pub conditional_mi_given_nonzero_p_bits: f64,
    pub nonzero_p_samples: u64,
    pub packet_marginal_bias: f64,
    /// Closed-form unconditional leakage, present when nothing is known.
    pub reference_bits: Option<f64>,
}

/// `target` and `known` are zero-based.
pub fn leakage_from_joint(joint: &JointCounts, target: usize, known: &[usize], source: MatrixSource) -> Result<LeakageReport> {
    let n = joint.n;
    if target >= n {
        return Err(Error::DomainError(format!("target {} outside 1..={n}", target + 1)));
    }
    if let Some(&bad) = known.iter().find(|&&g| g >= n) {
        return Err(Error::DomainError(format!("known message {} outside 1..={n}", bad + 1)));
    }
    if known.contains(&target) {
        return Err(Error::DomainError(format!(
            "target {} is already in the known set",
            target + 1
        )));
    }
    let mut known: Vec<usize> = known.to_vec();
    known.sort_unstable();
    known.dedup();
    let method = joint.method;
    let (mi, _) = joint.conditional_mi(target, &known, false);
    let (cmi, mass) = joint.conditional_mi(target, &known, true);
    Ok(LeakageReport {
        n,
        target: target + 1,
        known: known.iter().map(|g| g + 1).collect(),
        matrix_source: source,
        method,
        sample_count: joint.total,
        mutual_information_bits: report_value(method, mi),
        conditional_mi_given_nonzero_p_bits: report_value(method, cmi),
        nonzero_p_samples: mass,
        packet_marginal_bias: report_value(method, joint.packet_marginal_bias()),
        reference_bits: known
            .is_empty()
            .then(|| report_value(method, reference_leakage_bits(n))),
    })
}

/// Leakage about `x_target` from `P` for an observer holding `x_G`.
pub fn leakage(
    n: usize,
    target: usize,
    known: &[usize],
    method: Method,
    sampling: Sampling,
    source: MatrixSource,
) -> Result<LeakageReport> {
    if known.contains(&target) {
        return Err(Error::DomainError(format!(
            "target {} is already in the known set",
            target + 1
        )));
    }
    let joint = match method {
        Method::Exact => {
            let limit = source.exact_limit();
            if n > limit {
                return Err(Error::InfeasibleEnumeration { n, limit });
            }
            JointCounts::exact(n, source, sampling.execution)?
        }
        Method::MonteCarlo => JointCounts::monte_carlo(n, source, sampling)?,
    };
    leakage_from_joint(&joint, target, known, source)
}
