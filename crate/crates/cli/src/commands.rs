use std::fmt::Display;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use secrecast::audit::{self, JointCounts, MatrixSource, Method, Sampling};
use secrecast::channel::write_trace;
use secrecast::codec::MessageSet;
use secrecast::gf2::{BitMatrix, BitVector};
use secrecast::keying::KeySet;
use secrecast::par::Execution;
use secrecast::protocol::{SessionConfig, SessionOutcome, SessionReport, SessionRunner};
use secrecast::{seed, table1, Error};

use crate::output::Output;
use crate::{AuditArgs, Cli, Command, DemoArgs, KeygenArgs, SimulateArgs, SourceArg};
use crate::{EXIT_BUDGET, EXIT_CONFIG, EXIT_MISMATCH, EXIT_OK};

pub struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::KeyshareBudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        };
        Self { code, msg: e.to_string() }
    }
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Self { code: EXIT_CONFIG, msg }
    }
}

struct Log {
    quiet: bool,
}

impl Log {
    fn info(&self, msg: impl Display) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cli: &Cli) -> u8 {
    let out = Output::new(&cli.out, cli.force);
    let log = Log { quiet: cli.quiet };
    let result = match &cli.command {
        Command::Simulate(args) => simulate(cli, args, &out, &log),
        Command::Audit(args) => audit_cmd(cli, args, &out, &log),
        Command::Keygen(args) => keygen(cli, args, &out, &log),
        Command::DemoTable1(args) => demo_table1(args, &log),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::from(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    }
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

#[derive(Serialize)]
struct ClientRow<'a> {
    seed: u64,
    client: usize,
    demand: &'a str,
    received_packets: usize,
    decode_success: bool,
}

fn client_csv(report: &SessionReport) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in &report.clients {
        let demand = c.demand.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        w.serialize(ClientRow {
            seed: report.seed,
            client: c.client,
            demand: &demand,
            received_packets: c.received_packets,
            decode_success: c.decode_success,
        })
        .map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| Failure::from(e.to_string()))
}

#[derive(Serialize)]
struct SweepRow {
    seed: u64,
    all_decoded: bool,
    broadcast_count: Option<usize>,
    retransmission_count: Option<usize>,
    recovery_rounds: Option<usize>,
    nu_updates: Option<usize>,
    singular_rejections: Option<usize>,
    keyshare_broadcasts: Option<usize>,
    error: Option<String>,
}

impl SweepRow {
    fn new(seed: u64, result: &Result<SessionOutcome, Error>) -> Self {
        let r = result.as_ref().ok().map(|o| &o.report);
        Self {
            seed,
            all_decoded: r.is_some_and(|r| r.all_decoded),
            broadcast_count: r.map(|r| r.broadcast_count),
            retransmission_count: r.map(|r| r.retransmission_count),
            recovery_rounds: r.map(|r| r.recovery_rounds),
            nu_updates: r.map(|r| r.nu_updates),
            singular_rejections: r.map(|r| r.singular_rejections),
            keyshare_broadcasts: r.map(|r| r.keyshare_broadcasts),
            error: result.as_ref().err().map(ToString::to_string),
        }
    }
}

struct SessionInputs {
    cfg: SessionConfig,
    keys: Option<KeySet>,
    messages: Option<MessageSet>,
}

impl SessionInputs {
    fn run(&self, seed: u64, execution: Execution) -> Result<SessionOutcome, Error> {
        let mut cfg = self.cfg.clone();
        cfg.seed = seed;
        let mut runner = SessionRunner::new(cfg).execution(execution);
        if let Some(k) = &self.keys {
            runner = runner.keys(k.clone());
        }
        if let Some(m) = &self.messages {
            runner = runner.messages(m.clone());
        }
        runner.run()
    }
}

fn session_code(report: &SessionReport) -> u8 {
    if report.all_decoded {
        EXIT_OK
    } else {
        EXIT_BUDGET
    }
}

fn simulate(cli: &Cli, args: &SimulateArgs, out: &Output, log: &Log) -> Outcome {
    let cfg = SessionConfig::from_json(&read_text(&args.config)?).map_err(with_path(&args.config))?;
    let keys = match &args.keys {
        Some(p) => Some(KeySet::from_json(&read_text(p)?).map_err(with_path(p))?),
        None => None,
    };
    let messages = match &args.messages {
        Some(p) if p.extension().is_some_and(|e| e == "json") => {
            Some(MessageSet::from_json(&read_text(p)?).map_err(with_path(p))?)
        }
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Some(MessageSet::from_raw_bytes(&bytes, cfg.n).map_err(with_path(p))?)
        }
        None => None,
    };
    let seed = cli.seed.unwrap_or(cfg.seed);
    let inputs = SessionInputs { cfg, keys, messages };
    match args.seeds {
        None => simulate_one(&inputs, seed, args.trace, out, log),
        Some((a, b)) => simulate_sweep(&inputs, a..b, args.trace, out, log),
    }
}

fn simulate_one(inputs: &SessionInputs, seed: u64, trace: bool, out: &Output, log: &Log) -> Outcome {
    if out.is_stdout() {
        if trace {
            return Err("--trace needs an output directory".to_string().into());
        }
    } else {
        let mut names = vec!["report.json".to_string(), "report.csv".to_string()];
        if trace {
            names.push("trace.bin".into());
        }
        out.check(&names)?;
    }
    let outcome = inputs.run(seed, Execution::Parallel)?;
    let report = &outcome.report;
    out.write("report.json", &pretty(report))?;
    if !out.is_stdout() {
        out.write("report.csv", &client_csv(report)?)?;
        if trace {
            out.write("trace.bin", &write_trace(&outcome.packets))?;
        }
    }
    log.info(format_args!(
        "seed {seed}: {} broadcasts, {} retransmissions over {} recovery rounds, {} ν updates",
        report.broadcast_count, report.retransmission_count, report.recovery_rounds, report.nu_updates
    ));
    for c in &report.clients {
        log.info(format_args!(
            "  client {}: {} of {} packets, {}",
            c.client,
            c.received_packets,
            report.n,
            if c.decode_success { "decoded" } else { "FAILED" }
        ));
    }
    if report.recovery_budget_exceeded {
        log.info("recovery budget exceeded");
    }
    Ok(session_code(report))
}

fn simulate_sweep(inputs: &SessionInputs, seeds: std::ops::Range<u64>, trace: bool, out: &Output, log: &Log) -> Outcome {
    if out.is_stdout() {
        return Err("--seeds needs an output directory".to_string().into());
    }
    let mut names = vec!["sweep.csv".to_string(), "sweep.json".to_string()];
    for s in seeds.clone() {
        names.push(format!("report-seed{s}.json"));
        if trace {
            names.push(format!("trace-seed{s}.bin"));
        }
    }
    out.check(&names)?;
    let results: Vec<(u64, Result<SessionOutcome, Error>)> = seeds
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| (s, inputs.run(s, Execution::Sequential)))
        .collect();
    let mut code = EXIT_OK;
    let mut rows = Vec::with_capacity(results.len());
    let mut csv = csv::Writer::from_writer(Vec::new());
    for (s, result) in &results {
        let row = SweepRow::new(*s, result);
        match result {
            Ok(o) => {
                out.write(&format!("report-seed{s}.json"), &pretty(&o.report))?;
                if trace {
                    out.write(&format!("trace-seed{s}.bin"), &write_trace(&o.packets))?;
                }
                code = code.max(session_code(&o.report));
            }
            Err(e) => {
                log.info(format_args!("seed {s}: {e}"));
                code = code.max(Failure::from(e.clone()).code);
            }
        }
        csv.serialize(&row).map_err(|e| e.to_string())?;
        rows.push(row);
    }
    out.write("sweep.csv", &csv.into_inner().map_err(|e| e.to_string())?)?;
    out.write("sweep.json", &pretty(&rows))?;
    let ok = rows.iter().filter(|r| r.all_decoded).count();
    log.info(format_args!("{ok} of {} sessions fully decoded", rows.len()));
    Ok(code)
}

fn source_of(arg: SourceArg) -> MatrixSource {
    match arg {
        SourceArg::Idealized => MatrixSource::IdealizedUniformNonsingular,
        SourceArg::KeyDerived => MatrixSource::KeyDerived,
    }
}

fn zero_based(items: &[usize], n: usize, what: &str) -> Result<Vec<usize>, Failure> {
    items
        .iter()
        .map(|&i| {
            if (1..=n).contains(&i) {
                Ok(i - 1)
            } else {
                Err(Failure::from(format!("{what} {i} outside 1..={n}")))
            }
        })
        .collect()
}

fn audit_cmd(cli: &Cli, args: &AuditArgs, out: &Output, log: &Log) -> Outcome {
    let n = args.n;
    if n == 0 {
        return Err("--n must be positive".to_string().into());
    }
    let method = if args.exact { Method::Exact } else { Method::MonteCarlo };
    let sampling = Sampling::new(args.trials, cli.seed.unwrap_or(0));
    let source = source_of(args.source);
    let name = if args.law {
        "audit-law.json"
    } else if args.lemma2 {
        "audit-coefficients.json"
    } else if args.packets {
        "audit-packets.json"
    } else if args.all {
        "audit-leakage-all.json"
    } else {
        "audit-leakage.json"
    };
    out.check(&[name.to_string()])?;

    let body = if args.law {
        let r = audit::matrix_law_distance(n)?;
        log.info(format_args!(
            "n = {n}: total variation {} over {} nonsingular configurations",
            r.total_variation, r.nonsingular_configurations
        ));
        pretty(&r)
    } else if args.lemma2 {
        let r = audit::coefficient_distribution(n, method, sampling)?;
        log.info(format_args!(
            "n = {n}: Prob(γ_j = 1) = {:?}; closed form {}, claimed {}",
            r.estimates, r.closed_form, r.claimed
        ));
        pretty(&r)
    } else if args.packets {
        let r = audit::packet_distribution(n, method, sampling)?;
        log.info(format_args!(
            "n = {n}: max marginal bias {}{}",
            r.max_marginal_bias,
            match r.exactly_uniform {
                Some(true) => ", exactly uniform",
                Some(false) => ", NOT uniform",
                None => "",
            }
        ));
        pretty(&r)
    } else {
        let joint = match method {
            Method::Exact => {
                if matches!(source, MatrixSource::KeyDerived) && n > audit::KEY_DERIVED_EXACT_LIMIT {
                    return Err(Error::InfeasibleEnumeration {
                        n,
                        limit: audit::KEY_DERIVED_EXACT_LIMIT,
                    }
                    .into());
                }
                JointCounts::exact(n, source, sampling.execution)?
            }
            Method::MonteCarlo => JointCounts::monte_carlo(n, source, sampling)?,
        };
        if args.all {
            if n > 10 {
                return Err(format!("--all enumerates 2^(n-1) known sets per target; n = {n} is too large").into());
            }
            let mut reports = Vec::new();
            for target in 0..n {
                let others: Vec<usize> = (0..n).filter(|&i| i != target).collect();
                for mask in 0u64..1 << others.len() {
                    let known: Vec<usize> =
                        others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
                    reports.push(audit::leakage_from_joint(&joint, target, &known, source)?);
                }
            }
            let worst = reports.iter().map(|r| r.conditional_mi_given_nonzero_p_bits).fold(0.0, f64::max);
            log.info(format_args!(
                "n = {n}: {} leakage measurements, max leakage given P ≠ 0: {worst}",
                reports.len()
            ));
            pretty(&reports)
        } else {
            let target = zero_based(&[args.target], n, "target")?[0];
            let known = zero_based(&args.known, n, "known message")?;
            let r = audit::leakage_from_joint(&joint, target, &known, source)?;
            log.info(format_args!(
                "n = {n}, target {}, known {:?}: {} bits; {} bits given P ≠ 0",
                r.target, r.known, r.mutual_information_bits, r.conditional_mi_given_nonzero_p_bits
            ));
            pretty(&r)
        }
    };
    out.write(name, &body)?;
    Ok(EXIT_OK)
}

fn keygen(cli: &Cli, args: &KeygenArgs, out: &Output, log: &Log) -> Outcome {
    if args.n == 0 {
        return Err("--n must be positive".to_string().into());
    }
    out.check(&["keys.json".to_string()])?;
    let seed = cli.seed.unwrap_or(0);
    let keys = KeySet::generate(args.n, &mut seed::rng(seed, "keys", 0), args.attempts)?;
    out.write("keys.json", keys.to_json().as_bytes())?;
    log.info(format_args!("wrote {} keys for seed {seed}", args.n));
    Ok(EXIT_OK)
}

fn parse_matrix(text: &str) -> Result<BitMatrix, Failure> {
    let rows: Vec<BitVector> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| BitVector::parse_bit_string(&l.replace(char::is_whitespace, "")))
        .collect::<Result<_, _>>()?;
    Ok(BitMatrix::from_rows(&rows)?)
}

fn demo_table1(args: &DemoArgs, log: &Log) -> Outcome {
    let expected = match &args.expected {
        Some(p) => parse_matrix(&read_text(p)?)?,
        None => table1::printed_matrix(),
    };
    if expected.rows() != table1::N || expected.cols() != table1::N {
        return Err(format!("expected matrix must be {0}x{0}", table1::N).into());
    }
    let rows: Vec<BitVector> = (0..table1::N)
        .map(|i| match table1::printed_key(i) {
            Some(key) => table1::derived_row(&key),
            None => table1::literal_row(i),
        })
        .collect();
    let derived = BitMatrix::from_rows(&rows)?;
    print!("{derived}");

    let mut mismatches = 0;
    for (i, row) in rows.iter().enumerate() {
        let want = expected.row(i);
        if i == table1::ERRATUM_ROW {
            let corrected = table1::derived_row(table1::corrected_keyset().key(i));
            log.info(format_args!(
                "row {}: {row}  erratum: key {} is not a permutation; literal map shown, \
                 corrected key gives {corrected}; excluded from verdict",
                i + 1,
                i + 1
            ));
        } else if *row == want {
            log.info(format_args!("row {}: {row}  ok", i + 1));
        } else {
            mismatches += 1;
            log.info(format_args!("row {}: {row}  MISMATCH, expected {want}", i + 1));
        }
    }
    let rank = derived.rank();
    log.info(format_args!("rank {rank} of {}", table1::N));
    if rank != table1::N {
        mismatches += 1;
    }
    if mismatches == 0 {
        log.info("rows 1-5 and 7 match");
        Ok(EXIT_OK)
    } else {
        eprintln!("error: {mismatches} mismatches");
        Ok(EXIT_MISMATCH)
    }
}
