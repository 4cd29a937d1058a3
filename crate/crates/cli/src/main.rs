//! `lrpc`: key generation, encapsulation, encryption, parameter reports and
//! simulation runs.
//!
//! Exit codes: 0 success, 1 usage or format error, 2 decoding failure (⊥),
//! 3 a simulation tolerance was breached.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use lrpc::analysis::{default_omega, validate_paramset, CostReport};
use lrpc::crypto::{peek_header, FileKind, LrpcScheme};
use lrpc::field::{with_field, ExtField, FieldTask};
use lrpc::params::{self, ParamSet, Scheme};
use lrpc::sim::{run_experiment, write_outputs, ExperimentSpec};

#[derive(Parser)]
#[command(name = "lrpc", version, about = "LRPC codes: KEM, PKE, estimators and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Kem,
    Pke,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Kem => Scheme::Kem,
            SchemeArg::Pke => Scheme::Pke,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct SetChoice {
    /// Security level in bits.
    #[arg(long, default_value_t = 128, value_parser = parse_level)]
    level: u32,
    #[arg(long, value_enum, default_value = "kem")]
    scheme: SchemeArg,
    /// Explicit parameter-set id (e.g. pke80-128); overrides --level/--scheme.
    #[arg(long)]
    set: Option<String>,
}

fn parse_level(s: &str) -> Result<u32, String> {
    match s {
        "128" | "192" | "256" => Ok(s.parse().unwrap()),
        _ => Err("expected 128, 192 or 256".into()),
    }
}

impl SetChoice {
    fn resolve(&self) -> Result<ParamSet> {
        Ok(match &self.set {
            Some(id) => params::by_id(id)?,
            None => params::for_level(self.scheme.into(), self.level)?,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair: writes <out>.pk and <out>.sk (mode 0600).
    Keygen {
        #[command(flatten)]
        set: SetChoice,
        /// 32-byte seed as 64 hex digits; drawn from the OS if absent.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encapsulate to a public key: writes the ciphertext and the shared key.
    Encap {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        ct_out: PathBuf,
        /// Shared key, 32 raw bytes (mode 0600).
        #[arg(long)]
        key_out: PathBuf,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Recover the shared key from a ciphertext.
    Decap {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        key_out: PathBuf,
    },
    /// Encrypt a file to a public key.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Decrypt a ciphertext file.
    Decrypt {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attack costs, failure bound and sizes of a parameter set.
    Params {
        #[command(flatten)]
        set: SetChoice,
        /// Linear-algebra exponent, in [2, 3].
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a Monte Carlo experiment described by a JSON spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Directory for results.jsonl and summary.csv.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

/// Failure classes mapped to exit codes.
enum Outcome {
    Ok,
    Bottom,
    ToleranceBreach,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Bottom) => {
            eprintln!("decoding failure (⊥)");
            ExitCode::from(2)
        }
        Ok(Outcome::ToleranceBreach) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Params { set, omega, format } => params_report(&set.resolve()?, omega, format),
        Command::Simulate { spec, out, threads } => simulate(&spec, &out, threads),
        Command::Keygen { set, seed, out } => {
            let ps = set.resolve()?;
            let rng = seeded(seed.as_deref(), STREAM_KEYGEN)?;
            in_field(&ps, CryptoOp::Keygen { out, rng })
        }
        Command::Encap { pk, ct_out, key_out, seed } => {
            let bytes = read(&pk)?;
            let rng = seeded(seed.as_deref(), STREAM_ENCAP)?;
            in_field(&set_of(&bytes, FileKind::PublicKey)?, CryptoOp::Encap { pk: bytes, ct_out, key_out, rng })
        }
        Command::Decap { sk, ct, key_out } => {
            let sk = read(&sk)?;
            let ct = read(&ct)?;
            let ps = set_of(&sk, FileKind::SecretKey)?;
            in_field(&ps, CryptoOp::Decap { sk, ct, key_out })
        }
        Command::Encrypt { pk, input, out, seed } => {
            let bytes = read(&pk)?;
            let msg = read(&input)?;
            let rng = seeded(seed.as_deref(), STREAM_ENCRYPT)?;
            in_field(&set_of(&bytes, FileKind::PublicKey)?, CryptoOp::Encrypt { pk: bytes, msg, out, rng })
        }
        Command::Decrypt { sk, ct, out } => {
            let sk = read(&sk)?;
            let ct = read(&ct)?;
            let ps = set_of(&sk, FileKind::SecretKey)?;
            in_field(&ps, CryptoOp::Decrypt { sk, ct, out })
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write_public(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes secret material, readable by the owner only where supported.
fn write_secret(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut opts = fs::OpenOptions::new();
    opts.write(true).create(true).truncate(true);
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        opts.mode(0o600);
    }
    let mut f = opts.open(path).with_context(|| format!("writing {}", path.display()))?;
    #[cfg(unix)]
    {
        // mode() only applies to newly created files
        use std::os::unix::fs::PermissionsExt;
        f.set_permissions(fs::Permissions::from_mode(0o600))?;
    }
    f.write_all(bytes).with_context(|| format!("writing {}", path.display()))
}

/// ChaCha stream per command. Keygen and encapsulation draw their supports
/// with the same routine, so one seed on one stream would make E ⊆ F.
const STREAM_KEYGEN: u64 = 1;
const STREAM_ENCAP: u64 = 2;
const STREAM_ENCRYPT: u64 = 3;

/// One generator per invocation; a missing seed is drawn from the OS and
/// echoed to stderr so the run can be replayed.
fn seeded(seed: Option<&str>, stream: u64) -> Result<ChaCha20Rng> {
    let bytes: [u8; 32] = match seed {
        Some(h) => hex::decode(h.trim())
            .context("seed is not hex")?
            .try_into()
            .map_err(|v: Vec<u8>| anyhow!("seed must be 32 bytes, got {}", v.len()))?,
        None => {
            let mut b = [0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut b);
            eprintln!("seed: {}", hex::encode(b));
            b
        }
    };
    let mut rng = ChaCha20Rng::from_seed(bytes);
    rng.set_stream(stream);
    Ok(rng)
}

fn set_of(bytes: &[u8], want: FileKind) -> Result<ParamSet> {
    let (kind, id) = peek_header(bytes)?;
    if kind != want {
        bail!("expected a {want:?} file, found {kind:?}");
    }
    Ok(params::by_id(&id)?)
}

fn params_report(ps: &ParamSet, omega: Option<f64>, format: Format) -> Result<Outcome> {
    let rep = validate_paramset(ps, omega.unwrap_or_else(default_omega))?;
    match format {
        Format::Json => {
            let v = serde_json::json!({ "schema": 1, "params": ps, "report": rep });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Text => print_text(ps, &rep),
    }
    Ok(Outcome::Ok)
}

fn print_text(ps: &ParamSet, rep: &CostReport) {
    println!("{} (q = {}, n = {}, m = {}, d = {}, r = {})", ps.id, ps.q, ps.n, ps.m, ps.d, ps.r);
    println!("  omega              {:.4}", rep.omega);
    println!("  structural attack  2^{:.2}", rep.structural_log2);
    println!("  generic attack     2^{:.2}", rep.generic_log2);
    println!("  quantum generic    2^{:.2}", rep.quantum_generic_log2);
    println!("  failure bound      2^{:.2} (codim-1 term 2^{:.2})", rep.failure.total_log2, rep.failure.codim1_log2);
    println!("  support entropy    {:.2} bits", rep.entropy_bits);
    println!("  public key         {} bits", rep.pk_bits);
    println!("  ciphertext         {} bits", rep.ct_bits);
    for v in &rep.violations {
        println!("  violation: {v}");
    }
    for w in &rep.warnings {
        println!("  warning: {w}");
    }
}

fn simulate(spec: &Path, out: &Path, threads: usize) -> Result<Outcome> {
    let text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
    let spec = ExperimentSpec::from_json(&text)?;
    let res = run_experiment(&spec, threads)?;
    write_outputs(&res, out)?;
    for c in &res.cells {
        let cell = c.cell;
        let verdict = match (&c.skipped, &c.assertion) {
            (Some(reason), _) => format!("skipped: {reason}"),
            (None, Some(a)) => format!("{} ({})", if a.passed { "pass" } else { "FAIL" }, a.detail),
            (None, None) => "no assertion".into(),
        };
        eprintln!(
            "q={} m={} n={} k={} d={} r={}: {:.4e} [{:.3e}, {:.3e}] over {} trials, {verdict}",
            cell.q, cell.m, cell.n, cell.k, cell.d, cell.r, c.observed, c.wilson.0, c.wilson.1, c.trials
        );
    }
    Ok(if res.all_passed() { Outcome::Ok } else { Outcome::ToleranceBreach })
}

enum CryptoOp {
    Keygen { out: PathBuf, rng: ChaCha20Rng },
    Encap { pk: Vec<u8>, ct_out: PathBuf, key_out: PathBuf, rng: ChaCha20Rng },
    Decap { sk: Vec<u8>, ct: Vec<u8>, key_out: PathBuf },
    Encrypt { pk: Vec<u8>, msg: Vec<u8>, out: PathBuf, rng: ChaCha20Rng },
    Decrypt { sk: Vec<u8>, ct: Vec<u8>, out: PathBuf },
}

struct CryptoTask {
    ps: ParamSet,
    op: CryptoOp,
}

impl FieldTask for CryptoTask {
    type Output = Result<Outcome>;

    fn run<F: ExtField>(self, field: &F) -> Result<Outcome> {
        let s = LrpcScheme::new(field.clone(), self.ps)?;
        match self.op {
            CryptoOp::Keygen { out, mut rng } => {
                let kp = s.keygen(&mut rng);
                write_public(&with_suffix(&out, "pk"), &s.encode_public_key(&kp.pk))?;
                write_secret(&with_suffix(&out, "sk"), &s.encode_secret_key(&kp.sk))?;
            }
            CryptoOp::Encap { pk, ct_out, key_out, mut rng } => {
                let pk = s.decode_public_key(&pk)?;
                let (ct, key) = s.encap(&pk, &mut rng)?;
                write_public(&ct_out, &s.encode_ciphertext(&ct))?;
                write_secret(&key_out, &key)?;
            }
            CryptoOp::Decap { sk, ct, key_out } => {
                let sk = s.decode_secret_key(&sk)?;
                let ct = s.decode_ciphertext(&ct)?;
                let Some(key) = s.decap(&sk, &ct)? else {
                    return Ok(Outcome::Bottom);
                };
                write_secret(&key_out, &key)?;
            }
            CryptoOp::Encrypt { pk, msg, out, mut rng } => {
                let pk = s.decode_public_key(&pk)?;
                let ct = s.encrypt(&pk, &msg, &mut rng)?;
                write_public(&out, &s.encode_pke_ciphertext(&ct))?;
            }
            CryptoOp::Decrypt { sk, ct, out } => {
                let sk = s.decode_secret_key(&sk)?;
                let ct = s.decode_pke_ciphertext(&ct)?;
                let Some(msg) = s.decrypt(&sk, &ct)? else {
                    return Ok(Outcome::Bottom);
                };
                write_secret(&out, &msg)?;
            }
        }
        Ok(Outcome::Ok)
    }
}

fn in_field(ps: &ParamSet, op: CryptoOp) -> Result<Outcome> {
    with_field(ps.q, ps.m, CryptoTask { ps: ps.clone(), op })?
}

fn with_suffix(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}
