//! `pkeet` command-line tool.
//!
//! Exit codes: 0 success (or EQUAL), 1 NOT-EQUAL, 2 invalid parameters or
//! misuse, 3 I/O or parse failure, 4 decryption rejected, 5 internal sampler
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pkeet::codec::{self, peek_header, CodecError};
use pkeet::hashing::{decode_message, encode_message};
use pkeet::{bench, Error, Params, Sampler, Scheme};

const SEED_ENV: &str = "PKEET_SEED";

#[derive(Parser)]
#[command(name = "pkeet", version, about = "Lattice PKE with equality test and flexible authorization")]
struct Cli {
    /// RNG seed; the PKEET_SEED environment variable takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Allow parameter sets that fail validation.
    #[arg(long, global = true)]
    allow_insecure: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        #[arg(long, default_value = "paper62")]
        preset: String,
        #[arg(long)]
        out_pk: PathBuf,
        #[arg(long)]
        out_sk: PathBuf,
    },
    /// Encrypt an n-bit message file.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext into an n-bit message file.
    Decrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Issue an authorization trapdoor.
    Td {
        #[arg(long = "type", value_enum)]
        kind: TdType,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        /// Ciphertext to bind to (types 2 and 3i).
        #[arg(long)]
        ct: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the plaintexts of two ciphertexts.
    Test {
        #[arg(long = "type", value_enum)]
        kind: TestType,
        #[arg(long)]
        td_i: PathBuf,
        #[arg(long)]
        td_j: PathBuf,
        #[arg(long)]
        ct_i: PathBuf,
        #[arg(long)]
        ct_j: PathBuf,
    },
    /// Time every operation and write a CSV report.
    Bench {
        #[arg(long, default_value = "paper62")]
        preset: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; each runs an equal share of the trials.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TdType {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3i")]
    ThreeI,
    #[value(name = "3j")]
    ThreeJ,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestType {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

enum Failure {
    Usage(String),
    Io(String),
    Reject,
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Reject => 4,
            Failure::Internal(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Internal(m) => m.clone(),
            Failure::Reject => "decryption rejected the ciphertext".to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Reject => Failure::Reject,
            Error::InvalidParams(_)
            | Error::UnknownPreset(_)
            | Error::VariantMismatch
            | Error::BindingMismatch
            | Error::UnsupportedRing { .. } => Failure::Usage(e.to_string()),
            Error::Codec(_)
            | Error::Dimension { .. }
            | Error::CoefficientOutOfRange { .. }
            | Error::NonBinaryMessage => Failure::Io(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome<()> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

struct Context {
    seed: Option<u64>,
    allow_insecure: bool,
}

impl Context {
    fn sampler(&self) -> Sampler {
        match self.seed {
            Some(s) => Sampler::from_seed(s),
            None => Sampler::from_entropy(),
        }
    }

    fn scheme(&self, params: Params) -> Outcome<Scheme> {
        if let Err(v) = params.validate() {
            if !self.allow_insecure {
                return Err(Error::InvalidParams(v).into());
            }
            eprintln!("warning: preset `{}` fails validation ({})", params.name, params.security_label);
        }
        Ok(Scheme::new(params)?)
    }

    /// Scheme for the parameter set recorded in a file header.
    fn scheme_for(&self, bytes: &[u8]) -> Outcome<Scheme> {
        let params = peek_header(bytes)?.params()?;
        self.scheme(params)
    }
}

fn keygen(ctx: &Context, preset: &str, out_pk: &Path, out_sk: &Path) -> Outcome<()> {
    let scheme = ctx.scheme(Params::preset(preset)?)?;
    let (pk, sk) = scheme.setup(&mut ctx.sampler())?;
    write(out_pk, &codec::encode_public_key(&scheme, &pk))?;
    write(out_sk, &codec::encode_secret_key(&scheme, &sk))
}

fn encrypt(ctx: &Context, pk: &Path, input: &Path, out: &Path) -> Outcome<()> {
    let pk_bytes = read(pk)?;
    let scheme = ctx.scheme_for(&pk_bytes)?;
    let pk = codec::decode_public_key(&scheme, &pk_bytes)?;
    let message = decode_message(scheme.ring(), &read(input)?)?;
    let ct = scheme.encrypt(&pk, &message, &mut ctx.sampler())?;
    write(out, &codec::encode_ciphertext(&scheme, &ct))
}

fn decrypt(ctx: &Context, pk: &Path, sk: &Path, input: &Path, out: &Path) -> Outcome<()> {
    let pk_bytes = read(pk)?;
    let scheme = ctx.scheme_for(&pk_bytes)?;
    let pk = codec::decode_public_key(&scheme, &pk_bytes)?;
    let sk = codec::decode_secret_key(&scheme, &read(sk)?)?;
    let ct = codec::decode_ciphertext(&scheme, &read(input)?)?;
    let message = scheme.decrypt(&sk, &pk, &ct, &mut ctx.sampler())?;
    write(out, &encode_message(&message)?)
}

fn td(ctx: &Context, kind: TdType, sk: &Path, pk: &Path, ct: Option<&Path>, out: &Path) -> Outcome<()> {
    let pk_bytes = read(pk)?;
    let scheme = ctx.scheme_for(&pk_bytes)?;
    let pk = codec::decode_public_key(&scheme, &pk_bytes)?;
    let sk = codec::decode_secret_key(&scheme, &read(sk)?)?;
    let load_ct = || -> Outcome<_> {
        let path = ct.ok_or_else(|| Failure::Usage("--ct is required for trapdoor types 2 and 3i".into()))?;
        Ok(codec::decode_ciphertext(&scheme, &read(path)?)?)
    };
    let td = match kind {
        TdType::One => scheme.td1(&sk, &pk),
        TdType::ThreeJ => scheme.td3_j(&sk, &pk),
        TdType::Two => scheme.td2(&sk, &pk, &load_ct()?, &mut ctx.sampler())?,
        TdType::ThreeI => scheme.td3_i(&sk, &pk, &load_ct()?, &mut ctx.sampler())?,
    };
    write(out, &codec::encode_trapdoor(&scheme, &td))
}

fn test(ctx: &Context, kind: TestType, paths: [&Path; 4]) -> Outcome<bool> {
    let [td_i, td_j, ct_i, ct_j] = [read(paths[0])?, read(paths[1])?, read(paths[2])?, read(paths[3])?];
    let scheme = ctx.scheme_for(&td_i)?;
    let td_i = codec::decode_trapdoor(&scheme, &td_i)?;
    let td_j = codec::decode_trapdoor(&scheme, &td_j)?;
    let ct_i = codec::decode_ciphertext(&scheme, &ct_i)?;
    let ct_j = codec::decode_ciphertext(&scheme, &ct_j)?;
    let mut sampler = ctx.sampler();
    Ok(match kind {
        TestType::One => scheme.test1(&td_i, &td_j, &ct_i, &ct_j, &mut sampler)?,
        TestType::Two => scheme.test2(&td_i, &td_j, &ct_i, &ct_j)?,
        TestType::Three => scheme.test3(&td_i, &td_j, &ct_i, &ct_j, &mut sampler)?,
    })
}

fn run_bench(ctx: &Context, preset: &str, trials: usize, jobs: usize, out: &Path) -> Outcome<()> {
    if trials < bench::MIN_TRIALS {
        return Err(Failure::Usage(format!("--trials must be at least {}", bench::MIN_TRIALS)));
    }
    if jobs == 0 {
        return Err(Failure::Usage("--jobs must be positive".into()));
    }
    let scheme = ctx.scheme(Params::preset(preset)?)?;
    let records = bench::run_jobs(&scheme, trials, jobs, ctx.seed)?;
    let file = fs::File::create(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    bench::write_csv(&records, file).map_err(|e| Failure::Io(e.to_string()))
}

fn seed_from_env(flag: Option<u64>) -> Outcome<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{SEED_ENV} must be an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn dispatch(cli: Cli) -> Outcome<ExitCode> {
    let ctx = Context {
        seed: seed_from_env(cli.seed)?,
        allow_insecure: cli.allow_insecure,
    };
    match cli.command {
        Command::Keygen { preset, out_pk, out_sk } => keygen(&ctx, &preset, &out_pk, &out_sk)?,
        Command::Encrypt { pk, input, out } => encrypt(&ctx, &pk, &input, &out)?,
        Command::Decrypt { pk, sk, input, out } => decrypt(&ctx, &pk, &sk, &input, &out)?,
        Command::Td { kind, sk, pk, ct, out } => td(&ctx, kind, &sk, &pk, ct.as_deref(), &out)?,
        Command::Test {
            kind,
            td_i,
            td_j,
            ct_i,
            ct_j,
        } => {
            let equal = test(&ctx, kind, [&td_i, &td_j, &ct_i, &ct_j])?;
            println!("{}", if equal { "EQUAL" } else { "NOT-EQUAL" });
            return Ok(if equal { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Bench {
            preset,
            trials,
            out,
            jobs,
        } => run_bench(&ctx, &preset, trials, jobs, &out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
