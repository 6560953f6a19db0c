use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gmsr::store::{
    chunk_bytes, chunk_symbols, encode_share_files, reconstruct_bytes, reconstruct_symbols,
    repair_share_file, simulate, ShareFile,
};
use gmsr::{
    derive_params, feasibility_bound, leakage_check, secure_build, secure_layout, Error,
    FieldElement,
};

#[derive(Parser)]
#[command(name = "gmsr", about = "Minimum-storage-regenerating code file store")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CodeArgs {
    /// Number of storage nodes
    #[arg(short)]
    n: usize,
    /// Shares needed to reconstruct
    #[arg(short)]
    k: usize,
    /// Helpers contacted per repair
    #[arg(short)]
    d: usize,
    /// Prime field size
    #[arg(short)]
    q: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print derived parameters and node points
    Params(CodeArgs),
    /// Encode a file into n share files
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Input file (bytes, or a JSON integer array with --symbols)
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Treat the input as a JSON array of symbols < q
        #[arg(long)]
        symbols: bool,
    },
    /// Reconstruct the original file from any k share files
    Reconstruct {
        #[arg(long, num_args = 1.., required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Emit a JSON symbol array instead of bytes
        #[arg(long)]
        symbols: bool,
    },
    /// Regenerate a lost share file from d helper share files
    Repair {
        /// Node id of the lost share
        #[arg(long)]
        failed: usize,
        #[arg(long, num_args = 1.., required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a failure schedule and report repair bandwidth
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        /// Comma-separated node ids, or rN for N seeded random failures
        #[arg(long)]
        failures: String,
        #[arg(long)]
        seed: u64,
        /// Write the JSON report here (also printed to stdout)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build an {l,l'}-secure message matrix; --check runs the secrecy oracle
    Secure {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        lp: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        check: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParams(_)
        | Error::InfeasibleField { .. }
        | Error::BudgetError { .. }
        | Error::UnsupportedType
        | Error::NoMessageCapacity(_)
        | Error::ByteModeNeedsLargeField(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::BadShareFile(e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Params(code) => {
            let p = derive_params(code.n, code.k, code.d, code.q)?;
            println!("n = {}, k = {}, d = {}, q = {}", p.n, p.k, p.d, p.q);
            println!("alpha = {}", p.alpha);
            println!("B = {}", p.message_len);
            println!("type = {}", p.matrix_type);
            let pts: Vec<String> = p.points.iter().map(|x| x.value().to_string()).collect();
            println!("points = [{}]", pts.join(", "));
            println!("feasibility bound = {}", feasibility_bound(p.q, p.alpha));
        }
        Command::Encode { code, input, out_dir, symbols } => {
            let p = derive_params(code.n, code.k, code.d, code.q)?;
            let raw = fs::read(&input).map_err(io_err)?;
            let (chunks, original_len) = if symbols {
                let values: Vec<u64> = serde_json::from_slice(&raw)
                    .map_err(|e| Error::BadShareFile(format!("bad symbol JSON: {e}")))?;
                let len = values.len() as u64;
                (chunk_symbols(&values, &p)?, len)
            } else {
                (chunk_bytes(&raw, &p)?, raw.len() as u64)
            };
            fs::create_dir_all(&out_dir).map_err(io_err)?;
            for f in encode_share_files(&p, &chunks, original_len)? {
                let path = out_dir.join(format!("share_{:03}.gmsr", f.node));
                let mut buf = Vec::new();
                f.write_to(&mut buf).map_err(io_err)?;
                fs::write(&path, buf).map_err(io_err)?;
            }
            println!("wrote {} share files to {}", p.n, out_dir.display());
        }
        Command::Reconstruct { shares, out, symbols } => {
            let files = read_share_files(&shares)?;
            if symbols {
                let values = reconstruct_symbols(&files)?;
                let len = files[0].original_len as usize;
                let body = serde_json::to_string(&values[..len.min(values.len())])
                    .expect("serializing integers cannot fail");
                fs::write(&out, body).map_err(io_err)?;
            } else {
                fs::write(&out, reconstruct_bytes(&files)?).map_err(io_err)?;
            }
            println!("reconstructed {}", out.display());
        }
        Command::Repair { failed, shares, out } => {
            let files = read_share_files(&shares)?;
            let repaired = repair_share_file(failed, &files)?;
            let mut buf = Vec::new();
            repaired.write_to(&mut buf).map_err(io_err)?;
            fs::write(&out, buf).map_err(io_err)?;
            println!("regenerated share of node {failed} into {}", out.display());
        }
        Command::Simulate { code, failures, seed, report } => {
            let p = derive_params(code.n, code.k, code.d, code.q)?;
            let schedule = parse_schedule(&failures, p.n, seed)?;
            let rep = simulate(&p, &schedule, seed)?;
            let body = serde_json::to_string_pretty(&rep)
                .expect("report serialization cannot fail");
            println!("{body}");
            if let Some(path) = report {
                fs::write(&path, body).map_err(io_err)?;
            }
            if !rep.all_exact {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Secure { code, l, lp, seed, check } => {
            let p = derive_params(code.n, code.k, code.d, code.q)?;
            let layout = secure_layout(&p, l, lp)?;
            println!(
                "R = {} random symbols, message capacity = {}",
                layout.random_count(),
                layout.message_capacity()
            );
            let fmt = |pos: &gmsr::message::FreePosition| format!("({},{})", pos.row + 1, pos.col + 1);
            let rp: Vec<String> = layout.random_positions.iter().map(fmt).collect();
            let mp: Vec<String> = layout.message_positions.iter().map(fmt).collect();
            println!("random positions:  [{}]", rp.join(", "));
            println!("message positions: [{}]", mp.join(", "));

            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rand_syms: Vec<FieldElement> = (0..layout.random_count())
                .map(|_| FieldElement::new(rng.gen_range(0..p.q), p.q))
                .collect();
            let msg_syms: Vec<FieldElement> = (0..layout.message_capacity())
                .map(|_| FieldElement::new(rng.gen_range(0..p.q), p.q))
                .collect();
            let mm = secure_build(&layout, &rand_syms, &msg_syms)?;
            println!("sample M^(s) rows:");
            for r in 0..p.d {
                let row: Vec<String> =
                    (0..p.alpha).map(|c| mm.matrix().get(r, c).to_string()).collect();
                println!("  [{}]", row.join(", "));
            }
            if check {
                let rep = leakage_check(&p, l, lp)?;
                println!(
                    "leakage check: independent = {}, max total variation = {}/{}",
                    rep.independent, rep.max_total_variation.0, rep.max_total_variation.1
                );
                if !rep.independent {
                    return Ok(ExitCode::from(3));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_share_files(paths: &[PathBuf]) -> Result<Vec<ShareFile>, Error> {
    paths
        .iter()
        .map(|path| {
            let raw = fs::read(path).map_err(io_err)?;
            ShareFile::read_from(&mut raw.as_slice())
        })
        .collect()
}

fn parse_schedule(spec: &str, n: usize, seed: u64) -> Result<Vec<usize>, Error> {
    if let Some(count) = spec.strip_prefix('r') {
        let count: usize = count
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad failure schedule '{spec}'")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_fa11);
        return Ok((0..count).map(|_| rng.gen_range(1..=n)).collect());
    }
    spec.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParams(format!("bad failure schedule '{spec}'")))
        })
        .collect()
}
