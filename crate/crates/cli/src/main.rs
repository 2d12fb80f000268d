//! `nildecomp`: build example groups, decompose them, check certificates.
//!
//! Exit status is 0 on success whatever the verdict, 2 for unusable input and
//! 3 when a certificate or an internal check fails.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nildecomp::tgroup::GroupDoc;
use nildecomp::{corpus, CorpusSpec, DecompCertificate, Error, Family, TGroup};

#[derive(Parser)]
#[command(name = "nildecomp", version, about = "Direct decompositions of torsion-free nilpotent matrix groups")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Log every bipartition trial and retraction to stderr.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

/// Parameters for example families.
#[derive(Args, Clone, Debug, Default)]
struct Params {
    /// Prime for gp, d and s
    #[arg(long)]
    p: Option<i64>,
    /// Second prime for d and s
    #[arg(long)]
    q: Option<i64>,
    /// Rank for free-abelian, number of blocks for product
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Write a `.tgrp` file for an example family.
    Example {
        /// heisenberg, free_abelian, B, K, Gp, D, S or product.
        family: String,
        #[command(flatten)]
        params: Params,
        /// Output path; defaults next to the input
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a group and write a `.dcert` certificate.
    Decompose {
        /// A `.tgrp` file or an example family name.
        input: String,
        #[command(flatten)]
        params: Params,
        /// Output path; defaults next to the input
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate against a group.
    Verify {
        /// A `.tgrp` file or an example family name.
        group: String,
        certificate: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Center, derived subgroup, abelianization and rational summands.
    Info {
        /// A `.tgrp` file or an example family name.
        input: String,
        #[command(flatten)]
        params: Params,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidArgument(_) => Failure::Input(e.to_string()),
            Error::InvariantViolation(_) | Error::InconsistentHomomorphism(_) => Failure::Check(e.to_string()),
        }
    }
}

const SIZE_WARNING: usize = 24;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.trace { "nildecomp=debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.verb {
        Verb::Example { family, params, out } => {
            let fam: Family = family.parse()?;
            let g = corpus::make(&spec(fam, params))?;
            let path = out.clone().unwrap_or_else(|| PathBuf::from(format!("{fam}.tgrp")));
            write(&path, &serde_json::to_string_pretty(&g.to_doc()).expect("documents serialize"))?;
            report::example(cli.format, &path, &g);
            Ok(())
        }
        Verb::Decompose { input, params, out } => {
            let (g, origin) = load(input, params)?;
            let cert = nildecomp::decompose(&g)?;
            let path = out.clone().unwrap_or_else(|| origin.with_extension("dcert"));
            write(&path, &cert.to_json())?;
            report::decomposition(cli.format, input, &g, &cert, &path);
            Ok(())
        }
        Verb::Verify { group, certificate, params } => {
            let (g, _) = load(group, params)?;
            let cert = DecompCertificate::from_json(&read(certificate)?)?;
            let v = nildecomp::verify(&g, &cert);
            report::verification(cli.format, &v, cli.trace);
            if v.valid {
                Ok(())
            } else {
                Err(Failure::Check("certificate rejected".into()))
            }
        }
        Verb::Info { input, params } => {
            let (g, _) = load(input, params)?;
            report::info(cli.format, input, &g)?;
            Ok(())
        }
    }
}

fn spec(family: Family, params: &Params) -> CorpusSpec {
    let mut s = CorpusSpec::new(family);
    if let Some(p) = params.p {
        s = s.with_p(p);
    }
    if let Some(q) = params.q {
        s = s.with_q(q);
    }
    if let Some(n) = params.n {
        s = s.with_n(n);
    }
    s
}

/// Reads a group file, or builds an example when `input` names a family.
/// Also returns the path other outputs are named after.
fn load(input: &str, params: &Params) -> Result<(TGroup, PathBuf), Failure> {
    let path = Path::new(input);
    let g = if path.exists() {
        let doc: GroupDoc =
            serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{input}: {e}")))?;
        TGroup::from_doc(&doc)?
    } else if let Ok(fam) = input.parse::<Family>() {
        return Ok((corpus::make(&spec(fam, params))?, PathBuf::from(fam.to_string())));
    } else {
        return Err(Failure::Input(format!("{input}: no such file or example family")));
    };
    if g.ambient_size() > SIZE_WARNING {
        log::warn!("matrices of size {} are large for exact arithmetic; expect slow runs", g.ambient_size());
    }
    Ok((g, path.to_path_buf()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}
