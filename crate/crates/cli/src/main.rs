//! `qgkpz`: enumeration, elementary differentials, coherence and locality
//! reports, counterterms and Itô constants.
//!
//! Exit status: 0 when every checked identity holds, 1 when one fails, 2 on
//! a usage or input error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qgkpz::Error;
use serde_json::json;

use commands::Outcome;
use config::{Config, Format};

const GRAMMAR: &str = "\
Tree grammar:
  tree      := node (\"*\" node)*
  node      := noise (\"[\" child (\",\" child)* \"]\")?
  noise     := \"Xi\" | \"One\" | \"X^(\" t \",\" x \")\" \"Xi\"?
  child     := edge \"(\" tree \")\"
  edge      := (\"I\" | \"Ix\" | \"I_(\" t \",\" x \")\") (\"{\" h \"}\")?
Example: One[Ix{1}(Xi), Ix(Xi)]

Indices are 0 or c*t*x*, e.g. c, cc, cx, x.";

#[derive(Parser, Debug)]
#[command(name = "qgkpz", version, about = "Decorated-tree toolkit for the quasilinear generalised KPZ equation", after_help = GRAMMAR)]
struct Cli {
    /// Config file of `key = value` lines (alpha, kappa, max_param, max_noises, format, mollifier)
    #[arg(long, global = true, env = "QGKPZ_CONFIG")]
    config: Option<PathBuf>,
    /// Emit a single JSON object with `command`, `config` and `results`
    #[arg(long, global = true)]
    json: bool,
    /// Noise degree before the `kappa` shift, e.g. -3/2
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    kappa: Option<String>,
    /// Bound on parameter derivatives per edge
    #[arg(long, global = true)]
    max_param: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Negative-degree trees with the given noise counts
    Enumerate {
        #[arg(long, value_delimiter = ',', required = true)]
        noises: Vec<usize>,
        /// Use the full rule instead of the saturated one
        #[arg(long)]
        full_rule: bool,
    },
    /// Elementary differential of one tree
    Upsilon {
        /// F, Fhat or V:<index>
        #[arg(long, default_value = "F")]
        nonlinearity: String,
        #[arg(long)]
        tree: String,
        /// Include the lower-order terms k(u) ∂ₓu + h(u)
        #[arg(long)]
        full: bool,
    },
    /// Compare every expansion coefficient with its elementary differential
    Coherence {
        #[arg(long)]
        max_noises: Option<usize>,
        /// text or json
        #[arg(long)]
        report: Option<String>,
    },
    /// Locality of the covariant-derivative counterterm of a pair
    Locality {
        #[arg(long)]
        tau1: String,
        #[arg(long)]
        tau2: String,
    },
    /// Vanishing of a higher parameter-derivative term
    Null {
        #[arg(long)]
        tau1: String,
        #[arg(long)]
        tau2: String,
        /// single:<k> or cherry:<k>,<l>
        #[arg(long)]
        kind: String,
    },
    /// Counterterm of a sector, raw or reduced to local constants
    Counterterm {
        #[arg(long)]
        sector: u32,
        #[arg(long, default_value = "local")]
        mode: String,
    },
    /// L² norm of the rescaled mollifier
    ItoConstant {
        #[arg(long)]
        eps: f64,
        /// poly, bump or file:<path>
        #[arg(long)]
        mollifier: Option<String>,
    },
    /// Canonical form of a tree or an expression
    Parse {
        #[arg(long)]
        tree: Option<String>,
        #[arg(long)]
        expr: Option<String>,
    },
    /// Graft sigma onto every node of tau along an edge of the given index
    Graft {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        index: String,
        #[arg(long)]
        tau: String,
    },
    /// Star product of a noise-free planted product with a tree
    Star {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tau: String,
    },
    /// Covariant derivative of tau1 in the direction tau2
    Nabla {
        #[arg(long)]
        tau1: String,
        #[arg(long)]
        tau2: String,
        #[arg(long, default_value_t = 0)]
        m: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Enumerate { .. } => "enumerate",
            Command::Upsilon { .. } => "upsilon",
            Command::Coherence { .. } => "coherence",
            Command::Locality { .. } => "locality",
            Command::Null { .. } => "null",
            Command::Counterterm { .. } => "counterterm",
            Command::ItoConstant { .. } => "ito-constant",
            Command::Parse { .. } => "parse",
            Command::Graft { .. } => "graft",
            Command::Star { .. } => "star",
            Command::Nabla { .. } => "nabla",
        }
    }
}

fn build_config(cli: &Cli) -> qgkpz::Result<Config> {
    let mut cfg = Config::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for (key, value) in [("alpha", &cli.alpha), ("kappa", &cli.kappa), ("max_param", &cli.max_param)] {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if cli.json {
        cfg.format = Format::Json;
    }
    match &cli.command {
        Command::Coherence { max_noises, report } => {
            if let Some(n) = max_noises {
                cfg.max_noises = *n;
            }
            if let Some(r) = report {
                cfg.set("format", r)?;
            }
        }
        Command::ItoConstant { mollifier: Some(m), .. } => cfg.mollifier = m.clone(),
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &Config) -> qgkpz::Result<Outcome> {
    match &cli.command {
        Command::Enumerate { noises, full_rule } => commands::enumerate(cfg, noises, *full_rule),
        Command::Upsilon { nonlinearity, tree, full } => commands::upsilon_cmd(nonlinearity, tree, *full),
        Command::Coherence { .. } => commands::coherence(cfg.max_noises),
        Command::Locality { tau1, tau2 } => commands::locality(tau1, tau2),
        Command::Null { tau1, tau2, kind } => commands::null(tau1, tau2, kind),
        Command::Counterterm { sector, mode } => commands::counterterm(cfg, *sector, mode),
        Command::ItoConstant { eps, .. } => commands::ito(*eps, &cfg.mollifier),
        Command::Parse { tree, expr } => commands::parse(cfg, tree.as_deref(), expr.as_deref()),
        Command::Graft { sigma, index, tau } => commands::graft_cmd(sigma, index, tau),
        Command::Star { sigma, tau } => commands::star_cmd(sigma, tau),
        Command::Nabla { tau1, tau2, m } => commands::nabla_cmd(tau1, tau2, *m),
    }
}

/// Input and configuration errors are usage errors; the rest are failed
/// verifications.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. }
            | Error::Config(_)
            | Error::NotSubcritical(_)
            | Error::SectorUnsupported(_)
            | Error::Unsupported(_)
            | Error::StarDomain(_)
            | Error::IncompatibleNoise
            | Error::TruncationTooSmall(_)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = cfg.format == Format::Json;
    match run(&cli, &cfg) {
        Ok(out) => {
            if json {
                let doc = json!({ "command": name, "config": cfg.to_json(), "verified": out.verified, "results": out.results });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json output"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.verified { 0 } else { 1 })
        }
        Err(e) => {
            let usage = is_usage(&e);
            if json {
                let doc = json!({ "command": name, "config": cfg.to_json(), "error": e.to_string() });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json output"));
            }
            eprintln!("error: {e}");
            if matches!(e, Error::Parse { .. }) {
                eprintln!("\n{GRAMMAR}");
            }
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
