use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use toric_gs::invariants::SolitonKind;
use toric_gs::io::{self, PolytopeInput, RunInputs};
use toric_gs::WeightFunction;

use crate::report::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Kr,
    Mabuchi,
}

#[derive(Debug, Parser)]
#[command(name = "toric-gs", version, about = "Weighted soliton and stability computations on toric polytopes")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
struct Common {
    /// `builtin:NAME`, a JSON file, or inline JSON.
    #[arg(long)]
    polytope: String,
    /// `constant:C`, `affine:A0,B..`, `exp_affine:A0,B..`, `exp:B..`, a JSON
    /// file, or inline JSON.
    #[arg(long, default_value = "constant:1")]
    g: String,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct Direction {
    /// Comma-separated coordinates of the valuation direction.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    a: Vec<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weighted barycenter and vanishing of the Futaki invariant.
    CheckFutaki(Common),
    /// Kähler–Ricci or Mabuchi soliton vector.
    SolveSoliton {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "kr")]
        kind: Kind,
    },
    /// Log discrepancy and expected vanishing order of a toric valuation.
    Sg {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dir: Direction,
    },
    /// Infimum of A / S_g over toric valuations.
    Delta(Common),
    /// A - S_g for one toric valuation.
    DingNa {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dir: Direction,
    },
    /// Duistermaat–Heckman data of the filtration of a PL convex function.
    Dh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pl_file: PathBuf,
        #[arg(long, default_value_t = 20)]
        m: u32,
    },
    /// One-dimensional soliton equation.
    SolveMa {
        #[command(flatten)]
        common: Common,
        /// Also write the full potential as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy functionals of a potential.
    Functionals {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        u: PathBuf,
    },
    /// Randomized check of the comparison inequalities.
    Inequalities {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-runs the inputs block of a previous report or an inputs file.
    Report {
        #[arg(long)]
        inputs: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn polytope_input(spec: &str) -> Result<PolytopeInput, Failure> {
    let text = if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(PolytopeInput::Builtin(name.to_string()));
    } else if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        read(Path::new(spec))?
    };
    PolytopeInput::parse(&text).map_err(|e| Failure::input("--polytope", e))
}

fn weight(spec: &str) -> Result<WeightFunction, Failure> {
    const KINDS: [&str; 4] = ["constant:", "affine:", "exp_affine:", "exp:"];
    let parsed = if KINDS.iter().any(|k| spec.starts_with(k)) {
        io::parse_g_spec(spec)
    } else if spec.trim_start().starts_with('{') {
        io::parse_weight(spec)
    } else {
        io::parse_weight(&read(Path::new(spec))?)
    };
    parsed.map_err(|e| Failure::input("--g", e))
}

fn common(c: Common, command: &str) -> Result<RunInputs, Failure> {
    if let Some(t) = c.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::usage("--tol must be positive and finite"));
        }
    }
    Ok(RunInputs {
        command: command.to_string(),
        polytope: Some(polytope_input(&c.polytope)?),
        g: Some(weight(&c.g)?),
        tol: c.tol,
        ..RunInputs::default()
    })
}

impl Cli {
    /// Resolves files and specs into a self-contained inputs block, plus the
    /// optional path for the full potential.
    pub fn into_inputs(self) -> Result<(RunInputs, Option<PathBuf>), Failure> {
        let mut potential_out = None;
        let inputs = match self.command {
            Command::CheckFutaki(c) => common(c, "check-futaki")?,
            Command::SolveSoliton { common: c, kind } => RunInputs {
                kind: Some(match kind {
                    Kind::Kr => SolitonKind::Kr,
                    Kind::Mabuchi => SolitonKind::Mabuchi,
                }),
                g: None,
                ..common(c, "solve-soliton")?
            },
            Command::Sg { common: c, dir } => RunInputs {
                a: Some(dir.a),
                ..common(c, "sg")?
            },
            Command::Delta(c) => common(c, "delta")?,
            Command::DingNa { common: c, dir } => RunInputs {
                a: Some(dir.a),
                ..common(c, "ding-na")?
            },
            Command::Dh { common: c, pl_file, m } => {
                let pl = io::parse_pl(&read(&pl_file)?).map_err(|e| Failure::input("--pl-file", e))?;
                RunInputs {
                    pl: Some(pl),
                    m: Some(m),
                    ..common(c, "dh")?
                }
            }
            Command::SolveMa { common: c, out } => {
                potential_out = out;
                common(c, "solve-ma")?
            }
            Command::Functionals { common: c, u } => {
                let u = io::parse_potential(&read(&u)?).map_err(|e| Failure::input("--u", e))?;
                RunInputs {
                    u: Some(u),
                    ..common(c, "functionals")?
                }
            }
            Command::Inequalities {
                common: c,
                samples,
                seed,
            } => RunInputs {
                samples: Some(samples),
                seed: Some(seed),
                ..common(c, "inequalities")?
            },
            Command::Report { inputs } => {
                let text = read(&inputs)?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| {
                        Failure::input("--inputs", toric_gs::Error::schema("", format!("invalid JSON: {e}")))
                    })?;
                // A whole report carries its inputs under "inputs".
                let block = value.get("inputs").unwrap_or(&value);
                RunInputs::from_value(block).map_err(|e| Failure::input("--inputs", e))?
            }
        };
        Ok((inputs, potential_out))
    }
}
