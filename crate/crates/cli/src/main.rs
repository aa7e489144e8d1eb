//! `koszul-kit`: exact computations with quadratic algebras, their
//! deformations and the Koszul functors, driven by JSON problem files.
//!
//! Exit codes: 0 when the command ran and its check passed, 1 when a check
//! failed, 2 on invalid input.

#![allow(clippy::needless_range_loop)]

mod commands;
mod error;
mod report;
mod schema;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Ctx, FreeInput};
use error::CliError;
use report::ResolvedBounds;
use schema::ProblemFile;

#[derive(Parser, Debug)]
#[command(name = "koszul-kit", version, about = "Koszul duality computations over Q and F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print the JSON report instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Degree bound for A and A! (default 6).
    #[arg(long, global = true)]
    degree: Option<usize>,

    /// Cohomological window `lo..hi` (default -8..2).
    #[arg(long, global = true, value_parser = parse_range, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,

    /// Filtration level for U (default 8).
    #[arg(long, global = true)]
    filtration: Option<i64>,
}

#[derive(Args, Debug)]
struct FileArg {
    /// Problem file (JSON).
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The quadratic dual A! as a problem file.
    Dual(FileArg),
    /// Dimensions and bases of A and A! up to the degree bound.
    Truncate(FileArg),
    /// The three PBW conditions.
    Pbw(FileArg),
    /// Curvature and differential of A!.
    Cdga(FileArg),
    /// The filtered algebra U against A.
    BuildU(FileArg),
    /// Exactness of the Koszul complex strands.
    KoszulCheck(FileArg),
    /// F_i(N) for a cdg module N.
    ApplyF {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        cdg_module: String,
        #[arg(short, long, default_value_t = 2)]
        i: i64,
    },
    /// G(M) for a complex of U-modules.
    ApplyG {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        complex: String,
    },
    /// Hom(F N, M) against Hom(N, G M).
    AdjointCheck {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        cdg_module: String,
        #[arg(long, default_value = "k")]
        complex: String,
    },
    /// The unit N -> G F_i(N).
    Unit {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        cdg_module: String,
        #[arg(short, long, default_value_t = 3)]
        i: i64,
    },
    /// The counit F_i G(M) -> M.
    Counit {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        complex: String,
        #[arg(short, long, default_value_t = 3)]
        i: i64,
    },
    /// The Chevalley-Eilenberg type resolution of a module.
    Ce {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        module: String,
    },
    /// Tor^U(k, M).
    Tor {
        #[command(flatten)]
        file: FileArg,
        /// Module or complex name.
        #[arg(long, default_value = "k")]
        module: String,
        #[arg(long, value_parser = parse_range, default_value = "0..3")]
        range: (i64, i64),
    },
    /// Ext_U(k, M).
    Ext {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        module: String,
        #[arg(long, value_parser = parse_range, default_value = "0..3")]
        range: (i64, i64),
    },
    /// Minimal model of G(M).
    Minimize {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value = "k")]
        complex: String,
    },
    /// Null-system test on the free side.
    NullFree {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, conflicts_with = "cdg_module")]
        complex: Option<String>,
        /// Test F_i(N) for this cdg module instead.
        #[arg(long)]
        cdg_module: Option<String>,
        #[arg(short, long, default_value_t = 2)]
        i: i64,
        /// Also search for a contracting homotopy.
        #[arg(long)]
        homotopy: bool,
    },
    /// Null-system test on the cofree side.
    NullCofree {
        file: Option<PathBuf>,
        #[arg(long)]
        cdg_module: Option<String>,
        /// Use the built-in spliced complex over E(V*), dim V = 2.
        #[arg(long)]
        spliced: Option<usize>,
        /// Action degree of the grading the window refers to.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        r: i64,
        #[arg(long)]
        homotopy: bool,
    },
    /// t^{<=p} and t_{>p} of a cofree module.
    TTrunc {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        cdg_module: String,
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
    },
    /// Stupid truncations of a complex or cdg module.
    SigmaTrunc {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        complex: Option<String>,
        #[arg(long)]
        cdg_module: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
    },
    /// Move a weighted cdg module to another action degree.
    Regrade {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        cdg_module: String,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
    },
    /// Run the built-in invariant corpus.
    Selftest {
        /// Seed for the random instances (or KOSZUL_SEED).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        corrupt_signs: bool,
    },
}

/// `a..b`, `a..=b` or `a,b`, inclusive.
fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once(','))
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

fn load(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    ProblemFile::parse(&text)
}

fn flag_map(cmd: &Command) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    match cmd {
        Command::ApplyF { cdg_module, i, .. } | Command::Unit { cdg_module, i, .. } => {
            put("cdg-module", cdg_module.clone());
            put("i", i.to_string());
        }
        Command::ApplyG { complex, .. } | Command::Minimize { complex, .. } => put("complex", complex.clone()),
        Command::AdjointCheck { cdg_module, complex, .. } => {
            put("cdg-module", cdg_module.clone());
            put("complex", complex.clone());
        }
        Command::Counit { complex, i, .. } => {
            put("complex", complex.clone());
            put("i", i.to_string());
        }
        Command::Ce { module, .. } => put("module", module.clone()),
        Command::Tor { module, range, .. } | Command::Ext { module, range, .. } => {
            put("module", module.clone());
            put("range", format!("{}..{}", range.0, range.1));
        }
        Command::NullFree { complex, cdg_module, i, homotopy, .. } => {
            if let Some(c) = complex {
                put("complex", c.clone());
            }
            if let Some(n) = cdg_module {
                put("cdg-module", n.clone());
                put("i", i.to_string());
            }
            put("homotopy", homotopy.to_string());
        }
        Command::NullCofree { cdg_module, spliced, r, homotopy, .. } => {
            if let Some(n) = cdg_module {
                put("cdg-module", n.clone());
            }
            if let Some(d) = spliced {
                put("spliced", d.to_string());
            }
            put("r", r.to_string());
            put("homotopy", homotopy.to_string());
        }
        Command::TTrunc { cdg_module, p, .. } => {
            put("cdg-module", cdg_module.clone());
            put("p", p.to_string());
        }
        Command::SigmaTrunc { complex, cdg_module, p, .. } => {
            if let Some(c) = complex {
                put("complex", c.clone());
            }
            if let Some(n) = cdg_module {
                put("cdg-module", n.clone());
            }
            put("p", p.to_string());
        }
        Command::Regrade { cdg_module, r, .. } => {
            put("cdg-module", cdg_module.clone());
            put("r", r.to_string());
        }
        _ => {}
    }
    m
}

fn input_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Dual(f) | Command::Truncate(f) | Command::Pbw(f) | Command::Cdga(f) | Command::BuildU(f) | Command::KoszulCheck(f) => {
            Some(&f.file)
        }
        Command::ApplyF { file, .. }
        | Command::ApplyG { file, .. }
        | Command::AdjointCheck { file, .. }
        | Command::Unit { file, .. }
        | Command::Counit { file, .. }
        | Command::Ce { file, .. }
        | Command::Tor { file, .. }
        | Command::Ext { file, .. }
        | Command::Minimize { file, .. }
        | Command::NullFree { file, .. }
        | Command::TTrunc { file, .. }
        | Command::SigmaTrunc { file, .. }
        | Command::Regrade { file, .. } => Some(&file.file),
        Command::NullCofree { file, .. } => file.as_deref(),
        Command::Selftest { .. } => None,
    }
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var("KOSZUL_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Input(format!("KOSZUL_SEED={s:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<report::Outcome, CliError> {
    let path = input_path(&cli.command);
    let problem = path.map(load).transpose()?;
    let file_bounds = problem.as_ref().map(|p| p.bounds.clone()).unwrap_or_default();
    let defaults = ResolvedBounds::default();
    let bounds = ResolvedBounds {
        degree: cli.degree.or(file_bounds.degree).unwrap_or(defaults.degree),
        window: cli.window.or(file_bounds.window).unwrap_or(defaults.window),
        filtration: cli.filtration.or(file_bounds.filtration).unwrap_or(defaults.filtration),
    };
    if bounds.window.0 > bounds.window.1 {
        return Err(CliError::Input(format!("empty window {:?}", bounds.window)));
    }
    let ctx = Ctx {
        problem,
        input: path.map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())),
        bounds,
        flags: flag_map(&cli.command),
    };

    match &cli.command {
        Command::Dual(_) => commands::dual(&ctx),
        Command::Truncate(_) => commands::truncate(&ctx),
        Command::Pbw(_) => commands::pbw(&ctx),
        Command::Cdga(_) => commands::cdga(&ctx),
        Command::BuildU(_) => commands::build_u(&ctx),
        Command::KoszulCheck(_) => commands::koszul_check(&ctx),
        Command::ApplyF { cdg_module, i, .. } => commands::apply_f_cmd(&ctx, cdg_module, *i),
        Command::ApplyG { complex, .. } => commands::apply_g_cmd(&ctx, complex),
        Command::AdjointCheck { cdg_module, complex, .. } => commands::adjoint_check(&ctx, cdg_module, complex),
        Command::Unit { cdg_module, i, .. } => commands::unit_cmd(&ctx, cdg_module, *i),
        Command::Counit { complex, i, .. } => commands::counit_cmd(&ctx, complex, *i),
        Command::Ce { module, .. } => commands::ce(&ctx, module),
        Command::Tor { module, range, .. } => commands::tor_ext(&ctx, module, *range, false),
        Command::Ext { module, range, .. } => commands::tor_ext(&ctx, module, *range, true),
        Command::Minimize { complex, .. } => commands::minimize_cmd(&ctx, complex),
        Command::NullFree { complex, cdg_module, i, homotopy, .. } => {
            let input = match (complex, cdg_module) {
                (_, Some(n)) => FreeInput::FOf(n, *i),
                (Some(c), None) => FreeInput::Complex(c),
                (None, None) => FreeInput::Complex("k"),
            };
            commands::null_free(&ctx, input, *homotopy)
        }
        Command::NullCofree { cdg_module, spliced, r, homotopy, .. } => {
            commands::null_cofree(&ctx, cdg_module.as_deref(), *spliced, *r, *homotopy)
        }
        Command::TTrunc { cdg_module, p, .. } => commands::t_trunc(&ctx, cdg_module, *p),
        Command::SigmaTrunc { complex, cdg_module, p, .. } => {
            commands::sigma_trunc(&ctx, complex.as_deref(), cdg_module.as_deref(), *p)
        }
        Command::Regrade { cdg_module, r, .. } => commands::regrade(&ctx, cdg_module, *r),
        Command::Selftest { seed, corrupt_signs } => {
            let seed = match seed {
                Some(s) => Some(*s),
                None => seed_from_env()?,
            };
            let mut ctx = ctx;
            if let Some(s) = seed {
                ctx.flags.insert("seed".into(), s.to_string());
            }
            commands::selftest_cmd(&ctx, seed, *corrupt_signs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.json));
            ExitCode::from(if out.report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
