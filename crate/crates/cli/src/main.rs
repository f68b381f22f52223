use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hamext::classical::{extend, parse_ratio, ExtensionParams};
use hamext::harness::config::SystemConfig;
use hamext::harness::{default_seed, verify, Report, SuiteKind, SuiteOptions};
use hamext::systems::{self, SystemDef, SystemError};

#[derive(Parser)]
#[command(
    name = "hamext",
    version,
    about = "Verify extended Hamiltonians and their ladder constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in systems.
    List,
    /// Run a verification suite on a built-in system.
    Verify {
        system: String,
        #[arg(long, default_value = "all")]
        suite: SuiteKind,
        /// Extension indices `m/n`; repeat for several.
        #[arg(long = "mn", value_parser = parse_mn)]
        mn: Vec<(u32, u32)>,
        /// One relative tolerance for every check.
        #[arg(long)]
        tol: Option<f64>,
        /// Sampling seed (default: HAMEXT_SEED or 42).
        #[arg(long)]
        seed: Option<u64>,
        /// Sample points per check.
        #[arg(long)]
        points: Option<usize>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Record wall time per check.
        #[arg(long)]
        timings: bool,
    },
    /// Print the extended Hamiltonian and its characteristic integral.
    Extend {
        system: String,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long = "C", id = "big_c")]
        big_c: Option<f64>,
        #[arg(long, default_value = "1/1")]
        k: String,
        /// The constant Omega of the extension.
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
    },
    /// Load a JSON system description and validate it.
    CheckConfig { file: PathBuf },
}

fn parse_mn(s: &str) -> Result<(u32, u32), String> {
    parse_ratio(s).map_err(|e| e.to_string())
}

fn find(name: &str) -> Result<SystemDef, ExitCode> {
    systems::find(name).map_err(|e| {
        eprintln!("error: {e}");
        if let SystemError::Unknown(_) = e {
            eprintln!("known systems: {}", systems::names().join(", "));
        }
        ExitCode::from(2)
    })
}

fn finish(report: &Report) -> ExitCode {
    print!("{}", report.table());
    if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::List => {
            for s in systems::catalog() {
                println!("{:<18} {}", s.name, s.summary);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            system,
            suite,
            mn,
            tol,
            seed,
            points,
            json,
            timings,
        } => {
            let sys = find(&system)?;
            let mut opts = SuiteOptions {
                tol,
                seed: seed.unwrap_or_else(default_seed),
                points,
                ..SuiteOptions::default()
            };
            if !mn.is_empty() {
                opts.mn = Some(mn);
            }
            let report = verify(&sys, suite, &opts, timings);
            if let Some(path) = json {
                std::fs::write(&path, report.to_json() + "\n").map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(2)
                })?;
            }
            Ok(finish(&report))
        }
        Command::Extend {
            system,
            c,
            c0,
            big_c,
            k,
            omega,
        } => {
            let sys = find(&system)?;
            let Some(base) = sys.base.as_ref() else {
                eprintln!("error: `{system}` has no base Hamiltonian to extend");
                return Err(ExitCode::from(2));
            };
            let cand = sys.candidates.first().ok_or_else(|| {
                eprintln!("error: `{system}` has no G");
                ExitCode::from(2)
            })?;
            let (m, n) = parse_mn(&k).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?;
            let preset = sys.presets.first();
            let c = c.unwrap_or(cand.c);
            let c0 = c0.unwrap_or(cand.c0);
            let big_c = big_c.unwrap_or_else(|| preset.map_or(0.0, |p| p.big_c));
            let params = ExtensionParams::new(c, c0, big_c, m, n)
                .map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                })?
                .with_c1(cand.c1)
                .with_omega_cap(omega);
            let ext = extend(base, &params);
            let g = cand.fundamental_g(base);
            println!("L = {}", base.l());
            println!("gamma = {}", ext.gamma());
            println!("H = {}", ext.h());
            if omega == 0.0 {
                println!("K_{m},{n} = {}", ext.k_integral(&g));
            } else {
                let (s, r) = hamext::classical::kbar_indices(m, n);
                println!("Kbar_{},{r} = {}", 2 * s, ext.kbar_integral(&g, s, r));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckConfig { file } => {
            let sys = SystemConfig::load(&file).and_then(|c| c.into_system()).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?;
            match sys.validate() {
                Ok(outs) => {
                    for (name, out) in outs {
                        println!("{name:<32} pass  max_rel {:.3e}", out.max_rel_residual);
                    }
                    println!("{}: config ok", sys.name);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Err(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli).unwrap_or_else(|code| code)
}
