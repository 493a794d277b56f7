use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use nsflab::lab::{self, ScenarioConfig};
use nsflab::profiles::verify_profile_equivalences;
use nsflab::Result;

/// Composite viscous wave laboratory.
#[derive(Parser)]
#[command(name = "nsflab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "1")]
    One,
    #[value(name = "3")]
    Three,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the wave pattern (end states, speeds, amplitudes) as JSON.
    Riemann {
        /// Scenario file; the built-in reference scenario when absent.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Tabulate a viscous shock profile as CSV (xi,v,u,theta).
    Profile {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "1")]
        family: FamilyArg,
        /// Output file; `<output_dir>/<id>_profile<family>.csv` when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the contact wave as CSV (xi,theta,dtheta).
    Contact {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one scenario; exit status 1 if any property fails.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a scenario once per value of a dotted config field.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// e.g. `perturbation.amplitude`.
        #[arg(long)]
        axis: String,
        /// Comma-separated numbers; may be empty.
        #[arg(long, default_value = "")]
        values: String,
    },
}

fn load(config: &Option<PathBuf>) -> Result<ScenarioConfig> {
    match config {
        Some(p) => ScenarioConfig::from_path(p),
        None => Ok(ScenarioConfig::reference()),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| nsflab::Error::Config(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.to_string())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| nsflab::Error::Config(format!("csv: {e}")))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| nsflab::Error::Io {
            path: dir.into(),
            source: e,
        })?;
    }
    std::fs::write(path, bytes).map_err(|e| nsflab::Error::Io {
        path: path.into(),
        source: e,
    })
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| nsflab::Error::Config(format!("sweep value {s:?}: {e}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Riemann { config } => {
            let cfg = load(&config)?;
            let wave = lab::build_wave(&cfg)?;
            let p = wave.pattern();
            let st = |s: &nsflab::gas::ThermoState| json!({"v": s.v(), "u": s.u(), "theta": s.theta()});
            let out = json!({
                "left": st(&p.left),
                "mid_left": st(&p.mid_left),
                "mid_right": st(&p.mid_right),
                "right": st(&p.right),
                "sigma1": p.sigma1,
                "sigma3": p.sigma3,
                "delta1": p.delta1,
                "deltaC": p.delta_c,
                "delta3": p.delta3,
                "p_star": p.p_star(&cfg.gas),
                "rh_residual": p.check_invariants(&cfg.gas)?,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Cmd::Profile { config, family, out } => {
            let cfg = load(&config)?;
            let wave = lab::build_wave(&cfg)?;
            let (prof, k) = match family {
                FamilyArg::One => (wave.shock1(), 1),
                FamilyArg::Three => (wave.shock3(), 3),
            };
            let prof = prof.ok_or_else(|| nsflab::Error::Config(format!("family {k} has zero amplitude")))?;
            let path = out.unwrap_or_else(|| cfg.resolved_output_dir().join(format!("{}_profile{k}.csv", cfg.id)));
            let xs = prof.xi_grid();
            write_csv(
                &path,
                &["xi", "v", "u", "theta"],
                xs.iter().map(|&x| {
                    let (v, u, th) = prof.eval(x);
                    vec![x, v, u, th]
                }),
            )?;
            let eq = verify_profile_equivalences(prof, &cfg.gas);
            let rates = prof.decay_rates();
            let summary = json!({
                "family": k,
                "sigma": prof.sigma(),
                "amplitude": prof.amplitude(),
                "residual": prof.residual(),
                "decay_rates": [rates.0, rates.1],
                "velocity_ratio": eq.velocity,
                "temperature_ratio": eq.temperature,
                "curvature_ratio": eq.curvature,
                "csv": path,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Cmd::Contact { config, out } => {
            let cfg = load(&config)?;
            let wave = lab::build_wave(&cfg)?;
            let c = wave.contact();
            let path = out.unwrap_or_else(|| cfg.resolved_output_dir().join(format!("{}_contact.csv", cfg.id)));
            write_csv(
                &path,
                &["xi", "theta", "dtheta"],
                c.xi_grid().into_iter().map(|x| {
                    let p = c.eval(x);
                    vec![x, p.theta, p.dtheta]
                }),
            )?;
            let summary = json!({
                "theta_left": c.theta_left(),
                "theta_right": c.theta_right(),
                "p_star": c.p_star(),
                "diffusivity": c.diffusivity(),
                "half_width": c.half_width(),
                "csv": path,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Cmd::Simulate { config } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let rep = lab::run_scenario(&cfg)?;
            for o in &rep.properties {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                let note = if o.trivial { " (trivial)" } else { "" };
                println!("{tag} {}{note}", serde_json::to_value(o.property)?.as_str().unwrap_or("?"));
                for f in &o.failures {
                    println!("     {}", serde_json::to_string(f)?);
                }
            }
            for f in &rep.files {
                println!("wrote {}", f.display());
            }
            Ok(rep.passed)
        }
        Cmd::Sweep { config, axis, values } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let values = parse_values(&values)?;
            let out = lab::sweep(&cfg, &axis, &values)?;
            for r in &out.rows {
                let tag = if !r.error.is_empty() {
                    "ERROR"
                } else if r.passed {
                    "PASS"
                } else {
                    "FAIL"
                };
                println!("{tag} {} {}={} {}", r.id, axis, r.value, r.error);
            }
            println!("wrote {}", out.summary_path.display());
            Ok(out.rows.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let mut msg = e.to_string();
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                let s_msg = s.to_string();
                if !msg.contains(&s_msg) {
                    msg.push_str(": ");
                    msg.push_str(&s_msg);
                }
                src = s.source();
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
