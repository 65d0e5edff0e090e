use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use noonlab::audit::{audit, AuditOptions};
use noonlab::checks::RandomSpec;
use noonlab::core::schemes::{
    balanced_splitter_coefficients, block_amplitude_factor, deletion_angle_with, noon_circuit_with,
    noon_probability_closed_form, AngleRule, NoonPlan,
};
use noonlab::core::{Config, ReflectionPhase};
use noonlab::dsl::{self, parse_expr, ParseError};
use noonlab::exec::{execute, RuntimeError};
use noonlab::output::{
    conventions_json, run_csv, run_json, state_csv, table_csv, terms_json, to_json_string,
};
use noonlab::presets;
use noonlab::sweep::{sweep, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PbsPhase {
    #[value(name = "1")]
    One,
    #[value(name = "i")]
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    /// tan θ = 1/√i
    ZeroFactor,
    /// tan θ = √i
    Printed,
}

impl From<Rule> for AngleRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::ZeroFactor => AngleRule::ZeroFactor,
            Rule::Printed => AngleRule::Printed,
        }
    }
}

/// Simulate heralded linear-optical circuits on Fock states.
#[derive(Debug, Parser)]
#[command(name = "noonlab", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Tolerance for comparisons.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Amplitudes below this modulus are dropped.
    #[arg(long, global = true, default_value_t = 1e-14)]
    prune: f64,
    /// Phase picked up by each photon reflected at a polarizing splitter.
    #[arg(long, global = true, value_enum, default_value = "1")]
    pbs_phase: PbsPhase,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a circuit file.
    Run {
        file: PathBuf,
        /// Include the state after every step.
        #[arg(long)]
        trace: bool,
    },
    /// Run the two-photon polarization entangler.
    Bell {
        #[arg(long)]
        trace: bool,
    },
    /// Generate a P-photon NOON state and compare with the closed form.
    Noon {
        #[arg(value_parser = clap::value_parser!(u32).range(2..=64))]
        photons: u32,
        #[arg(long, value_enum, default_value = "zero-factor")]
        rule: Rule,
        /// Also write the generating circuit to this file.
        #[arg(long)]
        emit_circ: Option<PathBuf>,
    },
    /// Tabulate a circuit while varying one or more angles.
    Sweep {
        file: PathBuf,
        /// Parameter names (bs1, rot2, ...); a comma list moves several together.
        #[arg(long, value_delimiter = ',', required = true)]
        param: Vec<String>,
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "pi/2")]
        to: String,
        #[arg(long, default_value_t = 25)]
        points: usize,
        /// Occupation to tabulate, e.g. "1 1"; repeatable. Default: every term seen.
        #[arg(long)]
        term: Vec<String>,
    },
    /// Evaluate the closed-form expressions.
    Formulas {
        /// Largest photon number in the NOON table.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(2..=64))]
        max_p: u32,
        /// Balanced-splitter coefficients on |N,N>.
        #[arg(long)]
        bs: Option<u32>,
        /// Block amplitude factors for this photon number (needs --theta).
        #[arg(long, requires = "theta")]
        block: Option<u32>,
        #[arg(long)]
        theta: Option<String>,
    },
    /// Compare the sparse engine with the dense oracle and the closed forms.
    Audit {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        circuits: usize,
        #[arg(long, default_value_t = 4)]
        photons: u32,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..=8))]
        modes: u64,
    },
    /// Write the shipped circuit files into a directory.
    EmitPresets {
        dir: PathBuf,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=64))]
        max_p: u32,
    },
}

enum Failure {
    Usage(String),
    Parse {
        path: String,
        source: String,
        err: ParseError,
    },
    Runtime(String),
    Audit,
}

impl From<RuntimeError> for Failure {
    fn from(e: RuntimeError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<noonlab::core::Error> for Failure {
    fn from(e: noonlab::core::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn parse_file(path: &Path) -> Result<dsl::CircuitIr, Failure> {
    let source = read(path)?;
    dsl::parse(&source).map_err(|err| Failure::Parse {
        path: path.display().to_string(),
        source,
        err,
    })
}

fn expr_arg(flag: &str, text: &str) -> Result<f64, Failure> {
    parse_expr(text)
        .map(|e| e.eval())
        .map_err(|e| Failure::Usage(format!("--{flag}: {}", e.message)))
}

fn config(cli: &Cli) -> Config {
    Config {
        prune: cli.prune,
        reflection_phase: match cli.pbs_phase {
            PbsPhase::One => ReflectionPhase::One,
            PbsPhase::I => ReflectionPhase::I,
        },
        ..Config::default()
    }
}

fn run_source(cli: &Cli, ir: &dsl::CircuitIr, trace: bool) -> Result<String, Failure> {
    let result = execute(ir, &config(cli), trace)?;
    Ok(match cli.format {
        Format::Json => to_json_string(&run_json(&result, cli.tol)),
        Format::Csv => run_csv(&result),
    })
}

fn cmd_noon(cli: &Cli, photons: u32, rule: Rule, emit: Option<&Path>) -> Result<String, Failure> {
    let cfg = config(cli);
    let rule = AngleRule::from(rule);
    if let Some(path) = emit {
        let text = presets::noon(photons, rule)?;
        fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    }
    let run = noon_circuit_with(photons, rule, &cfg)?;
    let closed = noon_probability_closed_form(photons)?;
    let diff = (run.probability - closed).abs();
    let plan = &run.plan;
    Ok(match cli.format {
        Format::Json => to_json_string(&json!({
            "photons": photons,
            "rule": match rule { AngleRule::ZeroFactor => "atan(1/sqrt(i))", AngleRule::Printed => "atan(sqrt(i))" },
            "simulated": run.probability,
            "closed_form": closed,
            "diff": diff,
            "within_tol": diff < cli.tol,
            "relative_phase": run.relative_phase(),
            "plan": {
                "input": [plan.input_occupations.0, plan.input_occupations.1],
                "deleted": plan.deleted_occupations,
                "angles": plan.block_angles,
            },
            "modes": run.state.registry().labels().collect::<Vec<_>>(),
            "terms": terms_json(&run.state),
            "conventions": conventions_json(&cfg, cli.tol),
        })),
        Format::Csv => format!(
            "# simulated={} closed_form={closed} diff={diff:e}\n{}",
            run.probability,
            state_csv(&run.state, run.probability)
        ),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    cli: &Cli,
    file: &Path,
    params: &[String],
    from: &str,
    to: &str,
    points: usize,
    terms: &[String],
) -> Result<String, Failure> {
    let ir = parse_file(file)?;
    let terms = if terms.is_empty() {
        None
    } else {
        Some(
            terms
                .iter()
                .map(|t| {
                    t.split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|s| !s.is_empty())
                        .map(str::parse::<u32>)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| {
                            Failure::Usage(format!("--term: '{t}' is not a list of photon counts"))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    let spec = SweepSpec {
        params: params.to_vec(),
        from: expr_arg("from", from)?,
        to: expr_arg("to", to)?,
        points,
        terms,
    };
    let table = sweep(&ir, &spec, &config(cli)).map_err(|e| match e {
        noonlab::sweep::SweepError::Runtime(r) => Failure::from(r),
        other => Failure::Usage(other.to_string()),
    })?;
    Ok(match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "theta": r.theta,
                        "probability": r.probability,
                        "fidelity": r.fidelity,
                        "amplitudes": r.amplitudes.iter().map(|a| json!({"re": a.re, "im": a.im})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json_string(&json!({
                "params": spec.params,
                "modes": table.modes,
                "terms": table.terms.iter().map(|t| t.counts().to_vec()).collect::<Vec<_>>(),
                "rows": rows,
            }))
        }
    })
}

fn cmd_formulas(
    cli: &Cli,
    max_p: u32,
    bs: Option<u32>,
    block: Option<u32>,
    theta: Option<&str>,
) -> Result<String, Failure> {
    let mut noon = Vec::new();
    for p in 2..=max_p {
        let plan = NoonPlan::new(p, AngleRule::ZeroFactor)?;
        noon.push((p, noon_probability_closed_form(p)?, plan));
    }
    if cli.format == Format::Csv {
        let header = vec![
            "photons".to_string(),
            "probability".into(),
            "deleted".into(),
        ];
        let rows: Vec<Vec<String>> = noon
            .iter()
            .map(|(p, prob, plan)| {
                let deleted: Vec<String> = plan
                    .deleted_occupations
                    .iter()
                    .map(u32::to_string)
                    .collect();
                vec![p.to_string(), prob.to_string(), deleted.join(" ")]
            })
            .collect();
        return Ok(table_csv(&header, &rows));
    }
    let angles: Vec<Value> = (1..=max_p)
        .map(|i| {
            Ok(json!({
                "i": i,
                "zero_factor": deletion_angle_with(i, AngleRule::ZeroFactor)?,
                "printed": deletion_angle_with(i, AngleRule::Printed)?,
            }))
        })
        .collect::<Result<_, noonlab::core::Error>>()?;
    let mut out = json!({
        "noon": noon.iter().map(|(p, prob, plan)| json!({
            "photons": p,
            "probability": prob,
            "input": [plan.input_occupations.0, plan.input_occupations.1],
            "deleted": plan.deleted_occupations,
        })).collect::<Vec<_>>(),
        "deletion_angles": angles,
    });
    if let Some(n) = bs {
        out["balanced_splitter"] =
            json!({ "n": n, "coefficients": balanced_splitter_coefficients(n) });
    }
    if let (Some(n), Some(t)) = (block, theta) {
        let theta = expr_arg("theta", t)?;
        let factors: Vec<f64> = (0..=n)
            .map(|k| block_amplitude_factor(k, n, theta))
            .collect();
        out["block"] = json!({ "photons": n, "theta": theta, "factors": factors });
    }
    Ok(to_json_string(&out))
}

fn cmd_emit(dir: &Path, max_p: u32) -> Result<String, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    let mut written = String::new();
    for (name, text) in presets::all(max_p) {
        let path = dir.join(&name);
        fs::write(&path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        written.push_str(&format!("{}\n", path.display()));
    }
    Ok(written)
}

fn dispatch(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Run { file, trace } => run_source(cli, &parse_file(file)?, *trace),
        Command::Bell { trace } => {
            let ir = dsl::parse(&presets::fig1()).expect("shipped preset parses");
            run_source(cli, &ir, *trace)
        }
        Command::Noon {
            photons,
            rule,
            emit_circ,
        } => cmd_noon(cli, *photons, *rule, emit_circ.as_deref()),
        Command::Sweep {
            file,
            param,
            from,
            to,
            points,
            term,
        } => cmd_sweep(cli, file, param, from, to, *points, term),
        Command::Formulas {
            max_p,
            bs,
            block,
            theta,
        } => cmd_formulas(cli, *max_p, *bs, *block, theta.as_deref()),
        Command::Audit {
            seed,
            circuits,
            photons,
            modes,
        } => {
            let opts = AuditOptions {
                random: RandomSpec {
                    seed: *seed,
                    circuits: *circuits,
                    max_photons: *photons,
                    max_modes: *modes as usize,
                },
                config: config(cli),
                ..AuditOptions::default()
            };
            let report = audit(&opts);
            emit(&report.to_string());
            if report.passed() {
                Ok(String::new())
            } else {
                Err(Failure::Audit)
            }
        }
        Command::EmitPresets { dir, max_p } => cmd_emit(dir, *max_p),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    noonlab::init_threads();
    match dispatch(&cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse { path, source, err }) => {
            eprintln!("{path}: {err}");
            if let Some(s) = err.snippet(&source) {
                eprintln!("{s}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Audit) => ExitCode::from(3),
    }
}
