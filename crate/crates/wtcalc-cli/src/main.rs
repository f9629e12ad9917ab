//! `wtcalc`: evaluate, compare, check, solve and simplify from the shell.
//!
//! Exit codes: 0 on success, Sound or Equal; 1 on Unsound, Different,
//! Proportional, Unsat or an evaluation failure; 2 on usage or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wtcalc::diagram::Diagram;
use wtcalc::rewrite::{self, Component};
use wtcalc::rules::{self, sanitize_name, Suite};
use wtcalc::semantics::{compare, evaluate, fmt_sig17, Comparison, Model, Tensor, RULE_TOL};
use wtcalc::solver::{self, DEFAULT_K};
use wtcalc::soundness::{self, Sampling, DEFAULT_SEED};

/// Instances exported per rule by `export-rules`.
const EXPORT_PER_RULE: usize = 3;

#[derive(Parser)]
#[command(name = "wtcalc", version, about = "Well-tempered ZX/ZH diagram calculator")]
struct Cli {
    /// Worker threads for rule checking (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the tensor dump of a diagram.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "nu")]
        model: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two diagrams, or a diagram and a tensor dump.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "nu")]
        model: String,
        #[arg(long, default_value_t = RULE_TOL)]
        tol: f64,
    },
    /// Check one rule schema over the sampling grid.
    CheckRule {
        #[arg(long)]
        rule: String,
        /// Defaults to the model of the rule's suite.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = RULE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Check a whole suite, or regenerate the condition tables with `tables`.
    CheckSuite {
        suite: String,
        /// Defaults to the suite's own model.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = RULE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Solve coefficient constraints exactly.
    Solve {
        /// Comma-separated constraint names.
        #[arg(long)]
        constraints: String,
        /// Largest spider degree to constrain.
        #[arg(long = "K", default_value_t = DEFAULT_K)]
        k: usize,
        /// Also check the solution's model with the soundness checker.
        #[arg(long)]
        cross_check: bool,
    },
    /// Rewrite a diagram to a fixpoint of the strategy.
    Simplify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Check every step exactly under this model.
        #[arg(long)]
        validate: Option<String>,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Comma-separated components: fuse, identity, hopf, hcancel, nu-merge.
        #[arg(long, default_value = "fuse,identity,hopf,hcancel,nu-merge")]
        strategy: String,
    },
    /// Write sample instances of every rule as diagram files.
    ExportRules {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        suite: Option<String>,
    },
}

/// Failure with its exit code.
enum Fail {
    /// Verdict or evaluation failure: exit 1.
    Negative(String),
    /// Usage or I/O: exit 2.
    Usage(String),
}

type Outcome = Result<bool, Fail>;

fn usage(e: impl std::fmt::Display) -> Fail {
    Fail::Usage(e.to_string())
}

fn negative(e: impl std::fmt::Display) -> Fail {
    Fail::Negative(e.to_string())
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_diagram(path: &Path) -> Result<Diagram, Fail> {
    Diagram::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A named model or a coefficient file.
fn load_model(name: &str) -> Result<Model, Fail> {
    if let Some(m) = Model::named(name) {
        return Ok(m);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(usage(format!("unknown model \"{name}\" (alpha, beta, nu or a coefficient file)")));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    Model::from_coefficient_file(stem, &read(path)?).map_err(|e| usage(format!("{name}: {e}")))
}

fn emit(text: &str) {
    print!("{text}");
}

fn eval(input: &Path, model: &str, out: Option<&Path>) -> Outcome {
    let d = load_diagram(input)?;
    let m = load_model(model)?;
    let t = evaluate(&d, &m).map_err(negative)?;
    match out {
        Some(p) => write(p, &t.dump())?,
        None => emit(&t.dump()),
    }
    Ok(true)
}

/// Diagram JSON, or failing that a tensor dump.
fn load_operand(path: &Path, model: &Model) -> Result<(Tensor, Option<(usize, usize)>), Fail> {
    let text = read(path)?;
    match Diagram::parse(&text) {
        Ok(d) => {
            let t = evaluate(&d, model).map_err(negative)?;
            Ok((t, Some((d.inputs().len(), d.outputs().len()))))
        }
        Err(de) => match Tensor::parse_dump(&text) {
            Ok(t) => Ok((t, None)),
            Err(_) => Err(usage(format!("{}: {de}", path.display()))),
        },
    }
}

fn compare_cmd(a: &Path, b: &Path, model: &str, tol: f64) -> Outcome {
    let m = load_model(model)?;
    let (ta, sa) = load_operand(a, &m)?;
    let (tb, sb) = load_operand(b, &m)?;
    let signature_ok = match (sa, sb) {
        (Some(x), Some(y)) => x == y,
        _ => ta.legs() == tb.legs(),
    };
    if !signature_ok {
        return Err(usage("boundary signatures differ"));
    }
    let c = compare(&ta, &tb, tol).map_err(usage)?;
    match c {
        Comparison::Equal => println!("Equal"),
        Comparison::Proportional(z) => println!("Proportional λ={},{}", fmt_sig17(z.re), fmt_sig17(z.im)),
        Comparison::Different(d) => println!("Different dev={}", fmt_sig17(d)),
    }
    Ok(c == Comparison::Equal)
}

fn check_rule(rule: &str, model: Option<&str>, tol: f64, seed: u64) -> Outcome {
    let schema = rules::lookup(rule).map_err(usage)?;
    let m = match model {
        Some(s) => load_model(s)?,
        None => schema.suite.default_model(),
    };
    let report = soundness::check_schema(schema, &m, &Sampling::with_seed(seed), tol);
    emit(&report.render());
    Ok(report.is_sound())
}

fn check_suite(name: &str, model: Option<&str>, tol: f64, seed: u64) -> Outcome {
    let sampling = Sampling::with_seed(seed);
    if name == "tables" {
        let rows = soundness::run_tables(&sampling, tol);
        for r in &rows {
            println!("{}", r.render());
        }
        let bad = rows.iter().filter(|r| !r.matches()).count();
        println!("tables rows {} mismatches {bad}", rows.len());
        return Ok(bad == 0);
    }
    let suite = Suite::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        usage(format!("unknown suite \"{name}\" (known: {}, tables)", known.join(", ")))
    })?;
    let m = match model {
        Some(s) => load_model(s)?,
        None => suite.default_model(),
    };
    let reports = soundness::check_suite(suite, &m, &sampling, tol);
    for r in &reports {
        emit(&r.render());
    }
    let sound = reports.iter().filter(|r| r.is_sound()).count();
    println!("suite {} model {} sound {sound}/{}", suite.name(), m.name, reports.len());
    Ok(sound == reports.len())
}

fn solve(constraints: &str, k: usize, cross: bool) -> Outcome {
    let names: Vec<&str> = constraints.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(usage("no constraints given"));
    }
    let system = solver::compile(&names, k).map_err(usage)?;
    let solution = solver::solve(&system);
    emit(&solution.render());
    if solution.is_unsat() {
        return Ok(false);
    }
    if cross {
        let rows = solver::cross_check(&solution, &names, k).map_err(negative)?;
        for r in &rows {
            println!("{}", r.render());
        }
        return Ok(rows.iter().all(|r| r.agree()));
    }
    Ok(true)
}

fn simplify(input: &Path, out: &Path, validate: Option<&str>, trace: Option<&Path>, strategy: &str) -> Outcome {
    let d = load_diagram(input)?;
    let components = Component::parse_list(strategy).map_err(usage)?;
    let model = validate.map(load_model).transpose()?;
    let (result, steps) = rewrite::simplify(&d, &components, model.as_ref()).map_err(negative)?;
    write(out, &result.to_json())?;
    let lines: String = steps.iter().map(|s| s.render() + "\n").collect();
    match trace {
        Some(p) => write(p, &lines)?,
        None => emit(&lines),
    }
    Ok(true)
}

fn export_rules(dir: &Path, suite: Option<&str>) -> Outcome {
    let suites: Vec<Suite> = match suite {
        Some(s) => vec![Suite::from_name(s).ok_or_else(|| usage(format!("unknown suite \"{s}\"")))?],
        None => Suite::ALL.to_vec(),
    };
    let sampling = Sampling::default();
    let mut written = 0;
    for s in suites {
        for schema in rules::suite(s) {
            let target = dir.join(s.name()).join(sanitize_name(schema.name));
            fs::create_dir_all(&target).map_err(|e| usage(format!("{}: {e}", target.display())))?;
            let instances = sampling
                .bindings(schema)
                .into_iter()
                .filter_map(|b| schema.instantiate(&b).ok())
                .filter(|i| i.lhs.boundary_count() <= sampling.leg_cap)
                .take(EXPORT_PER_RULE);
            for inst in instances {
                let key = inst.bindings.key();
                let stem = if key.is_empty() { "default".to_string() } else { key };
                write(&target.join(format!("{stem}.lhs.json")), &inst.lhs.to_json())?;
                write(&target.join(format!("{stem}.rhs.json")), &inst.rhs.to_json())?;
                written += 1;
            }
        }
    }
    println!("exported {written} instances to {}", dir.display());
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(usage)?;
    }
    match cli.command {
        Command::Eval { input, model, out } => eval(&input, &model, out.as_deref()),
        Command::Compare { a, b, model, tol } => compare_cmd(&a, &b, &model, tol),
        Command::CheckRule { rule, model, tol, seed } => check_rule(&rule, model.as_deref(), tol, seed),
        Command::CheckSuite { suite, model, tol, seed } => check_suite(&suite, model.as_deref(), tol, seed),
        Command::Solve { constraints, k, cross_check } => solve(&constraints, k, cross_check),
        Command::Simplify {
            input,
            out,
            validate,
            trace,
            strategy,
        } => simplify(&input, &out, validate.as_deref(), trace.as_deref(), &strategy),
        Command::ExportRules { dir, suite } => export_rules(&dir, suite.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Negative(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
