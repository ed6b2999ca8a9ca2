use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pinwheel::exact::offsets::{validate_pieces, SymbolicAssignment};
use pinwheel::exact::{solve_exact_with, ExactVerdict, STATE_BUDGET};
use pinwheel::fold::{fold, validate_repr};
use pinwheel::num::{fmt_rational, parse_rational};
use pinwheel::oracle::brute_force_constant_gap;
use pinwheel::ptas::{decide, PtasVerdict};
use pinwheel::reductions::{build_eps_witness, red_concise, red_eps, red_ps, validate_witness};
use pinwheel::related::{constant_gap_check, red_bgt, red_rs, GapVerdict};
use pinwheel::sat::{brute_force_sat, gen_random_34sat, gen_random_3sat, parse_dimacs, SatVerdict};
use pinwheel::verify::{run_suite, SuiteConfig, CRITERIA};
use pinwheel::{Exec, PinwheelInstance, Schedule, ScheduleRepr};

const BUDGET_VAR: &str = "PINWHEEL_STATE_BUDGET";

#[derive(Parser)]
#[command(
    name = "pinwheel",
    version,
    about = "Pinwheel scheduling solvers, reductions and checks"
)]
struct Cli {
    /// Print one JSON object instead of key: value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an integer instance exactly and print a schedule if one exists.
    SolveExact { instance: String },
    /// Run the approximation scheme: A unschedulable, or A(1+eps) schedulable.
    Decide {
        instance: String,
        #[arg(long, default_value = "1/4")]
        eps: String,
        /// Also build the schedule for the scaled instance.
        #[arg(long)]
        construct: bool,
    },
    /// Fold every period above theta and print the folded instance.
    Fold {
        instance: String,
        #[arg(long)]
        theta: String,
    },
    /// Apply a reduction. SAT reductions read DIMACS, the others read an instance.
    Reduce {
        kind: ReduceKind,
        #[arg(long)]
        cnf: Option<String>,
        #[arg(long)]
        instance: Option<String>,
    },
    /// Build the exact schedule of the density-1 reduction from a satisfying assignment.
    Witness(WitnessArgs),
    /// Check a schedule, represented schedule or witness against an instance.
    Validate {
        instance: String,
        schedule: String,
        /// Multiply every period by this factor first.
        #[arg(long)]
        scale: Option<String>,
        /// Window checked when the schedule's period is too long to expand.
        #[arg(long, default_value_t = 4096)]
        window: u64,
    },
    /// Print the exact density of an instance (stdin when omitted).
    ValidateDensity { instance: Option<String> },
    #[command(subcommand)]
    Check(CheckCommand),
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run the property suite and print one PASS/FAIL line per criterion.
    VerifySuite {
        /// Smaller batches for a fast smoke run.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        sequential: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a single criterion (1-based).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    Eps,
    Concise,
    Ps,
    Bgt,
    Rs,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    cnf: String,
    /// Signed literals set true, e.g. "1 -2 3"; found by exhaustive search when omitted.
    #[arg(long, allow_hyphen_values = true)]
    assignment: Option<String>,
    /// Write the pieces as JSON here instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Check offsets for constant-gap demands, or search for them when omitted.
    ConstantGap {
        #[arg(long, value_delimiter = ',')]
        demands: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        offsets: Option<Vec<u64>>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random formula in DIMACS format.
    Sat {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow variables in more than four clauses.
        #[arg(long)]
        unbounded: bool,
    },
}

/// Key-value output collected in order, printed as lines or as one JSON object.
struct Out {
    json: bool,
    fields: Vec<(String, Value)>,
}

impl Out {
    fn new(json: bool) -> Self {
        Out {
            json,
            fields: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    fn print(&self) {
        if self.json {
            let map: serde_json::Map<String, Value> = self.fields.iter().cloned().collect();
            emit(&format!("{}\n", Value::Object(map)));
            return;
        }
        for (k, v) in &self.fields {
            match v {
                Value::String(s) => emit(&format!("{k}: {s}\n")),
                other => emit(&format!("{k}: {other}\n")),
            }
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn read_instance(path: &str) -> Result<PinwheelInstance> {
    Ok(PinwheelInstance::parse(&read_input(path)?)?)
}

fn rational(s: &str) -> Result<pinwheel::Rational> {
    parse_rational(s).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

fn budget() -> Result<u64> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v.parse().with_context(|| format!("{BUDGET_VAR}={v:?}")),
        Err(_) => Ok(STATE_BUDGET),
    }
}

fn schedule_text(s: &Schedule) -> String {
    s.to_string()
        .lines()
        .nth(1)
        .unwrap_or("slots:")
        .trim_start_matches("slots:")
        .trim()
        .to_string()
}

fn solve_exact_cmd(out: &mut Out, path: &str) -> Result<bool> {
    let inst = read_instance(path)?;
    match solve_exact_with(&inst, budget()?)? {
        ExactVerdict::Schedulable(s) => {
            out.put("verdict", "schedulable")
                .put("period", s.period())
                .put("slots", schedule_text(&s));
            Ok(true)
        }
        ExactVerdict::Unschedulable => {
            out.put("verdict", "unschedulable");
            Ok(false)
        }
    }
}

fn decide_cmd(out: &mut Out, path: &str, eps: &str, construct: bool) -> Result<bool> {
    let inst = read_instance(path)?;
    let eps = rational(eps)?;
    let o = decide(&inst, &eps, construct)?;
    out.put("density", fmt_rational(&inst.density()));
    if let Some(p) = &o.params {
        out.put("n", p.n)
            .put(
                "l",
                p.l.as_ref().map_or("none".to_string(), |x| x.to_string()),
            )
            .put(
                "u",
                p.u.as_ref().map_or("none".to_string(), |x| x.to_string()),
            );
    }
    out.put("big", o.classes.big.len())
        .put("medium", o.classes.medium.len())
        .put("small", o.classes.small.len());
    if let Some(h) = &o.h_max {
        out.put("h_max", fmt_rational(h));
    }
    if let Some(d) = &o.d_not_big {
        out.put("d_not_big", fmt_rational(d));
    }
    match o.verdict {
        PtasVerdict::Unschedulable => {
            out.put("verdict", "unschedulable");
            Ok(false)
        }
        PtasVerdict::Schedulable(c) => {
            out.put("verdict", "scaled-schedulable");
            if let Some(c) = c {
                out.put("len_s1", c.len_s1)
                    .put("len_s3", c.len_s3)
                    .put("case", format!("{:?}", c.case))
                    .put("window", c.window)
                    .put("repr", serde_json::to_value(&c.repr)?);
            }
            Ok(true)
        }
    }
}

fn fold_cmd(out: &mut Out, path: &str, theta: &str) -> Result<bool> {
    let inst = read_instance(path)?;
    let f = fold(&inst, &rational(theta)?)?;
    let jobs: Vec<Value> = f
        .jobs
        .iter()
        .map(|(id, p)| json!({"id": id, "period": fmt_rational(p)}))
        .collect();
    out.put("density_before", fmt_rational(&inst.density()))
        .put("density_after", fmt_rational(&f.density()))
        .put("jobs", jobs)
        .put("directives", serde_json::to_value(&f.directives)?);
    Ok(true)
}

fn read_formula(cnf: &Option<String>) -> Result<pinwheel::sat::CnfFormula> {
    let path = cnf
        .as_deref()
        .ok_or_else(|| anyhow!("--cnf is required for this reduction"))?;
    Ok(parse_dimacs(&read_input(path)?)?)
}

fn reduce_cmd(
    out: &mut Out,
    kind: ReduceKind,
    cnf: &Option<String>,
    instance: &Option<String>,
) -> Result<bool> {
    let inst = match kind {
        ReduceKind::Eps => red_eps(&read_formula(cnf)?)?.instance,
        ReduceKind::Ps => red_ps(&read_formula(cnf)?)?.instance,
        ReduceKind::Concise => {
            let c = red_concise(&read_formula(cnf)?)?;
            eprintln!("lcm: {}\nadded: {}", c.lcm, c.added);
            c.tagged.instance
        }
        ReduceKind::Bgt | ReduceKind::Rs => {
            let path = instance
                .as_deref()
                .ok_or_else(|| anyhow!("--instance is required"))?;
            let a = read_instance(path)?;
            if let ReduceKind::Bgt = kind {
                let b = red_bgt(&a)?;
                let rates: Vec<String> = b.growth_rates.iter().map(|h| h.to_string()).collect();
                out.put("growth_rates", rates.join(" "))
                    .put("k", b.k.to_string());
            } else {
                let r = red_rs(&a)?;
                let sat: Vec<String> = r.saturation.iter().map(|h| h.to_string()).collect();
                out.put("saturation", sat.join(" "))
                    .put("threshold", fmt_rational(&r.threshold));
            }
            return Ok(true);
        }
    };
    eprintln!("density: {}", fmt_rational(&inst.density()));
    if out.json {
        out.put("density", fmt_rational(&inst.density()))
            .put("instance", inst.to_string());
    } else {
        emit(&inst.to_string());
    }
    Ok(true)
}

fn parse_assignment(text: &str, vars: usize) -> Result<Vec<bool>> {
    let mut a = vec![false; vars];
    for tok in text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
    {
        let l: i64 = tok
            .parse()
            .with_context(|| format!("bad literal {tok:?}"))?;
        let v = l.unsigned_abs() as usize;
        if v == 0 || v > vars {
            bail!("literal {l} outside 1..={vars}");
        }
        a[v - 1] = l > 0;
    }
    Ok(a)
}

fn witness_cmd(out: &mut Out, args: &WitnessArgs) -> Result<bool> {
    let f = parse_dimacs(&read_input(&args.cnf)?)?;
    let a = match &args.assignment {
        Some(t) => parse_assignment(t, f.num_vars)?,
        None => match brute_force_sat(&f)? {
            SatVerdict::Sat(a) => a,
            SatVerdict::Unsat => {
                out.put("verdict", "unsatisfiable");
                return Ok(false);
            }
        },
    };
    let w = build_eps_witness(&f, &a)?;
    let v = validate_witness(&w, Exec::auto())?;
    let lits: Vec<String> = a
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b {
                format!("{}", i + 1)
            } else {
                format!("-{}", i + 1)
            }
        })
        .collect();
    out.put("verdict", if v.is_valid() { "valid" } else { "invalid" })
        .put("assignment", lits.join(" "))
        .put(
            "pieces",
            w.assignment.groups.iter().map(Vec::len).sum::<usize>(),
        );
    let pieces = serde_json::to_value(&w.assignment)?;
    match &args.out {
        Some(path) => fs::write(path, serde_json::to_string(&pieces)?)?,
        None => _ = out.put("witness", pieces),
    }
    Ok(v.is_valid())
}

/// What a schedule file holds.
enum Certificate {
    Plain(Schedule),
    Repr(ScheduleRepr),
    Pieces(SymbolicAssignment),
}

fn parse_certificate(text: &str) -> Result<Certificate> {
    let from_value = |v: Value| -> Result<Certificate> {
        if v.get("groups").is_some() {
            return Ok(Certificate::Pieces(serde_json::from_value(v)?));
        }
        if v.get("base").is_some() {
            return Ok(Certificate::Repr(serde_json::from_value(v)?));
        }
        for key in ["repr", "witness"] {
            if let Some(inner) = v.get(key) {
                return Ok(match key {
                    "repr" => Certificate::Repr(serde_json::from_value(inner.clone())?),
                    _ => Certificate::Pieces(serde_json::from_value(inner.clone())?),
                });
            }
        }
        if let (Some(p), Some(s)) = (v.get("period"), v.get("slots").and_then(Value::as_str)) {
            return Ok(Certificate::Plain(Schedule::parse(&format!(
                "period: {p}\nslots: {s}"
            ))?));
        }
        bail!("JSON holds no schedule")
    };
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return from_value(serde_json::from_str(trimmed)?);
    }
    for line in text.lines() {
        for key in ["repr:", "witness:"] {
            if let Some(rest) = line.strip_prefix(key) {
                let v: Value = serde_json::from_str(rest.trim())?;
                return from_value(json!({ key.trim_end_matches(':'): v }));
            }
        }
    }
    Ok(Certificate::Plain(Schedule::parse(text)?))
}

fn validate_cmd(
    out: &mut Out,
    inst: &str,
    sched: &str,
    scale: &Option<String>,
    window: u64,
) -> Result<bool> {
    let mut inst = read_instance(inst)?;
    if let Some(s) = scale {
        inst = inst.scale(&rational(s)?)?;
    }
    let ok = match parse_certificate(&read_input(sched)?)? {
        Certificate::Plain(s) => {
            let v = validate_repr(&inst, &ScheduleRepr::plain(s), window)?;
            out.put("kind", "schedule").put("detail", format!("{v:?}"));
            v.is_valid()
        }
        Certificate::Repr(r) => {
            let v = validate_repr(&inst, &r, window)?;
            out.put("kind", "repr").put("detail", format!("{v:?}"));
            v.is_valid()
        }
        Certificate::Pieces(p) => {
            let v = validate_pieces(&inst.integer_groups()?, &p, Exec::auto())?;
            out.put("kind", "witness").put("detail", format!("{v:?}"));
            v.is_valid()
        }
    };
    out.put("verdict", if ok { "valid" } else { "invalid" });
    Ok(ok)
}

fn check_cmd(out: &mut Out, cmd: &CheckCommand) -> Result<bool> {
    let CheckCommand::ConstantGap { demands, offsets } = cmd;
    let offsets = match offsets {
        Some(o) => o.clone(),
        None => match brute_force_constant_gap(demands) {
            Some(o) => o,
            None => {
                out.put("verdict", "no-cover");
                return Ok(false);
            }
        },
    };
    let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    out.put("offsets", list(&offsets));
    match constant_gap_check(demands, &offsets) {
        GapVerdict::ExactCover => {
            out.put("verdict", "exact-cover");
            Ok(true)
        }
        GapVerdict::Failure(f) => {
            out.put("verdict", "failure")
                .put("detail", format!("{f:?}"));
            Ok(false)
        }
    }
}

fn gen_cmd(cmd: &GenCommand) -> Result<bool> {
    let GenCommand::Sat {
        vars,
        clauses,
        seed,
        unbounded,
    } = *cmd;
    let f = if unbounded {
        gen_random_3sat(vars, clauses, seed)?
    } else {
        gen_random_34sat(vars, clauses, seed)?
    };
    emit(&f.to_dimacs());
    Ok(true)
}

fn verify_cmd(
    json: bool,
    quick: bool,
    sequential: bool,
    seed: u64,
    criterion: Option<usize>,
) -> Result<bool> {
    let mut cfg = SuiteConfig {
        seed,
        budget: budget()?,
        ..SuiteConfig::default()
    };
    if quick {
        cfg.formulas = 12;
        cfg.greedy_draws = 20;
        cfg.fold_instances = 100;
        cfg.half_instances = 40;
        cfg.concise_formulas = 5;
    }
    let exec = if sequential {
        Exec::Sequential
    } else {
        Exec::auto()
    };
    let reports = match criterion {
        Some(k) if (1..=CRITERIA.len()).contains(&k) => vec![CRITERIA[k - 1](&cfg, exec)],
        Some(k) => bail!("criterion {k} outside 1..={}", CRITERIA.len()),
        None => run_suite(&cfg, exec),
    };
    for r in &reports {
        if json {
            emit(&format!(
                "{}\n",
                json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail})
            ));
        } else {
            emit(&format!("{r}\n"));
        }
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn run(cli: Cli) -> Result<bool> {
    let mut out = Out::new(cli.json);
    let ok = match &cli.command {
        Command::SolveExact { instance } => solve_exact_cmd(&mut out, instance)?,
        Command::Decide {
            instance,
            eps,
            construct,
        } => decide_cmd(&mut out, instance, eps, *construct)?,
        Command::Fold { instance, theta } => fold_cmd(&mut out, instance, theta)?,
        Command::Reduce {
            kind,
            cnf,
            instance,
        } => reduce_cmd(&mut out, *kind, cnf, instance)?,
        Command::Witness(args) => witness_cmd(&mut out, args)?,
        Command::Validate {
            instance,
            schedule,
            scale,
            window,
        } => validate_cmd(&mut out, instance, schedule, scale, *window)?,
        Command::ValidateDensity { instance } => {
            let inst = read_instance(instance.as_deref().unwrap_or("-"))?;
            out.put("density", fmt_rational(&inst.density()))
                .put("jobs", inst.total_multiplicity().to_string());
            true
        }
        Command::Check(c) => check_cmd(&mut out, c)?,
        Command::Gen(g) => return gen_cmd(g),
        Command::VerifySuite {
            quick,
            sequential,
            seed,
            criterion,
        } => return verify_cmd(cli.json, *quick, *sequential, *seed, *criterion),
    };
    out.print();
    Ok(ok)
}

/// Writes to stdout, ignoring a reader that has gone away.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
