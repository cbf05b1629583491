//! Command-line front end. `run` takes the argument list and output sinks so
//! it can be driven from tests.

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{self, SquareClass};
use crate::error::Error;
use crate::oracle;
use crate::redeimatrix;
use crate::symbol::{self, SymbolTrace};
use crate::verify::{self, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_FACTOR_LIMIT: i32 = 4;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "redei",
    version,
    about = "Rédei symbols, Rédei matrices and 2-power ranks of quadratic class groups",
    after_help = "Negative arguments are accepted directly (`redei symbol -20 41 5`). \
                  A `--` separator also works, with options placed before it: `redei symbol --trace -- -20 41 5`.\n\
                  Exit codes: 0 ok, 1 counterexample, 2 invalid input, 3 degenerate symbol, \
                  4 factorization limit (set REDEI_FACTOR_BOUND to raise it)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the Rédei symbol [a,b,c].
    #[command(allow_negative_numbers = true)]
    Symbol {
        a: i64,
        b: i64,
        c: i64,
        /// Print the conic solution, twist and every p-part.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// 2-, 4- and 8-ranks of the narrow class group of Q(sqrt d).
    #[command(allow_negative_numbers = true)]
    Ranks {
        /// Squarefree d, or a fundamental discriminant.
        d: i64,
        /// Compare against the binary quadratic form class group.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification sweep.
    Verify {
        suite: Suite,
        /// Size bound; its meaning depends on the suite.
        #[arg(long)]
        max: Option<i64>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random instances for seeded suites.
        #[arg(long)]
        count: Option<usize>,
        /// Report wall-clock time (kept out of JSON unless requested).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// all orderings agree; --max bounds the exhaustive part, --count random triples up to 1000
    Reciprocity,
    /// matrix ranks against form class groups for |D| <= max
    Oracle,
    /// Hilbert product formula over --count pairs with entries up to --max
    ProductFormula,
    /// three witnesses per triple give the same symbol
    TwistIndependence,
    /// r4 of dp is constant on signature classes of primes p <= max
    Governing,
    /// [a,b,c1][a,b,c2] = [a,b,c1 c2]
    Multiplicativity,
    /// [-1,p,2] against the 8-rank of -4p for p = 1 mod 8 below max
    MinusOneTwo,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Reciprocity => "reciprocity",
            Suite::Oracle => "oracle",
            Suite::ProductFormula => "product-formula",
            Suite::TwistIndependence => "twist-independence",
            Suite::Governing => "governing",
            Suite::Multiplicativity => "multiplicativity",
            Suite::MinusOneTwo => "minus-one-two",
        }
    }

    fn default_max(self) -> i64 {
        match self {
            Suite::Reciprocity => 30,
            Suite::Oracle => 5000,
            Suite::ProductFormula => 1_000_000,
            Suite::TwistIndependence | Suite::Multiplicativity => 1000,
            Suite::Governing => 2000,
            Suite::MinusOneTwo => 10_000,
        }
    }

    fn default_count(self) -> usize {
        match self {
            Suite::Reciprocity => 500,
            Suite::ProductFormula => 10_000,
            Suite::TwistIndependence => 100,
            Suite::Multiplicativity => 200,
            _ => 0,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FactorLimitExceeded { .. } => EXIT_FACTOR_LIMIT,
        Error::DegenerateSquareClass { .. } => EXIT_DEGENERATE,
        Error::InvalidTriple(_)
        | Error::ZeroInput
        | Error::NotSquarefree(_)
        | Error::NotFundamental(_)
        | Error::TrivialClass
        | Error::BoundExceeded { .. } => EXIT_INVALID,
        _ => EXIT_COUNTEREXAMPLE,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::FactorLimitExceeded { .. } => "factor_limit",
        Error::DegenerateSquareClass { .. } => "degenerate",
        Error::InvalidTriple(_) => "invalid_triple",
        Error::ZeroInput => "zero_input",
        Error::NotSquarefree(_) => "not_squarefree",
        Error::NotFundamental(_) => "not_fundamental",
        Error::TrivialClass => "trivial_class",
        Error::BoundExceeded { .. } => "bound_exceeded",
        _ => "internal",
    }
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "kind": error_kind(e), "message": e.to_string() });
    if let Error::InvalidTriple(vs) = e {
        v["violations"] = serde_json::to_value(vs).expect("serializable");
    }
    v
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn json(&mut self, v: &Value) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
    }

    fn fail(&mut self, json: bool, record: Value, e: &Error) -> i32 {
        let _ = writeln!(self.err, "error: {e}");
        if let Error::InvalidTriple(vs) = e {
            for v in vs {
                let _ = writeln!(self.err, "  violation: {v}");
            }
        }
        if json {
            let mut r = record;
            r["error"] = error_json(e);
            self.json(&r);
        }
        exit_code(e)
    }
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Symbol { a, b, c, trace, json } => cmd_symbol(&mut io, a, b, c, trace, json),
        Command::Ranks { d, oracle, json } => cmd_ranks(&mut io, d, oracle, json),
        Command::Verify {
            suite,
            max,
            jobs,
            seed,
            count,
            timing,
            json,
        } => cmd_verify(&mut io, suite, max, jobs, seed, count, timing, json),
    }
}

fn trace_json(t: &SymbolTrace) -> Value {
    let parts: serde_json::Map<String, Value> = t
        .parts
        .iter()
        .map(|(p, v)| {
            let side = t.base_field_per_place.get(p);
            (p.to_string(), json!({ "value": v, "side": side }))
        })
        .collect();
    json!({
        "parts": parts,
        "witness": t.witness.as_ref().map(|w| json!({
            "solution": [w.solution.x, w.solution.y, w.solution.z],
            "beta": w.beta.to_string(),
            "alpha": w.alpha.to_string(),
            "twist": w.twist,
            "ram_case": w.ram_case,
        })),
    })
}

fn cmd_symbol(io: &mut Io, a: i64, b: i64, c: i64, trace: bool, json: bool) -> i32 {
    let mut record = json!({
        "schema": SCHEMA_VERSION,
        "command": "symbol",
        "arguments": [a, b, c],
    });
    let classes = (|| Ok::<_, Error>((SquareClass::new(a)?, SquareClass::new(b)?, SquareClass::new(c)?)))();
    let (sa, sb, sc) = match classes {
        Ok(t) => t,
        Err(e) => return io.fail(json, record, &e),
    };
    record["inputs"] = json!({ "a": sa, "b": sb, "c": sc });
    let t = match symbol::redei_symbol(sa, sb, sc) {
        Ok(t) => t,
        Err(e) => return io.fail(json, record, &e),
    };
    if json {
        record["result"] = json!(t.value);
        if trace {
            record["trace"] = trace_json(&t);
        }
        io.json(&record);
        return EXIT_OK;
    }
    let sign = if t.value == 1 { "+1" } else { "-1" };
    let _ = writeln!(io.out, "[{sa}, {sb}, {sc}] = {sign}");
    if trace {
        match &t.witness {
            None => {
                let _ = writeln!(io.out, "  trivial argument");
            }
            Some(w) => {
                let s = &w.solution;
                let _ = writeln!(
                    io.out,
                    "  conic x^2 - ({})y^2 - ({})z^2 = 0: ({}, {}, {})",
                    s.a, s.b, s.x, s.y, s.z
                );
                let _ = writeln!(io.out, "  twist {}  beta = {}  alpha = {}", w.twist, w.beta, w.alpha);
                let _ = writeln!(io.out, "  dyadic case {:?}", w.ram_case);
            }
        }
        for (p, v) in &t.parts {
            let side = t
                .base_field_per_place
                .get(p)
                .map(|s| format!(" ({s:?})"))
                .unwrap_or_default();
            let _ = writeln!(io.out, "  part at {p}: {v:+}{side}");
        }
    }
    EXIT_OK
}

/// Squarefree d maps to its field discriminant; a fundamental discriminant
/// is taken as is.
fn resolve_discriminant(d: i64) -> Result<i64, Error> {
    match redeimatrix::fundamental_discriminant(d) {
        Ok(disc) => Ok(disc),
        Err(Error::NotSquarefree(_)) if arith::is_fundamental(d)? => Ok(d),
        Err(e) => Err(e),
    }
}

fn cmd_ranks(io: &mut Io, d: i64, with_oracle: bool, json: bool) -> i32 {
    let mut record = json!({
        "schema": SCHEMA_VERSION,
        "command": "ranks",
        "arguments": [d],
    });
    let run = || -> Result<(i64, redeimatrix::Ranks, redeimatrix::RedeiMatrixR4, redeimatrix::RedeiMatrixR8), Error> {
        let disc = resolve_discriminant(d)?;
        Ok((disc, redeimatrix::ranks(disc)?, redeimatrix::build_R4(disc)?, redeimatrix::build_R8(disc)?))
    };
    let (disc, r, m4, m8) = match run() {
        Ok(v) => v,
        Err(e) => return io.fail(json, record, &e),
    };
    record["inputs"] = json!({ "discriminant": disc });
    record["result"] = json!({ "r2": r.r2, "r4": r.r4, "r8": r.r8 });
    record["matrices"] = json!({ "r4": m4, "r8": m8 });
    let mut code = EXIT_OK;
    let mut oracle_line = None;
    if with_oracle {
        match oracle::narrow_ranks(disc) {
            Ok(o) => {
                let matches = (o.r2, o.r4, o.r8) == (r.r2, r.r4, r.r8);
                if !matches {
                    code = EXIT_COUNTEREXAMPLE;
                }
                record["oracle"] = json!({
                    "class_number": o.class_number,
                    "r2": o.r2, "r4": o.r4, "r8": o.r8,
                    "match": matches,
                });
                oracle_line = Some(format!(
                    "oracle: h+ = {}, (r2, r4, r8) = ({}, {}, {}): {}",
                    o.class_number,
                    o.r2,
                    o.r4,
                    o.r8,
                    if matches { "match" } else { "MISMATCH" }
                ));
            }
            Err(e) => return io.fail(json, record, &e),
        }
    }
    if json {
        io.json(&record);
    } else {
        let _ = writeln!(io.out, "D = {disc}: (r2, r4, r8) = ({}, {}, {})", r.r2, r.r4, r.r8);
        if let Some(l) = oracle_line {
            let _ = writeln!(io.out, "{l}");
        }
    }
    code
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    io: &mut Io,
    suite: Suite,
    max: Option<i64>,
    jobs: usize,
    seed: u64,
    count: Option<usize>,
    timing: bool,
    json: bool,
) -> i32 {
    let max = max.unwrap_or_else(|| suite.default_max());
    let count = count.unwrap_or_else(|| suite.default_count());
    let record = json!({
        "schema": SCHEMA_VERSION,
        "command": "verify",
        "inputs": { "suite": suite.name(), "max": max, "seed": seed, "count": count },
    });
    if max < 1 {
        let _ = writeln!(io.err, "error: --max must be positive");
        return EXIT_INVALID;
    }
    let start = Instant::now();
    let reports: Result<Vec<SweepReport>, Error> = match suite {
        Suite::Reciprocity => verify::reciprocity(max, count, 1000, seed, jobs).map(|r| vec![r]),
        Suite::Oracle => {
            let o = verify::oracle_sweep(max, jobs);
            Ok(vec![o.ranks, o.genus])
        }
        Suite::ProductFormula => Ok(vec![verify::product_formula(seed, count, max, jobs)]),
        Suite::TwistIndependence => verify::twist_independence(seed, count, max, 3, jobs).map(|r| vec![r]),
        Suite::Governing => verify::governing(&verify::GOVERNING_DS, max as u64, jobs).map(|r| vec![r]),
        Suite::Multiplicativity => verify::multiplicativity(seed, count, max, jobs).map(|r| vec![r]),
        Suite::MinusOneTwo => Ok(vec![verify::minus_one_two_family(max as u64, jobs)]),
    };
    let elapsed = start.elapsed();
    let reports = match reports {
        Ok(r) => r,
        Err(e) => return io.fail(json, record, &e),
    };
    let failed = reports.iter().any(|r| !r.passed());
    if json {
        let mut r = record;
        r["result"] = serde_json::to_value(&reports).expect("serializable");
        r["passed"] = json!(!failed);
        if timing {
            r["seconds"] = json!(elapsed.as_secs_f64());
        }
        io.json(&r);
    } else {
        for rep in &reports {
            let noun = if rep.suite == "oracle" || rep.suite == "genus" {
                "mismatches"
            } else {
                "violations"
            };
            let _ = writeln!(
                io.out,
                "{}: {} checked, {} {noun}",
                rep.suite,
                rep.checked,
                rep.violations.len()
            );
            if let Some(first) = rep.violations.first() {
                let _ = writeln!(io.out, "  first counterexample: {first}");
            }
        }
        if timing {
            let _ = writeln!(io.out, "time: {:.3} s", elapsed.as_secs_f64());
        }
    }
    for rep in &reports {
        for v in &rep.violations {
            let _ = writeln!(io.err, "{}: {v}", rep.suite);
        }
    }
    if failed {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_OK
    }
}
