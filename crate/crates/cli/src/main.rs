//! `ucs`: analyze union-closed families, emit witnesses and audits, evaluate
//! bounds, and generate or verify corpora.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 precondition or domain
//! error, 3 verification failures.

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use ucs_core::bounds::{self, applicability, bound_report};
use ucs_core::family::{
    frankl_witnesses, frequency_profile, is_separating, separating_quotient, union_closure,
    union_violation, unseparated_pair,
};
use ucs_core::format::{parse_any, parse_ndjson, to_json, to_text};
use ucs_core::mask::show;
use ucs_core::search::{corpus_verify, enumerate_union_closed, random_corpus};
use ucs_core::witness::{counting_audit, falgas_ravry_chain, minimal_transversal};
use ucs_core::{
    BoundReport64, ChainWitness, CorpusReport, CountingAudit, Error, SetFamily, TransversalReport,
};

#[derive(Parser, Debug)]
#[command(name = "ucs", version, about = "Union-closed set family toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the random generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Chain,
    Transversal,
    Audit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Generators,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    All,
    Validated,
    Separating,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    Exhaustive,
    Generators,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size, frequencies, closure and separation flags, Frankl witnesses, verdict.
    Analyze {
        /// Family file (text or JSON); "-" reads stdin.
        path: String,
    },
    /// Union closure of a family.
    Closure { path: String },
    /// Separating quotient: merges elements lying in the same members.
    Quotient { path: String },
    /// Chain witness, minimal transversal, or counting audit.
    Witness {
        path: String,
        #[arg(long, value_enum, default_value_t = Which::Chain)]
        which: Which,
    },
    /// Threshold calculus for a universe size, with a verdict when n is given.
    Bounds {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Union-closed families over {0..m-1}.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
    },
    /// Seeded random separating union-closed families.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        generators: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Runs every check on a corpus; exits 3 if anything fails.
    Verify {
        /// NDJSON corpus or a single family; overrides --source.
        #[arg(long)]
        input: Option<String>,
        #[arg(long, value_enum, default_value_t = SourceArg::Exhaustive)]
        source: SourceArg,
        /// Largest m for exhaustive and generator corpora; m for random ones.
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        generators: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Json(_) | Error::ElementCapacity(_) => 1,
            Error::Contradiction(_) => 3,
            _ => 2,
        };
        let hint = match e {
            Error::NotUnionClosed { .. } => "\nhint: `ucs closure` computes the union closure",
            Error::Unseparated(..) => "\nhint: `ucs quotient` merges unseparated elements",
            _ => "",
        };
        Failure {
            code,
            msg: format!("{e}{hint}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            msg: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure {
            code: 1,
            msg: format!("{path}: {e}"),
        })
    }
}

fn load(path: &str) -> Result<SetFamily, Failure> {
    let parsed = parse_any(&read_input(path)?)?;
    for line in &parsed.duplicate_lines {
        eprintln!("warning: line {line} repeats an earlier set; duplicates are ignored");
    }
    if parsed.family.is_empty() {
        return Err(Error::EmptyFamily.into());
    }
    Ok(parsed.family)
}

fn emit_json<T: Serialize>(out: &mut impl Write, x: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, x).map_err(io::Error::other)?;
    writeln!(out)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn ids(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn one_line(f: &SetFamily) -> String {
    if f.is_empty() {
        return "(no members)".into();
    }
    f.members()
        .iter()
        .map(|&a| show(a))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct Analysis {
    m: usize,
    n: usize,
    frequencies: Vec<usize>,
    union_closed: bool,
    separating: bool,
    frankl_witnesses: Vec<u32>,
    verdict: Option<String>,
    alarm: bool,
    problems: Vec<String>,
}

fn analyze(f: &SetFamily) -> Analysis {
    let mut problems = Vec::new();
    let union_closed = match union_violation(f) {
        None => true,
        Some((left, right)) => {
            problems.push(Error::NotUnionClosed { left, right }.to_string());
            false
        }
    };
    let separating = is_separating(f);
    if let Some((a, b)) = unseparated_pair(f) {
        problems.push(Error::Unseparated(a, b).to_string());
    }
    let (verdict, alarm) = if union_closed && separating {
        match applicability(f) {
            Ok(r) => (r.verdict.map(|v| v.as_str().to_string()), r.alarm),
            Err(e) => {
                problems.push(e.to_string());
                (None, false)
            }
        }
    } else {
        (None, false)
    };
    Analysis {
        m: f.universe_size(),
        n: f.len(),
        frequencies: frequency_profile(f).freq,
        union_closed,
        separating,
        frankl_witnesses: frankl_witnesses(f).unwrap_or_default(),
        verdict,
        alarm,
        problems,
    }
}

fn print_analysis(out: &mut impl Write, a: &Analysis) -> io::Result<()> {
    writeln!(out, "m = {}", a.m)?;
    writeln!(out, "n = {}", a.n)?;
    let freqs: Vec<String> = a
        .frequencies
        .iter()
        .enumerate()
        .map(|(x, c)| format!("{x}:{c}"))
        .collect();
    writeln!(out, "frequencies: {}", freqs.join(" "))?;
    writeln!(out, "union-closed: {}", yes(a.union_closed))?;
    writeln!(out, "separating: {}", yes(a.separating))?;
    writeln!(out, "frankl witnesses: {}", ids(&a.frankl_witnesses))?;
    writeln!(out, "verdict: {}", a.verdict.as_deref().unwrap_or("n/a"))?;
    if a.alarm {
        writeln!(out, "ALARM: covered family without a Frankl witness")?;
    }
    for p in &a.problems {
        writeln!(out, "note: {p}")?;
    }
    if !a.union_closed {
        writeln!(out, "hint: `ucs closure` computes the union closure")?;
    } else if !a.separating {
        writeln!(out, "hint: `ucs quotient` merges unseparated elements")?;
    }
    Ok(())
}

fn print_chain(out: &mut impl Write, c: &ChainWitness) -> io::Result<()> {
    writeln!(out, "order x_1..x_m: {}", ids(&c.order))?;
    for (i, &x) in c.chain.iter().enumerate() {
        writeln!(out, "X_{i} = {}", show(x))?;
    }
    if let Some(last) = &c.last {
        writeln!(
            out,
            "X_{} = {{{}}}",
            c.chain.len(),
            ids(last).replace(' ', ",")
        )?;
    }
    for p in &c.pair_witnesses {
        writeln!(out, "X_{},{} = {}", p.i, p.j, show(p.set))?;
    }
    for (i, &s) in c.m_sets.iter().enumerate() {
        writeln!(out, "M_{i} = {}", show(s))?;
    }
    for n in &c.notes {
        writeln!(out, "note: {n}")?;
    }
    Ok(())
}

fn print_transversal(out: &mut impl Write, t: &TransversalReport) -> io::Result<()> {
    writeln!(out, "U~ = {}", show(t.tilde_u))?;
    for a in &t.a_sets {
        writeln!(out, "A[{}] = {}", a.element, show(a.set))?;
    }
    writeln!(out, "U^ = {}", show(t.u_hat))?;
    writeln!(out, "k = {}", t.k)?;
    for w in &t.singleton_witnesses {
        writeln!(out, "witness[{}] = {}", w.element, show(w.set))?;
    }
    for p in &t.pb_family {
        writeln!(out, "P{} = {}", show(p.pattern), show(p.set))?;
    }
    writeln!(
        out,
        "empty set is a member: {}",
        yes(t.empty_pattern_member)
    )?;
    writeln!(
        out,
        "members outside P containing U^: {}",
        t.full_sets_not_in_p
    )
}

fn print_audit(out: &mut impl Write, a: &CountingAudit) -> io::Result<()> {
    writeln!(out, "m = {}", a.m)?;
    writeln!(out, "n = {}", a.n)?;
    writeln!(out, "k = {}", a.k)?;
    writeln!(out, "c = {}", a.c)?;
    writeln!(
        out,
        "incidences on U^ = {} (upper bound {})",
        a.incidence_total, a.incidence_upper
    )?;
    writeln!(
        out,
        "|P| = {}, P incidences = {}",
        a.p_family_size, a.p_incidences
    )?;
    writeln!(
        out,
        "full members outside P = {}, other non-empty = {}",
        a.full_extra, a.other_nonempty
    )?;
    writeln!(out, "rhs = {}", a.rhs)?;
    let failed = a.bullets_ok.failed();
    if failed.is_empty() {
        writeln!(out, "observations: all hold")?;
    } else {
        writeln!(out, "observations failed: {}", failed.join(", "))?;
    }
    writeln!(
        out,
        "decomposition: {}",
        if a.decomposition_ok { "holds" } else { "FAILS" }
    )?;
    writeln!(
        out,
        "inequality {}",
        if a.inequality_holds { "holds" } else { "FAILS" }
    )
}

fn print_bounds(out: &mut impl Write, r: &BoundReport64) -> io::Result<()> {
    writeln!(out, "m = {}", r.m)?;
    for (k, f) in &r.f_values {
        writeln!(out, "f_m({k}) = {}", bounds::sig12(*f))?;
    }
    writeln!(out, "k* = {}", r.k_star)?;
    writeln!(out, "min f = {}", bounds::sig12(r.min_f))?;
    writeln!(out, "convex: {}", yes(r.convex))?;
    writeln!(
        out,
        "argmin in [5, ceil(log2 m)]: {}",
        yes(r.argmin_in_claimed_interval)
    )?;
    writeln!(out, "2(m + min f) = {}", bounds::sig12(r.ieq1_threshold))?;
    if let Some(k) = r.k_prime {
        writeln!(out, "k' = {}", bounds::sig12(k))?;
    }
    if let Some(t) = r.closed_form_threshold {
        writeln!(out, "closed-form threshold = {}", bounds::sig12(t))?;
    }
    if let (Some(n), Some(v)) = (r.n, r.verdict) {
        writeln!(out, "n = {n}")?;
        writeln!(out, "verdict: {}", v.as_str())?;
    }
    for n in &r.notes {
        writeln!(out, "note: {n}")?;
    }
    Ok(())
}

fn print_corpus_report(out: &mut impl Write, r: &CorpusReport) -> io::Result<()> {
    writeln!(out, "families: {}", r.total_families)?;
    writeln!(out, "union-closed: {}", r.union_closed_count)?;
    writeln!(out, "separating: {}", r.separating_count)?;
    writeln!(out, "frankl violations: {}", r.frankl_violations.len())?;
    writeln!(out, "invariant failures: {}", r.invariant_failures.len())?;
    writeln!(out, "audit failures: {}", r.audit_failures.len())?;
    writeln!(out, "rejected: {}", r.rejected.len())?;
    for f in &r.frankl_violations {
        writeln!(out, "  frankl: {}", one_line(f))?;
    }
    for (kind, list) in [
        ("invariant", &r.invariant_failures),
        ("audit", &r.audit_failures),
        ("rejected", &r.rejected),
    ] {
        for x in list {
            writeln!(out, "  {kind}: {} ({})", one_line(&x.family), x.name)?;
        }
    }
    writeln!(
        out,
        "{}",
        if r.is_clean() {
            "clean"
        } else {
            "FAILURES FOUND"
        }
    )
}

fn emit_family(out: &mut impl Write, format: Format, f: &SetFamily) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", to_json(f)),
        Format::Text => write!(out, "{}", to_text(f)),
    }
}

fn emit_stream(
    out: &mut impl Write,
    format: Format,
    families: impl Iterator<Item = SetFamily>,
) -> io::Result<()> {
    for f in families {
        match format {
            Format::Json => writeln!(out, "{}", to_json(&f))?,
            Format::Text => writeln!(out, "{}", one_line(&f))?,
        }
    }
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Outcome {
    let format = cli.format;
    match cli.command {
        Command::Analyze { path } => {
            let f = load(&path)?;
            let a = analyze(&f);
            match format {
                Format::Json => emit_json(out, &a)?,
                Format::Text => print_analysis(out, &a)?,
            }
            Ok(if a.alarm { 3 } else { 0 })
        }
        Command::Closure { path } => {
            emit_family(out, format, &union_closure(&load(&path)?))?;
            Ok(0)
        }
        Command::Quotient { path } => {
            let (q, classes) = separating_quotient(&load(&path)?);
            if format == Format::Text {
                for (i, c) in classes.iter().enumerate() {
                    writeln!(out, "# {i} <- {}", ids(c))?;
                }
            }
            emit_family(out, format, &q)?;
            Ok(0)
        }
        Command::Witness { path, which } => {
            let f = load(&path)?;
            match which {
                Which::Chain => {
                    let c = falgas_ravry_chain(&f)?;
                    match format {
                        Format::Json => emit_json(out, &c)?,
                        Format::Text => print_chain(out, &c)?,
                    }
                    Ok(if c.violations(&f).is_empty() { 0 } else { 3 })
                }
                Which::Transversal => {
                    let t = minimal_transversal(&f)?;
                    match format {
                        Format::Json => emit_json(out, &t)?,
                        Format::Text => print_transversal(out, &t)?,
                    }
                    Ok(if t.violations(&f).is_empty() { 0 } else { 3 })
                }
                Which::Audit => {
                    let a = counting_audit(&f)?;
                    match format {
                        Format::Json => emit_json(out, &a)?,
                        Format::Text => print_audit(out, &a)?,
                    }
                    Ok(if a.failures().is_empty() { 0 } else { 3 })
                }
            }
        }
        Command::Bounds { m, n } => {
            let r = bound_report::<f64>(m, n)?;
            match format {
                Format::Json => emit_json(out, &r)?,
                Format::Text => print_bounds(out, &r)?,
            }
            Ok(0)
        }
        Command::Enumerate { m, mode, filter } => {
            let mode = match mode {
                ModeArg::Exhaustive => ucs_core::Mode::Exhaustive,
                ModeArg::Generators => ucs_core::Mode::Generators,
            };
            let filter = match filter {
                FilterArg::All => ucs_core::Filter::All,
                FilterArg::Validated => ucs_core::Filter::Validated,
                FilterArg::Separating => ucs_core::Filter::Separating,
            };
            emit_stream(out, format, enumerate_union_closed(m, mode, filter)?)?;
            Ok(0)
        }
        Command::Random {
            m,
            generators,
            count,
        } => {
            emit_stream(
                out,
                format,
                random_corpus(m, generators, count, cli.seed)?.into_iter(),
            )?;
            Ok(0)
        }
        Command::Verify {
            input,
            source,
            m,
            generators,
            count,
        } => {
            let corpus = match (input, source) {
                (Some(path), _) => {
                    let text = read_input(&path)?;
                    if text.lines().filter(|l| !l.trim().is_empty()).count() > 1
                        && text.trim_start().starts_with('{')
                    {
                        parse_ndjson(&text)?
                    } else {
                        vec![parse_any(&text)?.family]
                    }
                }
                (None, SourceArg::Exhaustive) => ucs_core::search::exhaustive_corpus(m)?,
                (None, SourceArg::Generators) => {
                    let mut all = Vec::new();
                    for size in 1..=m {
                        all.extend(enumerate_union_closed(
                            size,
                            ucs_core::Mode::Generators,
                            ucs_core::Filter::Validated,
                        )?);
                    }
                    all
                }
                (None, SourceArg::Random) => random_corpus(m, generators, count, cli.seed)?,
            };
            let report = corpus_verify(corpus);
            match format {
                Format::Json => emit_json(out, &report)?,
                Format::Text => print_corpus_report(out, &report)?,
            }
            Ok(if report.is_clean() { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) => {
            if let Err(e) = flushed {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
