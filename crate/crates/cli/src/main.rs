//! `qexp`: exact q-expansion computations from the command line.
//!
//! Exit codes: 0 success, 1 failed check or domain error, 2 usage error.

use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use qexp::algebraic::{constants_table, registry, Field, FieldElement, FieldSpec};
use qexp::classify::{Classifier, Family, FamilyPoint};
use qexp::dynamics::{CountResult, SearchLimits, SystemContext};
use qexp::paperlab::{verify_all, Bounds};
use qexp::words::{FiniteWord, PeriodicWord};

#[derive(Parser, Debug)]
#[command(name = "qexp", version, about = "Exact arithmetic for expansions in non-integer bases")]
struct Cli {
    /// Named base: q2, qf, qG or qaleph0.
    #[arg(long, global = true, default_value = "q2", conflicts_with = "minpoly")]
    base: String,
    /// Custom base: integer minimal polynomial, lowest degree first, e.g. "-1,-1,-2,0,1".
    #[arg(long, global = true, requires = "interval", allow_hyphen_values = true)]
    minpoly: Option<String>,
    /// Isolating interval for the custom base, e.g. "3/2,2".
    #[arg(long, global = true, requires = "minpoly")]
    interval: Option<String>,
    /// Decimal digits in text output.
    #[arg(long, global = true, env = "QEXP_PRECISION", default_value_t = 20)]
    precision: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Order {
    /// Rightmost symbol applied first.
    Paper,
    /// Leftmost symbol applied first.
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Type01,
    Type10,
    Limit,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact value of an eventually periodic word.
    Value { word: String },
    /// Apply a map word to a point given as a word or as coefficients.
    Orbit {
        point: String,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = Order::Paper)]
        order: Order,
    },
    /// Count the expansions of a point.
    Count {
        point: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        /// Print the expansion tree as GraphViz instead.
        #[arg(long)]
        dot: bool,
    },
    /// Branching class and expansion count at q2.
    Classify { point: String },
    /// Escape certificate for an enumerated point at q2.
    Escape {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Type01)]
        family: FamilyArg,
        #[arg(long)]
        reflected: bool,
        #[arg(long, default_value_t = 10)]
        word_len: usize,
    },
    /// The interval cover table at q2.
    Table1,
    /// Run the verification battery at q2.
    Verify {
        #[arg(long, default_value_t = 12)]
        k_max: usize,
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[arg(long, default_value_t = 256)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        word_len: usize,
    },
    /// List the registered constants.
    Constants,
}

/// Errors in the arguments themselves, reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    s.parse::<BigRational>()
        .map_err(|_| usage(format!("not a rational number: {s:?}")))
}

fn resolve_base(cli: &Cli) -> Result<Field> {
    if let (Some(poly), Some(interval)) = (&cli.minpoly, &cli.interval) {
        let coeffs = poly
            .split(',')
            .map(|c| c.trim().parse().map_err(|_| usage(format!("not an integer: {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = interval
            .split_once(',')
            .ok_or_else(|| usage("interval must be \"lo,hi\""))?;
        let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
        let one = BigRational::from_integer(1.into());
        if lo < one || hi > BigRational::from_integer(2.into()) {
            return Err(usage("the base must lie in (1, 2)"));
        }
        return FieldSpec::new("custom", coeffs, lo, hi).map_err(|e| usage(e.to_string()));
    }
    registry()
        .into_iter()
        .find(|c| c.key == cli.base)
        .map(|c| c.field)
        .ok_or_else(|| {
            let names: Vec<&str> = registry().iter().map(|c| c.key).collect();
            usage(format!("unknown base {:?}; expected one of {}", cli.base, names.join(", ")))
        })
}

fn parse_periodic(s: &str) -> Result<PeriodicWord> {
    PeriodicWord::parse(s).map_err(|e| usage(format!("{s:?}: {e}")))
}

fn parse_finite(s: &str) -> Result<FiniteWord> {
    FiniteWord::parse(s).map_err(|e| usage(format!("{s:?}: {e}")))
}

/// A point given either as a word (anything containing `inf`) or as
/// comma-separated power-basis coefficients, lowest degree first.
fn parse_point(ctx: &SystemContext, s: &str) -> Result<(FieldElement, Option<PeriodicWord>)> {
    if !s.contains("inf") {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let coeffs = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        let x = FieldElement::from_coeffs(ctx.field(), &coeffs).map_err(|e| usage(e.to_string()))?;
        return Ok((x, None));
    }
    let w = parse_periodic(s)?;
    Ok((ctx.value(&w), Some(w)))
}

fn q2_only(field: &Field) -> Result<Classifier> {
    if field.name() != qexp::algebraic::q2().name() {
        return Err(usage("this command is only available at base q2"));
    }
    Ok(Classifier::new())
}

fn element_json(x: &FieldElement) -> Value {
    json!({"coefficients": x.coeff_strings(), "decimal": x.to_decimal(20)})
}

fn cmd_value(ctx: &SystemContext, p: usize, word: &str) -> Result<Output> {
    let w = parse_periodic(word)?;
    let x = ctx.value(&w);
    Ok(Output {
        text: format!(
            "word          {w}\ncoefficients  [{}]\ndecimal       {}\n",
            x.coeff_strings().join(", "),
            x.to_decimal(p)
        ),
        json: json!({"word": w.to_string(), "value": element_json(&x)}),
        ok: true,
    })
}

fn cmd_orbit(ctx: &SystemContext, p: usize, point: &str, word: &str, order: Order) -> Result<Output> {
    let (x, _) = parse_point(ctx, point)?;
    let map = parse_finite(word)?;
    let forward = match order {
        Order::Paper => map.reversed(),
        Order::Forward => map.clone(),
    };
    let mut text = format!("start    {}\n", x.to_decimal(p));
    let mut steps = Vec::new();
    let mut cur = x.clone();
    for &d in forward.digits() {
        cur = ctx.apply_digit(&cur, d)?;
        text.push_str(&format!("T{d}   ->  {}\n", cur.to_decimal(p)));
        steps.push(json!({"digit": d, "value": element_json(&cur)}));
    }
    text.push_str(&format!(
        "result   {}\n         [{}]\n",
        cur.to_decimal(p),
        cur.coeff_strings().join(", ")
    ));
    let order_name = match order {
        Order::Paper => "paper",
        Order::Forward => "forward",
    };
    Ok(Output {
        text,
        json: json!({
            "start": element_json(&x),
            "word": map.to_string(),
            "order": order_name,
            "steps": steps,
            "result": element_json(&cur),
        }),
        ok: true,
    })
}

fn cmd_count(
    ctx: &SystemContext,
    p: usize,
    point: &str,
    depth: Option<usize>,
    nodes: Option<usize>,
    dot: bool,
) -> Result<Output> {
    let (x, word) = parse_point(ctx, point)?;
    let mut limits = word.as_ref().map(SearchLimits::for_word).unwrap_or_default();
    if let Some(d) = depth {
        limits.max_depth = d;
    }
    if let Some(n) = nodes {
        limits.max_nodes = n;
    }
    if dot {
        let tree = ctx.expansion_tree(&x, &limits);
        return Ok(Output {
            text: tree.to_dot(),
            json: tree.to_json(),
            ok: true,
        });
    }
    let r = ctx.count_expansions(&x, &limits);
    let mut text = format!("{}\n", r.label());
    match &r {
        CountResult::Exact { expansions } => {
            for w in expansions {
                text.push_str(&format!("  {w}  = {}\n", ctx.value(w).to_decimal(p)));
            }
        }
        CountResult::InfiniteWitness { prefix, cycle, value } => {
            text.push_str(&format!(
                "  prefix {prefix}, then cycle {cycle} returns to {} in the switch region\n",
                value.to_decimal(p)
            ));
        }
        CountResult::Inconclusive { depth, nodes } => {
            text.push_str(&format!("  search exhausted at depth {depth} after {nodes} nodes\n"));
        }
    }
    text.push_str(&format!("certificate verified: {}\n", r.verify(ctx, &x)));
    Ok(Output {
        text,
        json: json!({"point": element_json(&x), "count": r.to_json(ctx), "verified": r.verify(ctx, &x)}),
        ok: true,
    })
}

fn cmd_classify(field: &Field, p: usize, point: &str) -> Result<Output> {
    let cls = q2_only(field)?;
    let ctx = cls.ctx();
    let (x, _) = parse_point(ctx, point)?;
    if !ctx.in_domain(&x) {
        bail!("point {} lies outside [0, 1/(q-1)]", x.to_decimal(p));
    }
    let count = cls.expansion_count(&x)?;
    let branch = cls.branch_class(&x)?;
    let mut text = format!("point        {}\n", x.to_decimal(p));
    text.push_str(&format!("expansions   {}\n", count.label()));
    if let Some(ws) = count.to_json()["expansions"].as_array() {
        for w in ws {
            text.push_str(&format!("  {}\n", w.as_str().unwrap_or_default()));
        }
    }
    text.push_str(&format!("branch       {:?}\n", branch.kind));
    for e in &branch.evidence {
        text.push_str(&format!(
            "  T{}(x) = {}  {}\n",
            e.digit,
            e.value.to_decimal(p),
            e.count.label()
        ));
    }
    let region = cls.region();
    text.push_str(&format!("in J         {}\nin H         {}\n", region.in_j(&x), region.in_h(&x)));
    Ok(Output {
        text,
        json: json!({
            "point": element_json(&x),
            "expansions": count.to_json(),
            "branch": branch.to_json(ctx),
            "in_j": region.in_j(&x),
            "in_h": region.in_h(&x),
        }),
        ok: true,
    })
}

fn cmd_escape(
    field: &Field,
    m: usize,
    k: Option<usize>,
    family: FamilyArg,
    reflected: bool,
    word_len: usize,
) -> Result<Output> {
    let cls = q2_only(field)?;
    let family = match family {
        FamilyArg::Type01 => Family::Type01,
        FamilyArg::Type10 => Family::Type10,
        FamilyArg::Limit => Family::Limit,
    };
    match (family, k) {
        (Family::Limit, Some(_)) => return Err(usage("--k does not apply to the limit family")),
        (Family::Type01 | Family::Type10, None) => return Err(usage("--k is required for this family")),
        (_, Some(0)) => return Err(usage("--k must be positive")),
        _ => {}
    }
    if !(1..=4).contains(&m) {
        return Err(usage("--m must be between 1 and 4"));
    }
    let p = FamilyPoint::new(cls.ctx(), family, m, k, reflected);
    let cert = cls.escape_search(&p, word_len)?;
    let ok = cert.verify(&cls);
    let mut text = cert.to_text();
    text.push_str(&format!("verified {ok}\n"));
    let mut json = cert.to_json();
    json["verified"] = ok.into();
    Ok(Output { text, json, ok })
}

fn cmd_table1(field: &Field) -> Result<Output> {
    let cls = q2_only(field)?;
    let region = cls.region();
    Ok(Output {
        text: region.to_text(),
        json: region.to_json(),
        ok: true,
    })
}

fn cmd_verify(field: &Field, bounds: Bounds) -> Result<Output> {
    q2_only(field)?;
    if bounds.k_max == 0 || bounds.m_max == 0 || bounds.depth == 0 || bounds.word_len == 0 {
        return Err(usage("bounds must be positive"));
    }
    let report = verify_all(&bounds);
    Ok(Output {
        text: report.to_text(),
        json: report.to_json(),
        ok: report.all_passed(),
    })
}

fn cmd_constants() -> Output {
    let json = registry()
        .iter()
        .map(|c| {
            let (lo, hi) = c.field.isolating_interval();
            json!({
                "name": c.key,
                "coefficients": c.field.minpoly().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "isolating_interval": [lo.to_string(), hi.to_string()],
                "decimal": FieldElement::generator(&c.field).to_decimal(20),
            })
        })
        .collect::<Vec<_>>();
    Output {
        text: constants_table(),
        json: Value::Array(json),
        ok: true,
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let field = resolve_base(cli)?;
    let p = cli.precision;
    let ctx = || SystemContext::new(&field).map_err(|e| usage(e.to_string()));
    match &cli.command {
        Command::Value { word } => cmd_value(&ctx()?, p, word),
        Command::Orbit { point, word, order } => cmd_orbit(&ctx()?, p, point, word, *order),
        Command::Count { point, depth, nodes, dot } => cmd_count(&ctx()?, p, point, *depth, *nodes, *dot),
        Command::Classify { point } => cmd_classify(&field, p, point),
        Command::Escape {
            m,
            k,
            family,
            reflected,
            word_len,
        } => cmd_escape(&field, *m, *k, *family, *reflected, *word_len),
        Command::Table1 => cmd_table1(&field),
        Command::Verify {
            k_max,
            m_max,
            depth,
            word_len,
        } => cmd_verify(
            &field,
            Bounds {
                k_max: *k_max,
                m_max: *m_max,
                depth: *depth,
                word_len: *word_len,
            },
        ),
        Command::Constants => Ok(cmd_constants()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Value { .. } => "value",
        Command::Orbit { .. } => "orbit",
        Command::Count { .. } => "count",
        Command::Classify { .. } => "classify",
        Command::Escape { .. } => "escape",
        Command::Table1 => "table1",
        Command::Verify { .. } => "verify",
        Command::Constants => "constants",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).context(command_name(&cli.command)) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => {
                    let base = cli.minpoly.as_deref().map_or(cli.base.clone(), |_| "custom".into());
                    let envelope = json!({
                        "command": command_name(&cli.command),
                        "base": base,
                        "ok": out.ok,
                        "result": out.json,
                    });
                    serde_json::to_string_pretty(&envelope).unwrap() + "\n"
                }
            };
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Usage>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
