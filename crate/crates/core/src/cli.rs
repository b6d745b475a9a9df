//! Command line: `treecochain <eval|verify|sweep> [flags]`.
//!
//! Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
//! input error, 3 depth or search limit.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{Field, Poly};
use crate::cochain::{Ctx, EdgeFn};
use crate::cusp;
use crate::eisenstein::{self, EpsVector};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::tree::TreeEdge;
use crate::verify::{self, Check, RunConfig, Status};

#[derive(Parser, Debug)]
#[command(name = "treecochain", version, about = "Eisenstein cochains on the Bruhat-Tits tree over Fq(T)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a cochain at an edge by closed form and by Fourier expansion.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Edge as `(k; u; +)` or `(k; u; -)`.
        #[arg(long)]
        edge: String,
        #[arg(value_enum, default_value_t = Function::Etilde)]
        function: Function,
    },
    /// Run one verification suite, or `all`.
    Verify {
        #[command(flatten)]
        common: Common,
        suite: String,
    },
    /// Cusp-group and Eisenstein-order table over a range of levels.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Field sizes, comma separated.
        #[arg(long, default_value = "2,3")]
        qs: String,
        /// Numbers of prime factors, comma separated.
        #[arg(long, default_value = "1,2")]
        primes: String,
        /// Allowed prime degrees, comma separated.
        #[arg(long, default_value = "1")]
        degs: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Function {
    Etilde,
    Eisenstein,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 3)]
    pub q: u32,
    /// Monic irreducible over F_p defining F_q, written in `g`, e.g. `g^2+g+1`.
    #[arg(long)]
    pub ext_modulus: Option<String>,
    /// Distinct monic irreducibles, comma separated; `1` for level one.
    #[arg(long, default_value = "1")]
    pub level: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    #[arg(long)]
    pub ell: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, default_value_t = 8)]
    pub depth: i64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

pub fn field_from(q: u32, ext_modulus: Option<&str>) -> Result<Field> {
    let Some((p, e)) = crate::arith::field::prime_power(q) else {
        return Err(Error::InvalidField(format!("{q} is not a prime power")));
    };
    match ext_modulus {
        Some(m) => {
            let f = Field::with_modulus_str(p, m)?;
            if f.e() != e {
                return Err(Error::InvalidField(format!("modulus has degree {}, q = {q} needs {e}", f.e())));
            }
            Ok(f)
        }
        None => Field::of_order(q),
    }
}

impl Common {
    pub fn config(&self) -> Result<RunConfig> {
        let field = field_from(self.q, self.ext_modulus.as_deref())?;
        let level = Level::from_prime_list(&self.level, &field)?;
        let eps = self.eps.as_deref().map(EpsVector::parse).transpose()?;
        if let Some(e) = &eps {
            if e.s() != level.s() {
                return Err(Error::Usage(format!("--eps has {} signs, level has {} primes", e.s(), level.s())));
            }
        }
        if let Some(l) = self.ell {
            if !crate::arith::field::is_prime(l as u64) {
                return Err(Error::Usage(format!("--ell {l} is not prime")));
            }
            if l == field.p() {
                return Err(Error::Usage(format!("--ell must differ from p = {}", field.p())));
            }
        }
        if self.r == 0 {
            return Err(Error::Usage("--r must be at least 1".into()));
        }
        if self.depth < 0 {
            return Err(Error::Usage("--depth must be nonnegative".into()));
        }
        Ok(RunConfig {
            field,
            level,
            eps,
            ell: self.ell,
            r: self.r,
            depth: self.depth,
            samples: self.samples,
            seed: self.seed,
        })
    }
}

/// Output text and exit code.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Usage(format!("writing {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::Usage(e.to_string()))
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).map_err(|e| Error::Usage(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::Usage(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Usage(e.to_string()))?).map_err(|e| Error::Usage(e.to_string()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

pub fn cmd_eval(common: &Common, edge: &str, function: Function) -> Result<Outcome> {
    let cfg = common.config()?;
    let f = &cfg.field;
    let e = TreeEdge::parse(edge, f)?;
    let ctx = Ctx::exact(f.clone());
    let (name, closed, fourier) = match function {
        Function::Etilde => {
            let closed = eisenstein::EtildeClosed(&ctx).value(&e)?;
            let data = eisenstein::etilde_fourier(&ctx, cfg.depth)?;
            ("etilde".to_string(), closed, data.eval(&e)?)
        }
        Function::Eisenstein => {
            let eps = cfg.eps.clone().unwrap_or_else(|| EpsVector::eps_h(&cfg.level));
            let (combo, data) = eisenstein::build_e_eps(&cfg.level, &eps, &ctx, cfg.depth)?;
            (format!("E^{eps}"), ctx.int(combo.eval_closed(&e, f)?), data.eval(&e)?)
        }
    };
    let diff = fourier.sub(&closed);
    let text = match common.format.unwrap_or(Format::Text) {
        Format::Text => format!("closed={closed} fourier={fourier} diff={diff}\n"),
        Format::Json => pretty(&json!({
            "config": cfg.to_json(),
            "function": name,
            "edge": e.display(f),
            "closed": closed.to_string(),
            "fourier": fourier.to_string(),
            "diff": diff.to_string(),
        })),
        Format::Csv => format!("function,edge,closed,fourier,diff\n{name},\"{}\",{closed},{fourier},{diff}\n", e.display(f)),
    };
    Ok(Outcome { text, code: if diff.is_zero() { 0 } else { 1 } })
}

#[derive(Serialize)]
struct CheckRow<'a> {
    suite: &'a str,
    name: &'a str,
    statement: &'a str,
    status: Status,
    details: String,
}

pub fn cmd_verify(common: &Common, suite: &str) -> Result<Outcome> {
    let cfg = common.config()?;
    let suites: Vec<&str> = if suite == "all" { verify::SUITES.to_vec() } else { vec![suite] };
    let mut reports: Vec<(&str, Vec<Check>)> = Vec::new();
    for s in suites {
        let checks = if suite == "all" && s == "theorem-orders" && cfg.ell.is_none() {
            vec![Check {
                name: "orders".into(),
                statement: "needs --ell".into(),
                status: Status::Skipped,
                details: json!({"reason": "no --ell given"}),
            }]
        } else {
            verify::run_suite(s, &cfg)?
        };
        reports.push((s, checks));
    }
    let failed = reports.iter().any(|(_, c)| c.iter().any(|x| x.status == Status::Fail));
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v: Vec<Value> = reports.iter().map(|(s, c)| verify::report_json(&cfg, s, c)).collect();
            pretty(&if v.len() == 1 { v.remove(0) } else { Value::Array(v) })
        }
        Format::Text => {
            let mut out = String::new();
            for (s, cs) in &reports {
                for c in cs {
                    let st = match c.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Skipped => "SKIP",
                    };
                    out.push_str(&format!("{st} {s} {}: {}\n", c.name, c.statement));
                }
            }
            out
        }
        Format::Csv => {
            let rows: Vec<CheckRow> = reports
                .iter()
                .flat_map(|(s, cs)| {
                    cs.iter().map(move |c| CheckRow {
                        suite: s,
                        name: &c.name,
                        statement: &c.statement,
                        status: c.status,
                        details: c.details.to_string(),
                    })
                })
                .collect();
            to_csv(&rows, &["suite", "name", "statement", "status", "details"])?
        }
    };
    Ok(Outcome { text, code: if failed { 1 } else { 0 } })
}

/// One row of the sweep table.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub q: u32,
    pub n: String,
    pub s: usize,
    pub elementary_divisors: String,
    pub eps: String,
    #[serde(rename = "N")]
    pub big_n: i128,
    pub nu: i128,
    pub d_eps_order: String,
    pub sandwich_ok: bool,
    pub rho: String,
    pub exponent_ok: bool,
    /// `l^r:order` for each admissible `l` dividing `N` (or the `--ell`
    /// given), with `l^r <= 128` maximal.
    pub eis_orders: String,
    pub eis_ok: bool,
}

const SWEEP_HEADER: [&str; 13] = [
    "q",
    "n",
    "s",
    "elementary_divisors",
    "eps",
    "N",
    "nu",
    "d_eps_order",
    "sandwich_ok",
    "rho",
    "exponent_ok",
    "eis_orders",
    "eis_ok",
];

fn parse_list(text: &str, what: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Usage(format!("bad {what} `{x}`"))))
        .collect()
}

/// Guard rails: `q <= 9`, `s <= 3`, `deg p_i <= 3`, `l^r <= 128`, and at most
/// `MAX_LEVELS` levels per `q`.
pub const MAX_LEVELS: usize = 20_000;

fn choose<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        for mut rest in choose(&items[i + 1..], k - 1) {
            rest.insert(0, items[i].clone());
            out.push(rest);
        }
    }
    out
}

/// Levels with `s` distinct primes of the allowed degrees, in canonical order.
pub fn sweep_levels(f: &Field, s: usize, degs: &[u32]) -> Result<Vec<Level>> {
    let mut primes = Vec::new();
    let mut ds = degs.to_vec();
    ds.sort_unstable();
    ds.dedup();
    for &d in &ds {
        for p in crate::arith::poly::monic_polys(d as usize, f) {
            if p.is_irreducible(f)? {
                primes.push(p);
            }
        }
    }
    let count = binomial(primes.len(), s);
    if count > MAX_LEVELS as u128 {
        return Err(Error::Usage(format!("guard rail: {count} levels exceed the limit {MAX_LEVELS}")));
    }
    choose(&primes, s)
        .into_iter()
        .map(|ps| {
            let n = ps.iter().fold(Poly::one(), |acc, p| acc.mul(p, f));
            Level::new(&n, f)
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn eis_entries(level: &Level, eps: &EpsVector, ctx: &Ctx, ell: Option<(u32, u32)>) -> Result<(String, bool)> {
    let q = ctx.q();
    let big_n = eps.big_n(level, q)?;
    let pairs: Vec<(u32, u32)> = match ell {
        Some(x) => vec![x],
        None => cusp::admissible_ells(q, 128)
            .into_iter()
            .filter(|&l| big_n % l as i128 == 0)
            .map(|l| (l, (1..).take_while(|&r| (l as i128).pow(r) <= 128).last().unwrap()))
            .collect(),
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for (l, r) in pairs {
        match eisenstein::eisenstein_order(level, eps, l, r, ctx) {
            Ok(rep) => {
                ok &= rep.formula == rep.certified;
                parts.push(format!("{l}^{r}:{}", rep.formula));
            }
            Err(Error::Hypothesis(_)) => parts.push(format!("{l}^{r}:n/a")),
            Err(e) => return Err(e),
        }
    }
    Ok((parts.join(";"), ok))
}

pub fn sweep_rows(common: &Common, qs: &[u32], primes: &[u32], degs: &[u32]) -> Result<Vec<SweepRow>> {
    if let Some(&q) = qs.iter().find(|&&q| q > 9) {
        return Err(Error::Usage(format!("guard rail q <= 9 violated by q = {q}")));
    }
    if let Some(&s) = primes.iter().find(|&&s| s > 3) {
        return Err(Error::Usage(format!("guard rail s <= 3 violated by s = {s}")));
    }
    if let Some(&d) = degs.iter().find(|&&d| d > 3 || d == 0) {
        return Err(Error::Usage(format!("guard rail 1 <= deg p_i <= 3 violated by {d}")));
    }
    let ell = match common.ell {
        Some(l) => {
            let m = (l as u64).checked_pow(common.r);
            if m.map_or(true, |m| m > 128) {
                return Err(Error::Usage(format!("guard rail l^r <= 128 violated by {l}^{}", common.r)));
            }
            Some((l, common.r))
        }
        None => None,
    };
    let explicit = common.level.trim() != "1";
    let mut rows = Vec::new();
    for &q in qs {
        let f = field_from(q, None)?;
        let ctx = Ctx::exact(f.clone());
        let levels = if explicit {
            vec![Level::from_prime_list(&common.level, &f)?]
        } else {
            let mut v = Vec::new();
            for &s in primes {
                v.extend(sweep_levels(&f, s as usize, degs)?);
            }
            v
        };
        for level in levels {
            for (eps, row) in EpsVector::all(level.s()).into_iter().zip(cusp::cusp_group(&level, &f)?) {
                let (eis_orders, eis_ok) = eis_entries(&level, &eps, &ctx, ell)?;
                rows.push(SweepRow {
                    q,
                    n: row.n,
                    s: row.s,
                    elementary_divisors: row.elementary_divisors,
                    eps: row.eps,
                    big_n: row.big_n,
                    nu: row.nu,
                    d_eps_order: row.d_eps_order,
                    sandwich_ok: row.sandwich_ok,
                    rho: row.rho,
                    exponent_ok: row.exponent_ok,
                    eis_orders,
                    eis_ok,
                });
            }
        }
    }
    Ok(rows)
}

pub fn cmd_sweep(common: &Common, qs: &str, primes: &str, degs: &str) -> Result<Outcome> {
    let qs = parse_list(qs, "q")?;
    let primes = parse_list(primes, "prime count")?;
    let degs = parse_list(degs, "degree")?;
    let rows = sweep_rows(common, &qs, &primes, &degs)?;
    let failed = rows.iter().any(|r| !r.sandwich_ok || !r.exponent_ok || !r.eis_ok);
    let text = match common.format.unwrap_or(Format::Json) {
        Format::Csv => to_csv(&rows, &SWEEP_HEADER)?,
        Format::Json | Format::Text => pretty(&json!({
            "config": {"qs": qs, "primes": primes, "degs": degs, "ell": common.ell, "r": common.r, "level": common.level},
            "rows": rows,
        })),
    };
    Ok(Outcome { text, code: if failed { 1 } else { 0 } })
}

/// Dispatch; returns the process exit code after writing output.
pub fn run(cli: Cli) -> i32 {
    let (common, res) = match &cli.command {
        Command::Eval { common, edge, function } => (common, cmd_eval(common, edge, *function)),
        Command::Verify { common, suite } => (common, cmd_verify(common, suite)),
        Command::Sweep { common, qs, primes, degs } => (common, cmd_sweep(common, qs, primes, degs)),
    };
    match res.and_then(|o| emit(common, &o.text).map(|_| o.code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
