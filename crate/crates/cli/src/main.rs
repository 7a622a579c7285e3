use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use tausum::diophantine::{self, CountMethod, CountQuery, Counter, DioReport};
use tausum::errfit::{fit_exponent, residual_grid, FitReport};
use tausum::expsum::{
    bound_sweep, eval_frak_s, eval_s, eval_s_star, standard_grid, theoretical_bound,
    BoundCheckReport, BoundKind, BoundParams, Coefficients, ExpSumSpec, FrakSpec,
};
use tausum::io::{fmt_real, parse_grid, parse_residual_csv, write_residual_csv};
use tausum::numeric::{splitmix64, unit_from_hash};
use tausum::vaaler::VaalerEval;
use tausum::vandercorput::{
    b_process_compare, dependence_params, kusmin_landau_ratio, Phase, PhaseSpec, Weight,
};
use tausum::{t_exact, Constants, DivisorTable, TailMode, TsumMethod};

const EXIT_USER: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Hyperbolic divisor sums, their constants and residuals, and the
/// exponential-sum checks behind the error term.
#[derive(Parser, Debug)]
#[command(name = "tausum", version, about)]
struct Cli {
    /// Output format (each subcommand has its own default)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads; 0 lets the pool decide, 1 is fully deterministic
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Seed for randomized coefficients and samples
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate τ(n) and D(n)
    Sieve(SieveArgs),
    /// Exact T(x)
    Tsum(TsumArgs),
    /// T(x) and the residual R(x) on a grid
    Residual(ResidualArgs),
    /// Fit log|R| against log x from a residual CSV
    Fit(FitArgs),
    /// C₁, C₂, C₃ with certified tails
    Constants(ConstantsArgs),
    /// Exponential sums against their bounds
    Expsum(ExpsumArgs),
    /// Spacing counts B₃, B₄, B₅
    Dio(DioArgs),
    /// Trigonometric approximation of ψ and its envelope
    Vaaler(VaalerArgs),
    /// Kusmin–Landau, B-process and dependence parameters
    Vdc(VdcArgs),
}

#[derive(Args, Debug)]
struct SieveArgs {
    #[arg(long)]
    limit: u64,
    /// First n to print
    #[arg(long, default_value_t = 1)]
    from: u64,
}

#[derive(Args, Debug)]
struct TsumArgs {
    /// Grid: `10`, `2^20`, `2^10..2^16`, `1..100`, comma-separated
    #[arg(long)]
    x: String,
    #[arg(long, default_value = "blocked")]
    method: TsumMethod,
}

#[derive(Args, Debug)]
struct ResidualArgs {
    #[arg(long, default_value = "2^16..2^24")]
    x: String,
    #[arg(long, default_value_t = 1_000_000)]
    cutoff: u64,
    #[arg(long, default_value = "abel")]
    mode: TailMode,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Residual CSV with header `x,T,R`; `-` reads standard input
    #[arg(long, default_value = "-")]
    input: String,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long, default_value_t = 1_000_000)]
    cutoff: u64,
    #[arg(long, default_value = "abel")]
    mode: TailMode,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ExpsumArgs {
    /// thm_S, thm_Sstar, rs3d or proposition
    #[arg(long, default_value = "thm_S")]
    kind: BoundKind,
    /// Run the standard parameter grid instead of a single point
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 8)]
    h: u64,
    #[arg(long, default_value_t = 8)]
    m: u64,
    #[arg(long, default_value_t = 8)]
    n: u64,
    #[arg(long, default_value_t = 100.0)]
    x: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Coeff::Random)]
    coeff: Coeff,
    #[arg(long, default_value_t = 2)]
    d1: u64,
    #[arg(long, default_value_t = 2)]
    d2: u64,
    #[arg(long, default_value_t = 2)]
    l: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coeff {
    Ones,
    Random,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct DioArgs {
    #[arg(long, default_value = "b3")]
    counter: Counter,
    #[arg(long, default_value = "sorted")]
    method: CountMethod,
    /// Run the B₃ bound-shape sweep
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 8)]
    l: u64,
    #[arg(long, default_value_t = 8)]
    m: u64,
    #[arg(long, default_value_t = 8)]
    n: u64,
    #[arg(long, default_value_t = 100.0)]
    x: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VaalerArgs {
    #[arg(long)]
    h: u32,
    /// Evaluation points, comma-separated
    #[arg(long, value_delimiter = ',', conflicts_with = "samples")]
    x: Vec<f64>,
    /// Number of pseudo-random points in [0, 1) drawn from --seed
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VdcOp {
    Kl,
    Bprocess,
    Dependence,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VdcArgs {
    #[arg(long, value_enum)]
    op: VdcOp,
    /// Monomial phase x(t/M)^α; without it `kl` uses a linear phase
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1000.0)]
    x: f64,
    #[arg(long, default_value_t = 100)]
    m: u64,
    #[arg(long, default_value_t = 0.5)]
    slope: f64,
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    /// Range start; defaults to M + 1 for monomial phases and 1 otherwise
    #[arg(long)]
    a: Option<u64>,
    /// Range end; defaults to 2M for monomial phases and 100 otherwise
    #[arg(long)]
    b: Option<u64>,
    #[arg(long, default_value_t = 0.25)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    weight_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    weight_exponent: f64,
    /// Point at which ρ is evaluated; defaults to X
    #[arg(long)]
    at: Option<f64>,
}

struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn open(path: Option<&PathBuf>) -> anyhow::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out })
    }

    fn csv<I>(&mut self, header: &[&str], rows: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        writeln!(self.out, "{}", header.join(","))?;
        for row in rows {
            writeln!(self.out, "{}", row.join(","))?;
        }
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, v: &T) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut self.out, v)?;
        writeln!(self.out)?;
        Ok(())
    }

    fn line(&mut self, s: &str) -> anyhow::Result<()> {
        writeln!(self.out, "{s}")?;
        Ok(())
    }

    fn finish(mut self) -> anyhow::Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

fn params_cell(params: &[(&str, String)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn check_rows(sink: &mut Sink, format: Format, reports: &[BoundCheckReport]) -> anyhow::Result<()> {
    match format {
        Format::Json => sink.json(reports),
        Format::Csv => sink.csv(
            &["kind", "params", "sum_modulus", "bound", "ratio"],
            reports.iter().map(|r| {
                let params: Vec<_> = r
                    .params
                    .iter()
                    .map(|(k, v)| (k.as_str(), v.to_string()))
                    .collect();
                vec![
                    r.kind.clone(),
                    params_cell(&params),
                    fmt_real(r.sum_modulus),
                    fmt_real(r.bound_value),
                    fmt_real(r.ratio),
                ]
            }),
        ),
    }
}

fn table_for(limit: u64) -> anyhow::Result<DivisorTable> {
    Ok(DivisorTable::new(limit.max(1))?)
}

fn run_sieve(a: &SieveArgs, format: Format, sink: &mut Sink) -> anyhow::Result<()> {
    if a.from == 0 || a.from > a.limit {
        bail!(tausum::Error::Range(format!(
            "need 1 <= from <= limit, got from = {}, limit = {}",
            a.from, a.limit
        )));
    }
    let table = DivisorTable::new(a.limit)?;
    let ns = a.from..=a.limit;
    match format {
        Format::Csv => sink.csv(
            &["n", "tau", "D"],
            ns.map(|n| {
                vec![
                    n.to_string(),
                    table.tau(n).to_string(),
                    table.prefix(n).to_string(),
                ]
            }),
        ),
        Format::Json => {
            let rows: Vec<Value> = ns
                .map(|n| json!({ "n": n, "tau": table.tau(n), "D": table.prefix(n) }))
                .collect();
            sink.json(&rows)
        }
    }
}

fn run_tsum(a: &TsumArgs, format: Option<Format>, sink: &mut Sink) -> anyhow::Result<()> {
    let xs = parse_grid(&a.x)?;
    let max = xs.iter().copied().max().unwrap_or(0);
    if xs.contains(&0) {
        bail!(tausum::Error::Range("x must be positive".into()));
    }
    let table = table_for(max)?;
    let values = xs
        .iter()
        .map(|&x| Ok((x, t_exact(&table, x, a.method)?)))
        .collect::<tausum::Result<Vec<_>>>()?;
    match format {
        None => {
            for (_, t) in &values {
                sink.line(&t.to_string())?;
            }
            Ok(())
        }
        Some(Format::Csv) => sink.csv(
            &["x", "T"],
            values
                .iter()
                .map(|(x, t)| vec![x.to_string(), t.to_string()]),
        ),
        Some(Format::Json) => {
            let rows: Vec<Value> = values
                .iter()
                .map(|(x, t)| json!({ "x": x, "T": t, "method": a.method.to_string() }))
                .collect();
            sink.json(&rows)
        }
    }
}

fn run_residual(a: &ResidualArgs, format: Format, sink: &mut Sink) -> anyhow::Result<()> {
    let xs = parse_grid(&a.x)?;
    if xs.contains(&0) {
        bail!(tausum::Error::Range("x must be positive".into()));
    }
    let max = xs.iter().copied().max().unwrap_or(1);
    let table = table_for(max.max(a.cutoff))?;
    let constants = Constants::compute(&table, a.cutoff, a.mode)?;
    let rows = residual_grid(&table, &constants, &xs)?;
    match format {
        Format::Csv => Ok(write_residual_csv(&mut sink.out, &rows)?),
        Format::Json => sink.json(&rows),
    }
}

fn run_fit(a: &FitArgs, format: Format, sink: &mut Sink) -> anyhow::Result<()> {
    let mut text = String::new();
    if a.input == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(&a.input)
            .map_err(|e| tausum::Error::Parse(format!("cannot read {}: {e}", a.input)))?;
    }
    let rows = parse_residual_csv(&text)?;
    let report: FitReport = fit_exponent(&rows)?;
    match format {
        Format::Json => sink.json(&report),
        Format::Csv => sink.csv(
            &[
                "points",
                "theta_hat",
                "c_hat",
                "max_normalized",
                "zero_rows",
            ],
            [vec![
                report.points.len().to_string(),
                fmt_real(report.theta_hat),
                fmt_real(report.c_hat),
                fmt_real(report.max_normalized),
                report.zero_rows.to_string(),
            ]],
        ),
    }
}

fn run_constants(a: &ConstantsArgs, format: Format, sink: &mut Sink) -> anyhow::Result<()> {
    let table = table_for(a.cutoff)?;
    let report = Constants::compute(&table, a.cutoff, a.mode)?.report();
    match format {
        Format::Json => sink.json(&report),
        Format::Csv => sink.csv(
            &[
                "c1", "c1_tail", "c3", "c3_tail", "c2", "c2_tail", "cutoff", "mode",
            ],
            [vec![
                fmt_real(report.c1),
                fmt_real(report.c1_tail),
                fmt_real(report.c3),
                fmt_real(report.c3_tail),
                fmt_real(report.c2),
                fmt_real(report.c2_tail),
                report.cutoff.to_string(),
                report.mode.to_string(),
            ]],
        ),
    }
}

fn run_expsum(a: &ExpsumArgs, format: Format, seed: u64, sink: &mut Sink) -> anyhow::Result<()> {
    if a.sweep {
        let report = bound_sweep(a.kind, &standard_grid(a.kind, seed), a.eps)?;
        for (i, msg) in &report.failures {
            eprintln!("grid point {i} skipped: {msg}");
        }
        return match format {
            Format::Json => sink.json(&report),
            Format::Csv => check_rows(sink, format, &report.reports),
        };
    }
    let report = if a.kind == BoundKind::Proposition {
        if a.delta != 0.0 && a.delta != 1.0 {
            bail!(tausum::Error::Domain(format!(
                "proposition delta must be 0 or 1, got {}",
                a.delta
            )));
        }
        let f = FrakSpec {
            x: a.x,
            d1: a.d1,
            d2: a.d2,
            l: a.l,
            h: a.h,
            delta: a.delta as u8,
        };
        let v = eval_frak_s(&f)?;
        let p = BoundParams::proposition(f.x, f.d() as f64, f.h as f64);
        BoundCheckReport::new(
            a.kind.name(),
            f.params(),
            v.norm(),
            theoretical_bound(a.kind, &p, a.eps)?,
        )?
    } else {
        let (ca, cb) = match a.coeff {
            Coeff::Ones => (Coefficients::ones(), Coefficients::ones()),
            Coeff::Random => (
                Coefficients::random(seed),
                Coefficients::random(splitmix64(seed)),
            ),
        };
        let s = ExpSumSpec::new(a.h, a.m, a.n, a.x, a.alpha, a.beta)
            .with_delta(a.delta)
            .with_coefficients(ca, cb);
        let (modulus, p) = match a.kind {
            BoundKind::ThmS => (
                eval_s(&s)?.norm(),
                BoundParams::triple(a.h as f64, a.m as f64, a.n as f64, a.x),
            ),
            BoundKind::ThmSstar => (
                eval_s_star(&s)?,
                BoundParams::triple(a.h as f64, a.m as f64, a.n as f64, a.x),
            ),
            _ => {
                if a.delta != 0.0 {
                    bail!(tausum::Error::Domain(
                        "rs3d sums are unperturbed; delta must be 0".into()
                    ));
                }
                (
                    eval_s_star(&s)?,
                    BoundParams::triple(a.m as f64, a.h as f64, a.n as f64, a.x),
                )
            }
        };
        BoundCheckReport::new(
            a.kind.name(),
            s.params(),
            modulus,
            theoretical_bound(a.kind, &p, a.eps)?,
        )?
    };
    match format {
        Format::Json => sink.json(&report),
        Format::Csv => check_rows(sink, format, std::slice::from_ref(&report)),
    }
}

fn dio_params(r: &DioReport) -> String {
    let counter = match r.counter {
        Counter::B3 => "b3",
        Counter::B4 => "b4",
        Counter::B5 => "b5",
    };
    let mut p = vec![("counter", counter.to_string())];
    if r.counter == Counter::B5 {
        p.push(("M", r.m.to_string()));
        p.push(("N", r.n.to_string()));
        p.push(("delta", r.delta.to_string()));
    } else {
        p.push(("L", r.l.to_string()));
    }
    p.push(("X", r.x.to_string()));
    p.push(("beta", r.beta.to_string()));
    params_cell(&p)
}

fn run_dio(a: &DioArgs, format: Format, sink: &mut Sink) -> anyhow::Result<()> {
    let reports = if a.sweep {
        diophantine::b3_shape_sweep(a.method)?
    } else {
        let q = match a.counter {
            Counter::B5 => CountQuery::product(a.m, a.n, a.delta, a.x, a.beta, a.method),
            _ => CountQuery::single(a.l, a.x, a.beta, a.method),
        };
        vec![diophantine::count_report(a.counter, &q)?]
    };
    match format {
        Format::Json => sink.json(&reports),
        Format::Csv => sink.csv(
            &["params", "count", "bound", "ratio", "fuzz_count"],
            reports.iter().map(|r| {
                vec![
                    dio_params(r),
                    r.count.to_string(),
                    fmt_real(r.bound),
                    fmt_real(r.ratio),
                    r.fuzz_count.to_string(),
                ]
            }),
        ),
    }
}

fn run_vaaler(a: &VaalerArgs, format: Format, seed: u64, sink: &mut Sink) -> anyhow::Result<()> {
    let xs: Vec<f64> = match a.samples {
        Some(k) => {
            let mut state = seed;
            (0..k)
                .map(|_| {
                    state = splitmix64(state);
                    unit_from_hash(state)
                })
                .collect()
        }
        None if a.x.is_empty() => bail!(tausum::Error::Domain("give --x or --samples".into())),
        None => a.x.clone(),
    };
    let evals = xs
        .iter()
        .map(|&x| VaalerEval::new(x, a.h))
        .collect::<tausum::Result<Vec<_>>>()?;
    match format {
        Format::Csv => sink.csv(
            &["x", "psi", "approx", "envelope", "ok"],
            evals.iter().map(|v| {
                vec![
                    fmt_real(v.x),
                    fmt_real(v.true_psi),
                    fmt_real(v.approx),
                    fmt_real(v.envelope),
                    v.within(1e-12).to_string(),
                ]
            }),
        ),
        Format::Json => {
            let rows: Vec<Value> = evals
                .iter()
                .map(|v| {
                    json!({
                        "x": v.x,
                        "h": v.h,
                        "psi": v.true_psi,
                        "approx": v.approx,
                        "envelope": v.envelope,
                        "ok": v.within(1e-12),
                    })
                })
                .collect();
            sink.json(&rows)
        }
    }
}

fn single_row(sink: &mut Sink, format: Format, obj: Value) -> anyhow::Result<()> {
    match format {
        Format::Json => sink.json(&obj),
        Format::Csv => {
            let map = obj.as_object().expect("object");
            let header: Vec<&str> = map.keys().map(String::as_str).collect();
            let row = map
                .values()
                .map(|v| match v.as_f64() {
                    Some(f) if !v.is_u64() && !v.is_i64() => fmt_real(f),
                    _ => v.to_string(),
                })
                .collect();
            sink.csv(&header, [row])
        }
    }
}

fn run_vdc(a: &VdcArgs, format: Format, sink: &mut Sink) -> anyhow::Result<()> {
    match a.op {
        VdcOp::Kl => {
            let (phase, lo, hi) = match a.alpha {
                Some(alpha) => (
                    Phase::Monomial(PhaseSpec::new(alpha, a.x, a.m)),
                    a.m + 1,
                    2 * a.m,
                ),
                None => (
                    Phase::Linear {
                        slope: a.slope,
                        offset: a.offset,
                    },
                    1,
                    100,
                ),
            };
            let report =
                kusmin_landau_ratio(&phase, a.a.unwrap_or(lo), a.b.unwrap_or(hi), a.lambda)?;
            match format {
                Format::Json => sink.json(&report),
                Format::Csv => check_rows(sink, format, std::slice::from_ref(&report)),
            }
        }
        VdcOp::Bprocess => {
            let alpha = a
                .alpha
                .context("bprocess needs --alpha")
                .map_err(|e| tausum::Error::Domain(e.to_string()))?;
            let phase = PhaseSpec::new(alpha, a.x, a.m);
            let weight = Weight {
                scale: a.weight_scale,
                exponent: a.weight_exponent,
            };
            let lo = a.a.unwrap_or(a.m + 1) as f64;
            let hi = a.b.unwrap_or(2 * a.m) as f64;
            let r = b_process_compare(&phase, &weight, lo, hi)?;
            single_row(
                sink,
                format,
                json!({
                    "lhs_re": r.lhs.re,
                    "lhs_im": r.lhs.im,
                    "main_re": r.main_term.re,
                    "main_im": r.main_term.im,
                    "error_budget": r.error_budget,
                    "discrepancy": r.discrepancy,
                    "ratio": r.ratio(),
                    "stationary_points": r.stationary_points,
                    "t": r.t,
                }),
            )
        }
        VdcOp::Dependence => {
            let alpha = a
                .alpha
                .context("dependence needs --alpha")
                .map_err(|e| tausum::Error::Domain(e.to_string()))?;
            let d = dependence_params(alpha, a.x, a.m)?;
            let at = a.at.unwrap_or(a.x);
            single_row(
                sink,
                format,
                json!({
                    "alpha": d.alpha,
                    "x": d.x,
                    "m": d.m,
                    "l": d.l,
                    "l1": d.l1,
                    "alpha_bar": d.alpha_bar,
                    "rho_at": at,
                    "rho": d.rho(at),
                }),
            )
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let mut sink = Sink::open(cli.output.as_ref())?;
    let csv = cli.format.unwrap_or(Format::Csv);
    match &cli.command {
        Command::Sieve(a) => run_sieve(a, csv, &mut sink)?,
        Command::Tsum(a) => run_tsum(a, cli.format, &mut sink)?,
        Command::Residual(a) => run_residual(a, csv, &mut sink)?,
        Command::Fit(a) => run_fit(a, cli.format.unwrap_or(Format::Json), &mut sink)?,
        Command::Constants(a) => run_constants(a, csv, &mut sink)?,
        Command::Expsum(a) => run_expsum(a, csv, cli.seed, &mut sink)?,
        Command::Dio(a) => run_dio(a, csv, &mut sink)?,
        Command::Vaaler(a) => run_vaaler(a, csv, cli.seed, &mut sink)?,
        Command::Vdc(a) => run_vdc(a, csv, &mut sink)?,
    }
    sink.finish()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<tausum::Error>() {
        Some(e) if !e.is_user_error() => EXIT_NUMERIC,
        _ => EXIT_USER,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
