use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::render::{self, Format};
use super::{AxisArg, Command, CurveArgs, Example, GlobalArgs};
use crate::asymptotics::{
    emit_plot, fit_exponents, scan_grid, sharpness_fermat, sharpness_parabola, DeltaRule, FitAxis,
    PlotSeries,
};
use crate::counting::{count, read_csv, write_csv, write_jsonl, CountQuery, CountRow, Method};
use crate::curves::{Curve, DualCurve, SmoothFn};
use crate::error::{Error, Result};
use crate::expsums::{
    discrepancy_record, dual_sums, exp_sum, poisson_check, sequence_points, vdc_check, vdc_lambda_grid,
    write_dual_csv, DiscrepancyRecord, DualSumQuery, DualVariant,
};
use crate::provenance::Provenance;
use crate::rational::{Delta, Interval};

pub(super) struct Ctx {
    format: Option<Format>,
    timings: bool,
    emit_plot: Option<PathBuf>,
    digest: String,
}

/// Primary output bytes plus warnings for stderr.
pub(super) struct Output {
    pub bytes: Vec<u8>,
    pub warnings: Vec<String>,
}

impl From<Vec<u8>> for Output {
    fn from(bytes: Vec<u8>) -> Self {
        Output {
            bytes,
            warnings: Vec::new(),
        }
    }
}

impl Ctx {
    pub(super) fn new(g: &GlobalArgs, digest: String) -> Self {
        Ctx {
            format: g.format,
            timings: g.timings,
            emit_plot: g.emit_plot.clone(),
            digest,
        }
    }

    fn prov(&self, curve: impl Into<String>) -> Provenance {
        let p = Provenance::new(curve, self.digest.clone());
        if self.timings {
            p.stamped()
        } else {
            p
        }
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn plot(&self, figure: &str, axes: (&str, &str), series: &[PlotSeries]) -> Result<()> {
        if let Some(dir) = &self.emit_plot {
            emit_plot(dir, figure, axes, series)?;
        }
        Ok(())
    }

    fn record<T: Serialize>(&self, prov: &Provenance, default: Format, r: &T) -> Result<Output> {
        let mut buf = Vec::new();
        render::record(&mut buf, prov, self.format(default), r)?;
        Ok(buf.into())
    }

    fn table<T: Serialize>(&self, prov: &Provenance, rows: &[T]) -> Result<Output> {
        let mut buf = Vec::new();
        render::table(&mut buf, prov, self.format(Format::Csv), rows)?;
        Ok(buf.into())
    }
}

impl CurveArgs {
    /// The curve and the working interval. The curve's own `interval`
    /// clause sets its domain; `--interval` sets the working interval and,
    /// failing a clause, the domain too.
    fn resolve(&self) -> Result<(Curve, Interval)> {
        let spec: crate::curves::CurveSpec = self.curve.parse()?;
        let interval = self
            .interval
            .or(spec.interval)
            .ok_or_else(|| Error::InvalidArgument("no interval: pass --interval or add `; interval:lo,hi`".into()))?;
        Ok((spec.to_curve(Some(interval))?, interval))
    }
}

fn describe(curve: &Curve, interval: &Interval) -> String {
    format!("{}; interval:{}", curve.kind_text(), interval)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} value `{}`", t.trim())))
        })
        .collect()
}

pub(super) fn execute(ctx: &Ctx, command: &Command) -> Result<Output> {
    match command {
        Command::Count {
            curve,
            q,
            delta,
            method,
        } => count_cmd(ctx, curve, *q, *delta, *method),
        Command::Scan {
            curve,
            qs,
            deltas,
            method,
        } => scan_cmd(ctx, curve, qs, deltas, *method),
        Command::Expsum { curve, q, k } => expsum_cmd(ctx, curve, *q, *k),
        Command::Discrepancy {
            curve,
            q,
            alpha,
            beta,
            k,
            trials,
            seed,
        } => discrepancy_cmd(ctx, curve, *q, (*alpha, *beta), *k, *trials, *seed),
        Command::Poisson { g, range, tol } => poisson_cmd(ctx, g, range, *tol),
        Command::Vdc {
            curve,
            d,
            per_decade,
            tol,
        } => vdc_cmd(ctx, curve, *d, *per_decade, *tol),
        Command::Dualsum {
            curve,
            variant,
            k,
            k1,
            q0,
            epsilon,
        } => dualsum_cmd(ctx, curve, variant, *k, *k1, *q0, *epsilon),
        Command::Fit { input, axis, fixed } => fit_cmd(ctx, input, *axis, *fixed),
        Command::Examples(Example::Parabola { q }) => {
            let r = sharpness_parabola(*q)?;
            ctx.record(&ctx.prov("poly:0,0,1; interval:0,1"), Format::Text, &r)
        }
        Command::Examples(Example::Fermat {
            d,
            qs,
            rule,
            interval,
        }) => fermat_cmd(ctx, *d, qs, rule, *interval),
        Command::Dual {
            curve,
            y,
            roundtrip,
        } => dual_cmd(ctx, curve, y.as_deref(), *roundtrip),
    }
}

fn count_rows_out(ctx: &Ctx, prov: &Provenance, rows: &[CountRow]) -> Result<Output> {
    let mut buf = Vec::new();
    match ctx.format(Format::Text) {
        Format::Text if rows.len() == 1 => render::record(&mut buf, prov, Format::Text, &rows[0])?,
        Format::Text | Format::Csv => write_csv(&mut buf, &prov.comments(), rows)?,
        Format::Json => write_jsonl(&mut buf, Some(&prov.to_json()), rows)?,
    }
    Ok(buf.into())
}

fn count_cmd(ctx: &Ctx, c: &CurveArgs, q: u64, delta: Delta, method: Method) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    let query = CountQuery::new(q, delta, interval)?;
    let mut row = CountRow::from(&count(&curve, &query, method)?);
    if !ctx.timings {
        row.elapsed_ms = 0.0;
    }
    count_rows_out(ctx, &ctx.prov(describe(&curve, &interval)), &[row])
}

fn scan_cmd(ctx: &Ctx, c: &CurveArgs, qs: &str, deltas: &str, method: Method) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    let qs: Vec<u64> = parse_list(qs, "Q")?;
    let deltas: Vec<Delta> = parse_list(deltas, "delta")?;
    let mut table = scan_grid(&curve, &interval, &qs, &deltas, method)?;
    if table.rows.is_empty() {
        if let Some(e) = table.errors.first() {
            return Err(Error::InvalidArgument(format!(
                "every grid point failed; Q={} delta={}: {}",
                e.q, e.delta, e.message
            )));
        }
    }
    table.provenance = ctx.prov(describe(&curve, &interval));
    let mut buf = Vec::new();
    match ctx.format(Format::Csv) {
        Format::Text | Format::Csv => table.write_csv(&mut buf, ctx.timings)?,
        Format::Json => table.write_jsonl(&mut buf, ctx.timings)?,
    }
    let mut ds: Vec<Delta> = table.rows.iter().map(|r| r.delta).collect();
    ds.dedup();
    let series = |f: fn(&CountRow) -> f64| -> Vec<PlotSeries> {
        ds.iter()
            .map(|d| {
                let pts = table
                    .rows
                    .iter()
                    .filter(|r| r.delta == *d)
                    .map(|r| (r.q as f64, f(r)))
                    .collect();
                PlotSeries::new(format!("delta={d}"), pts)
            })
            .collect()
    };
    ctx.plot("scan_count", ("Q", "N"), &series(|r| r.n as f64))?;
    ctx.plot("scan_ratio", ("Q", "N/main_term"), &series(|r| r.n as f64 / r.main_term))?;
    Ok(Output {
        bytes: buf,
        warnings: table
            .errors
            .iter()
            .map(|e| format!("Q={} delta={}: {}", e.q, e.delta, e.message))
            .collect(),
    })
}

#[derive(Serialize)]
struct ExpSumRow {
    curve_id: String,
    interval: Interval,
    #[serde(rename = "Q")]
    q: u64,
    k: i64,
    re: f64,
    im: f64,
    abs: f64,
}

fn expsum_cmd(ctx: &Ctx, c: &CurveArgs, q: u64, k: i64) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    let s: Complex64 = exp_sum(&curve, &interval, q, k)?;
    let row = ExpSumRow {
        curve_id: curve.kind_text(),
        interval,
        q,
        k,
        re: s.re,
        im: s.im,
        abs: s.norm(),
    };
    ctx.record(&ctx.prov(describe(&curve, &interval)), Format::Text, &row)
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    #[serde(flatten)]
    record: DiscrepancyRecord,
    holds: bool,
}

fn discrepancy_cmd(
    ctx: &Ctx,
    c: &CurveArgs,
    q: u64,
    window: (Option<f64>, Option<f64>),
    k: u64,
    trials: Option<usize>,
    seed: u64,
) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    let points = sequence_points(&curve, &interval, q)?;
    let prov = ctx.prov(describe(&curve, &interval));
    match (trials, window) {
        (None, (Some(alpha), Some(beta))) => {
            let r = discrepancy_record(&points, alpha, beta, k)?;
            ctx.record(&prov, Format::Text, &r)
        }
        (None, _) => Err(Error::InvalidArgument(
            "discrepancy needs --alpha and --beta, or --trials".into(),
        )),
        (Some(n), _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::with_capacity(n);
            for trial in 0..n {
                let alpha: f64 = rng.gen_range(0.0..0.98);
                let beta: f64 = rng.gen_range(alpha + 0.01..1.0);
                let k = [10, 100, 1000][rng.gen_range(0..3)];
                let record = discrepancy_record(&points, alpha, beta, k)?;
                let holds = record.d.abs() <= record.et_bound.unwrap_or(f64::INFINITY);
                rows.push(TrialRow { trial, record, holds });
            }
            let violations = rows.iter().filter(|r| !r.holds).count();
            let mut out = ctx.table(&prov, &rows)?;
            if violations > 0 {
                out.warnings.push(format!("{violations} of {n} windows exceed the bound"));
            }
            Ok(out)
        }
    }
}

fn poisson_cmd(ctx: &Ctx, g: &str, range: &Interval, tol: f64) -> Result<Output> {
    let curve = Curve::parse(g, Some(*range))?;
    let r = poisson_check(&curve, range.lo_f64(), range.hi_f64(), tol)?;
    ctx.record(&ctx.prov(describe(&curve, range)), Format::Text, &r)
}

#[derive(Serialize)]
struct VdcRow {
    d: usize,
    lambda: f64,
    scaled_integral: f64,
}

#[derive(Serialize)]
struct VdcSummary {
    d: usize,
    lambdas: usize,
    max: f64,
    min_derivative: f64,
}

fn vdc_cmd(ctx: &Ctx, c: &CurveArgs, d: usize, per_decade: usize, tol: f64) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    if per_decade == 0 {
        return Err(Error::InvalidArgument("--per-decade must be positive".into()));
    }
    let r = vdc_check(
        &curve,
        d,
        interval.lo_f64(),
        interval.hi_f64(),
        &vdc_lambda_grid(per_decade),
        tol,
    )?;
    ctx.plot(
        "vdc",
        ("lambda", "lambda^(1/d) |integral|"),
        &[PlotSeries::new(format!("d={d}"), r.points.clone())],
    )?;
    let prov = ctx.prov(describe(&curve, &interval));
    match ctx.format(Format::Text) {
        Format::Text => ctx.record(
            &prov,
            Format::Text,
            &VdcSummary {
                d,
                lambdas: r.points.len(),
                max: r.max,
                min_derivative: r.min_derivative,
            },
        ),
        _ => {
            let rows: Vec<VdcRow> = r
                .points
                .iter()
                .map(|&(lambda, v)| VdcRow {
                    d,
                    lambda,
                    scaled_integral: v,
                })
                .collect();
            ctx.table(&prov, &rows)
        }
    }
}

fn dualsum_cmd(
    ctx: &Ctx,
    c: &CurveArgs,
    variants: &str,
    k: u64,
    k1: Option<u64>,
    q0: f64,
    epsilon: f64,
) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    let variants: Vec<DualVariant> = if variants.trim() == "all" {
        DualVariant::ALL.to_vec()
    } else {
        parse_list(variants, "variant")?
    };
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let mut rows = Vec::with_capacity(variants.len());
    for v in variants {
        let mut query = DualSumQuery::new(v, interval, k, q0)?;
        if let (Some(k1), true) = (k1, v.is_ranged()) {
            query = query.with_k1(k1)?;
        }
        query.epsilon = epsilon;
        rows.push(dual_sums(&curve, &query)?);
    }
    let prov = ctx.prov(describe(&curve, &interval));
    let mut buf = Vec::new();
    match ctx.format(Format::Csv) {
        Format::Text | Format::Csv => write_dual_csv(&mut buf, &prov.comments(), &rows)?,
        Format::Json => render::table_jsonl(&mut buf, &prov, &rows)?,
    }
    Ok(buf.into())
}

fn fit_cmd(ctx: &Ctx, input: &PathBuf, axis: AxisArg, fixed: f64) -> Result<Output> {
    let rows = read_csv(std::fs::File::open(input)?)?;
    let axis = match axis {
        AxisArg::Q => FitAxis::Q,
        AxisArg::Delta => FitAxis::Delta,
    };
    let report = fit_exponents(&rows, axis, fixed)?;
    let curve = rows.first().map(|r| r.curve_id.clone()).unwrap_or_default();
    let x_of = |r: &CountRow| match axis {
        FitAxis::Q => (r.q as f64, r.delta.as_f64()),
        FitAxis::Delta => (r.delta.as_f64(), r.q as f64),
    };
    let data: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| (x_of(r).1 - fixed).abs() <= 1e-12 * fixed.abs() && r.n > 0 && r.ambiguous == 0)
        .map(|r| (x_of(r).0, r.n as f64))
        .collect();
    let line: Vec<(f64, f64)> = data
        .iter()
        .map(|&(x, _)| (x, (report.intercept + report.slope * x.ln()).exp()))
        .collect();
    let x_name = match axis {
        FitAxis::Q => "Q",
        FitAxis::Delta => "delta",
    };
    ctx.plot(
        "fit",
        (x_name, "N"),
        &[PlotSeries::new("data", data), PlotSeries::new("fit", line)],
    )?;
    ctx.record(&ctx.prov(curve), Format::Json, &report)
}

fn fermat_cmd(ctx: &Ctx, d: u32, qs: &str, rule: &str, interval: Option<Interval>) -> Result<Output> {
    let qs: Vec<u64> = parse_list(qs, "Q")?;
    let rule = match rule.trim() {
        "default" => DeltaRule::Default,
        t => {
            let c: Delta = t.parse()?;
            c.validate()?;
            DeltaRule::Constant(c.as_f64())
        }
    };
    let r = sharpness_fermat(d, &qs, rule, interval)?;
    ctx.plot(
        "fermat_ratio",
        ("Q", "N/shape"),
        &[PlotSeries::new(
            format!("d={d}"),
            r.rows.iter().map(|row| (row.q as f64, row.ratio)).collect(),
        )],
    )?;
    let mut out = ctx.table(&ctx.prov(format!("fermat:{d}; interval:{}", r.interval)), &r.rows)?;
    if !r.stable {
        out.warnings.push(format!(
            "ratios range over [{}, {}], wider than a factor 2",
            r.min_ratio, r.max_ratio
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
struct DualRow {
    y: f64,
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct DualSummary {
    lo: f64,
    hi: f64,
    slope_lo: f64,
    slope_hi: f64,
    convexity: i8,
    roundtrip_points: Option<usize>,
    roundtrip_max_error: Option<f64>,
}

fn dual_cmd(ctx: &Ctx, c: &CurveArgs, ys: Option<&str>, roundtrip: Option<usize>) -> Result<Output> {
    let (curve, interval) = c.resolve()?;
    let (lo, hi) = (interval.lo_f64(), interval.hi_f64());
    let dual = DualCurve::new(&curve, lo, hi)?;
    let prov = ctx.prov(describe(&curve, &interval));
    if let Some(ys) = ys {
        let ys: Vec<f64> = parse_list(ys, "y")?;
        let rows = ys
            .iter()
            .map(|&y| {
                Ok(DualRow {
                    y,
                    x: dual.invert_fprime(y, 0.0)?,
                    value: dual.dual_eval(y)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return ctx.table(&prov, &rows);
    }
    let (slope_lo, slope_hi) = dual.slope_interval();
    let roundtrip_max_error = match roundtrip {
        Some(n) if n >= 2 => {
            let double = DualCurve::new(&dual, slope_lo, slope_hi)?;
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                worst = worst.max((double.dual_eval(x)? - curve.value(x)).abs());
            }
            Some(worst)
        }
        Some(_) => return Err(Error::InvalidArgument("--roundtrip needs at least 2 points".into())),
        None => None,
    };
    let summary = DualSummary {
        lo,
        hi,
        slope_lo,
        slope_hi,
        convexity: dual.convexity(),
        roundtrip_points: roundtrip,
        roundtrip_max_error,
    };
    ctx.record(&prov, Format::Text, &summary)
}
