//! Segment-inversion counting. For a fixed `q`, `g(x) = q f(x/q)` is monotone
//! between turning points, so the `a` with `g(a)` in the window
//! `(m - delta, m + delta)` form an integer range. Only points in thin bands
//! around each window edge are evaluated; they go through the same judge as
//! [`count_naive`](super::count_naive), so the result is identical.

use std::time::Instant;

use rayon::prelude::*;

use super::{Context, CountQuery, CountResult, Method, QJudge, Tally};
use crate::curves::Curve;
use crate::error::Result;

/// Band half-width around a window edge, relative in `u`. Far above the
/// float error of `g`, so points outside a band are classified robustly.
const BAND: f64 = 1e-9;
/// Extra integers on each side of a band, covering position error.
const PAD: f64 = 2.0;
/// Points at each end of a block that are always evaluated.
const EDGE: i64 = 2;
/// Inversion is used only when a block has more than this many points per
/// window; otherwise direct evaluation is cheaper.
const POINTS_PER_WINDOW: i64 = 12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FastConfig {
    /// Always use window inversion, even where direct evaluation is cheaper.
    pub force_inversion: bool,
}

pub fn count_fast(curve: &Curve, query: &CountQuery) -> Result<CountResult> {
    count_fast_with(curve, query, &FastConfig::default())
}

/// Parallel over `q` with an ordered reduction. Falls back to direct
/// enumeration per `q` when the curve has no monotone segmentation.
pub fn count_fast_with(curve: &Curve, query: &CountQuery, cfg: &FastConfig) -> Result<CountResult> {
    let start = Instant::now();
    let ctx = Context::new(curve, query)?;
    let turning = curve.turning_points(query.interval.lo_f64(), query.interval.hi_f64());
    let per_q: Vec<Tally> = (1..=query.q_max)
        .into_par_iter()
        .map(|q| match &turning {
            Some(t) => fast_q(&ctx, q, t, cfg),
            None => ctx.naive_q(q),
        })
        .collect();
    let tally = per_q.into_iter().sum();
    Ok(CountResult::new(curve, query, tally, Method::Fast, start))
}

fn fast_q(ctx: &Context<'_>, q: u64, turning: &[f64], cfg: &FastConfig) -> Tally {
    let (s, e) = ctx.interval.numerators(q);
    if s > e {
        return Tally::default();
    }
    let judge = QJudge::new(ctx, q);
    let mut cuts: Vec<i64> = turning
        .iter()
        .map(|t| (t * q as f64).floor() as i64)
        .filter(|&c| c >= s && c < e)
        .collect();
    cuts.dedup();
    let mut tally = Tally::default();
    let mut lo = s;
    for c in cuts.into_iter().chain(std::iter::once(e)) {
        if c >= lo {
            tally = tally + block(&judge, lo, c, ctx.delta_f64, cfg);
            lo = c + 1;
        }
    }
    tally
}

fn direct(judge: &QJudge<'_>, lo: i64, hi: i64) -> Tally {
    let mut t = Tally::default();
    for a in lo..=hi {
        let v = judge.judge(a);
        t.n += v.hit as u64;
        t.ambiguous += v.ambiguous as u64;
    }
    t
}

/// Direct evaluation restricted to points whose nearest integer is `m`.
fn direct_window(judge: &QJudge<'_>, lo: i64, hi: i64, m: f64) -> Tally {
    let mut t = Tally::default();
    for a in lo..=hi {
        let u = judge.u(a as f64);
        if u.round() != m {
            continue;
        }
        let v = judge.judge_value(a, u);
        t.n += v.hit as u64;
        t.ambiguous += v.ambiguous as u64;
    }
    t
}

/// Counts `a` in `[lo, hi]`, a range on which `g` is monotone.
fn block(judge: &QJudge<'_>, lo: i64, hi: i64, delta: f64, cfg: &FastConfig) -> Tally {
    let (cl, ch) = (lo + EDGE, hi - EDGE);
    if cl > ch {
        return direct(judge, lo, hi);
    }
    let edges = direct(judge, lo, cl - 1) + direct(judge, ch + 1, hi);
    let (ul, uh) = (judge.u(cl as f64), judge.u(ch as f64));
    let (umin, umax) = (ul.min(uh), ul.max(uh));
    let m_lo = (umin - delta).floor() as i64;
    let m_hi = (umax + delta).ceil() as i64;
    let windows = m_hi - m_lo + 1;
    if !cfg.force_inversion && windows.saturating_mul(POINTS_PER_WINDOW) > ch - cl + 1 {
        return edges + direct(judge, cl, ch);
    }
    let seg = Segment {
        judge,
        lo: cl as f64,
        hi: ch as f64,
        ulo: ul,
        uhi: uh,
        increasing: uh >= ul,
    };
    let mut t = edges;
    for m in m_lo..=m_hi {
        let m = m as f64;
        let left = seg.band(m - delta);
        let right = seg.band(m + delta);
        let (first, second) = if left.0 <= right.0 { (left, right) } else { (right, left) };
        let clamp = |(a, b): (f64, f64)| (a.ceil().max(cl as f64) as i64, b.floor().min(ch as f64) as i64);
        let (f_lo, f_hi) = clamp(first);
        let (s_lo, s_hi) = clamp(second);
        if f_hi + 1 >= s_lo {
            t = t + direct_window(judge, f_lo.min(s_lo), f_hi.max(s_hi), m);
        } else {
            t = t + direct_window(judge, f_lo, f_hi, m) + direct_window(judge, s_lo, s_hi, m);
            // Strictly between the bands every point lies inside the window.
            t.n += (s_lo - f_hi - 1) as u64;
        }
    }
    t
}

/// A monotone stretch of `g` over real `x` in `[lo, hi]`.
struct Segment<'a> {
    judge: &'a QJudge<'a>,
    lo: f64,
    hi: f64,
    ulo: f64,
    uhi: f64,
    increasing: bool,
}

impl Segment<'_> {
    /// Real position where `g` crosses `b`, to within a quarter unit,
    /// clamped to the segment.
    fn position(&self, b: f64) -> f64 {
        let below = |u: f64| if self.increasing { u < b } else { u > b };
        if !below(self.ulo) {
            return self.lo;
        }
        if below(self.uhi) {
            return self.hi;
        }
        let (mut x0, mut x1) = (self.lo, self.hi);
        while x1 - x0 > 0.25 {
            let mid = 0.5 * (x0 + x1);
            if below(self.judge.u(mid)) {
                x0 = mid;
            } else {
                x1 = mid;
            }
        }
        0.5 * (x0 + x1)
    }

    /// Real `x` range, padded, of points with `g` within the band of `b`.
    fn band(&self, b: f64) -> (f64, f64) {
        let g = BAND * b.abs().max(1.0);
        let (p, r) = (self.position(b - g), self.position(b + g));
        (p.min(r) - PAD, p.max(r) + PAD)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_naive;
    use crate::rational::{Delta, Interval};

    fn agree(curve: &Curve, interval: Interval, q_max: u64, delta: f64) {
        let q = CountQuery::new(q_max, Delta::Real(delta), interval).unwrap();
        let naive = count_naive(curve, &q).unwrap();
        let fast = count_fast(curve, &q).unwrap();
        let forced = count_fast_with(curve, &q, &FastConfig { force_inversion: true }).unwrap();
        assert_eq!((fast.n, fast.ambiguous), (naive.n, naive.ambiguous));
        assert_eq!((forced.n, forced.ambiguous), (naive.n, naive.ambiguous));
    }

    #[test]
    fn parabola_matches_naive() {
        let c = Curve::poly_ints(&[0, 0, 1], -1.0, 1.0).unwrap();
        agree(&c, Interval::from_ints(0, 1), 300, 0.25);
        agree(&c, "-1,1".parse().unwrap(), 120, 0.1);
    }

    #[test]
    fn cubic_matches_naive() {
        let c = Curve::poly_ints(&[0, 0, 0, 1], -1.0, 1.0).unwrap();
        agree(&c, "-1/2,1/2".parse().unwrap(), 200, 0.1);
    }

    #[test]
    fn single_q() {
        let c = Curve::cosine(-1.0, 1.0).unwrap();
        agree(&c, "-1,1".parse().unwrap(), 1, 0.3);
    }

    #[test]
    fn analytic_kinds_match_naive() {
        let cos = Curve::cosine(-4.0, 4.0).unwrap();
        agree(&cos, "-4,4".parse().unwrap(), 150, 0.05);
        let fermat = Curve::fermat(4, -0.9, 0.9).unwrap();
        agree(&fermat, "-9/10,9/10".parse().unwrap(), 150, 0.2);
        let exp = Curve::parse("exp:0,0,-1", Some("-2,2".parse().unwrap())).unwrap();
        agree(&exp, "-2,2".parse().unwrap(), 150, 0.1);
    }

    #[test]
    fn flat_quartic_with_forced_inversion() {
        let c = Curve::poly_ints(&[0, 0, 0, 0, 1], -1.0, 1.0).unwrap();
        agree(&c, "-1/2,1/2".parse().unwrap(), 300, 0.05);
        agree(&c, "-1/2,1/2".parse().unwrap(), 300, 0.4);
    }
}
