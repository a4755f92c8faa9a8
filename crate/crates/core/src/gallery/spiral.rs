//! Quantities of the spiral cylinder `Γ × ℝ`: curvature, distance of tangent
//! lines from the origin, the inequality chain bounding it, trapped arc length
//! and the boundedness of the weighted mean curvature.

use rayon::prelude::*;
use serde::Serialize;

use super::profile::SpiralCurve;
use crate::error::{GeomError, Result};

/// Curvature of `Γ` at `t`; equal to the mean curvature of `Γ × ℝ` for the inward normal.
pub fn spiral_curvature(curve: &SpiralCurve, t: f64) -> f64 {
    curve.curvature(t)
}

/// `|R_t(s)|²` for the tangent line `R_t(s) = Γ(t) + sΓ′(t)`, in two algebraic forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentNorm {
    /// `[d + b + s b′]² + s²(d + b)²`.
    pub raw: f64,
    /// `c(t) = d + b − |b′|`.
    pub c: f64,
    /// `[c + (1 − s)|b′|]² + s²(d + b)²`; equals `raw` whenever `b′ ≤ 0`.
    pub regrouped: f64,
}

pub fn tangent_norm_sq(curve: &SpiralCurve, t: f64, s: f64) -> TangentNorm {
    let r = curve.radius(t);
    let db = curve.profile.d1(t);
    let slope = db.abs();
    let c = r - slope;
    let along = r + s * db;
    let side = s * r;
    let regrouped_head = c + (1.0 - s) * slope;
    TangentNorm {
        raw: along * along + side * side,
        c,
        regrouped: regrouped_head * regrouped_head + side * side,
    }
}

/// Terms of `|R_t(s)|²` for `b = e^{−t}` written as
/// `1 + s² + 2[3/4 + (s − 1/2)²]e^{−t} + [(1 − s)² + s²]e^{−2t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpRemarkTerms {
    pub base: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl ExpRemarkTerms {
    pub fn new(t: f64, s: f64) -> Self {
        let e = (-t).exp();
        Self {
            base: 1.0 + s * s,
            linear: 2.0 * (0.75 + (s - 0.5) * (s - 0.5)) * e,
            quadratic: ((1.0 - s) * (1.0 - s) + s * s) * e * e,
        }
    }

    pub fn total(&self) -> f64 {
        self.base + self.linear + self.quadratic
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkResult {
    pub name: &'static str,
    pub holds: bool,
    /// Smallest margin; positive means strict slack.
    pub worst_margin: f64,
    pub worst_t: f64,
    pub worst_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    /// (a) `c(t) ≥ 1`, (b) regrouped cross term `≥ 0`, (c) `|R|² > c² + s²`.
    pub links: Vec<LinkResult>,
    /// Whether link (c) holds with positive margin everywhere.
    pub strict: bool,
    pub min_norm_sq: f64,
    pub argmin: (f64, f64),
    /// `max |raw − regrouped| / raw`.
    pub max_form_disagreement: f64,
    /// Relative gap between `(1−s)c|b′| + s²b` and its regrouped form.
    pub max_cross_term_disagreement: f64,
    pub nodes: usize,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }

    pub fn link(&self, name: &str) -> Option<&LinkResult> {
        self.links.iter().find(|l| l.name == name)
    }
}

/// Relative round-off allowance when a link holds with equality.
pub const CHAIN_ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Copy)]
struct Worst {
    margin: f64,
    t: f64,
    s: f64,
    ok: bool,
}

impl Worst {
    fn new() -> Self {
        Self { margin: f64::INFINITY, t: f64::NAN, s: f64::NAN, ok: true }
    }

    fn push(&mut self, margin: f64, t: f64, s: f64, scale: f64) {
        if margin < self.margin {
            self.margin = margin;
            self.t = t;
            self.s = s;
        }
        if margin < -CHAIN_ROUNDOFF * scale.max(1.0) {
            self.ok = false;
        }
    }

    fn merge(&mut self, other: &Worst) {
        if other.margin < self.margin {
            self.margin = other.margin;
            self.t = other.t;
            self.s = other.s;
        }
        self.ok &= other.ok;
    }
}

#[derive(Clone, Copy)]
struct RowSummary {
    links: [Worst; 3],
    strict: bool,
    min_norm: (f64, f64, f64),
    form_gap: f64,
    cross_gap: f64,
}

/// Verifies every link of the chain `|R_t(s)|² > c(t)² + s² ≥ 1` at each `(t, s)` node.
///
/// Requires the unit base radius and `b′ ≤ 0`, `b ≥ |b′|`, `|b′| ≤ 1` on `t_grid`
/// (conditions (iii)–(v), with equality admitted so that the circle `b ≡ 0`
/// can be examined as a limiting case).
pub fn inequality_chain_check(curve: &SpiralCurve, t_grid: &[f64], s_grid: &[f64]) -> Result<ChainReport> {
    if t_grid.is_empty() || s_grid.is_empty() {
        return Err(GeomError::EmptySample);
    }
    if curve.d != 1.0 {
        return Err(GeomError::InvalidParameter(format!(
            "the inequality chain is stated for base radius 1 (got d = {})",
            curve.d
        )));
    }
    let p = &curve.profile;
    if let Some(&t) = t_grid.iter().find(|&&t| {
        let (b, db) = (p.value(t), p.d1(t));
        !(db <= 0.0 && b >= db.abs() && db.abs() <= 1.0)
    }) {
        return Err(GeomError::ConditionsViolated(format!(
            "conditions (iii)-(v) fail at t = {t} (b = {}, b' = {})",
            p.value(t),
            p.d1(t)
        )));
    }

    let rows: Vec<RowSummary> = t_grid
        .par_iter()
        .map(|&t| {
            let b = p.value(t);
            let slope = p.d1(t).abs();
            let mut row = RowSummary {
                links: [Worst::new(); 3],
                strict: true,
                min_norm: (f64::INFINITY, t, f64::NAN),
                form_gap: 0.0,
                cross_gap: 0.0,
            };
            for &s in s_grid {
                let tn = tangent_norm_sq(curve, t, s);
                let c = tn.c;
                let cross = (1.0 - s) * c * slope + s * s * b;
                let regrouped_cross = (0.75 + (s - 0.5) * (s - 0.5)) * c * slope + s * s * (b - slope) * (1.0 - slope);
                let bound = c * c + s * s;
                row.links[0].push(c - 1.0, t, s, c);
                row.links[1].push(regrouped_cross, t, s, cross.abs().max(s * s));
                let margin_c = tn.raw - bound;
                row.links[2].push(margin_c, t, s, tn.raw);
                row.strict &= margin_c > 0.0;
                if tn.raw < row.min_norm.0 {
                    row.min_norm = (tn.raw, t, s);
                }
                row.form_gap = row.form_gap.max((tn.raw - tn.regrouped).abs() / tn.raw);
                let cross_scale = cross.abs().max(regrouped_cross.abs()).max(f64::MIN_POSITIVE);
                if cross != regrouped_cross {
                    row.cross_gap = row.cross_gap.max((cross - regrouped_cross).abs() / cross_scale);
                }
            }
            row
        })
        .collect();

    let mut links = [Worst::new(); 3];
    let mut strict = true;
    let mut min_norm = (f64::INFINITY, f64::NAN, f64::NAN);
    let mut form_gap = 0.0f64;
    let mut cross_gap = 0.0f64;
    for row in &rows {
        for (acc, w) in links.iter_mut().zip(&row.links) {
            acc.merge(w);
        }
        strict &= row.strict;
        if row.min_norm.0 < min_norm.0 {
            min_norm = row.min_norm;
        }
        form_gap = form_gap.max(row.form_gap);
        cross_gap = cross_gap.max(row.cross_gap);
    }
    let names = ["a_c_ge_1", "b_cross_term_nonneg", "c_norm_gt_c2_plus_s2"];
    Ok(ChainReport {
        links: names
            .iter()
            .zip(&links)
            .map(|(&name, w)| LinkResult {
                name,
                holds: w.ok,
                worst_margin: w.margin,
                worst_t: w.t,
                worst_s: w.s,
            })
            .collect(),
        strict,
        min_norm_sq: min_norm.0,
        argmin: (min_norm.1, min_norm.2),
        max_form_disagreement: form_gap,
        max_cross_term_disagreement: cross_gap,
        nodes: t_grid.len() * s_grid.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpRemarkReport {
    /// `max |raw − remark form| / raw` against the general formula.
    pub max_form_disagreement: f64,
    pub min_linear_term: f64,
    pub min_quadratic_term: f64,
    /// `min (|R|² − (1 + s²))`.
    pub min_excess: f64,
    pub all_terms_positive: bool,
}

/// Termwise check of the direct form of `|R_t(s)|² − (1 + s²)` for `b = e^{−t}`.
pub fn exp_remark_check(t_grid: &[f64], s_grid: &[f64]) -> Result<ExpRemarkReport> {
    if t_grid.is_empty() || s_grid.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let curve = SpiralCurve::unit(super::profile::RadialProfile::Exp);
    let mut rep = ExpRemarkReport {
        max_form_disagreement: 0.0,
        min_linear_term: f64::INFINITY,
        min_quadratic_term: f64::INFINITY,
        min_excess: f64::INFINITY,
        all_terms_positive: true,
    };
    for &t in t_grid {
        for &s in s_grid {
            let terms = ExpRemarkTerms::new(t, s);
            let raw = tangent_norm_sq(&curve, t, s).raw;
            rep.max_form_disagreement = rep.max_form_disagreement.max((raw - terms.total()).abs() / raw);
            rep.min_linear_term = rep.min_linear_term.min(terms.linear);
            rep.min_quadratic_term = rep.min_quadratic_term.min(terms.quadratic);
            rep.min_excess = rep.min_excess.min(terms.linear + terms.quadratic);
            rep.all_terms_positive &= terms.linear > 0.0 && terms.quadratic > 0.0;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapRow {
    pub t_max: f64,
    pub arc_length_inside: f64,
    /// `ΔL/ΔT` against the previous row.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrapVerdict {
    /// Trapped length keeps growing: consistent with a non-proper immersion.
    Growing,
    /// Trapped length stopped changing: consistent with a proper curve.
    Saturated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProperReport {
    pub trap_radius: f64,
    pub rows: Vec<TrapRow>,
    pub verdict: TrapVerdict,
    pub step: f64,
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, step: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = (((b - a) / step).ceil() as usize).max(1) * 2;
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Arc length of `Γ([0, T]) ∩ {|q| ≤ trap_radius}` for increasing `T`.
///
/// Crossings of the trap boundary are located by scanning with `step` and
/// bisecting; each trapped sub-arc is integrated with composite Simpson.
pub fn properness_diagnostic(curve: &SpiralCurve, t_values: &[f64], trap_radius: f64, step: f64) -> Result<ProperReport> {
    if !(trap_radius > curve.d) {
        return Err(GeomError::InvalidParameter(format!(
            "trap radius {trap_radius} must exceed the base radius {}",
            curve.d
        )));
    }
    if t_values.is_empty() {
        return Err(GeomError::EmptySample);
    }
    if t_values.windows(2).any(|w| w[1] <= w[0]) || t_values[0] <= 0.0 || !(step > 0.0) {
        return Err(GeomError::InvalidParameter("T values must be positive and increasing; step > 0".into()));
    }
    let t_end = *t_values.last().unwrap();
    let outside = |t: f64| curve.radius(t).abs() - trap_radius;

    // Inside intervals of [0, t_end].
    let mut intervals = Vec::new();
    let n = (t_end / step).ceil() as usize;
    let mut start = (outside(0.0) <= 0.0).then_some(0.0);
    let mut prev = 0.0;
    for k in 1..=n {
        let t = (k as f64 * step).min(t_end);
        let was_in = outside(prev) <= 0.0;
        let is_in = outside(t) <= 0.0;
        if was_in != is_in {
            let crossing = bisect(outside, prev, t);
            if is_in {
                start = Some(crossing);
            } else if let Some(a) = start.take() {
                intervals.push((a, crossing));
            }
        }
        prev = t;
    }
    if let Some(a) = start {
        intervals.push((a, t_end));
    }

    let speed = |t: f64| curve.speed(t);
    let mut rows: Vec<TrapRow> = Vec::with_capacity(t_values.len());
    for &t_max in t_values {
        let length: f64 = intervals
            .iter()
            .map(|&(a, b)| simpson(speed, a.min(t_max), b.min(t_max), step))
            .sum();
        let slope = rows
            .last()
            .map(|prev| (length - prev.arc_length_inside) / (t_max - prev.t_max));
        rows.push(TrapRow {
            t_max,
            arc_length_inside: length,
            slope,
        });
    }
    let last = rows.last().unwrap();
    let increment = rows
        .len()
        .checked_sub(2)
        .map_or(last.arc_length_inside, |i| last.arc_length_inside - rows[i].arc_length_inside);
    let verdict = if increment <= 1e-9 * last.arc_length_inside.max(1.0) {
        TrapVerdict::Saturated
    } else {
        TrapVerdict::Growing
    };
    Ok(ProperReport {
        trap_radius,
        rows,
        verdict,
        step,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedScan {
    pub sup_abs_mean_curvature: f64,
    pub sup_abs_support: f64,
    /// `sup |H + ⟨X, N⟩/2|`.
    pub sup_abs_weighted: f64,
    pub argmax_support: f64,
}

/// Suprema over `t_grid` of `|H| = |k|`, `|⟨X, N⟩|` and the weighted mean curvature.
pub fn weighted_mean_curvature_scan(curve: &SpiralCurve, t_grid: &[f64]) -> Result<WeightedScan> {
    if t_grid.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let mut scan = WeightedScan {
        sup_abs_mean_curvature: 0.0,
        sup_abs_support: 0.0,
        sup_abs_weighted: 0.0,
        argmax_support: t_grid[0],
    };
    for &t in t_grid {
        let h = curve.curvature(t);
        let f = curve.support(t);
        scan.sup_abs_mean_curvature = scan.sup_abs_mean_curvature.max(h.abs());
        if f.abs() > scan.sup_abs_support {
            scan.sup_abs_support = f.abs();
            scan.argmax_support = t;
        }
        scan.sup_abs_weighted = scan.sup_abs_weighted.max((h + 0.5 * f).abs());
    }
    Ok(scan)
}
