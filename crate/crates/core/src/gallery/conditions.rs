//! Grid checks of the five profile conditions
//! (i) `b → 0` as `t → ∞`, (ii) `b → m ∈ (0, ∞]` as `t → −∞`,
//! (iii) `b′ < 0`, (iv) `b ≥ |b′|`, (v) `|b′| < 1`.

use serde::Serialize;

use super::profile::{Limit, RadialProfile};
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub name: &'static str,
    pub holds_on_grid: bool,
    /// Signed slack; positive means satisfied.
    pub worst_margin: f64,
    pub worst_t: f64,
    /// Largest grid `t` at which the condition fails, if any.
    pub last_failure_t: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub conditions: Vec<ConditionResult>,
    pub asymptotic_t: f64,
}

impl ConditionReport {
    pub fn get(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds_on_grid)
    }

    /// True when (iii)–(v) all hold; the pointwise part the inequality chain relies on.
    pub fn pointwise_hold(&self) -> bool {
        ["iii", "iv", "v"].iter().all(|n| self.get(n).is_some_and(|c| c.holds_on_grid))
    }
}

/// Decay of `|b(τ) − target|` between `τ = half` and `τ = full`.
fn decay(profile: &RadialProfile, half: f64, full: f64, target: f64) -> (bool, f64) {
    let near = (profile.value(half) - target).abs();
    let far = (profile.value(full) - target).abs();
    (far < near || far == 0.0, near - far)
}

fn pointwise(
    name: &'static str,
    t_grid: &[f64],
    margin: impl Fn(f64) -> f64,
    strict: bool,
) -> ConditionResult {
    let mut worst = (f64::INFINITY, t_grid[0]);
    let mut last_failure = None;
    for &t in t_grid {
        let m = margin(t);
        if m < worst.0 {
            worst = (m, t);
        }
        let ok = if strict { m > 0.0 } else { m >= 0.0 };
        if !ok {
            last_failure = Some(last_failure.map_or(t, |prev: f64| prev.max(t)));
        }
    }
    ConditionResult {
        name,
        holds_on_grid: last_failure.is_none(),
        worst_margin: worst.0,
        worst_t: worst.1,
        last_failure_t: last_failure,
        note: String::new(),
    }
}

/// Checks (iii)–(v) at every grid node and (i)–(ii) as decay of the distance
/// to the limit from `±T/2` to `±T`.
pub fn profile_conditions_check(profile: &RadialProfile, t_grid: &[f64], asymptotic_t: f64) -> Result<ConditionReport> {
    if t_grid.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let reach = t_grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if !(asymptotic_t >= reach) {
        return Err(GeomError::InvalidParameter(format!(
            "asymptotic horizon {asymptotic_t} is inside the grid (max |t| = {reach})"
        )));
    }
    let big = asymptotic_t;

    let (holds, margin) = decay(profile, big / 2.0, big, 0.0);
    let cond_i = ConditionResult {
        name: "i",
        holds_on_grid: holds && !matches!(profile.limit_plus(), Limit::Unbounded),
        worst_margin: margin,
        worst_t: big,
        last_failure_t: None,
        note: format!("b({}) = {}, b({}) = {}", big / 2.0, profile.value(big / 2.0), big, profile.value(big)),
    };

    let (lo_half, lo_full) = (profile.value(-big / 2.0), profile.value(-big));
    let cond_ii = match profile.limit_minus() {
        Limit::Finite(m) => {
            let (holds, margin) = decay(profile, -big / 2.0, -big, m);
            ConditionResult {
                name: "ii",
                holds_on_grid: holds && m > 0.0,
                worst_margin: margin,
                worst_t: -big,
                last_failure_t: None,
                note: format!("m = {m}; b({}) = {lo_half}, b({}) = {lo_full}", -big / 2.0, -big),
            }
        }
        limit => ConditionResult {
            name: "ii",
            holds_on_grid: lo_full > lo_half && lo_half > 0.0,
            worst_margin: lo_full - lo_half,
            worst_t: -big,
            last_failure_t: None,
            note: if limit == Limit::Unbounded {
                format!("unbounded limit (m = ∞); b({}) = {lo_half}, b({}) = {lo_full}", -big / 2.0, -big)
            } else {
                format!("limit unknown, growth trend only; b({}) = {lo_half}, b({}) = {lo_full}", -big / 2.0, -big)
            },
        },
    };

    let cond_iii = pointwise("iii", t_grid, |t| -profile.d1(t), true);
    let cond_iv = pointwise("iv", t_grid, |t| profile.value(t) - profile.d1(t).abs(), false);
    let cond_v = pointwise("v", t_grid, |t| 1.0 - profile.d1(t).abs(), true);

    Ok(ConditionReport {
        conditions: vec![cond_i, cond_ii, cond_iii, cond_iv, cond_v],
        asymptotic_t,
    })
}
