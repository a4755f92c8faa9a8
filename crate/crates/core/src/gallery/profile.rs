//! Radial profiles `b(t)` and the spiral curves `Γ(t) = (d + b(t))(cos t, sin t)` they generate.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GeomError, Result};

/// Behaviour of a profile at one end of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Limit {
    Finite(f64),
    /// Diverges (to +∞ for the decreasing profiles of interest).
    Unbounded,
    /// Not known in closed form (tabulated data).
    Unknown,
}

/// Tabulated profile: values and derivatives at increasing abscissae,
/// linearly interpolated in between and held constant outside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileTable {
    t: Vec<f64>,
    b: Vec<f64>,
    db: Vec<f64>,
    ddb: Vec<f64>,
}

impl ProfileTable {
    pub fn new(t: Vec<f64>, b: Vec<f64>, db: Vec<f64>, ddb: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 2 || b.len() != n || db.len() != n || ddb.len() != n {
            return Err(GeomError::InvalidParameter(
                "profile table needs >= 2 rows and equal column lengths".into(),
            ));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeomError::InvalidParameter(
                "profile table abscissae must be strictly increasing".into(),
            ));
        }
        let all = t.iter().chain(&b).chain(&db).chain(&ddb);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(GeomError::InvalidParameter("non-finite profile table entry".into()));
        }
        Ok(Self { t, b, db, ddb })
    }

    fn interp(&self, col: &[f64], t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return col[0];
        }
        if t >= self.t[n - 1] {
            return col[n - 1];
        }
        let k = self.t.partition_point(|&x| x <= t) - 1;
        let w = (t - self.t[k]) / (self.t[k + 1] - self.t[k]);
        col[k] * (1.0 - w) + col[k + 1] * w
    }
}

/// The scalar profile `b(t)` of a spiral curve together with its derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RadialProfile {
    /// `b(t) = (m/π)(π/2 − arctan(a t))`, with `m > 0` and `0 < a ≤ 1`.
    Arctan { m: f64, a: f64 },
    /// `b(t) = e^{−t}`.
    Exp,
    /// `b ≡ 0`: the base circle itself.
    Zero,
    /// `b(t) = Σ_k coeffs[k] t^k`. Not a member of the decreasing family; used
    /// for comparison curves such as `b = t²`.
    Poly { coeffs: Vec<f64> },
    Table(ProfileTable),
}

impl RadialProfile {
    pub fn arctan(m: f64, a: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(GeomError::InvalidParameter(format!("arctan profile: m = {m} must be > 0")));
        }
        if !(a > 0.0 && a <= 1.0) {
            return Err(GeomError::InvalidParameter(format!(
                "arctan profile: a = {a} must lie in (0, 1]"
            )));
        }
        Ok(Self::Arctan { m, a })
    }

    /// Arctan family without the `0 < a ≤ 1`, `m > 0` admissibility check.
    /// Useful for exploring where the profile conditions break.
    pub fn arctan_unchecked(m: f64, a: f64) -> Self {
        Self::Arctan { m, a }
    }

    pub fn poly(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::InvalidParameter("polynomial profile needs finite coefficients".into()));
        }
        Ok(Self::Poly { coeffs })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Arctan { .. } => "arctan",
            Self::Exp => "exp",
            Self::Zero => "zero",
            Self::Poly { .. } => "poly",
            Self::Table(_) => "table",
        }
    }

    /// `b(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Arctan { m, a } => m / PI * (PI / 2.0 - (a * t).atan()),
            Self::Exp => (-t).exp(),
            Self::Zero => 0.0,
            Self::Poly { coeffs } => horner(coeffs, t),
            Self::Table(tab) => tab.interp(&tab.b, t),
        }
    }

    /// `b′(t)`.
    pub fn d1(&self, t: f64) -> f64 {
        match self {
            Self::Arctan { m, a } => -(m * a / PI) / (1.0 + a * a * t * t),
            Self::Exp => -(-t).exp(),
            Self::Zero => 0.0,
            Self::Poly { coeffs } => horner(&derivative(coeffs), t),
            Self::Table(tab) => tab.interp(&tab.db, t),
        }
    }

    /// `b″(t)`.
    pub fn d2(&self, t: f64) -> f64 {
        match self {
            Self::Arctan { m, a } => {
                let q = 1.0 + a * a * t * t;
                2.0 * m * a * a * a * t / (PI * q * q)
            }
            Self::Exp => (-t).exp(),
            Self::Zero => 0.0,
            Self::Poly { coeffs } => horner(&derivative(&derivative(coeffs)), t),
            Self::Table(tab) => tab.interp(&tab.ddb, t),
        }
    }

    /// `lim_{t→+∞} b(t)`.
    pub fn limit_plus(&self) -> Limit {
        match self {
            Self::Arctan { .. } | Self::Exp | Self::Zero => Limit::Finite(0.0),
            Self::Poly { coeffs } => poly_limit(coeffs),
            Self::Table(_) => Limit::Unknown,
        }
    }

    /// `lim_{t→−∞} b(t)`; the constant `m` of the family, possibly infinite.
    pub fn limit_minus(&self) -> Limit {
        match self {
            Self::Arctan { m, .. } => Limit::Finite(*m),
            Self::Exp => Limit::Unbounded,
            Self::Zero => Limit::Finite(0.0),
            Self::Poly { coeffs } => poly_limit(coeffs),
            Self::Table(_) => Limit::Unknown,
        }
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn poly_limit(coeffs: &[f64]) -> Limit {
    let degree = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if degree == 0 {
        Limit::Finite(coeffs[0])
    } else {
        Limit::Unbounded
    }
}

/// Planar spiral `Γ(t) = (d + b(t))(cos t, sin t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpiralCurve {
    pub profile: RadialProfile,
    pub d: f64,
}

impl SpiralCurve {
    pub fn new(profile: RadialProfile, d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(GeomError::InvalidParameter(format!("base radius d = {d} must be > 0")));
        }
        Ok(Self { profile, d })
    }

    /// The unit-base-radius curve `(1 + b)(cos t, sin t)`.
    pub fn unit(profile: RadialProfile) -> Self {
        Self { profile, d: 1.0 }
    }

    /// `d + b(t)`, the polar radius.
    pub fn radius(&self, t: f64) -> f64 {
        self.d + self.profile.value(t)
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        let r = self.radius(t);
        [r * t.cos(), r * t.sin()]
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        let (r, dr) = (self.radius(t), self.profile.d1(t));
        let (c, s) = (t.cos(), t.sin());
        [dr * c - r * s, dr * s + r * c]
    }

    pub fn acceleration(&self, t: f64) -> [f64; 2] {
        let (r, dr, ddr) = (self.radius(t), self.profile.d1(t), self.profile.d2(t));
        let (c, s) = (t.cos(), t.sin());
        let radial = ddr - r;
        [radial * c - 2.0 * dr * s, radial * s + 2.0 * dr * c]
    }

    /// `|Γ′(t)| = √((d+b)² + b′²)`.
    pub fn speed(&self, t: f64) -> f64 {
        self.radius(t).hypot(self.profile.d1(t))
    }

    /// Signed curvature
    /// `k = [(d+b)² + 2b′² − (d+b)b″] / [(d+b)² + b′²]^{3/2}`.
    pub fn curvature(&self, t: f64) -> f64 {
        let (r, dr, ddr) = (self.radius(t), self.profile.d1(t), self.profile.d2(t));
        let q = r * r + dr * dr;
        (r * r + 2.0 * dr * dr - r * ddr) / (q * q.sqrt())
    }

    /// Unit normal on the side of the origin: `(−(d+b) e_r + b′ e_θ)/|Γ′|`.
    pub fn inward_normal(&self, t: f64) -> [f64; 2] {
        let (r, dr) = (self.radius(t), self.profile.d1(t));
        let speed = r.hypot(dr);
        let (c, s) = (t.cos(), t.sin());
        [(-r * c - dr * s) / speed, (-r * s + dr * c) / speed]
    }

    /// Support value `⟨Γ, N⟩` for the inward normal: `−(d+b)²/|Γ′|`.
    pub fn support(&self, t: f64) -> f64 {
        let r = self.radius(t);
        -r * r / self.speed(t)
    }
}
