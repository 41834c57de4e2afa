//! Mode-by-mode rates for kinetic models with a Gaussian equilibrium.
//!
//! For a Fourier mode of modulus `s`, each rate below is the largest `λ`
//! for which some twist `δ` makes a 2×2 quadratic form in
//! `(X, Y) = (‖(1−Π)F‖, ‖ΠF‖)` nonnegative. Nonnegativity is a discriminant
//! condition `h(δ, λ) ≤ 0` together with a positive `X²` coefficient.
//!
//! Every discriminant here has the shape
//! `δ² p² − 4 (a − δ q₁)(δ q₂ − c)` with `p, q₁, q₂, a, c` depending on
//! `(λ, s)` only, so for fixed `λ` it is a convex quadratic in `δ` and the
//! inner feasibility problem is solved exactly at the clamped vertex.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abstract_rates::{rate_bdms, AbstractConstants};
use crate::error::{Error, Result};
use crate::numeric::log_grid;
use crate::par;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Relative distance kept from the edges of the admissible `δ` interval.
pub const TRIANGLE_MARGIN: f64 = 1e-12;
const LAMBDA_SCAN: usize = 241;
const BISECTION_ITERS: usize = 200;

/// `(λm, λM, C_M) = (1, s², s(1+√3 s)/(1+s²))`.
pub fn constants_of_mode(s: f64) -> Result<AbstractConstants> {
    check_s(s)?;
    AbstractConstants::new(1.0, s * s, s * (1.0 + SQRT3 * s) / (1.0 + s * s))
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::Range {
            name: "s",
            value: s,
            range: "(0, inf)",
        })
    }
}

/// One sample of an optimized rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub s: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Norm-equivalence constant `(1+s²+δs)/(1+s²−δs)`; infinite when the
    /// denominator is not positive.
    pub c_of_s: f64,
}

impl RatePoint {
    pub fn new(s: f64, delta: f64, lambda: f64) -> Self {
        Self::with_eps(s, delta, lambda, 1.0)
    }

    /// Constant `(ε²+s²+δs)/(ε²+s²−δs)` of the ε-scaled twist.
    pub fn with_eps(s: f64, delta: f64, lambda: f64, eps: f64) -> Self {
        let base = eps * eps + s * s;
        let den = base - delta * s;
        let c_of_s = if den > 0.0 { (base + delta * s) / den } else { f64::INFINITY };
        Self {
            s,
            delta,
            lambda,
            c_of_s,
        }
    }
}

/// `λ₀(s) = s²/(3(1+√3 s)²)` and `δ₀(s) = (1+s²)/(2(1+√3 s)²)`.
pub fn lambda0_delta0(s: f64) -> RatePoint {
    let g = (1.0 + SQRT3 * s).powi(2);
    RatePoint::new(s, (1.0 + s * s) / (2.0 * g), s * s / (3.0 * g))
}

pub fn h1(delta: f64, lambda: f64, s: f64) -> f64 {
    let s2 = s * s;
    let w = s * (1.0 + SQRT3 * s) / (1.0 + s2) + 0.5 * lambda;
    delta * delta * w * w - 4.0 * (1.0 - delta - 0.5 * lambda) * (delta * s2 / (1.0 + s2) - 0.5 * lambda)
}

pub fn h2(delta: f64, lambda: f64, s: f64) -> f64 {
    h3(delta, lambda, 1.0, s)
}

pub fn h2_tilde(delta: f64, lambda: f64, s: f64) -> f64 {
    let s2 = s * s;
    let w = (1.0 + SQRT3 * s) / (1.0 + s2);
    let g = 1.0 + delta * s / (1.0 + s2);
    let k = delta * s2 / (1.0 + s2);
    delta * delta * s2 * w * w - 4.0 * (1.0 - k - 0.5 * lambda * g) * (k - 0.5 * lambda * g)
}

pub fn h3(delta: f64, lambda: f64, eps: f64, s: f64) -> f64 {
    let s2 = s * s;
    let den = eps * eps + s2;
    let w = (1.0 + SQRT3 * s + lambda) / den;
    let k = delta * s2 / den;
    delta * delta * s2 * w * w - 4.0 * (1.0 - k - 0.5 * lambda) * (k - 0.5 * lambda)
}

/// Discriminant of the parabolically scaled problem with parameter `ε`.
pub fn h_diffusion(delta: f64, lambda: f64, eps: f64, s: f64) -> f64 {
    let s2 = s * s;
    let w = (1.0 + SQRT3 * eps * s + lambda * eps * eps) / (1.0 + s2);
    let k = delta * s2 / (1.0 + s2);
    delta * delta * s2 / (eps * eps) * w * w
        - 4.0 * (1.0 / eps - k - 0.5 * lambda * eps) * (k - 0.5 * lambda * eps)
}

/// Refined discriminant of the Goldstein–Taylor mode `ξ` (σ = 1).
pub fn h_gt(delta: f64, lambda: f64, xi: f64) -> f64 {
    let x2 = xi * xi;
    let k = delta * x2 / (1.0 + x2);
    delta * delta * x2 / (1.0 + x2).powi(2) * (1.0 - lambda).powi(2)
        - 4.0 * (1.0 - k - 0.5 * lambda) * (k - 0.5 * lambda)
}

/// `(δ̄(ξ), 1)` with `δ̄ = (1+ξ²)/(2ξ²)`: the twist giving the sharp rate 1.
pub fn gt_sharp_rate(xi: f64) -> (f64, f64) {
    ((1.0 + xi * xi) / (2.0 * xi * xi), 1.0)
}

/// Closed-form rate obtained after splitting the `λXY` cross term.
pub fn lambda2_tilde(s: f64) -> f64 {
    let s2 = s * s;
    let x = 7.0 * s2 + 2.0 * (1.0 + SQRT3) * s + 1.0;
    let r = 21.0 * s2 * s2
        + 4.0 * (3.0 + 5.0 * SQRT3) * s2 * s
        + (22.0 + 8.0 * SQRT3) * s2
        + 4.0 * (1.0 + SQRT3) * s
        + 1.0;
    // x − √r rewritten as (x² − r)/(x + √r) to avoid cancellation at small s.
    let diff = 28.0 * s2 * s2 + (16.0 + 8.0 * SQRT3) * s2 * s + 8.0 * s2;
    let num = diff / (x + r.sqrt());
    num / (7.0 * s2 + 2.0 * (2.0 + SQRT3) * s + 2.0)
}

pub fn delta2_tilde(s: f64) -> f64 {
    let l = lambda2_tilde(s);
    (s * s + 1.0) / s * (l * l - l + 2.0 * s) / (7.0 * s * s + 2.0 * SQRT3 * s + 1.0 - l * l)
}

/// The discriminants that can be maximized over `(δ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discriminant {
    H1,
    H2,
    H2Tilde,
    H3 { eps: f64 },
    Diffusion { eps: f64 },
    Gt,
}

/// Coefficients of `δ² p² − 4 (a − δ q₁)(δ q₂ − c)`.
#[derive(Debug, Clone, Copy)]
struct Quad {
    p: f64,
    q1: f64,
    q2: f64,
    a: f64,
    c: f64,
}

impl Quad {
    fn eval(&self, d: f64) -> f64 {
        d * d * self.p * self.p - 4.0 * (self.a - d * self.q1) * (d * self.q2 - self.c)
    }

    /// Upper end of the admissible `δ` range: positive `X²` coefficient.
    fn delta_max(&self) -> f64 {
        self.a / self.q1
    }

    /// Minimizer of the convex quadratic over the admissible interval.
    fn best_delta(&self) -> f64 {
        let hi = self.delta_max();
        let lo = TRIANGLE_MARGIN * hi;
        let hi = hi * (1.0 - TRIANGLE_MARGIN);
        let aa = self.p * self.p + 4.0 * self.q1 * self.q2;
        let bb = -4.0 * (self.a * self.q2 + self.q1 * self.c);
        (-bb / (2.0 * aa)).clamp(lo, hi)
    }
}

impl Discriminant {
    /// Exclusive upper bound for `λ`.
    pub fn lambda_max(&self) -> f64 {
        match self {
            Discriminant::Diffusion { eps } => 2.0 / (eps * eps),
            _ => 2.0,
        }
    }

    fn quad(&self, lambda: f64, s: f64) -> Quad {
        let s2 = s * s;
        let k = s2 / (1.0 + s2);
        match *self {
            Discriminant::H1 => Quad {
                p: s * (1.0 + SQRT3 * s) / (1.0 + s2) + 0.5 * lambda,
                q1: 1.0,
                q2: k,
                a: 1.0 - 0.5 * lambda,
                c: 0.5 * lambda,
            },
            Discriminant::H2 => Discriminant::H3 { eps: 1.0 }.quad(lambda, s),
            Discriminant::H3 { eps } => {
                let den = eps * eps + s2;
                Quad {
                    p: s * (1.0 + SQRT3 * s + lambda) / den,
                    q1: s2 / den,
                    q2: s2 / den,
                    a: 1.0 - 0.5 * lambda,
                    c: 0.5 * lambda,
                }
            }
            Discriminant::H2Tilde => Quad {
                p: s * (1.0 + SQRT3 * s) / (1.0 + s2),
                q1: (s2 + 0.5 * lambda * s) / (1.0 + s2),
                q2: (s2 - 0.5 * lambda * s) / (1.0 + s2),
                a: 1.0 - 0.5 * lambda,
                c: 0.5 * lambda,
            },
            Discriminant::Diffusion { eps } => Quad {
                p: s / eps * (1.0 + SQRT3 * eps * s + lambda * eps * eps) / (1.0 + s2),
                q1: k,
                q2: k,
                a: 1.0 / eps - 0.5 * lambda * eps,
                c: 0.5 * lambda * eps,
            },
            Discriminant::Gt => Quad {
                p: s * (1.0 - lambda) / (1.0 + s2),
                q1: k,
                q2: k,
                a: 1.0 - 0.5 * lambda,
                c: 0.5 * lambda,
            },
        }
    }

    /// The discriminant evaluated at `(δ, λ)`.
    pub fn eval(&self, delta: f64, lambda: f64, s: f64) -> f64 {
        match *self {
            Discriminant::H1 => h1(delta, lambda, s),
            Discriminant::H2 => h2(delta, lambda, s),
            Discriminant::H2Tilde => h2_tilde(delta, lambda, s),
            Discriminant::H3 { eps } => h3(delta, lambda, eps, s),
            Discriminant::Diffusion { eps } => h_diffusion(delta, lambda, eps, s),
            Discriminant::Gt => h_gt(delta, lambda, s),
        }
    }

    /// Upper end of the admissible `δ` interval at rate `λ` (the `X²`
    /// coefficient of the quadratic form vanishes there).
    pub fn delta_max(&self, lambda: f64, s: f64) -> f64 {
        self.quad(lambda, s).delta_max()
    }

    /// The admissible `δ` interval on which the discriminant is nonpositive
    /// at rate `λ`, or `None` when it is empty.
    pub fn feasible_deltas(&self, lambda: f64, s: f64) -> Option<(f64, f64)> {
        if !(lambda > 0.0 && lambda < self.lambda_max()) {
            return None;
        }
        let q = self.quad(lambda, s);
        let top = q.delta_max();
        let aa = q.p * q.p + 4.0 * q.q1 * q.q2;
        let bb = -4.0 * (q.a * q.q2 + q.q1 * q.c);
        let cc = 4.0 * q.a * q.c;
        let disc = bb * bb - 4.0 * aa * cc;
        if !(top > 0.0) || disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let far = (-bb + sq) / (2.0 * aa);
        let near = if far > 0.0 { cc / (aa * far) } else { (-bb - sq) / (2.0 * aa) };
        let (lo, hi) = (near.max(0.0), far.min(top));
        (lo < hi).then_some((lo, hi))
    }

    /// Strict membership of `(δ, λ)` in the admissible region.
    pub fn admissible(&self, delta: f64, lambda: f64, s: f64) -> bool {
        lambda > 0.0 && lambda < self.lambda_max() && delta > 0.0 && delta < self.delta_max(lambda, s)
    }

    /// Smallest value of the discriminant over admissible `δ`, and where.
    fn inner(&self, lambda: f64, s: f64) -> (f64, f64) {
        let q = self.quad(lambda, s);
        let d = q.best_delta();
        (d, q.eval(d))
    }

    /// Largest `λ` with some admissible `δ` such that the discriminant is
    /// nonpositive. Returns `(δ, λ)`.
    pub fn maximize(&self, s: f64) -> Result<(f64, f64)> {
        check_s(s)?;
        let lmax = self.lambda_max();
        let grid = log_grid(lmax * 1e-16, lmax * (1.0 - 1e-12), LAMBDA_SCAN);
        let feasible = |l: f64| self.inner(l, s).1 <= 0.0;
        let top = grid
            .iter()
            .rposition(|&l| feasible(l))
            .ok_or(Error::InfeasibleMode { s })?;
        let lambda = if top + 1 == grid.len() {
            grid[top]
        } else {
            // Bisection on the sign of the minimal discriminant; keep the
            // feasible end so the returned pair satisfies h ≤ 0.
            let (mut lo, mut hi) = (grid[top], grid[top + 1]);
            for _ in 0..BISECTION_ITERS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        Ok((self.inner(lambda, s).0, lambda))
    }
}

/// Curve families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    Lambda0,
    Lambda1,
    Lambda2,
    Lambda2Tilde,
    Lambda3 { eps: f64 },
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Lambda0 => write!(f, "lambda0"),
            Variant::Lambda1 => write!(f, "lambda1"),
            Variant::Lambda2 => write!(f, "lambda2"),
            Variant::Lambda2Tilde => write!(f, "lambda2_tilde"),
            Variant::Lambda3 { eps } => write!(f, "lambda3(eps={eps})"),
        }
    }
}

/// Tolerance of the built-in check `λ₃(s; ε) = λ₂(s)`.
pub const EPS_INVARIANCE_TOL: f64 = 1e-8;

/// Optimized rate of a single mode.
pub fn rate_point(variant: Variant, s: f64) -> Result<RatePoint> {
    check_s(s)?;
    match variant {
        Variant::Lambda0 => Ok(lambda0_delta0(s)),
        Variant::Lambda1 => {
            let (d, l) = Discriminant::H1.maximize(s)?;
            Ok(RatePoint::new(s, d, l))
        }
        Variant::Lambda2 => {
            let (d, l) = Discriminant::H2.maximize(s)?;
            Ok(RatePoint::new(s, d, l))
        }
        Variant::Lambda2Tilde => Ok(RatePoint::new(s, delta2_tilde(s), lambda2_tilde(s))),
        Variant::Lambda3 { eps } => {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::Range {
                    name: "eps",
                    value: eps,
                    range: "(0, inf)",
                });
            }
            let (d, l) = Discriminant::H3 { eps }.maximize(s)?;
            let (_, l2) = Discriminant::H2.maximize(s)?;
            if (l - l2).abs() > EPS_INVARIANCE_TOL {
                return Err(Error::InvalidInput(format!(
                    "lambda3 = {l} differs from lambda2 = {l2} at s = {s}, eps = {eps}"
                )));
            }
            Ok(RatePoint::with_eps(s, d, l, eps))
        }
    }
}

/// Samples of one curve `s ↦ (δ(s), λ(s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub variant: Variant,
    pub points: Vec<RatePoint>,
}

impl RateCurve {
    /// CSV with columns `s,delta,lambda,C`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,delta,lambda,C\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.s, p.delta, p.lambda, p.c_of_s
            ));
        }
        out
    }
}

/// Evaluates a curve on an ascending grid of positive `s`.
pub fn lambda_curve(variant: Variant, s_grid: &[f64]) -> Result<RateCurve> {
    if s_grid.is_empty() {
        return Err(Error::InvalidInput("empty s grid".into()));
    }
    if s_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("s grid must be strictly ascending".into()));
    }
    let points = par::map(s_grid, |&s| rate_point(variant, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve { variant, points })
}

/// One sample of the parabolic-scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionPoint {
    pub eps: f64,
    pub lambda: f64,
    pub delta: f64,
}

/// Optimized rate of the parabolically scaled problem for each `ε`; as
/// `ε → 0` the rate tends to `2s²` and `δ/ε` to `2(1+s²)`.
pub fn diffusion_limit_rate(s: f64, eps_grid: &[f64]) -> Result<Vec<DiffusionPoint>> {
    check_s(s)?;
    eps_grid
        .iter()
        .map(|&eps| {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::Range {
                    name: "eps",
                    value: eps,
                    range: "(0, inf)",
                });
            }
            let (delta, lambda) = Discriminant::Diffusion { eps }.maximize(s)?;
            Ok(DiffusionPoint { eps, lambda, delta })
        })
        .collect()
}

/// Cross-check helper: the classical explicit rate through the abstract
/// constants of mode `s`.
pub fn lambda0_via_constants(s: f64) -> Result<f64> {
    Ok(rate_bdms(&constants_of_mode(s)?).lambda)
}
