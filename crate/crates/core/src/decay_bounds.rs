//! Algebraic decay on the whole space and exponential decay on small tori.
//!
//! The Nash-type machinery turns a modal estimate
//! `|û(t,ξ)|² ≤ C(|ξ|) e^{−λ(|ξ|)t} |û(0,ξ)|²` into a bound on `‖u(t)‖²` by
//! splitting frequencies at a radius `R` and optimizing over `R`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modal_rates::{delta2_tilde, lambda2_tilde};
use crate::numeric::{bisect, log_grid, scan_then_golden, simpson};
use crate::par;
use crate::spectral_lyapunov::{modal_spectral_gap, mu_tilde};

pub const QUAD_TOL: f64 = 1e-10;
pub const QUAD_DEPTH: usize = 40;
pub const GOLDEN_ITERS: usize = 60;
const SCAN_POINTS: usize = 64;
/// Bracket for `R` in the Goldstein–Taylor line bounds.
pub const GT_R_BRACKET: (f64, f64) = (1e-6, 0.5 - 1e-9);
/// `ξ₁ = (√5 − 1)/4`, upper end of the `R` range for the `P̃` bound.
pub const XI1: f64 = 0.309_016_994_374_947_45;
/// `1 − √(3/7)`, the large-`s` limit of `λ̃₂`.
pub const LAMBDA_STAR: f64 = 0.345_346_329_292_022_9;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `ω_d = π^{d/2}/Γ(d/2 + 1)`, the volume of the unit ball.
pub fn omega_d(d: u32) -> f64 {
    let (mut w, mut k) = if d % 2 == 0 { (1.0, 0) } else { (2.0, 1) };
    while k < d {
        k += 2;
        w *= 2.0 * PI / k as f64;
    }
    w
}

/// `c_d = ½((d+2)/2)^{1+2/d} ω_d^{2/d}`.
pub fn heat_c_d(d: u32) -> f64 {
    let df = d as f64;
    0.5 * ((df + 2.0) / 2.0).powf(1.0 + 2.0 / df) * omega_d(d).powf(2.0 / df)
}

/// Rate/constant profile of a modal estimate together with the data sizes
/// `M` (L¹-type) and `Q` (L²-type).
#[derive(Clone)]
pub struct NashProfile {
    pub d: u32,
    pub lambda_fn: ScalarFn,
    pub c_fn: ScalarFn,
    /// `R ↦ sup_{s ≥ R} C(s)`.
    pub c_sup: ScalarFn,
    pub m: f64,
    pub q: f64,
    pub omega_d: f64,
}

impl fmt::Debug for NashProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NashProfile")
            .field("d", &self.d)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("omega_d", &self.omega_d)
            .finish_non_exhaustive()
    }
}

fn numeric_sup(c_fn: ScalarFn) -> ScalarFn {
    Arc::new(move |r: f64| {
        log_grid(r, r * 1e8, 321)
            .into_iter()
            .map(|s| c_fn(s))
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

impl NashProfile {
    /// Profile with `sup_{s≥R} C` taken numerically on a log grid.
    pub fn new(d: u32, lambda_fn: ScalarFn, c_fn: ScalarFn, m: f64, q: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Range {
                name: "d",
                value: 0.0,
                range: "1, 2, ...",
            });
        }
        for (name, v) in [("M", m), ("Q", q)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Range {
                    name: if name == "M" { "M" } else { "Q" },
                    value: v,
                    range: "[0, inf)",
                });
            }
        }
        let c_sup = numeric_sup(c_fn.clone());
        let p = Self {
            d,
            lambda_fn,
            c_fn,
            c_sup,
            m,
            q,
            omega_d: omega_d(d),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_c_sup(mut self, c_sup: ScalarFn) -> Self {
        self.c_sup = c_sup;
        self
    }

    /// `λ(s) = 2 min(s, 1)²`, `C ≡ 1`.
    pub fn heat(d: u32, m: f64, q: f64) -> Result<Self> {
        let lam: ScalarFn = Arc::new(|s: f64| 2.0 * s.min(1.0).powi(2));
        let one: ScalarFn = Arc::new(|_| 1.0);
        Ok(Self::new(d, lam, one.clone(), m, q)?.with_c_sup(one))
    }

    /// `λ = λ̃₂`, `C(s) = (1 + s² + δ̃₂ s)/(1 + s² − δ̃₂ s)`.
    pub fn gt_tilde(d: u32, m: f64, q: f64) -> Result<Self> {
        let lam: ScalarFn = Arc::new(lambda2_tilde);
        let c_fn: ScalarFn = Arc::new(tilde_constant);
        Self::new(d, lam, c_fn, m, q)
    }

    /// Checks that `λ` is positive and nondecreasing and `C ≥ 1` on a log grid.
    pub fn validate(&self) -> Result<()> {
        let grid = log_grid(1e-6, 1e6, 241);
        let mut prev = 0.0;
        for &s in &grid {
            let l = (self.lambda_fn)(s);
            if !(l > 0.0 && l.is_finite()) || l < prev * (1.0 - 1e-12) {
                return Err(Error::NonMonotoneRate { s });
            }
            prev = l;
            let c = (self.c_fn)(s);
            if !(c >= 1.0 - 1e-12 && c.is_finite()) {
                return Err(Error::InvalidInput(format!("C({s}) = {c} is not >= 1")));
            }
        }
        Ok(())
    }
}

/// `h_λ(M,R,s) = λ(R)(ω_d R^d M² − s)`.
pub fn nash_h(m: f64, r: f64, s: f64, profile: &NashProfile) -> f64 {
    (profile.lambda_fn)(r) * (profile.omega_d * r.powi(profile.d as i32) * m * m - s)
}

/// `λ*(M,s) = −min_{R>0} h_λ(M,R,s)`.
pub fn lambda_ast(m: f64, s: f64, profile: &NashProfile) -> Result<f64> {
    if !(m > 0.0 && s > 0.0) {
        return Err(Error::InvalidInput("lambda_ast needs M > 0 and s > 0".into()));
    }
    // h < 0 exactly when R < R0.
    let r0 = (s / (profile.omega_d * m * m)).powf(1.0 / profile.d as f64);
    let grid: Vec<f64> = log_grid(r0 * 1e-12, r0, SCAN_POINTS)
        .iter()
        .map(|r| r.ln())
        .collect();
    let best = scan_then_golden(|lr| nash_h(m, lr.exp(), s, profile), &grid, 100);
    Ok(-best.value)
}

/// Closed form of `λ*` for `λ(s) = 2s²`, valid while the minimizing radius
/// stays below 1.
pub fn heat_lambda_ast(m: f64, s: f64, d: u32) -> f64 {
    let df = d as f64;
    2.0 * df * (2.0 / (omega_d(d) * m * m)).powf(2.0 / df) * (s / (df + 2.0)).powf(1.0 + 2.0 / df)
}

/// `ψ(s) = −∫₁^s dz/λ*(M,z)`, integrated in `log z`.
pub fn psi(s: f64, profile: &NashProfile) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidInput("psi needs s > 0".into()));
    }
    if s == 1.0 {
        return Ok(0.0);
    }
    let m = profile.m;
    lambda_ast(m, 1.0, profile)?;
    let f = |w: f64| {
        let z = w.exp();
        z / lambda_ast(m, z, profile).unwrap_or(f64::NAN)
    };
    Ok(simpson(f, s.ln(), 0.0, QUAD_TOL, QUAD_DEPTH))
}

/// Inverse of the decreasing function `ψ`.
pub fn psi_inverse(y: f64, profile: &NashProfile) -> Result<f64> {
    let (mut lo, mut hi) = (0.5f64, 2.0f64);
    let mut grow = 0;
    while psi(lo, profile)? < y {
        lo *= 0.5;
        grow += 1;
        if grow > 2000 {
            return Err(Error::NoConvergence { iterations: grow });
        }
    }
    while psi(hi, profile)? > y {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 {
            return Err(Error::NoConvergence { iterations: grow });
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if psi(mid.exp(), profile)? > y {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// `ψ⁻¹(t + ψ(‖u(0)‖²))`.
pub fn nash_decay(t: f64, y0_sq: f64, profile: &NashProfile) -> Result<f64> {
    if t == 0.0 {
        return Ok(y0_sq);
    }
    psi_inverse(t + psi(y0_sq, profile)?, profile)
}

/// `(y0^{−2/d} + t/(c_d M^{4/d}))^{−d/2}`.
pub fn heat_nash_closed_form(t: f64, y0_sq: f64, d: u32, m: f64) -> f64 {
    let df = d as f64;
    (y0_sq.powf(-2.0 / df) + t / (heat_c_d(d) * m.powf(4.0 / df))).powf(-df / 2.0)
}

/// One point of an optimized envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub t: f64,
    pub bound: f64,
    pub argmin_r: f64,
    /// False when the best radius sits on the bracket boundary.
    pub interior: bool,
}

fn minimize_log<F: Fn(f64) -> f64>(f: F, bracket: (f64, f64)) -> (f64, f64, bool) {
    let grid: Vec<f64> = log_grid(bracket.0, bracket.1, SCAN_POINTS)
        .iter()
        .map(|r| r.ln())
        .collect();
    let best = scan_then_golden(|lr| f(lr.exp()), &grid, GOLDEN_ITERS);
    (best.x.exp(), best.value, best.interior)
}

fn check_bracket(bracket: (f64, f64)) -> Result<()> {
    if !(bracket.0 > 0.0 && bracket.1 > bracket.0) {
        return Err(Error::InvalidInput(format!("bad R bracket {bracket:?}")));
    }
    Ok(())
}

/// `Ψ_{M,Q}(t) = inf_R [ω_d d M² ∫₀ᴿ C e^{−λt} s^{d−1} ds + sup_{s≥R} C · e^{−λ(R)t} Q²]`.
pub fn psi_envelope(t: f64, profile: &NashProfile, bracket: (f64, f64)) -> Result<EnvelopeSample> {
    check_bracket(bracket)?;
    if t < 0.0 {
        return Err(Error::InvalidInput("t must be >= 0".into()));
    }
    let p = profile;
    let pref = p.omega_d * p.d as f64 * p.m * p.m;
    let dm1 = p.d as i32 - 1;
    let obj = |r: f64| {
        let low = simpson(
            |s| (p.c_fn)(s) * (-(p.lambda_fn)(s) * t).exp() * s.powi(dm1),
            0.0,
            r,
            QUAD_TOL,
            QUAD_DEPTH,
        );
        pref * low + (p.c_sup)(r) * (-(p.lambda_fn)(r) * t).exp() * p.q * p.q
    };
    let (r, v, interior) = minimize_log(obj, bracket);
    Ok(EnvelopeSample {
        t,
        bound: v,
        argmin_r: r,
        interior,
    })
}

/// `(c, λ)` of the modal estimate on the line with `σ = 1`: the sharp
/// `P⁽²⁾` pair below `R`, the cutoff matrix pair above.
pub fn gt_line_modal_bound(xi: f64, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::Range {
            name: "R",
            value: r,
            range: "(0, 1/2)",
        });
    }
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::Range {
            name: "xi",
            value: xi,
            range: "nonzero",
        });
    }
    let a = xi.abs();
    if a < r {
        Ok(((1.0 + 2.0 * a) / (1.0 - 2.0 * a), 2.0 * modal_spectral_gap(a, 1.0)))
    } else {
        Ok(((a + 2.0 * r * r) / (a - 2.0 * r * r), 2.0 * modal_spectral_gap(r, 1.0)))
    }
}

/// `B(t,R) = √t ∫₀ᴿ e^{−2μ(s)t} ds`.
pub fn b_factor(t: f64, r: f64) -> f64 {
    t.sqrt() * b_integral(t, r)
}

fn b_integral(t: f64, r: f64) -> f64 {
    simpson(
        |s| (-2.0 * modal_spectral_gap(s, 1.0) * t).exp(),
        0.0,
        r,
        QUAD_TOL,
        QUAD_DEPTH,
    )
}

/// Global line bound for `σ = 1` built from [`gt_line_modal_bound`].
pub fn gt_line_global_bound(t: f64, y0_l1_sq: f64, y0_l2_sq: f64) -> EnvelopeSample {
    let obj = |r: f64| {
        let cond = (1.0 + 2.0 * r) / (1.0 - 2.0 * r);
        // B/√t is the integral itself, which never exceeds R.
        let low = b_integral(t, r).min(r);
        debug_assert!(b_factor(t, r) < (PI / 8.0).sqrt());
        cond * (2.0 * low * y0_l1_sq + (-2.0 * modal_spectral_gap(r, 1.0) * t).exp() * y0_l2_sq)
    };
    let (r, v, interior) = minimize_log(obj, GT_R_BRACKET);
    EnvelopeSample {
        t,
        bound: v,
        argmin_r: r,
        interior,
    }
}

/// `α(ξ) = ξ⁻²(1 − 1/√(1 + 4ξ²(1 + 4ξ²))) = 2μ̃(ξ)/ξ²`.
pub fn alpha(xi: f64) -> f64 {
    let x2 = xi * xi;
    let r = (1.0 + 4.0 * x2 * (1.0 + 4.0 * x2)).sqrt();
    4.0 * (1.0 + 4.0 * x2) / (r * (1.0 + r))
}

/// Line bound for `σ = 1` from the `P̃` functional.
pub fn gt_line_ptilde_bound(t: f64, y0_l1_sq: f64, y0_l2_sq: f64) -> EnvelopeSample {
    let cap = if t > 0.0 { (PI / (2.0 * t)).sqrt() } else { f64::INFINITY };
    let obj = |r: f64| {
        let r2 = r * r;
        let cond = (1.0 + 2.0 * r + 4.0 * r2) / (1.0 - 2.0 * r + 4.0 * r2);
        cond * (2.0 * r).min(cap) * y0_l1_sq + 3.0 * (-2.0 * mu_tilde(r) * t).exp() * y0_l2_sq
    };
    let (r, v, interior) = minimize_log(obj, (GT_R_BRACKET.0, XI1));
    EnvelopeSample {
        t,
        bound: v,
        argmin_r: r,
        interior,
    }
}

/// Evaluates an envelope on a time grid.
pub fn envelope_table<F>(times: &[f64], f: F) -> Vec<EnvelopeSample>
where
    F: Fn(f64) -> EnvelopeSample + Sync + Send,
{
    par::map(times, |&t| f(t))
}

/// CSV with header `t,bound,argmin_R`.
pub fn envelope_csv(rows: &[EnvelopeSample]) -> String {
    let mut out = String::from("t,bound,argmin_R\n");
    for r in rows {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r.t, r.bound, r.argmin_r));
    }
    out
}

/// `(1 + s² + δ̃₂ s)/(1 + s² − δ̃₂ s)`.
pub fn tilde_constant(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    let ds = delta2_tilde(s) * s;
    (1.0 + s * s + ds) / (1.0 + s * s - ds)
}

/// Rate and constant on the torus `[0, L)` in the small-`L` regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusRate {
    pub rate: f64,
    pub mult_const: f64,
    /// Largest `L` for which `(λ⋆ − ε, 1 + ε)` is certified.
    pub l_eps: f64,
}

/// Smallest frequency `s_ε` such that `λ̃₂ ≥ λ⋆ − ε` and `C ≤ 1 + ε` from
/// `s_ε` on.
fn s_eps(eps: f64) -> f64 {
    let ok = |s: f64| lambda2_tilde(s) >= LAMBDA_STAR - eps && tilde_constant(s) <= 1.0 + eps;
    let (mut lo, hi) = (1e-3f64, 1e12f64);
    if ok(lo) {
        return lo;
    }
    let x = bisect(
        |ls| if ok(ls.exp()) { 1.0 } else { -1.0 },
        lo.ln(),
        hi.ln(),
        200,
    );
    lo = x.exp();
    // Keep the feasible side.
    while !ok(lo) {
        lo *= 1.0 + 1e-12;
    }
    lo
}

/// `(min{2, λ⋆ − ε}, 1 + ε)` for `L ≤ L_ε`. Above `L_ε` the constant is
/// the lattice supremum of `C` and the rate is capped by the lattice
/// minimum of `λ̃₂`.
pub fn torus_small_l_rate(l: f64, eps: f64) -> Result<TorusRate> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Range {
            name: "L",
            value: l,
            range: "(0, inf)",
        });
    }
    if !(eps > 0.0 && eps < LAMBDA_STAR) {
        return Err(Error::EpsTooLarge {
            eps,
            limit: LAMBDA_STAR,
        });
    }
    let l_eps = 2.0 * PI / s_eps(eps);
    if l <= l_eps {
        return Ok(TorusRate {
            rate: (LAMBDA_STAR - eps).min(2.0),
            mult_const: 1.0 + eps,
            l_eps,
        });
    }
    let s0 = 2.0 * PI / l;
    let lattice: Vec<f64> = (1..=4096).map(|k| k as f64 * s0).collect();
    let rate = lattice
        .iter()
        .map(|&s| lambda2_tilde(s))
        .fold(LAMBDA_STAR - eps, f64::min);
    let mult_const = lattice.iter().map(|&s| tilde_constant(s)).fold(1.0, f64::max);
    Ok(TorusRate {
        rate,
        mult_const,
        l_eps,
    })
}
