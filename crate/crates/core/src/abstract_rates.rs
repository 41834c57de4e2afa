//! Twisted-norm decay rates from the three abstract hypocoercivity constants.
//!
//! Given microscopic coercivity `λm`, macroscopic coercivity `λM` and the
//! auxiliary-operator bound `C_M`, the functional `½‖F‖² + δ Re⟨AF, F⟩`
//! decays at rate `λ` whenever `h⋆(δ, λ) ≤ 0` inside the triangle
//! `0 < δ < λm`, `0 < λ < 2(λm − δ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_min};

/// The constants `(λm, λM, C_M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbstractConstants {
    /// Microscopic coercivity `λm`.
    pub lambda_m: f64,
    /// Macroscopic coercivity `λM`.
    pub lambda_big_m: f64,
    /// Bound `C_M` on the auxiliary operators.
    pub c_big_m: f64,
}

impl AbstractConstants {
    pub fn new(lambda_m: f64, lambda_big_m: f64, c_big_m: f64) -> Result<Self> {
        for (name, v) in [("lambda_m", lambda_m), ("lambda_M", lambda_big_m), ("C_M", c_big_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Range {
                    name,
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        Ok(Self {
            lambda_m,
            lambda_big_m,
            c_big_m,
        })
    }

    /// `K_M = λM / (1 + λM)`.
    pub fn k_m(&self) -> f64 {
        self.lambda_big_m / (1.0 + self.lambda_big_m)
    }

    /// `δ⋆ = 4 K_M λm / (4 K_M + C_M²)`: above it no rate is certified.
    pub fn delta_star(&self) -> f64 {
        let k = self.k_m();
        4.0 * k * self.lambda_m / (4.0 * k + self.c_big_m * self.c_big_m)
    }

    /// Membership in the open triangle `0 < δ < λm`, `0 < λ < 2(λm − δ)`.
    pub fn in_triangle(&self, delta: f64, lambda: f64) -> bool {
        delta > 0.0 && delta < self.lambda_m && lambda > 0.0 && lambda < 2.0 * (self.lambda_m - delta)
    }
}

/// Twist parameter together with the rate and norm-equivalence constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistChoice {
    pub delta: f64,
    pub lambda: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    /// `c_plus / c_minus`.
    pub c_factor: f64,
}

impl TwistChoice {
    /// Constants `c± = (2 ± δ)/4`, so `C = (2 + δ)/(2 − δ)`.
    pub fn improved(delta: f64, lambda: f64) -> Self {
        let c_minus = (2.0 - delta) / 4.0;
        let c_plus = (2.0 + delta) / 4.0;
        Self {
            delta,
            lambda,
            c_minus,
            c_plus,
            c_factor: c_plus / c_minus,
        }
    }
}

/// The classical explicit choice of `(δ, λ)` with `c± = (1 ± δ)/2`.
pub fn rate_bdms(k: &AbstractConstants) -> TwistChoice {
    let kk = k.k_m();
    let m = 1f64
        .min(k.lambda_m)
        .min(k.lambda_m * kk / (k.c_big_m * k.c_big_m));
    let lambda = kk / 3.0 * m;
    let delta = 0.5 * m;
    let c_minus = (1.0 - delta) / 2.0;
    let c_plus = (1.0 + delta) / 2.0;
    TwistChoice {
        delta,
        lambda,
        c_minus,
        c_plus,
        c_factor: c_plus / c_minus,
    }
}

/// `h⋆(δ, λ) = δ²(C_M + λ/2)² − 4(λm − δ − λ/2)(δ K_M − λ/2)`.
pub fn h_star(delta: f64, lambda: f64, k: &AbstractConstants) -> f64 {
    let a = k.c_big_m + 0.5 * lambda;
    delta * delta * a * a - 4.0 * (k.lambda_m - delta - 0.5 * lambda) * (delta * k.k_m() - 0.5 * lambda)
}

/// Largest certified rate for a fixed `δ ∈ (0, δ⋆)`.
///
/// For such `δ` the map `λ ↦ h⋆(δ, λ)` is a downward parabola that is
/// negative at `λ = 0` and positive at `λ = 2(λm − δ)`, so the sublevel set
/// inside the triangle is `(0, r]` with `r` the smaller root.
pub fn lambda_star(delta: f64, k: &AbstractConstants) -> Result<f64> {
    let ds = k.delta_star();
    if !(delta > 0.0) || delta >= ds {
        return Err(Error::EmptyFeasibleSet {
            delta,
            delta_star: ds,
        });
    }
    let cm = k.c_big_m;
    let a = k.lambda_m - delta;
    let b = delta * k.k_m();
    let a2 = 0.25 * delta * delta - 1.0;
    let a1 = delta * delta * cm + 2.0 * (a + b);
    let a0 = delta * delta * cm * cm - 4.0 * a * b;
    let upper = 2.0 * a;
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc >= 0.0 {
        let root = -2.0 * a0 / (a1 + disc.sqrt());
        if root > 0.0 && root < upper {
            return Ok(root);
        }
    }
    Ok(bisect(|l| h_star(delta, l, k), 0.0, upper, 200))
}

const MULTISTART: usize = 16;
const GOLDEN_ITERS: usize = 80;

/// Maximizes `λ⋆(δ)` over `δ ∈ (0, min{2, δ⋆})`.
///
/// A 16-point scan picks the best cell and golden section refines inside
/// its neighbours; the scan guards against a non-unimodal envelope.
pub fn optimize_rate(k: &AbstractConstants) -> TwistChoice {
    let hi = k.delta_star().min(2.0);
    let eval = |d: f64| lambda_star(d, k).unwrap_or(0.0);
    let nodes: Vec<f64> = (0..MULTISTART)
        .map(|i| hi * (i as f64 + 0.5) / MULTISTART as f64)
        .collect();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &d) in nodes.iter().enumerate() {
        let v = eval(d);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = if best == 0 { hi * 1e-12 } else { nodes[best - 1] };
    let up = if best + 1 == MULTISTART { hi * (1.0 - 1e-12) } else { nodes[best + 1] };
    let (d, neg) = golden_min(|d| -eval(d), lo, up, GOLDEN_ITERS);
    let (delta, lambda) = if -neg >= best_val { (d, -neg) } else { (nodes[best], best_val) };
    TwistChoice::improved(delta, lambda)
}
