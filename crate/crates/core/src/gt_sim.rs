//! Exact modal simulation of the Goldstein–Taylor system
//! `∂ₜŷ = −C(ξ,σ)ŷ` on the torus and on the line, and checks of decay
//! envelopes against simulated trajectories.
//!
//! Torus fields store normalized Fourier coefficients
//! `f̂(k) = (1/2π)∫ e^{−ikx} f dx`, so `norm_sq` is `(1/2π)∫|y|² dx`.
//! Line fields store `ŷ(ξ) = ∫ e^{−ixξ} y dx` on a uniform grid and
//! `norm_sq` is `(1/2π)∫|ŷ|² dξ = ∫|y|² dx`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::log_grid;
use crate::par;
use crate::smallmat::{c, eigh, expm_2x2, expm_2x2_shifted, operator_norm_sq, C64};
use crate::spectral_lyapunov::{gt_matrix, modal_spectral_gap, DecayCertificate};

/// Relative slack when comparing simulated norms with envelopes.
pub const ENVELOPE_SLACK: f64 = 1e-6;
pub const DEFAULT_TORUS_N: usize = 64;
pub const DEFAULT_LINE_H: f64 = 1.0 / 512.0;
pub const DEFAULT_LINE_XI_MAX: f64 = 16.0;
/// Angle resolution of the worst-case search.
pub const WORST_CASE_ANGLES: usize = 720;

/// One Fourier mode `ŷ(ξ) = (û, v̂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalState {
    pub xi: f64,
    pub y: [C64; 2],
}

pub fn propagate_mode(state: &ModalState, sigma: f64, t: f64) -> ModalState {
    let e = expm_2x2(&gt_matrix(state.xi, sigma), t);
    let y = e.mul_vec(&state.y);
    ModalState {
        xi: state.xi,
        y: [y[0], y[1]],
    }
}

/// `h₊(t,ξ) = ‖e^{−C(ξ,σ)t}‖²`.
pub fn propagator_norm_sq(xi: f64, sigma: f64, t: f64) -> f64 {
    operator_norm_sq(&expm_2x2(&gt_matrix(xi, sigma), t))
}

/// Unit initial vector whose image under `e^{−C t}` has norm `√h₊(t,ξ)`.
pub fn top_singular_direction(xi: f64, sigma: f64, t: f64) -> Result<[C64; 2]> {
    let e = expm_2x2(&gt_matrix(xi, sigma), t);
    let (_, vecs) = eigh(&(&e.adjoint() * &e).hermitian_part())?;
    Ok([vecs[(0, 1)], vecs[(1, 1)]])
}

/// `log ‖e^{−Ct} y‖²`, stable for large `t`.
fn log_mode_norm_sq(xi: f64, sigma: f64, t: f64, y: &[C64; 2]) -> f64 {
    let rho = modal_spectral_gap(xi, sigma);
    let w = expm_2x2_shifted(&gt_matrix(xi, sigma), t, rho).mul_vec(y);
    (w[0].norm_sqr() + w[1].norm_sqr()).ln() - 2.0 * rho * t
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.filter(|x| *x > f64::NEG_INFINITY).collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Truncated Fourier field on `𝕋 = [0, 2π)` with modes `−N..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    n: usize,
    u: Vec<C64>,
    v: Vec<C64>,
}

impl TorusField {
    pub fn new(n: usize, u: Vec<C64>, v: Vec<C64>) -> Result<Self> {
        for w in [&u, &v] {
            if w.len() != 2 * n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n + 1,
                    found: w.len(),
                });
            }
        }
        let f = Self { n, u, v };
        let scale = f.norm_sq().sqrt().max(f64::MIN_POSITIVE);
        for k in 0..=n {
            let (a, b) = (f.mode(k as i64), f.mode(-(k as i64)));
            let asym = (a[0] - b[0].conj()).norm() + (a[1] - b[1].conj()).norm();
            if asym > 1e-12 * scale {
                return Err(Error::InvalidInput(format!(
                    "mode {k} breaks conjugate symmetry"
                )));
            }
        }
        Ok(f)
    }

    /// Builds a real field from the nonnegative modes; negative modes are
    /// filled in by conjugation and mode 0 is made real.
    pub fn from_positive_modes(n: usize, f: impl Fn(usize) -> [C64; 2]) -> Self {
        let mut u = vec![c(0.0, 0.0); 2 * n + 1];
        let mut v = u.clone();
        for k in 0..=n {
            let [a, b] = f(k);
            let (a, b) = if k == 0 { (c(a.re, 0.0), c(b.re, 0.0)) } else { (a, b) };
            u[n + k] = a;
            v[n + k] = b;
            u[n - k] = a.conj();
            v[n - k] = b.conj();
        }
        Self { n, u, v }
    }

    /// `u = cos x`, `v = 0`.
    pub fn cosine(n: usize) -> Self {
        Self::from_positive_modes(n.max(1), |k| {
            if k == 1 {
                [c(0.5, 0.0), c(0.0, 0.0)]
            } else {
                [c(0.0, 0.0); 2]
            }
        })
    }

    /// Random mean-free field with amplitudes decaying like `1/k`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draws = vec![[c(0.0, 0.0); 2]; n + 1];
        for (k, d) in draws.iter_mut().enumerate() {
            let amp = 1.0 / (1.0 + k as f64);
            let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
            *d = [z(), z()];
            if k == 0 {
                d[0] = c(0.0, 0.0);
            }
        }
        Self::from_positive_modes(n, |k| draws[k])
    }

    /// Single mode pair `±ξ` with `ŷ(ξ) = ½(cos φ, i sin φ)`.
    pub fn single_mode(n: usize, xi: usize, phi: f64) -> Result<Self> {
        if xi == 0 || xi > n {
            return Err(Error::Range {
                name: "xi",
                value: xi as f64,
                range: "1..=N",
            });
        }
        Ok(Self::from_positive_modes(n, |k| {
            if k == xi {
                [c(0.5 * phi.cos(), 0.0), c(0.0, 0.5 * phi.sin())]
            } else {
                [c(0.0, 0.0); 2]
            }
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u_hat(&self) -> &[C64] {
        &self.u
    }

    pub fn v_hat(&self) -> &[C64] {
        &self.v
    }

    pub fn mode(&self, k: i64) -> [C64; 2] {
        let i = (self.n as i64 + k) as usize;
        [self.u[i], self.v[i]]
    }

    /// `Σ_k |ŷ(k)|² = (1/2π)∫|y|² dx`.
    pub fn norm_sq(&self) -> f64 {
        self.u.iter().chain(&self.v).map(|z| z.norm_sqr()).sum()
    }

    /// Point values `(u(x), v(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let mut s = (0.0, 0.0);
        for idx in 0..self.u.len() {
            let k = idx as f64 - self.n as f64;
            let e = C64::from_polar(1.0, k * x);
            s.0 += (self.u[idx] * e).re;
            s.1 += (self.v[idx] * e).re;
        }
        s
    }

    pub fn evolve(&self, sigma: f64, t: f64) -> Self {
        let idx: Vec<usize> = (0..self.u.len()).collect();
        let modes = par::map(&idx, |&i| {
            let xi = i as f64 - self.n as f64;
            propagate_mode(&ModalState { xi, y: [self.u[i], self.v[i]] }, sigma, t).y
        });
        Self {
            n: self.n,
            u: modes.iter().map(|m| m[0]).collect(),
            v: modes.iter().map(|m| m[1]).collect(),
        }
    }
}

/// `ŷ(ξ)` sampled on `ξ_j = −Ξ + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineField {
    h: f64,
    xi_max: f64,
    y: Vec<[C64; 2]>,
}

impl LineField {
    pub fn from_fn(h: f64, xi_max: f64, f: impl Fn(f64) -> [C64; 2]) -> Result<Self> {
        if !(h > 0.0 && xi_max > h) {
            return Err(Error::InvalidInput(format!(
                "line grid needs 0 < h < xi_max, got h={h}, xi_max={xi_max}"
            )));
        }
        let half = (xi_max / h).round() as usize;
        let y = (0..=2 * half)
            .map(|j| f((j as f64 - half as f64) * h))
            .collect();
        Ok(Self { h, xi_max: half as f64 * h, y })
    }

    /// `û₀ = e^{−ξ²}`, `v̂₀ = 0`; then `u₀ ≥ 0` and `‖u₀‖_{L¹} = 1`.
    pub fn gaussian(h: f64, xi_max: f64) -> Result<Self> {
        Self::from_fn(h, xi_max, |xi| [c((-xi * xi).exp(), 0.0), c(0.0, 0.0)])
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn xi(&self, j: usize) -> f64 {
        j as f64 * self.h - self.xi_max
    }

    pub fn samples(&self) -> &[[C64; 2]] {
        &self.y
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        let last = self.y.len() - 1;
        (0..self.y.len()).map(move |j| if j == 0 || j == last { 0.5 } else { 1.0 })
    }

    /// `(1/2π)∫|ŷ|² dξ` by the trapezoid rule.
    pub fn norm_sq(&self) -> f64 {
        let s: f64 = self
            .y
            .iter()
            .zip(self.weights())
            .map(|(m, w)| w * (m[0].norm_sqr() + m[1].norm_sqr()))
            .sum();
        s * self.h / (2.0 * PI)
    }

    pub fn evolve(&self, sigma: f64, t: f64) -> Self {
        let idx: Vec<usize> = (0..self.y.len()).collect();
        let y = par::map(&idx, |&j| {
            propagate_mode(&ModalState { xi: self.xi(j), y: self.y[j] }, sigma, t).y
        });
        Self { y, ..*self }
    }
}

/// Time grid `{0} ∪` geometric points in `[t_min, t_max]`.
pub fn time_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && per_decade > 0) {
        return Err(Error::InvalidInput(format!(
            "time grid needs 0 < t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    let n = ((t_max / t_min).log10() * per_decade as f64).ceil() as usize + 1;
    let mut g = vec![0.0];
    g.extend(log_grid(t_min, t_max, n.max(2)));
    Ok(g)
}

/// Squared norms along a time grid, stored as logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub log_norm_sq: Vec<f64>,
}

impl Trajectory {
    pub fn norm_sq(&self, i: usize) -> f64 {
        self.log_norm_sq[i].exp()
    }

    /// `log ‖y(0)‖²`; the grid is expected to start at `t = 0`.
    pub fn log_norm0(&self) -> f64 {
        self.log_norm_sq[0]
    }
}

pub fn torus_trajectory(field: &TorusField, sigma: f64, times: &[f64]) -> Trajectory {
    let modes: Vec<(f64, [C64; 2])> = (0..field.u.len())
        .map(|i| (i as f64 - field.n as f64, [field.u[i], field.v[i]]))
        .filter(|(_, y)| y[0].norm_sqr() + y[1].norm_sqr() > 0.0)
        .collect();
    let log_norm_sq = par::map(times, |&t| {
        log_sum_exp(modes.iter().map(|(xi, y)| log_mode_norm_sq(*xi, sigma, t, y)))
    });
    Trajectory {
        times: times.to_vec(),
        log_norm_sq,
    }
}

pub fn line_trajectory(field: &LineField, sigma: f64, times: &[f64]) -> Trajectory {
    let lw: Vec<f64> = field.weights().map(f64::ln).collect();
    let scale = (field.h / (2.0 * PI)).ln();
    let log_norm_sq = par::map(times, |&t| {
        scale
            + log_sum_exp(field.y.iter().enumerate().filter_map(|(j, y)| {
                if y[0].norm_sqr() + y[1].norm_sqr() == 0.0 {
                    None
                } else {
                    Some(lw[j] + log_mode_norm_sq(field.xi(j), sigma, t, y))
                }
            }))
    });
    Trajectory {
        times: times.to_vec(),
        log_norm_sq,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: f64,
    pub norm_sq: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Envelope comparison along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<ReportRow>,
    pub max_ratio: f64,
    pub argmax_t: f64,
    /// Ratio at the last sampled time.
    pub final_ratio: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// CSV with header `t,norm_sq,envelope,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm_sq,envelope,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.t, r.norm_sq, r.envelope, r.ratio
            ));
        }
        out
    }
}

/// Compares `log ‖y(t)‖²` with a log envelope; passes when every ratio is
/// at most `1 + ENVELOPE_SLACK`.
pub fn verify_log_envelope(traj: &Trajectory, log_env: impl Fn(f64) -> f64) -> VerificationReport {
    let rows: Vec<ReportRow> = traj
        .times
        .iter()
        .zip(&traj.log_norm_sq)
        .map(|(&t, &ln)| {
            let le = log_env(t);
            ReportRow {
                t,
                norm_sq: ln.exp(),
                envelope: le.exp(),
                ratio: (ln - le).exp(),
            }
        })
        .collect();
    let (mut max_ratio, mut argmax_t) = (f64::NEG_INFINITY, 0.0);
    for r in &rows {
        if r.ratio > max_ratio || r.ratio.is_nan() {
            max_ratio = r.ratio;
            argmax_t = r.t;
        }
    }
    let final_ratio = rows.last().map_or(f64::NAN, |r| r.ratio);
    VerificationReport {
        pass: max_ratio <= 1.0 + ENVELOPE_SLACK,
        rows,
        max_ratio,
        argmax_t,
        final_ratio,
    }
}

/// `‖y(t)‖² / (C e^{−rate·t} ‖y(0)‖²)` along the trajectory.
pub fn verify_certificate(cert: &DecayCertificate, traj: &Trajectory) -> VerificationReport {
    let base = cert.mult_const.ln() + traj.log_norm0();
    verify_log_envelope(traj, |t| base - cert.rate * t)
}

/// Search over unit initial vectors `(cos φ, i sin φ)` of one mode for the
/// largest envelope ratio. The set is invariant under `C(ξ,σ)` and contains
/// the top singular direction at every `t`. Returns `(φ, max ratio)`.
pub fn worst_case_search(
    xi: f64,
    sigma: f64,
    cert: &DecayCertificate,
    times: &[f64],
    angles: usize,
) -> (f64, f64) {
    let phis: Vec<f64> = (0..angles).map(|i| PI * i as f64 / angles as f64).collect();
    let cm = gt_matrix(xi, sigma);
    let rho = 0.5 * cert.rate;
    let props: Vec<_> = times
        .iter()
        .map(|&t| expm_2x2_shifted(&cm, t, rho))
        .collect();
    let best = par::map(&phis, |&phi| {
        let y = [c(phi.cos(), 0.0), c(0.0, phi.sin())];
        props
            .iter()
            .map(|e| {
                let w = e.mul_vec(&y);
                (w[0].norm_sqr() + w[1].norm_sqr()) / cert.mult_const
            })
            .fold(0.0, f64::max)
    });
    let (i, r) = best
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    (phis[i], r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::lin_grid;
    use crate::spectral_lyapunov::{assemble_strategy2, GtSystem, Scope, SupPolicy};
    use proptest::prelude::*;

    fn rk4(xi: f64, sigma: f64, y0: [C64; 2], t: f64, dt: f64) -> [C64; 2] {
        let cm = gt_matrix(xi, sigma);
        let f = |y: &[C64; 2]| {
            let r = cm.mul_vec(y);
            [-r[0], -r[1]]
        };
        let steps = (t / dt).round() as usize;
        let mut y = y0;
        for _ in 0..steps {
            let k1 = f(&y);
            let y2 = [y[0] + k1[0] * (dt / 2.0), y[1] + k1[1] * (dt / 2.0)];
            let k2 = f(&y2);
            let y3 = [y[0] + k2[0] * (dt / 2.0), y[1] + k2[1] * (dt / 2.0)];
            let k3 = f(&y3);
            let y4 = [y[0] + k3[0] * dt, y[1] + k3[1] * dt];
            let k4 = f(&y4);
            for i in 0..2 {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        y
    }

    fn cert(mult_const: f64, rate: f64) -> DecayCertificate {
        DecayCertificate {
            mult_const,
            rate,
            scope: Scope::GlobalTorus,
            residual: 0.0,
        }
    }

    #[test]
    fn zero_mode() {
        let s = ModalState { xi: 0.0, y: [c(0.7, 0.0), c(0.3, 0.0)] };
        for t in [0.5, 3.0, 50.0] {
            let r = propagate_mode(&s, 1.3, t);
            assert!((r.y[0] - c(0.7, 0.0)).norm() < 1e-15);
            assert!((r.y[1].re - 0.3 * (-1.3 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn rk4_oracle_defective() {
        let y0 = [c(1.0, 0.0), c(0.0, 0.5)];
        for (xi, sigma) in [(1.0, 2.0), (0.5, 1.0), (3.0, 1.0), (0.2, 1.0)] {
            let a = propagate_mode(&ModalState { xi, y: y0 }, sigma, 1.0).y;
            let b = rk4(xi, sigma, y0, 1.0, 1e-4);
            assert!((a[0] - b[0]).norm() + (a[1] - b[1]).norm() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn semigroup(xi in -4.0f64..4.0, sigma in 0.1f64..6.0, t in 0.0f64..5.0, s in 0.0f64..5.0) {
            let y0 = [c(0.3, -0.2), c(0.1, 0.9)];
            let st = ModalState { xi, y: y0 };
            let a = propagate_mode(&propagate_mode(&st, sigma, t), sigma, s).y;
            let b = propagate_mode(&st, sigma, t + s).y;
            prop_assert!((a[0] - b[0]).norm() + (a[1] - b[1]).norm() < 1e-11);
        }

        #[test]
        fn h_plus_dominates(xi in -3.0f64..3.0, t in 0.0f64..20.0, a in -1.0f64..1.0, b in -1.0f64..1.0, ph in 0.0f64..6.3) {
            let y0 = [c(a, 0.0), C64::from_polar(b, ph)];
            let n0 = y0[0].norm_sqr() + y0[1].norm_sqr();
            prop_assume!(n0 > 1e-6);
            let y = propagate_mode(&ModalState { xi, y: y0 }, 1.0, t).y;
            let r = (y[0].norm_sqr() + y[1].norm_sqr()) / n0;
            prop_assert!(r <= propagator_norm_sq(xi, 1.0, t) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn h_plus_attained_and_continuous() {
        assert!((propagator_norm_sq(0.7, 1.0, 0.0) - 1.0).abs() < 1e-15);
        for t in [1.0, 5.0, 10.0] {
            let at = propagator_norm_sq(0.5, 1.0, t);
            for d in [-1e-6, 1e-6] {
                assert!((propagator_norm_sq(0.5 + d, 1.0, t) - at).abs() <= 1e-4);
            }
            for xi in [0.1, 0.5, 1.0, 2.5] {
                let v = top_singular_direction(xi, 1.0, t).unwrap();
                let y = propagate_mode(&ModalState { xi, y: v }, 1.0, t).y;
                let r = y[0].norm_sqr() + y[1].norm_sqr();
                assert!((r - propagator_norm_sq(xi, 1.0, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn h_plus_below_ptilde_envelope() {
        use crate::spectral_lyapunov::{gt_p_family, mu_tilde, Family};
        for xi in lin_grid(0.01, 3.0, 120) {
            if (xi - 0.5).abs() < 1e-3 {
                continue;
            }
            let cond = gt_p_family(xi, 1.0, Family::PTilde).unwrap().cond().unwrap();
            for t in [0.5, 2.0, 10.0, 40.0] {
                let env = cond * (-2.0 * mu_tilde(xi) * t).exp();
                assert!(propagator_norm_sq(xi, 1.0, t) <= env * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn torus_presets_and_mass() {
        let f = TorusField::cosine(8);
        assert!((f.norm_sq() - 0.5).abs() < 1e-15);
        let (u, v) = f.eval(0.3);
        assert!((u - 0.3f64.cos()).abs() < 1e-15 && v.abs() < 1e-15);
        let r = TorusField::random(16, 7);
        assert_eq!(r, TorusField::random(16, 7));
        assert!(TorusField::new(16, r.u_hat().to_vec(), r.v_hat().to_vec()).is_ok());
        let mut bad = r.u_hat().to_vec();
        bad[3] += c(0.1, 0.0);
        assert!(TorusField::new(16, bad, r.v_hat().to_vec()).is_err());

        let mut g = TorusField::random(8, 3);
        g.u[8] = c(0.4, 0.0);
        for t in lin_grid(0.0, 50.0, 11) {
            assert!((g.evolve(1.0, t).mode(0)[0] - c(0.4, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn trajectory_matches_direct_evolution() {
        let f = TorusField::random(12, 11);
        let times = [0.0, 0.3, 2.0, 9.0];
        let tr = torus_trajectory(&f, 1.5, &times);
        for (i, &t) in times.iter().enumerate() {
            let direct = f.evolve(1.5, t).norm_sq();
            assert!((tr.norm_sq(i) - direct).abs() < 1e-12 * direct);
        }
        // Deep decay stays finite in log form.
        let tr = torus_trajectory(&f, 1.0, &[0.0, 1000.0]);
        assert!(tr.log_norm_sq[1].is_finite() && tr.log_norm_sq[1] < -900.0);
    }

    #[test]
    fn identity_certificate_passes() {
        let f = TorusField::random(10, 1);
        let tr = torus_trajectory(&f, 0.7, &time_grid(1e-2, 1e2, 20).unwrap());
        assert!(verify_certificate(&cert(1.0, 0.0), &tr).pass);
    }

    #[test]
    fn sigma_one_sharp_envelope() {
        let times = time_grid(1e-3, 1e2, 200).unwrap();
        let tr = torus_trajectory(&TorusField::cosine(4), 1.0, &times);
        assert!(verify_certificate(&cert(3.0, 1.0), &tr).pass);
        let (_, r) = worst_case_search(1.0, 1.0, &cert(3.0, 1.0), &lin_grid(0.0, 10.0, 400), WORST_CASE_ANGLES);
        assert!(r >= 0.9 && r <= 1.0 + 1e-9, "{r}");
    }

    #[test]
    fn sigma_four_strategy_envelope() {
        let out = assemble_strategy2(&GtSystem::torus(4.0).unwrap(), &SupPolicy::default()).unwrap();
        let times = time_grid(1e-3, 1e2, 50).unwrap();
        for seed in 0..10 {
            let tr = torus_trajectory(&TorusField::random(32, seed), 4.0, &times);
            assert!(verify_certificate(&out.certificate, &tr).pass);
        }
    }

    #[test]
    fn line_gaussian() {
        let f = LineField::gaussian(1.0 / 64.0, 8.0).unwrap();
        let want = (PI / 2.0).sqrt() / (2.0 * PI);
        assert!((f.norm_sq() - want).abs() < 1e-12);
        let times = [0.0, 1.0, 10.0];
        let tr = line_trajectory(&f, 1.0, &times);
        for (i, &t) in times.iter().enumerate() {
            let direct = f.evolve(1.0, t).norm_sq();
            assert!((tr.norm_sq(i) - direct).abs() < 1e-12 * direct);
        }
        assert!(LineField::gaussian(0.0, 1.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let tr = torus_trajectory(&TorusField::cosine(2), 1.0, &[0.0, 1.0]);
        let csv = verify_certificate(&cert(3.0, 1.0), &tr).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,norm_sq,envelope,ratio");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }

    #[test]
    fn eval_matches_trigonometric_forms() {
        let cosine = TorusField::cosine(4);
        let single = TorusField::single_mode(4, 2, 0.7).unwrap();
        for x in [0.0, 0.3, 1.1, 2.9, 5.5] {
            let (u, v) = cosine.eval(x);
            assert!((u - x.cos()).abs() < 1e-15 && v.abs() < 1e-15);
            let (u, v) = single.eval(x);
            assert!((u - 0.7f64.cos() * (2.0 * x).cos()).abs() < 1e-15);
            assert!((v + 0.7f64.sin() * (2.0 * x).sin()).abs() < 1e-15);
        }
    }
}
