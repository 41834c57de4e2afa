//! Lyapunov matrix inequalities `C*P + PC ≥ 2μP` for Fourier mode matrices,
//! with the Goldstein–Taylor families and their assembly into global decay
//! certificates on the torus.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::smallmat::{
    c, condition_number, eig_general, eig_hermitian, eigenvector, ComplexMatrix, C64,
};

/// Tolerance on the smallest eigenvalue of `C*P + PC − rate·P`, after
/// scaling `P` to unit largest eigenvalue.
pub const CERT_TOL: f64 = 1e-9;
/// Default mode cutoff when taking suprema over `ξ ∈ ℤ`.
pub const DEFAULT_XI_MAX: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Torus,
    Line,
}

/// Goldstein–Taylor system with relaxation rate `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtSystem {
    pub sigma: f64,
    pub domain: Domain,
}

impl GtSystem {
    pub fn new(sigma: f64, domain: Domain) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Range {
                name: "sigma",
                value: sigma,
                range: "(0, inf)",
            });
        }
        Ok(Self { sigma, domain })
    }

    pub fn torus(sigma: f64) -> Result<Self> {
        Self::new(sigma, Domain::Torus)
    }

    /// The mode matrix `C(ξ, σ)`.
    pub fn matrix(&self, xi: f64) -> ComplexMatrix {
        gt_matrix(xi, self.sigma)
    }
}

/// `C(ξ, σ) = [[0, iξ], [iξ, σ]]`.
pub fn gt_matrix(xi: f64, sigma: f64) -> ComplexMatrix {
    ComplexMatrix::from_2x2(c(0.0, 0.0), c(0.0, xi), c(0.0, xi), c(sigma, 0.0))
}

/// `μ(ξ, σ) = Re(σ/2 − √(σ²/4 − ξ²))`, evaluated without cancellation.
pub fn modal_spectral_gap(xi: f64, sigma: f64) -> f64 {
    let x2 = xi * xi;
    let q = 0.25 * sigma * sigma;
    if x2 < q {
        x2 / (0.5 * sigma + (q - x2).sqrt())
    } else {
        0.5 * sigma
    }
}

/// The modes attaining the uniform gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XiSet {
    /// `ℤ ∖ {0}`.
    #[serde(rename = "Z\\{0}")]
    AllNonzero,
    /// `{−1, 1}`.
    #[serde(rename = "{-1,1}")]
    PlusMinusOne,
}

impl XiSet {
    pub fn contains(&self, xi: f64) -> bool {
        match self {
            XiSet::AllNonzero => xi != 0.0,
            XiSet::PlusMinusOne => xi.abs() == 1.0,
        }
    }
}

/// Uniform gap `μ̄(σ)` over `ξ ∈ ℤ∖{0}` and the set of slowest modes.
pub fn uniform_gap(sigma: f64) -> (f64, XiSet) {
    if sigma <= 2.0 {
        (0.5 * sigma, XiSet::AllNonzero)
    } else {
        (modal_spectral_gap(1.0, sigma), XiSet::PlusMinusOne)
    }
}

/// `θ(σ) = σ` for `σ < 2`, `4/σ` for `σ > 2`; undefined at `σ = 2`.
pub fn theta_of_sigma(sigma: f64) -> Result<f64> {
    let theta = if sigma < 2.0 { sigma } else { 4.0 / sigma };
    if theta > 0.0 && theta < 2.0 {
        Ok(theta)
    } else {
        Err(Error::ThetaOutOfRange { theta })
    }
}

/// `θ_ε = 2(2 − ε²)/(2 + ε²)`.
pub fn theta_eps(eps: f64) -> f64 {
    2.0 * (2.0 - eps * eps) / (2.0 + eps * eps)
}

/// `δ̄(ξ, σ) = θ(σ)(1 + ξ²)/(2ξ²)`.
pub fn delta_bar(xi: f64, sigma: f64) -> Result<f64> {
    Ok(theta_of_sigma(sigma)? * (1.0 + xi * xi) / (2.0 * xi * xi))
}

/// `μ̃(ξ) = ½(1 − 1/√(1 + 4ξ²(1 + 4ξ²)))`, written to stay accurate as `ξ → 0`.
pub fn mu_tilde(xi: f64) -> f64 {
    let x2 = xi * xi;
    let z = 4.0 * x2 * (1.0 + 4.0 * x2);
    let r = (1.0 + z).sqrt();
    z / (2.0 * r * (1.0 + r))
}

/// Matrix `[[1, −iκ], [iκ, 1]]`, the common shape of every GT family.
pub fn twisted_identity(kappa: f64) -> ComplexMatrix {
    ComplexMatrix::from_2x2(c(1.0, 0.0), c(0.0, -kappa), c(0.0, kappa), c(1.0, 0.0))
}

/// `(1 + |κ|)/(1 − |κ|)`: condition number of [`twisted_identity`].
pub fn twisted_identity_cond(kappa: f64) -> f64 {
    let k = kappa.abs();
    (1.0 + k) / (1.0 - k)
}

/// Deformation matrix families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Weighted sum of eigenvector dyads of `C*`.
    Eigendyad,
    /// Off-diagonal `−iσ/(2ξ)`, for `|ξ| > σ/2`.
    P1,
    /// Off-diagonal `−2iξ/σ`, for `0 < |ξ| < σ/2`.
    P2,
    /// Off-diagonal `−iθ(σ)/(2ξ)`, rate `2μ̄(σ)` on every nonzero mode.
    PBar,
    /// Off-diagonal `−2iξ/(1 + 4ξ²)` for `σ = 1`, rate `2μ̃(ξ)`.
    PTilde,
    /// `P̄(ξ, θ_ε)` for `σ = 2`, rate `2(1 − ε)`.
    EpsDefective { eps: f64 },
    /// Line cutoff matrix with off-diagonal `−2iR²/ξ` for `|ξ| ≥ R`,
    /// `σ = 1`, rate `2μ(R)`.
    LineCutoff { r: f64 },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Eigendyad => "eigendyad",
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::PBar | Family::LineCutoff { .. } => "Pbar_theta",
            Family::PTilde => "Ptilde",
            Family::EpsDefective { .. } => "eps_defective",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A Hermitian positive definite `P` with the rate it is claimed to certify.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationMatrix {
    pub p: ComplexMatrix,
    pub certified_rate: f64,
    pub family: Family,
    pub xi: Option<f64>,
    pub sigma: Option<f64>,
}

impl DeformationMatrix {
    pub fn cond(&self) -> Result<f64> {
        condition_number(&self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scope {
    Modal { xi: Option<f64> },
    GlobalTorus,
    GlobalLine,
}

/// `‖F(t)‖² ≤ mult_const · e^{−rate·t} ‖F(0)‖²`.
///
/// `mult_const` multiplies squared norms; [`DecayCertificate::norm_const`]
/// gives the constant for the norms themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub mult_const: f64,
    pub rate: f64,
    pub scope: Scope,
    /// Smallest normalized eigenvalue of the inequality residual.
    pub residual: f64,
}

impl DecayCertificate {
    pub fn norm_const(&self) -> f64 {
        self.mult_const.sqrt()
    }

    /// The trivial certificate `(1, 0)`.
    pub fn identity() -> Self {
        Self {
            mult_const: 1.0,
            rate: 0.0,
            scope: Scope::GlobalTorus,
            residual: 0.0,
        }
    }
}

/// Smallest eigenvalue of `C*P + PC − rate·P` divided by `λmax(P)`.
pub fn inequality_residual(cm: &ComplexMatrix, p: &ComplexMatrix, rate: f64) -> Result<f64> {
    let r = &(&(&cm.adjoint() * p) + &(p * cm)) - &p.scale_re(rate);
    let ev = eig_hermitian(&r.hermitian_part())?;
    let pev = eig_hermitian(p)?;
    Ok(ev[0] / pev[pev.len() - 1])
}

/// Largest `r` with `C*P + PC ≥ r P`, i.e. the smallest eigenvalue of the
/// pencil `(C*P + PC, P)`.
pub fn best_rate(cm: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    let l = cholesky(p)?;
    let s = (&(&cm.adjoint() * p) + &(p * cm)).hermitian_part();
    let linv = lower_inverse(&l);
    let m = (&(&linv * &s) * &linv.adjoint()).hermitian_part();
    Ok(eig_hermitian(&m)?[0])
}

fn cholesky(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = p.dim();
    let mut l = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = p[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite { smallest: d });
        }
        let dj = d.sqrt();
        l[(j, j)] = c(dj, 0.0);
        for i in j + 1..n {
            let mut s = p[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

fn lower_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.dim();
    let mut inv = ComplexMatrix::zeros(n);
    for col in 0..n {
        for i in 0..n {
            let mut s = if i == col { c(1.0, 0.0) } else { c(0.0, 0.0) };
            for k in 0..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// `P = Σ c_j w_j w_j*` over unit eigenvectors `w_j` of `C*`, certifying
/// `2 min Re λ_j(C)`.
pub fn build_p_eigendyad(cm: &ComplexMatrix, weights: &[f64]) -> Result<DeformationMatrix> {
    let n = cm.dim();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidInput("dyad weights must be positive".into()));
    }
    let eig = eig_general(cm)?;
    let scale = cm.norm_inf().max(1.0);
    if eig.values.iter().any(|v| v.norm() <= 1e-12 * scale) {
        return Err(Error::ZeroEigenvalue);
    }
    if let Some((v, _)) = eig.values.iter().zip(&eig.defect_flags).find(|(_, &d)| d) {
        return Err(Error::DefectiveMatrix { value: format!("{v}") });
    }
    let adj = cm.adjoint();
    let mut p = ComplexMatrix::zeros(n);
    for (lam, w_j) in eig.values.iter().zip(weights) {
        let w = eigenvector(&adj, lam.conj());
        for r in 0..n {
            for s in 0..n {
                p[(r, s)] += *w_j * w[r] * w[s].conj();
            }
        }
    }
    let rate = 2.0 * eig.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let def = DeformationMatrix {
        p: p.hermitian_part(),
        certified_rate: rate,
        family: Family::Eigendyad,
        xi: None,
        sigma: None,
    };
    certify(&def, cm)?;
    Ok(def)
}

fn domain_err(family: Family, xi: f64, sigma: f64, reason: &str) -> Error {
    Error::FamilyDomain {
        family: family.tag().to_string(),
        xi,
        sigma,
        reason: reason.to_string(),
    }
}

/// The GT deformation matrix of the given family at `(ξ, σ)`.
pub fn gt_p_family(xi: f64, sigma: f64, family: Family) -> Result<DeformationMatrix> {
    let ax = xi.abs();
    if xi == 0.0 || !xi.is_finite() {
        return Err(domain_err(family, xi, sigma, "xi must be finite and nonzero"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(domain_err(family, xi, sigma, "sigma must be positive"));
    }
    let (kappa, rate) = match family {
        Family::Eigendyad => {
            let mut d = build_p_eigendyad(&gt_matrix(xi, sigma), &[1.0, 1.0])?;
            d.xi = Some(xi);
            d.sigma = Some(sigma);
            return Ok(d);
        }
        Family::P1 => {
            if ax <= 0.5 * sigma {
                return Err(domain_err(family, xi, sigma, "requires |xi| > sigma/2"));
            }
            (sigma / (2.0 * xi), 2.0 * modal_spectral_gap(xi, sigma))
        }
        Family::P2 => {
            if ax >= 0.5 * sigma {
                return Err(domain_err(family, xi, sigma, "requires |xi| < sigma/2"));
            }
            (2.0 * xi / sigma, 2.0 * modal_spectral_gap(xi, sigma))
        }
        Family::PBar => {
            let theta = theta_of_sigma(sigma)?;
            (theta / (2.0 * xi), 2.0 * uniform_gap(sigma).0)
        }
        Family::PTilde => {
            if sigma != 1.0 {
                return Err(domain_err(family, xi, sigma, "defined for sigma = 1"));
            }
            (2.0 * xi / (1.0 + 4.0 * xi * xi), 2.0 * mu_tilde(xi))
        }
        Family::EpsDefective { eps } => {
            if sigma != 2.0 {
                return Err(domain_err(family, xi, sigma, "defined for sigma = 2"));
            }
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::EpsTooLarge { eps, limit: 1.0 });
            }
            (theta_eps(eps) / (2.0 * xi), 2.0 * (1.0 - eps))
        }
        Family::LineCutoff { r } => {
            if sigma != 1.0 {
                return Err(domain_err(family, xi, sigma, "defined for sigma = 1"));
            }
            if !(r > 0.0 && r < 0.5) {
                return Err(Error::Range {
                    name: "R",
                    value: r,
                    range: "(0, 1/2)",
                });
            }
            if ax < r {
                return Err(domain_err(family, xi, sigma, "requires |xi| >= R"));
            }
            (2.0 * r * r / xi, 2.0 * modal_spectral_gap(r, 1.0))
        }
    };
    if kappa.abs() >= 1.0 {
        return Err(domain_err(family, xi, sigma, "matrix is not positive definite"));
    }
    Ok(DeformationMatrix {
        p: twisted_identity(kappa),
        certified_rate: rate,
        family,
        xi: Some(xi),
        sigma: Some(sigma),
    })
}

/// Checks `C*P + PC ≥ rate·P` and returns the modal certificate
/// `(cond P, rate)`.
pub fn certify(def: &DeformationMatrix, cm: &ComplexMatrix) -> Result<DecayCertificate> {
    if def.p.dim() != cm.dim() {
        return Err(Error::DimensionMismatch {
            expected: cm.dim(),
            found: def.p.dim(),
        });
    }
    let cond = def.cond()?;
    let residual = inequality_residual(cm, &def.p, def.certified_rate)?;
    if residual < -CERT_TOL {
        return Err(Error::CertificateViolation { residual });
    }
    Ok(DecayCertificate {
        mult_const: cond,
        rate: def.certified_rate,
        scope: Scope::Modal { xi: def.xi },
        residual,
    })
}

/// Per-mode entry of an assembled certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub family: String,
    pub xi: f64,
    pub sigma: f64,
    pub rate: f64,
    pub cond: f64,
    pub residual: f64,
}

/// Controls for the supremum over modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupPolicy {
    /// Largest `|ξ|` evaluated explicitly; beyond it every family's
    /// condition number decreases monotonically to 1.
    pub xi_max: usize,
    /// ε for the defective case `σ = 2`.
    pub eps: Option<f64>,
}

impl Default for SupPolicy {
    fn default() -> Self {
        Self {
            xi_max: DEFAULT_XI_MAX,
            eps: None,
        }
    }
}

/// Global certificate with the per-mode records behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub certificate: DecayCertificate,
    pub mu_bar: f64,
    pub xi_set: XiSet,
    /// Worst condition number over the slowest modes.
    pub c_xi: f64,
    pub modes: Vec<ModeRecord>,
}

fn is_defective_mode(xi: usize, sigma: f64) -> bool {
    (xi as f64 - 0.5 * sigma).abs() <= 1e-12 * sigma.max(1.0)
}

fn torus_modes(sigma: f64, policy: &SupPolicy) -> Vec<usize> {
    // Past σ/2 every family is P1-like and its condition number decreases,
    // so the cutoff must at least clear the defective mode.
    let need = (0.5 * sigma).ceil() as usize + 1;
    (1..=policy.xi_max.max(need)).collect()
}

fn eps_policy(sigma: f64, policy: &SupPolicy) -> Result<Option<f64>> {
    if sigma == 2.0 {
        match policy.eps {
            Some(eps) if eps > 0.0 && eps < 1.0 => Ok(Some(eps)),
            Some(eps) => Err(Error::EpsTooLarge { eps, limit: 1.0 }),
            None => Err(Error::DefectiveSigma { sigma }),
        }
    } else {
        Ok(None)
    }
}

fn record(def: &DeformationMatrix, sigma: f64, xi: f64) -> Result<ModeRecord> {
    let cert = certify(def, &gt_matrix(xi, sigma))?;
    Ok(ModeRecord {
        family: def.family.tag().to_string(),
        xi,
        sigma,
        rate: cert.rate,
        cond: cert.mult_const,
        residual: cert.residual,
    })
}

fn sharp_family(xi: usize, sigma: f64) -> Family {
    if is_defective_mode(xi, sigma) {
        Family::PBar
    } else if (xi as f64) > 0.5 * sigma {
        Family::P1
    } else {
        Family::P2
    }
}

fn finish(
    sigma: f64,
    records: Vec<ModeRecord>,
    c_xi: f64,
    rate_override: Option<f64>,
) -> StrategyOutcome {
    let (mu_bar, xi_set) = uniform_gap(sigma);
    let mult_const = records.iter().map(|r| r.cond).fold(1.0, f64::max);
    let residual = records.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    StrategyOutcome {
        certificate: DecayCertificate {
            mult_const,
            rate: rate_override.unwrap_or(2.0 * mu_bar),
            scope: Scope::GlobalTorus,
            residual,
        },
        mu_bar,
        xi_set,
        c_xi,
        modes: records,
    }
}

fn require_torus(system: &GtSystem) -> Result<()> {
    match system.domain {
        Domain::Torus => Ok(()),
        Domain::Line => Err(Error::UnsupportedDomain("line")),
    }
}

/// Strategy 1: sharp matrices `P⁽¹⁾`/`P⁽²⁾` on every mode, constant
/// `c̄_P = sup cond P(ξ)`, rate `2μ̄(σ)`.
pub fn assemble_strategy1(system: &GtSystem, policy: &SupPolicy) -> Result<StrategyOutcome> {
    require_torus(system)?;
    let sigma = system.sigma;
    let eps = eps_policy(sigma, policy)?;
    let modes = torus_modes(sigma, policy);
    let records = par::map(&modes, |&k| {
        let family = match eps {
            Some(eps) => Family::EpsDefective { eps },
            None => sharp_family(k, sigma),
        };
        record(&gt_p_family(k as f64, sigma, family)?, sigma, k as f64)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let c_xi = records[0].cond;
    let rate = eps.map(|e| 2.0 * (1.0 - e));
    Ok(finish(sigma, records, c_xi, rate))
}

/// Strategy 2: keep the sharp matrices on the slowest modes `Ξ`; on the
/// other modes keep `P(ξ)` when its condition number is at most
/// `c_Ξ`, otherwise switch to `P̄(ξ, θ(σ))`.
pub fn assemble_strategy2(system: &GtSystem, policy: &SupPolicy) -> Result<StrategyOutcome> {
    require_torus(system)?;
    let sigma = system.sigma;
    if let Some(eps) = eps_policy(sigma, policy)? {
        return assemble_strategy1(system, &SupPolicy { eps: Some(eps), ..*policy });
    }
    let (_, xi_set) = uniform_gap(sigma);
    let modes = torus_modes(sigma, policy);
    let slow: Vec<f64> = modes
        .iter()
        .filter(|&&k| xi_set.contains(k as f64))
        .map(|&k| gt_p_family(k as f64, sigma, sharp_family(k, sigma))?.cond())
        .collect::<Result<Vec<_>>>()?;
    let c_xi = slow.iter().copied().fold(1.0, f64::max);
    let records = par::map(&modes, |&k| {
        let xi = k as f64;
        let sharp = gt_p_family(xi, sigma, sharp_family(k, sigma))?;
        let chosen = if xi_set.contains(xi) || sharp.cond()? <= c_xi {
            sharp
        } else {
            gt_p_family(xi, sigma, Family::PBar)?
        };
        record(&chosen, sigma, xi)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(finish(sigma, records, c_xi, None))
}

fn center(len: usize) -> Result<usize> {
    if len % 2 == 0 {
        return Err(Error::InvalidInput(
            "modal arrays must have odd length 2N+1 (modes -N..=N)".into(),
        ));
    }
    Ok(len / 2)
}

fn check_pair(u: &[C64], v: &[C64]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    center(u.len())
}

/// `Σ_{ξ≠0} ‖ŷ(ξ)‖²_{P̄(ξ,θ)} + |v̂(0)|²` for normalized Fourier coefficients
/// `f̂(k) = (1/2π)∫ e^{−ikx} f dx` stored for `k = −N..=N`. The mean `û(0)`
/// is not part of the functional and is ignored.
pub fn entropy_theta(u_hat: &[C64], v_hat: &[C64], theta: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    let n = check_pair(u_hat, v_hat)?;
    let mut total = v_hat[n].norm_sqr();
    for idx in 0..u_hat.len() {
        if idx == n {
            continue;
        }
        let xi = idx as f64 - n as f64;
        let y = [u_hat[idx], v_hat[idx]];
        total += twisted_identity(theta / (2.0 * xi)).quad_form(&y);
    }
    Ok(total)
}

/// `2 Σ_{ξ≠0} H₁(ξ, δ̄(ξ,σ))[ŷ(ξ)]` with
/// `H₁(ξ,δ) = ½ ŷ* [[1, −iξδ/(1+ξ²)], [iξδ/(1+ξ²), 1]] ŷ`.
pub fn h1_tilde(u_hat: &[C64], v_hat: &[C64], sigma: f64) -> Result<f64> {
    let n = check_pair(u_hat, v_hat)?;
    let mut total = 0.0;
    for idx in 0..u_hat.len() {
        if idx == n {
            continue;
        }
        let xi = idx as f64 - n as f64;
        let d = delta_bar(xi, sigma)?;
        let kappa = xi * d / (1.0 + xi * xi);
        let y = [u_hat[idx], v_hat[idx]];
        total += 2.0 * 0.5 * twisted_identity(kappa).quad_form(&y);
    }
    Ok(total)
}

/// `Σ_{ξ≠0} ‖ŷ(ξ)‖²_{P̄(ξ,θ(σ))}`.
pub fn h2_tilde_functional(u_hat: &[C64], v_hat: &[C64], sigma: f64) -> Result<f64> {
    let theta = theta_of_sigma(sigma)?;
    let n = check_pair(u_hat, v_hat)?;
    let mut total = 0.0;
    for idx in 0..u_hat.len() {
        if idx == n {
            continue;
        }
        let xi = idx as f64 - n as f64;
        let y = [u_hat[idx], v_hat[idx]];
        total += twisted_identity(theta / (2.0 * xi)).quad_form(&y);
    }
    Ok(total)
}
