use clap::ValueEnum;
use serde::Serialize;

use hyporate::decay_bounds::{
    envelope_csv, envelope_table, gt_line_global_bound, gt_line_ptilde_bound, psi_envelope,
    EnvelopeSample, NashProfile,
};
use hyporate::gt_sim::{
    line_trajectory, time_grid, torus_trajectory, verify_certificate, verify_log_envelope,
    worst_case_search, LineField, TorusField, VerificationReport, DEFAULT_LINE_H,
    DEFAULT_LINE_XI_MAX, WORST_CASE_ANGLES,
};
use hyporate::modal_rates::{lambda_curve, Variant};
use hyporate::numeric::log_grid;
use hyporate::par;
use hyporate::spectral_lyapunov::{
    assemble_strategy1, assemble_strategy2, theta_of_sigma, DecayCertificate, GtSystem,
    StrategyOutcome, SupPolicy,
};
use hyporate::Error;

use crate::table::{fmt_f64, to_json, Table};
use crate::{CliError, Format, Output};

/// Squared sup norm of the Fourier transform of the Gaussian preset.
const GAUSSIAN_L1_SQ: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Torus: `u = cos x`, `v = 0`.
    Cosine,
    /// Torus: seeded random modes with amplitude `1/(1+k)`.
    Random,
    /// Torus: one mode pair with angle `--phi`.
    Single,
    /// Torus: one mode pair at the angle maximizing the envelope ratio.
    Worst,
    /// Line: Gaussian Fourier profile.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// GT on the line with the two-regime modal estimate.
    Line,
    /// GT on the line with the single interpolating matrix.
    LineTilde,
    /// Nash envelope of the heat equation.
    Heat,
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(config(format!("{name} must be positive and finite, got {v}")))
    }
}

pub fn s_grid(s_min: f64, s_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(config("empty grid: --points must be at least 1"));
    }
    positive("--s-min", s_min)?;
    positive("--s-max", s_max)?;
    if s_max < s_min || (points > 1 && s_max == s_min) {
        return Err(config(format!("--s-min {s_min} must lie below --s-max {s_max}")));
    }
    Ok(log_grid(s_min, s_max, points))
}

fn times(grid: (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
    Ok(time_grid(grid.0, grid.1, grid.2)?)
}

pub fn rates(s_min: f64, s_max: f64, points: usize, format: Format) -> Result<Output, CliError> {
    let grid = s_grid(s_min, s_max, points)?;
    let curves = [Variant::Lambda0, Variant::Lambda1, Variant::Lambda2, Variant::Lambda2Tilde]
        .map(|v| lambda_curve(v, &grid));
    let mut t = Table::new(
        "rates",
        vec![
            "s",
            "lambda0",
            "lambda1",
            "lambda2",
            "lambda2_tilde",
            "delta0",
            "delta1",
            "delta2",
            "delta2_tilde",
        ],
    );
    let mut cs = Vec::with_capacity(4);
    for c in curves {
        cs.push(c?);
    }
    for (i, &s) in grid.iter().enumerate() {
        let mut row = vec![s];
        row.extend(cs.iter().map(|c| c.points[i].lambda));
        row.extend(cs.iter().map(|c| c.points[i].delta));
        t.push(row);
    }
    crate::table::render(&t, format)
}

#[derive(Debug, Serialize)]
pub struct StrategyEntry {
    pub error: Option<String>,
    #[serde(flatten)]
    pub outcome: Option<StrategyOutcome>,
}

/// Both torus strategies and the better of the two certificates.
pub struct Certified {
    pub strategy1: StrategyEntry,
    pub strategy2: StrategyEntry,
    pub best: (&'static str, DecayCertificate),
}

fn certify_both(sigma: f64, xi_max: usize, eps: Option<f64>) -> Result<Certified, CliError> {
    positive("--sigma", sigma)?;
    if xi_max == 0 {
        return Err(config("--xi-max must be at least 1"));
    }
    if let Some(e) = eps {
        positive("--eps", e)?;
    }
    let sys = GtSystem::torus(sigma)?;
    let policy = SupPolicy { xi_max, eps };
    let results = [
        ("strategy1", assemble_strategy1(&sys, &policy)),
        ("strategy2", assemble_strategy2(&sys, &policy)),
    ];
    for (_, r) in &results {
        if let Err(e @ Error::CertificateViolation { .. }) = r {
            return Err(CliError::Certification(e.to_string()));
        }
    }
    let mut best: Option<(&'static str, DecayCertificate)> = None;
    for (name, r) in &results {
        if let Ok(o) = r {
            let c = o.certificate;
            let better = match best {
                None => true,
                Some((_, b)) => c.rate > b.rate || (c.rate == b.rate && c.mult_const < b.mult_const),
            };
            if better {
                best = Some((name, c));
            }
        }
    }
    let [(_, r1), (_, r2)] = results;
    let best = match best {
        Some(b) => b,
        None => return Err(r1.unwrap_err().into()),
    };
    let entry = |r: hyporate::Result<StrategyOutcome>| match r {
        Ok(o) => StrategyEntry {
            error: None,
            outcome: Some(o),
        },
        Err(e) => StrategyEntry {
            error: Some(e.to_string()),
            outcome: None,
        },
    };
    Ok(Certified {
        strategy1: entry(r1),
        strategy2: entry(r2),
        best,
    })
}

#[derive(Debug, Serialize)]
struct CertifyReport {
    sigma: f64,
    theta: Option<f64>,
    eps: Option<f64>,
    xi_max: usize,
    strategy: &'static str,
    rate: f64,
    mult_const: f64,
    norm_const: f64,
    strategy1: StrategyEntry,
    strategy2: StrategyEntry,
}

pub fn certify(sigma: f64, xi_max: usize, eps: Option<f64>, format: Format) -> Result<Output, CliError> {
    let c = certify_both(sigma, xi_max, eps)?;
    let (strategy, cert) = c.best;
    let body = match format {
        Format::Json => to_json(&CertifyReport {
            sigma,
            theta: theta_of_sigma(sigma).ok(),
            eps,
            xi_max,
            strategy,
            rate: cert.rate,
            mult_const: cert.mult_const,
            norm_const: cert.norm_const(),
            strategy1: c.strategy1,
            strategy2: c.strategy2,
        })?,
        Format::Csv => {
            let mut out = String::from("strategy,family,xi,sigma,rate,cond,residual\n");
            for (name, e) in [("strategy1", &c.strategy1), ("strategy2", &c.strategy2)] {
                for m in e.outcome.iter().flat_map(|o| &o.modes) {
                    out.push_str(&format!(
                        "{name},{},{},{},{},{},{}\n",
                        m.family,
                        fmt_f64(m.xi),
                        fmt_f64(m.sigma),
                        fmt_f64(m.rate),
                        fmt_f64(m.cond),
                        fmt_f64(m.residual)
                    ));
                }
            }
            out
        }
    };
    Ok(Output { body, failure: None })
}

pub struct SimConfig {
    pub sigma: f64,
    pub preset: Preset,
    pub seed: u64,
    pub modes: usize,
    pub mode: usize,
    pub phi: f64,
    pub eps: Option<f64>,
    pub xi_max: usize,
    pub times: (f64, f64, usize),
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Envelope {
    Exponential {
        strategy: &'static str,
        rate: f64,
        mult_const: f64,
    },
    Line {
        l1_sq: f64,
        l2_sq: f64,
    },
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    preset: Preset,
    sigma: f64,
    envelope: Envelope,
    report: VerificationReport,
}

fn require_unit_sigma(sigma: f64) -> Result<(), CliError> {
    if sigma == 1.0 {
        Ok(())
    } else {
        Err(config(format!("the line envelopes are derived for sigma = 1, got {sigma}")))
    }
}

pub fn simulate(cfg: &SimConfig, format: Format) -> Result<Output, CliError> {
    positive("--sigma", cfg.sigma)?;
    let ts = times(cfg.times)?;
    let (envelope, report) = if cfg.preset == Preset::Gaussian {
        require_unit_sigma(cfg.sigma)?;
        let field = LineField::gaussian(DEFAULT_LINE_H, DEFAULT_LINE_XI_MAX)?;
        let l2_sq = field.norm_sq();
        let traj = line_trajectory(&field, cfg.sigma, &ts);
        let rep = verify_log_envelope(&traj, |t| gt_line_global_bound(t, GAUSSIAN_L1_SQ, l2_sq).bound.ln());
        (
            Envelope::Line {
                l1_sq: GAUSSIAN_L1_SQ,
                l2_sq,
            },
            rep,
        )
    } else {
        if cfg.modes == 0 {
            return Err(config("--modes must be at least 1"));
        }
        let single = matches!(cfg.preset, Preset::Single | Preset::Worst);
        if single && !(1..=cfg.modes).contains(&cfg.mode) {
            return Err(config(format!("--mode must lie in 1..={}", cfg.modes)));
        }
        let (strategy, cert) = certify_both(cfg.sigma, cfg.xi_max, cfg.eps)?.best;
        let field = match cfg.preset {
            Preset::Cosine => TorusField::cosine(cfg.modes),
            Preset::Random => TorusField::random(cfg.modes, cfg.seed),
            Preset::Single => TorusField::single_mode(cfg.modes, cfg.mode, cfg.phi)?,
            Preset::Worst => {
                let (phi, _) = worst_case_search(cfg.mode as f64, cfg.sigma, &cert, &ts, WORST_CASE_ANGLES);
                TorusField::single_mode(cfg.modes, cfg.mode, phi)?
            }
            Preset::Gaussian => unreachable!(),
        };
        let traj = torus_trajectory(&field, cfg.sigma, &ts);
        (
            Envelope::Exponential {
                strategy,
                rate: cert.rate,
                mult_const: cert.mult_const,
            },
            verify_certificate(&cert, &traj),
        )
    };
    let failure = (!report.pass).then(|| {
        format!("envelope exceeded: ratio {} at t = {}", report.max_ratio, report.argmax_t)
    });
    let body = match format {
        Format::Csv => report.to_csv(),
        Format::Json => to_json(&SimulateReport {
            preset: cfg.preset,
            sigma: cfg.sigma,
            envelope,
            report,
        })?,
    };
    Ok(Output { body, failure })
}

pub struct BoundConfig {
    pub kind: BoundKind,
    pub sigma: f64,
    pub preset: Preset,
    pub l1_sq: Option<f64>,
    pub l2_sq: Option<f64>,
    pub dim: u32,
    pub bracket: (f64, f64),
    pub times: (f64, f64, usize),
}

#[derive(Debug, Serialize)]
struct BoundReport {
    kind: BoundKind,
    sigma: f64,
    l1_sq: f64,
    l2_sq: f64,
    rows: Vec<EnvelopeSample>,
}

/// Squared norms of the initial data: explicit overrides, else the preset.
fn data_norms(cfg: &BoundConfig) -> Result<(f64, f64), CliError> {
    let from_preset = || -> Result<(f64, f64), CliError> {
        match cfg.preset {
            Preset::Gaussian => {
                let f = LineField::gaussian(DEFAULT_LINE_H, DEFAULT_LINE_XI_MAX)?;
                Ok((GAUSSIAN_L1_SQ, f.norm_sq()))
            }
            p => Err(config(format!(
                "preset {p:?} has no line data; pass --l1-sq and --l2-sq"
            ))),
        }
    };
    let (l1, l2) = match (cfg.l1_sq, cfg.l2_sq) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => {
            let (pa, pb) = from_preset()?;
            (a.unwrap_or(pa), b.unwrap_or(pb))
        }
    };
    Ok((positive("--l1-sq", l1)?, positive("--l2-sq", l2)?))
}

pub fn bound(cfg: &BoundConfig, format: Format) -> Result<Output, CliError> {
    let ts = times(cfg.times)?;
    let (l1_sq, l2_sq, rows) = match cfg.kind {
        BoundKind::Line | BoundKind::LineTilde => {
            require_unit_sigma(cfg.sigma)?;
            let (l1, l2) = data_norms(cfg)?;
            let rows = if cfg.kind == BoundKind::Line {
                envelope_table(&ts, |t| gt_line_global_bound(t, l1, l2))
            } else {
                envelope_table(&ts, |t| gt_line_ptilde_bound(t, l1, l2))
            };
            (l1, l2, rows)
        }
        BoundKind::Heat => {
            let l1 = positive("--l1-sq", cfg.l1_sq.unwrap_or(1.0))?;
            let l2 = positive("--l2-sq", cfg.l2_sq.unwrap_or(1.0))?;
            if cfg.dim == 0 {
                return Err(config("--dim must be at least 1"));
            }
            let p = NashProfile::heat(cfg.dim, l1.sqrt(), l2.sqrt())?;
            let rows = par::map(&ts, |&t| psi_envelope(t, &p, cfg.bracket))
                .into_iter()
                .collect::<hyporate::Result<Vec<_>>>()?;
            (l1, l2, rows)
        }
    };
    let body = match format {
        Format::Csv => envelope_csv(&rows),
        Format::Json => to_json(&BoundReport {
            kind: cfg.kind,
            sigma: cfg.sigma,
            l1_sq,
            l2_sq,
            rows,
        })?,
    };
    Ok(Output { body, failure: None })
}
