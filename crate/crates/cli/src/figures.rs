use hyporate::gt_sim::propagator_norm_sq;
use hyporate::modal_rates::{lambda_curve, Discriminant, RateCurve, Variant};
use hyporate::numeric::lin_grid;
use hyporate::par;
use hyporate::spectral_lyapunov::{modal_spectral_gap, mu_tilde};

use crate::commands::s_grid;
use crate::table::Table;
use crate::CliError;

pub const FIGURES: [&str; 7] = [
    "fig1_triangle",
    "fig2_lambdas",
    "fig3_deltas",
    "fig4_tilde",
    "fig5_gap",
    "fig6_hplus",
    "fig7_mutilde",
];

/// Times at which `h₊(t, ·)` is tabulated.
const HPLUS_TIMES: [f64; 3] = [1.0, 5.0, 10.0];

#[derive(Debug, Default)]
pub struct GridOverride {
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub points: Option<usize>,
}

impl GridOverride {
    fn log(&self) -> Result<Vec<f64>, CliError> {
        s_grid(
            self.s_min.unwrap_or(1e-3),
            self.s_max.unwrap_or(1e3),
            self.points.unwrap_or(400),
        )
    }

    /// Linear grid on `[0, 3]` by default; `s = 0` is allowed here.
    fn lin(&self) -> Result<Vec<f64>, CliError> {
        let (a, b, n) = (
            self.s_min.unwrap_or(0.0),
            self.s_max.unwrap_or(3.0),
            self.points.unwrap_or(601),
        );
        if n == 0 {
            return Err(CliError::Config("empty grid: --points must be at least 1".into()));
        }
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= a) {
            return Err(CliError::Config(format!("bad s range [{a}, {b}]")));
        }
        Ok(lin_grid(a, b, n))
    }
}

fn curves(grid: &[f64], vs: &[Variant]) -> Result<Vec<RateCurve>, CliError> {
    vs.iter()
        .map(|&v| lambda_curve(v, grid).map_err(CliError::from))
        .collect()
}

fn rate_table(name: &str, cols: Vec<&'static str>, grid: &[f64], vs: &[Variant], delta: bool) -> Result<Table, CliError> {
    let cs = curves(grid, vs)?;
    let mut t = Table::new(name, cols);
    for (i, &s) in grid.iter().enumerate() {
        let mut row = vec![s];
        row.extend(cs.iter().map(|c| if delta { c.points[i].delta } else { c.points[i].lambda }));
        t.push(row);
    }
    Ok(t)
}

/// The `(δ, λ)` triangle at one mode: for each `λ`, the admissible upper end
/// of `δ` and the subinterval where the discriminant is nonpositive (NaN
/// when empty).
fn triangle(s: f64, points: usize) -> Result<Table, CliError> {
    if !(s.is_finite() && s > 0.0) {
        return Err(CliError::Config(format!("--s must be positive, got {s}")));
    }
    if points < 3 {
        return Err(CliError::Config("fig1_triangle needs --points >= 3".into()));
    }
    let h = Discriminant::H1;
    let top = h.lambda_max();
    let mut t = Table::new("fig1_triangle", vec!["lambda", "delta_edge", "delta_lo", "delta_hi"]);
    for &l in &lin_grid(0.0, top, points)[1..points - 1] {
        let (lo, hi) = h.feasible_deltas(l, s).unwrap_or((f64::NAN, f64::NAN));
        t.push(vec![l, h.delta_max(l, s), lo, hi]);
    }
    Ok(t)
}

pub fn figure(name: &str, grid: &GridOverride, s: f64) -> Result<Table, CliError> {
    use Variant::*;
    match name {
        "fig1_triangle" => triangle(s, grid.points.unwrap_or(401)),
        "fig2_lambdas" => rate_table(
            name,
            vec!["s", "lambda0", "lambda1", "lambda2"],
            &grid.log()?,
            &[Lambda0, Lambda1, Lambda2],
            false,
        ),
        "fig3_deltas" => rate_table(
            name,
            vec!["s", "delta0", "delta1", "delta2"],
            &grid.log()?,
            &[Lambda0, Lambda1, Lambda2],
            true,
        ),
        "fig4_tilde" => rate_table(
            name,
            vec!["s", "lambda2", "lambda2_tilde"],
            &grid.log()?,
            &[Lambda2, Lambda2Tilde],
            false,
        ),
        "fig5_gap" => {
            let g = grid.log()?;
            let cs = curves(&g, &[Lambda2, Lambda2Tilde])?;
            let mut t = Table::new(name, vec!["s", "gap_scaled"]);
            for (i, &s) in g.iter().enumerate() {
                let gap = cs[0].points[i].lambda - cs[1].points[i].lambda;
                t.push(vec![s, gap * (1.0 + 1.0 / (s * s))]);
            }
            Ok(t)
        }
        "fig6_hplus" => {
            let g = grid.lin()?;
            let rows = par::map(&g, |&s| {
                let mut row = vec![s];
                row.extend(HPLUS_TIMES.iter().map(|&t| propagator_norm_sq(s, 1.0, t)));
                row
            });
            let mut t = Table::new(name, vec!["s", "h_plus_t1", "h_plus_t5", "h_plus_t10"]);
            rows.into_iter().for_each(|r| t.push(r));
            Ok(t)
        }
        "fig7_mutilde" => {
            let mut t = Table::new(name, vec!["s", "mu", "mu_tilde"]);
            for s in grid.lin()? {
                t.push(vec![s, modal_spectral_gap(s, 1.0), mu_tilde(s)]);
            }
            Ok(t)
        }
        _ => Err(CliError::Config(format!(
            "unknown figure {name:?}; valid names: {}",
            FIGURES.join(", ")
        ))),
    }
}
