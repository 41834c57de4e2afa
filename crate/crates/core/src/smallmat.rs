//! Dense complex linear algebra for small matrices (dimension at most 16).
//!
//! Everything here is written for the 2×2 mode matrices of kinetic models and
//! their deformation matrices, with a general path for up to 16 velocities.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;
/// Relative tolerance of the Hermitian predicate.
pub const HERMIT_TOL: f64 = 1e-10;
/// Relative positive-definiteness threshold.
pub const PD_TOL: f64 = 1e-10;
/// Eigenvalue accuracy target of the QR iteration.
pub const EIG_TOL: f64 = 1e-10;
/// Radius (relative to `max(1, ‖A‖)`) within which eigenvalues are clustered.
pub const CLUSTER_RADIUS: f64 = 1e-8;
/// Rank threshold (relative to `max(1, ‖A‖)`) in the geometric multiplicity test.
pub const RANK_TOL: f64 = 1e-8;

const JACOBI_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(dim: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_2x2(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self {
            dim: 2,
            data: vec![a, b, c, d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `A − z I`.
    pub fn shift(&self, z: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] -= z;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        let diff = self - &self.adjoint();
        diff.norm_inf() <= HERMIT_TOL * self.norm_inf()
    }

    pub fn is_anti_hermitian(&self) -> bool {
        let sum = self + &self.adjoint();
        sum.norm_inf() <= HERMIT_TOL * self.norm_inf()
    }

    /// `(A + A*)/2`, used to strip rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Real part of `x* A x`; the quadratic form for Hermitian `A`.
    pub fn quad_form(&self, x: &[C64]) -> f64 {
        let ax = self.mul_vec(x);
        x.iter().zip(&ax).map(|(xi, yi)| xi.conj() * yi).sum::<C64>().re
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

/// Eigenvalues of a general matrix with per-eigenvalue defect flags.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<C64>,
    /// `true` when the eigenvalue's algebraic multiplicity exceeds its
    /// geometric multiplicity.
    pub defect_flags: Vec<bool>,
}

impl EigenResult {
    pub fn any_defective(&self) -> bool {
        self.defect_flags.iter().any(|&d| d)
    }
}

fn check_dim(a: &ComplexMatrix) -> Result<()> {
    if a.dim() > MAX_DIM {
        return Err(Error::DimensionMismatch {
            expected: MAX_DIM,
            found: a.dim(),
        });
    }
    Ok(())
}

fn require_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_hermitian() {
        let asym = (a - &a.adjoint()).norm_inf();
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_dim(a)?;
    require_hermitian(a)?;
    match a.dim() {
        1 => Ok(vec![a[(0, 0)].re]),
        2 => {
            let (p, q) = (a[(0, 0)].re, a[(1, 1)].re);
            let b = 0.5 * (a[(0, 1)] + a[(1, 0)].conj());
            let mid = 0.5 * (p + q);
            let r = (0.5 * (p - q)).hypot(b.norm());
            Ok(vec![mid - r, mid + r])
        }
        _ => Ok(jacobi(a).0),
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
/// Hermitian matrix.
pub fn eigh(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_dim(a)?;
    require_hermitian(a)?;
    Ok(jacobi(a))
}

/// Cyclic complex Jacobi iteration.
fn jacobi(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                let phase = apq / b;
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let theta = 0.5 * (2.0 * b).atan2(aqq - app);
                let (s, co) = theta.sin_cos();
                // W = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let w00 = C64::new(co, 0.0);
                let w01 = C64::new(s, 0.0);
                let w10 = -phase.conj() * s;
                let w11 = phase.conj() * co;
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x * w00 + y * w10;
                    m[(k, q)] = x * w01 + y * w11;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = w00.conj() * x + w10.conj() * y;
                    m[(q, k)] = w01.conj() * x + w11.conj() * y;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * w00 + y * w10;
                    v[(k, q)] = x * w01 + y * w11;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vecs = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    (values, vecs)
}

/// Eigenvalues of a general complex matrix with defect flags.
///
/// Dimension 2 uses the quadratic formula; larger matrices go through a
/// Householder reduction to Hessenberg form and shifted complex QR.
pub fn eig_general(a: &ComplexMatrix) -> Result<EigenResult> {
    check_dim(a)?;
    let n = a.dim();
    let mut values = match n {
        1 => vec![a[(0, 0)]],
        2 => {
            let mu = 0.5 * (a[(0, 0)] + a[(1, 1)]);
            let half = 0.5 * (a[(0, 0)] - a[(1, 1)]);
            let d = (half * half + a[(0, 1)] * a[(1, 0)]).sqrt();
            vec![mu - d, mu + d]
        }
        _ => hessenberg_qr(a)?,
    };
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let defect_flags = defect_flags(a, &values);
    Ok(EigenResult {
        values,
        defect_flags,
    })
}

fn defect_flags(a: &ComplexMatrix, values: &[C64]) -> Vec<bool> {
    let n = values.len();
    let scale = a.norm_inf().max(1.0);
    let radius = CLUSTER_RADIUS * scale;
    let mut cluster = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if cluster[i] != usize::MAX {
            continue;
        }
        cluster[i] = next;
        // Grow transitively so chains of nearby values form one cluster.
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            for j in 0..n {
                if cluster[j] == usize::MAX && (values[j] - values[k]).norm() <= radius {
                    cluster[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    let mut flags = vec![false; n];
    for id in 0..next {
        let members: Vec<usize> = (0..n).filter(|&i| cluster[i] == id).collect();
        if members.len() < 2 {
            continue;
        }
        let mean = members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64;
        let rank = numerical_rank(&a.shift(mean), RANK_TOL * scale);
        let geometric = n - rank;
        if geometric < members.len() {
            for &i in &members {
                flags[i] = true;
            }
        }
    }
    flags
}

/// Rank by Gaussian elimination with complete pivoting.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> usize {
    let n = a.dim();
    let mut m = a.clone();
    let mut rank = 0;
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                let v = m[(i, j)].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= tol {
            break;
        }
        rank += 1;
        for j in 0..n {
            let tmp = m[(k, j)];
            m[(k, j)] = m[(pi, j)];
            m[(pi, j)] = tmp;
        }
        for i in 0..n {
            let tmp = m[(i, k)];
            m[(i, k)] = m[(i, pj)];
            m[(i, pj)] = tmp;
        }
        let piv = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
        }
    }
    rank
}

fn hessenberg_qr(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = a.dim();
    let mut h = a.clone();
    // Householder reduction to upper Hessenberg form.
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm <= 1e-300 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * alpha_norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn <= 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H ← (I − 2vv*) H
        for j in 0..n {
            let dot: C64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= 2.0 * v[i - k - 1] * dot;
            }
        }
        // H ← H (I − 2vv*)
        for i in 0..n {
            let dot: C64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
            for j in k + 1..n {
                h[(i, j)] -= 2.0 * dot * v[j - k - 1].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }

    let max_iters = 200 * n;
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let eps = f64::EPSILON;
    let hnorm = h.norm_inf().max(f64::MIN_POSITIVE);
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let threshold = if diag > 0.0 { eps * diag } else { eps * hnorm };
            if sub <= threshold {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iters {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if since_deflation % 11 == 10 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = cs * x + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + cs * y;
            }
            rots.push((cs, sn));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (cs, sn) = rots[idx];
            for i in l..=(k + 2).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = cs * x + sn.conj() * y;
                h[(i, k + 1)] = -sn * x + cs * y;
            }
        }
        for i in l..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(values)
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` that zeroes `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let mu = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = (half * half + b * c).sqrt();
    let (l1, l2) = (mu + disc, mu - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Ratio of the extreme eigenvalues of a Hermitian positive definite matrix.
pub fn condition_number(p: &ComplexMatrix) -> Result<f64> {
    let ev = eig_hermitian(p)?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if hi <= 0.0 || lo <= PD_TOL * hi {
        return Err(Error::NotPositiveDefinite { smallest: lo });
    }
    Ok(hi / lo)
}

/// Largest eigenvalue of `M* M`, i.e. the squared spectral norm.
pub fn operator_norm_sq(m: &ComplexMatrix) -> f64 {
    let g = (&m.adjoint() * m).hermitian_part();
    let ev = eig_hermitian(&g).expect("Gram matrix is Hermitian by construction");
    ev[ev.len() - 1].max(0.0)
}

/// `e^{−C t}` for a 2×2 matrix.
pub fn expm_2x2(cm: &ComplexMatrix, t: f64) -> ComplexMatrix {
    expm_2x2_shifted(cm, t, 0.0)
}

/// `e^{−(C − ρ I) t}` for a 2×2 matrix.
///
/// The shift lets callers factor out a known decay `e^{−ρt}` so that long
/// horizons do not underflow. The formula is
/// `e^{−(μ−ρ)t} (cosh(dt) I − sinh(dt)/d · (C − μI))` with `μ = tr C / 2`
/// and `d² = ((a−d)/2)² + bc`; it is evaluated by a power series in `d²t²`
/// near coalescence and by exponentials otherwise, so no branch switch is
/// needed at a defective eigenvalue.
pub fn expm_2x2_shifted(cm: &ComplexMatrix, t: f64, rho: f64) -> ComplexMatrix {
    assert_eq!(cm.dim(), 2, "expm_2x2 needs a 2x2 matrix");
    let one = C64::new(1.0, 0.0);
    if t == 0.0 {
        return ComplexMatrix::identity(2);
    }
    let (a, b, cc, d) = (cm[(0, 0)], cm[(0, 1)], cm[(1, 0)], cm[(1, 1)]);
    let mu = 0.5 * (a + d) - rho;
    let half = 0.5 * (a - d);
    let d2 = half * half + b * cc;
    let z2 = d2 * t * t;
    let (ch, sh_over_d) = if z2.norm() < 0.01 {
        // cosh z = Σ z^{2k}/(2k)!,  sinh(z)/z = Σ z^{2k}/(2k+1)!
        let mut ch = one;
        let mut sh = one;
        let mut term_c = one;
        let mut term_s = one;
        for k in 1..=6 {
            let kf = k as f64;
            term_c = term_c * z2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            term_s = term_s * z2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            ch += term_c;
            sh += term_s;
        }
        let e = (-mu * t).exp();
        (e * ch, e * sh * t)
    } else {
        let dd = d2.sqrt();
        let ep = ((-mu + dd) * t).exp();
        let em = ((-mu - dd) * t).exp();
        (0.5 * (ep + em), (ep - em) / (2.0 * dd))
    };
    // e^{−μt}(cosh I − sinh/d · N), N = C − μ₀I with μ₀ the unshifted mean.
    ComplexMatrix::from_2x2(
        ch - sh_over_d * half,
        -sh_over_d * b,
        -sh_over_d * cc,
        ch + sh_over_d * half,
    )
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. Pivots
/// below `tiny` are replaced by `tiny`, which is what inverse iteration
/// wants near an exact eigenvalue.
pub fn solve(a: &ComplexMatrix, b: &[C64], tiny: f64) -> Vec<C64> {
    let n = a.dim();
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[(i, k)].norm() > m[(p, k)].norm() {
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            x.swap(k, p);
        }
        if m[(k, k)].norm() < tiny {
            m[(k, k)] = C64::new(tiny, 0.0);
        }
        let piv = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
            let t = x[k];
            x[i] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let s: C64 = (k + 1..n).map(|j| m[(k, j)] * x[j]).sum();
        x[k] = (x[k] - s) / m[(k, k)];
    }
    x
}

/// Unit eigenvector of `A` for the (simple) eigenvalue `lambda`, by inverse
/// iteration.
pub fn eigenvector(a: &ComplexMatrix, lambda: C64) -> Vec<C64> {
    let n = a.dim();
    let scale = a.norm_inf().max(1.0);
    let shifted = a.shift(lambda);
    let tiny = 1e-14 * scale;
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64))
        .collect();
    normalize(&mut x);
    for _ in 0..4 {
        x = solve(&shifted, &x, tiny);
        normalize(&mut x);
    }
    x
}

pub fn normalize(x: &mut [C64]) {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in x.iter_mut() {
            *z /= n;
        }
    }
}

pub fn vec_norm_sq(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}
