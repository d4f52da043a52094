//! The group O(p,q), the real matrix ball, the Cayley map to wedge
//! sections, invariant densities, KAK coordinates and Haar sampling of K.
//!
//! Conventions:
//! * `J = diag(I_p, −I_q)` and `g` acts on the right,
//!   `z ↦ (a + z c)⁻¹ (b + z d)`, so `(g₁g₂)·z = g₂·(g₁·z)`.
//! * For `z = [B | A]` with `B` the first `p` columns, the Cayley map gives
//!   `L = −(1+B)⁻¹A` and `M + N = (1−B)(1+B)⁻¹`; the torus section
//!   `z_t = [tanh T | 0]` lands on `L = 0`, `M = diag(e^{−2t})`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::Serialize;

use crate::error::{Error, Result};

/// Entrywise tolerance of the group-membership test.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-10;

/// Condition number above which a linear solve is reported as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Largest torus coordinate accepted by [`kak_coordinates`].
pub const MAX_TORUS_COORDINATE: f64 = 20.0;

/// Degrees of freedom of the Student-t factors in [`sample_wedge`].
const PROPOSAL_DOF: f64 = 4.0;

/// Real matrix.
pub type Matrix = DMatrix<f64>;

/// An element of O(p,q) as a `(p+q)×(p+q)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    /// The matrix.
    pub matrix: Matrix,
    /// Positive index.
    pub p: usize,
    /// Negative index.
    pub q: usize,
}

/// A point of the real matrix ball: a `p×q` matrix of norm below one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallPoint {
    /// The matrix `z`.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub z: Matrix,
}

/// A point `(L, M, N)` of the wedge section.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgePoint {
    /// `p×(q−p)` block.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub l: Matrix,
    /// Symmetric `p×p` block.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub m: Matrix,
    /// Antisymmetric `p×p` block.
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub n: Matrix,
}

/// Torus coordinates `t_1, …, t_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusCoord {
    /// The coordinates.
    pub t: Vec<f64>,
}

fn j_matrix(p: usize, q: usize) -> Matrix {
    Matrix::from_fn(p + q, p + q, |i, k| if i != k { 0.0 } else if i < p { 1.0 } else { -1.0 })
}

fn condition_number(a: &Matrix) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn checked_inverse(a: &Matrix, what: &str) -> Result<Matrix> {
    let cond = condition_number(a);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::Singular(format!("{what} has condition number {cond:e}")));
    }
    a.clone().try_inverse().ok_or_else(|| Error::Singular(format!("{what} is not invertible")))
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

/// True iff `g J gᵀ = J` entrywise to [`MEMBERSHIP_TOLERANCE`].
pub fn group_membership(g: &Matrix, p: usize, q: usize) -> Result<bool> {
    let n = p + q;
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::Shape(format!("expected a {n}×{n} matrix, got {}×{}", g.nrows(), g.ncols())));
    }
    let j = j_matrix(p, q);
    let diff = g * &j * g.transpose() - j;
    Ok(diff.amax() <= MEMBERSHIP_TOLERANCE)
}

impl GroupElement {
    /// Wraps a matrix after checking membership.
    pub fn new(matrix: Matrix, p: usize, q: usize) -> Result<Self> {
        if !group_membership(&matrix, p, q)? {
            return Err(Error::Domain("matrix does not preserve the form J".into()));
        }
        Ok(Self { matrix, p, q })
    }

    /// The identity of O(p,q).
    pub fn identity(p: usize, q: usize) -> Self {
        Self { matrix: Matrix::identity(p + q, p + q), p, q }
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::Shape("group elements of different O(p,q)".into()));
        }
        Ok(GroupElement { matrix: &self.matrix * &other.matrix, p: self.p, q: self.q })
    }

    /// Inverse `J gᵀ J`.
    pub fn inverse(&self) -> GroupElement {
        let j = j_matrix(self.p, self.q);
        GroupElement { matrix: &j * self.matrix.transpose() * &j, p: self.p, q: self.q }
    }

    /// The element `diag(a, d)` of K = O(p)×O(q).
    pub fn from_k(a: &Matrix, d: &Matrix) -> Result<Self> {
        let (p, q) = (a.nrows(), d.nrows());
        if a.ncols() != p || d.ncols() != q {
            return Err(Error::Shape("K factors must be square".into()));
        }
        let mut m = Matrix::zeros(p + q, p + q);
        m.view_mut((0, 0), (p, p)).copy_from(a);
        m.view_mut((p, p), (q, q)).copy_from(d);
        Self::new(m, p, q)
    }

    fn blocks(&self) -> (Matrix, Matrix, Matrix, Matrix) {
        let (p, q) = (self.p, self.q);
        let g = &self.matrix;
        (
            g.view((0, 0), (p, p)).into_owned(),
            g.view((0, p), (p, q)).into_owned(),
            g.view((p, 0), (q, p)).into_owned(),
            g.view((p, p), (q, q)).into_owned(),
        )
    }
}

impl BallPoint {
    /// Wraps `z` after checking `‖z‖ < 1`.
    pub fn new(z: Matrix) -> Result<Self> {
        let norm = operator_norm(&z);
        if !(norm < 1.0) {
            return Err(Error::Domain(format!("ball point has norm {norm} >= 1")));
        }
        Ok(Self { z })
    }

    /// The origin of the `p×q` ball.
    pub fn origin(p: usize, q: usize) -> Self {
        Self { z: Matrix::zeros(p, q) }
    }

    /// Row count `p`.
    pub fn p(&self) -> usize {
        self.z.nrows()
    }

    /// Column count `q`.
    pub fn q(&self) -> usize {
        self.z.ncols()
    }
}

impl WedgePoint {
    /// Wraps `(L, M, N)` after checking symmetry and `M − LLᵀ ≻ 0`.
    pub fn new(l: Matrix, m: Matrix, n: Matrix) -> Result<Self> {
        let p = m.nrows();
        if m.ncols() != p || n.shape() != (p, p) || l.nrows() != p {
            return Err(Error::Shape("inconsistent wedge blocks".into()));
        }
        let scale = 1.0 + m.amax();
        if (&m - m.transpose()).amax() > 1e-12 * scale || (&n + n.transpose()).amax() > 1e-12 * (1.0 + n.amax()) {
            return Err(Error::Domain("M must be symmetric and N antisymmetric".into()));
        }
        let w = Self { l, m, n };
        w.log_minors()?;
        Ok(w)
    }

    /// The base point `L = 0, M = I, N = 0`.
    pub fn base(p: usize, q: usize) -> Self {
        Self { l: Matrix::zeros(p, q - p), m: Matrix::identity(p, p), n: Matrix::zeros(p, p) }
    }

    /// Rank `p`.
    pub fn p(&self) -> usize {
        self.m.nrows()
    }

    /// `W = M − LLᵀ`.
    pub fn w(&self) -> Matrix {
        &self.m - &self.l * self.l.transpose()
    }

    /// `ln det[W]_j` for the leading principal minors, `j = 1..p`.
    pub fn log_minors(&self) -> Result<Vec<f64>> {
        log_leading_minors_spd(&self.w())
    }

    /// `ln det[1+M+N]_j` for the leading principal minors, `j = 1..p`.
    pub fn log_shifted_minors(&self) -> Result<Vec<f64>> {
        let p = self.p();
        let s = Matrix::identity(p, p) + &self.m + &self.n;
        (1..=p)
            .map(|j| {
                let d = s.view((0, 0), (j, j)).into_owned().determinant();
                if d > 0.0 {
                    Ok(d.ln())
                } else {
                    Err(Error::Domain(format!("minor {j} of 1+M+N is {d}")))
                }
            })
            .collect()
    }
}

/// Leading principal log-minors of a symmetric positive definite matrix.
pub fn log_leading_minors_spd(w: &Matrix) -> Result<Vec<f64>> {
    let p = w.nrows();
    let chol = w
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Domain("M − LLᵀ is not positive definite".into()))?;
    let lower = chol.l();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        let d = lower[(j, j)];
        if !(d > 0.0) {
            return Err(Error::Domain("M − LLᵀ is not positive definite".into()));
        }
        acc += 2.0 * d.ln();
        out.push(acc);
    }
    Ok(out)
}

impl TorusCoord {
    /// Wraps a coordinate vector.
    pub fn new(t: Vec<f64>) -> Self {
        Self { t }
    }

    /// The representative with `t_1 ≥ … ≥ t_p ≥ 0`.
    pub fn canonical(&self) -> TorusCoord {
        let mut t: Vec<f64> = self.t.iter().map(|x| x.abs()).collect();
        t.sort_by(|a, b| b.total_cmp(a));
        TorusCoord { t }
    }

    /// `∏ cosh^{−α} t_k`.
    pub fn cosh_power(&self, alpha: f64) -> f64 {
        self.t.iter().map(|x| x.cosh().powf(-alpha)).product()
    }
}

/// The hyperbolic torus element `a_t` with blocks in coordinates `(k, p+k)`.
pub fn torus_element(t: &TorusCoord, q: usize) -> Result<GroupElement> {
    let p = t.t.len();
    if p > q {
        return Err(Error::Shape(format!("need p <= q, got p={p}, q={q}")));
    }
    let mut m = Matrix::identity(p + q, p + q);
    for (k, &x) in t.t.iter().enumerate() {
        m[(k, k)] = x.cosh();
        m[(p + k, p + k)] = x.cosh();
        m[(k, p + k)] = x.sinh();
        m[(p + k, k)] = x.sinh();
    }
    Ok(GroupElement { matrix: m, p, q })
}

/// `z ↦ (a + z c)⁻¹ (b + z d)`.
pub fn mobius_action(g: &GroupElement, z: &BallPoint) -> Result<BallPoint> {
    if z.p() != g.p || z.q() != g.q {
        return Err(Error::Shape("ball point and group element dimensions differ".into()));
    }
    let (a, b, c, d) = g.blocks();
    let lhs = a + &z.z * c;
    let inv = checked_inverse(&lhs, "a + z c")?;
    Ok(BallPoint { z: inv * (b + &z.z * d) })
}

/// The torus section point `z_t = [tanh T | 0]`.
pub fn torus_ball_point(t: &TorusCoord, q: usize) -> BallPoint {
    let p = t.t.len();
    let mut z = Matrix::zeros(p, q);
    for (k, &x) in t.t.iter().enumerate() {
        z[(k, k)] = x.tanh();
    }
    BallPoint { z }
}

/// Cayley map from the ball to the wedge section.
pub fn cayley_to_wedge(z: &BallPoint) -> Result<WedgePoint> {
    let (p, q) = (z.p(), z.q());
    if p > q {
        return Err(Error::Shape(format!("need p <= q, got p={p}, q={q}")));
    }
    let b = z.z.view((0, 0), (p, p)).into_owned();
    let a = z.z.view((0, p), (p, q - p)).into_owned();
    let id = Matrix::identity(p, p);
    let inv = checked_inverse(&(&id + &b), "1 + B")?;
    let l = -(&inv * a);
    let k = (&id - &b) * &inv;
    let kt = k.transpose();
    let m = (&k + &kt) * 0.5;
    let n = (&k - &kt) * 0.5;
    Ok(WedgePoint { l, m, n })
}

/// `artanh` of the singular values of `g·0`, sorted descending.
pub fn kak_coordinates(g: &GroupElement) -> Result<TorusCoord> {
    let z = mobius_action(g, &BallPoint::origin(g.p, g.q))?;
    ball_torus_coordinates(&z)
}

/// `artanh` of the singular values of `z`, sorted descending.
pub fn ball_torus_coordinates(z: &BallPoint) -> Result<TorusCoord> {
    let sv = z.z.clone().svd(false, false).singular_values;
    let mut t = Vec::with_capacity(sv.len());
    for &x in sv.iter() {
        let v = x.atanh();
        if !(v <= MAX_TORUS_COORDINATE) {
            return Err(Error::Domain(format!("torus coordinate {v} exceeds {MAX_TORUS_COORDINATE}")));
        }
        t.push(v);
    }
    Ok(TorusCoord { t }.canonical())
}

/// Completes orthonormal rows `v` (`p×q`) to an orthogonal `q×q` matrix whose first rows are `v`.
fn complete_rows(v: &Matrix) -> Matrix {
    let (p, q) = (v.nrows(), v.ncols());
    let mut cols = Matrix::zeros(q, p + q);
    cols.view_mut((0, 0), (q, p)).copy_from(&v.transpose());
    cols.view_mut((0, p), (q, q)).copy_from(&Matrix::identity(q, q));
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(q);
    for j in 0..p + q {
        if basis.len() == q {
            break;
        }
        let mut c = cols.column(j).into_owned();
        for b in &basis {
            let proj = b.dot(&c);
            c -= b * proj;
        }
        let norm = c.norm();
        if j < p || norm > 1e-8 {
            basis.push(c / norm);
        }
    }
    let mut out = Matrix::zeros(q, q);
    for (i, b) in basis.iter().enumerate() {
        out.row_mut(i).copy_from(&b.transpose());
    }
    out
}

/// A group element `g` with `g·0 = z`, built as `a_t · diag(Uᵀ, Vᵀ)` from `z = UΣVᵀ`.
pub fn transporter(z: &BallPoint) -> Result<GroupElement> {
    let q = z.q();
    if !(operator_norm(&z.z) < 1.0) {
        return Err(Error::Domain("transporter needs a point of the open ball".into()));
    }
    let svd = z.z.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Singular("SVD failed".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Singular("SVD failed".into()))?;
    let t = TorusCoord::new(svd.singular_values.iter().map(|x| x.atanh()).collect());
    let a_t = torus_element(&t, q)?;
    let d = complete_rows(&vt);
    let k = GroupElement::from_k(&u.transpose(), &d)?;
    a_t.compose(&k)
}

/// Haar-distributed element of O(n): QR of a Gaussian matrix with the signs of `diag R` absorbed.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar sample `diag(a, d)` of K = O(p)×O(q).
pub fn haar_sample_k<R: Rng + ?Sized>(p: usize, q: usize, rng: &mut R) -> GroupElement {
    let a = haar_orthogonal(p, rng);
    let d = haar_orthogonal(q, rng);
    let mut m = Matrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(&a);
    m.view_mut((p, p), (q, q)).copy_from(&d);
    GroupElement { matrix: m, p, q }
}

/// `det(1 − zzᵀ)^{−(p+q)/2}`.
pub fn ball_invariant_density(z: &BallPoint) -> Result<f64> {
    let (p, q) = (z.p(), z.q());
    let d = (Matrix::identity(p, p) - &z.z * z.z.transpose()).determinant();
    if !(d > 0.0) {
        return Err(Error::Domain("point outside the open ball".into()));
    }
    Ok(d.powf(-((p + q) as f64) / 2.0))
}

/// `det(M − LLᵀ)^{−(p+q)/2}`.
pub fn wedge_invariant_density(w: &WedgePoint) -> Result<f64> {
    let p = w.p();
    let q = p + w.l.ncols();
    let lm = w.log_minors()?;
    Ok((-((p + q) as f64) / 2.0 * lm[p - 1]).exp())
}

/// Coordinates `(L, M_{i≤j}, N_{i<j})` of a wedge point, in a fixed order.
pub fn wedge_coordinates(w: &WedgePoint) -> Vec<f64> {
    let p = w.p();
    let mut v: Vec<f64> = w.l.iter().copied().collect();
    for i in 0..p {
        for j in i..p {
            v.push(w.m[(i, j)]);
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            v.push(w.n[(i, j)]);
        }
    }
    v
}

/// `|det ∂(L,M,N)/∂z|` of the Cayley map at `z`, by central differences.
pub fn cayley_jacobian(z: &BallPoint, step: f64) -> Result<f64> {
    let (p, q) = (z.p(), z.q());
    let dim = p * q;
    let mut jac = Matrix::zeros(dim, dim);
    for c in 0..dim {
        let (i, j) = (c % p, c / p);
        let mut plus = z.z.clone();
        let mut minus = z.z.clone();
        plus[(i, j)] += step;
        minus[(i, j)] -= step;
        let fp = wedge_coordinates(&cayley_to_wedge(&BallPoint { z: plus })?);
        let fm = wedge_coordinates(&cayley_to_wedge(&BallPoint { z: minus })?);
        for r in 0..dim {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * step);
        }
    }
    Ok(jac.determinant().abs())
}

/// The constant `c` with `dλ = c · det(M−LLᵀ)^{−(p+q)/2} dL dM dN`, measured at the origin.
pub fn cayley_measure_constant(p: usize, q: usize) -> Result<f64> {
    let z = BallPoint::origin(p, q);
    let (coarse, fine) = (cayley_jacobian(&z, 2e-4)?, cayley_jacobian(&z, 1e-4)?);
    // Richardson step: the central-difference error is even in the step.
    Ok(3.0 / (4.0 * fine - coarse))
}

/// A wedge sample and the log of its proposal density with respect to `dL dM dN`.
#[derive(Clone, Debug)]
pub struct WedgeSample {
    /// The sampled point.
    pub point: WedgePoint,
    /// Lower-triangular `C` with `W = M − LLᵀ = CCᵀ`.
    pub chol: Matrix,
    /// Log proposal density.
    pub log_density: f64,
}

impl WedgeSample {
    /// `ln det[W]_j = 2 Σ_{i≤j} ln C_ii`, free of the cancellation in `M − LLᵀ`.
    pub fn log_minors(&self) -> Vec<f64> {
        let mut acc = 0.0;
        (0..self.chol.nrows())
            .map(|i| {
                acc += 2.0 * self.chol[(i, i)].ln();
                acc
            })
            .collect()
    }
}

fn student_log_pdf(x: f64) -> f64 {
    // ν = 4: Γ(5/2)/(√(4π)Γ(2)) = 3/8.
    (3.0f64 / 8.0).ln() - 2.5 * (1.0 + x * x / PROPOSAL_DOF).ln()
}

/// Importance sample of the wedge section.
///
/// `W = CCᵀ` with `C` lower triangular, `ln C_ii` and `C_ij` Student-t
/// (ν = 4) of width `scale`; `L` has Student-t entries of width
/// `scale·√(1+tr W)`; `M = W + LLᵀ`; the upper entries of `N` are Student-t
/// of width `scale·(1 + tr M)`.  The returned log-density includes the
/// Jacobian `2^p ∏ C_ii^{p−i+1}` of `C ↦ W`.
pub fn sample_wedge<R: Rng + ?Sized>(p: usize, q: usize, scale: f64, rng: &mut R) -> Result<WedgeSample> {
    if !(scale > 0.0) {
        return Err(Error::Precondition(format!("proposal scale must be positive, got {scale}")));
    }
    if p == 0 || p > q {
        return Err(Error::Precondition(format!("need 1 <= p <= q, got p={p}, q={q}")));
    }
    let t = StudentT::new(PROPOSAL_DOF).expect("valid degrees of freedom");
    let ln_scale = scale.ln();
    let mut log_q = -(p as f64) * std::f64::consts::LN_2;
    let mut c = Matrix::zeros(p, p);
    for i in 0..p {
        let x: f64 = scale * t.sample(rng);
        c[(i, i)] = x.exp();
        log_q += student_log_pdf(x / scale) - ln_scale - x;
        log_q -= (p - i) as f64 * x;
        for j in 0..i {
            let y: f64 = scale * t.sample(rng);
            c[(i, j)] = y;
            log_q += student_log_pdf(y / scale) - ln_scale;
        }
    }
    let w = &c * c.transpose();
    let sd_l = scale * (1.0 + w.trace()).sqrt();
    let mut l = Matrix::zeros(p, q - p);
    for v in l.iter_mut() {
        let y: f64 = sd_l * t.sample(rng);
        *v = y;
        log_q += student_log_pdf(y / sd_l) - sd_l.ln();
    }
    let m = &w + &l * l.transpose();
    let sd_n = scale * (1.0 + m.trace());
    let mut n = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i + 1..p {
            let y: f64 = sd_n * t.sample(rng);
            n[(i, j)] = y;
            n[(j, i)] = -y;
            log_q += student_log_pdf(y / sd_n) - sd_n.ln();
        }
    }
    Ok(WedgeSample { point: WedgePoint { l, m, n }, chol: c, log_density: log_q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn scalar_cayley() {
        let w = cayley_to_wedge(&BallPoint::new(Matrix::from_element(1, 1, 0.3)).unwrap()).unwrap();
        assert!((w.m[(0, 0)] - 0.7 / 1.3).abs() < 1e-15);
        assert_eq!(w.l.ncols(), 0);
    }

    #[test]
    fn torus_section_lands_on_diagonal() {
        let t = TorusCoord::new(vec![0.9, 0.2]);
        let w = cayley_to_wedge(&torus_ball_point(&t, 4)).unwrap();
        assert!(w.l.amax() < 1e-15);
        assert!((w.m[(0, 0)] - (-1.8f64).exp()).abs() < 1e-14);
        assert!((w.m[(1, 1)] - (-0.4f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn measure_constant_at_origin() {
        for (p, q) in [(1, 1), (1, 3), (2, 2), (2, 3)] {
            let c = cayley_measure_constant(p, q).unwrap();
            let expected = 2f64.powi(-((p * (p + 1) / 2) as i32));
            assert!((c / expected - 1.0).abs() < 1e-8, "p={p} q={q}: {c}");
        }
    }

    #[test]
    fn sampler_points_are_valid() {
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            let s = sample_wedge(2, 3, 0.5, &mut rng).unwrap();
            assert!(s.point.log_minors().is_ok());
            assert!(s.log_density.is_finite());
        }
    }
}
