//! Small fixed-dimension complex linear algebra.
//!
//! Everything here works on `N x N` matrices with `N` known at compile time
//! (2 and 4 for the physics, 8 for the real embedding used by the Takagi
//! factorization). Basis order for two-qubit operators is
//! `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances shared by the substrate routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum entry of `|h - h^†|` accepted as Hermitian.
    pub herm: f64,
    /// Most negative eigenvalue accepted as "positive semidefinite".
    pub psd: f64,
    /// Smallest Gram determinant (or relative pivot) accepted as independent.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-10,
            rank: 1e-12,
        }
    }
}

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Dense `N x N` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix<const N: usize> {
    data: [[C64; N]; N],
}

pub type Mat2 = CMatrix<2>;
pub type Mat4 = CMatrix<4>;

/// Complex column vector of length `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVector<const N: usize>(pub [C64; N]);

pub type Vec2 = CVector<2>;
pub type Vec4 = CVector<4>;

impl<const N: usize> Default for CMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        Self {
            data: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = [[ZERO; N]; N];
        for (i, row) in data.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        }
        Self { data }
    }

    pub fn from_rows(data: [[C64; N]; N]) -> Self {
        Self { data }
    }

    /// Real matrix given row by row.
    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(d: [f64; N]) -> Self {
        Self::from_fn(|i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
    }

    /// Builds a matrix from a row-major slice of length `N * N`.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        if entries.len() != N * N {
            return Err(Error::DimensionMismatch {
                expected: N * N,
                got: entries.len(),
            });
        }
        Ok(Self::from_fn(|i, j| entries[i * N + j]))
    }

    pub fn row_major(&self) -> Vec<C64> {
        self.data.iter().flatten().copied().collect()
    }

    pub fn rows(&self) -> &[[C64; N]; N] {
        &self.data
    }

    pub const fn dim(&self) -> usize {
        N
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.data[i][j].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.data[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    pub fn mul_vec(&self, v: &CVector<N>) -> CVector<N> {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.data[i][j] * v.0[j]).sum();
        }
        CVector(out)
    }

    /// `⟨a|self|b⟩`.
    pub fn sandwich(&self, a: &CVector<N>, b: &CVector<N>) -> C64 {
        a.dot(&self.mul_vec(b))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn off_diagonal_frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    acc += self.data[i][j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// `max |h - h^†|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |t - t^T|` over entries.
    pub fn symmetry_error(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flatten()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Positive-definiteness test of `self + shift * I` by Cholesky.
    ///
    /// Returns true iff every pivot is strictly positive, i.e. (for Hermitian
    /// input) the smallest eigenvalue exceeds `-shift`.
    pub fn is_psd_shifted(&self, shift: f64) -> bool {
        let mut l = [[ZERO; N]; N];
        for j in 0..N {
            let mut d = self.data[j][j].re + shift;
            for lk in &l[j][..j] {
                d -= lk.norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let djj = d.sqrt();
            l[j][j] = C64::new(djj, 0.0);
            for i in (j + 1)..N {
                let mut s = self.data[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k].conj();
                }
                l[i][j] = s / djj;
            }
        }
        true
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl<const N: usize> Neg for CMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.data[i][j])
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.data[i][k] * rhs.data[k][j]).sum())
    }
}

impl<const N: usize> Mul<f64> for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_real(rhs)
    }
}

impl<const N: usize> Default for CVector<N> {
    fn default() -> Self {
        Self([ZERO; N])
    }
}

impl<const N: usize> CVector<N> {
    pub fn zeros() -> Self {
        Self([ZERO; N])
    }

    pub fn basis(k: usize) -> Self {
        let mut v = [ZERO; N];
        v[k] = ONE;
        Self(v)
    }

    pub fn from_real(x: [f64; N]) -> Self {
        Self(x.map(|r| C64::new(r, 0.0)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|x| x.conj()))
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale_real(1.0 / n))
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> CMatrix<N> {
        CMatrix::from_fn(|i, j| self.0[i] * other.0[j].conj())
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix<N> {
        self.outer(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies by the phase that makes the first largest-modulus component
    /// real and positive.
    pub fn phase_normalized(&self) -> Self {
        let mut best = 0;
        let mut best_mod = -1.0;
        for (k, x) in self.0.iter().enumerate() {
            // first index wins unless a later one is clearly larger
            if x.norm() > best_mod * (1.0 + 1e-12) + 1e-300 {
                best = k;
                best_mod = x.norm();
            }
        }
        if best_mod <= 0.0 {
            return *self;
        }
        let phase = self.0[best].conj() / best_mod;
        self.scale(phase)
    }
}

impl<const N: usize> Index<usize> for CVector<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for CVector<N> {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for CVector<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Self(out)
    }
}

impl<const N: usize> Sub for CVector<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Self(out)
    }
}

/// Pauli `σ_y` in the local basis `{|↑⟩, |↓⟩}`.
pub fn pauli_y() -> Mat2 {
    Mat2::from_rows([[ZERO, -I], [I, ZERO]])
}

/// `σ_y ⊗ σ_y`.
pub fn sigma_yy() -> Mat4 {
    let y = pauli_y();
    tensor(&y, &y)
}

/// Kronecker product of two single-qubit operators.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Kronecker product of two single-qubit kets.
pub fn tensor_vec(a: &Vec2, b: &Vec2) -> Vec4 {
    CVector([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
}

/// Which tensor factor a partial transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Subsystem {
    First,
    #[default]
    Second,
}

/// Partial transpose of a two-qubit operator.
pub fn partial_transpose(rho: &Mat4, subsystem: Subsystem) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let (a, b) = (i / 2, i % 2);
        let (c, d) = (j / 2, j % 2);
        match subsystem {
            Subsystem::Second => rho[(2 * a + d, 2 * c + b)],
            Subsystem::First => rho[(2 * c + b, 2 * a + d)],
        }
    })
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEig<const N: usize> {
    /// Eigenvalues in descending order.
    pub values: [f64; N],
    /// Orthonormal eigenvectors, `vectors[k]` belongs to `values[k]`.
    pub vectors: [CVector<N>; N],
}

impl<const N: usize> HermitianEig<N> {
    /// `Σ_k values[k] |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self) -> CMatrix<N> {
        self.map_values(|x| x)
    }

    /// Applies `f` to the spectrum and rebuilds the operator.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix<N> {
        let mut out = CMatrix::zeros();
        for (v, vec) in self.values.iter().zip(self.vectors.iter()) {
            out = out + vec.projector().scale_real(f(*v));
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values[N - 1]
    }
}

pub fn hermitian_eig<const N: usize>(h: &CMatrix<N>) -> Result<HermitianEig<N>> {
    hermitian_eig_with(h, &Tolerances::default())
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig_with<const N: usize>(
    h: &CMatrix<N>,
    tol: &Tolerances,
) -> Result<HermitianEig<N>> {
    let herr = h.hermiticity_error();
    if !(herr <= tol.herm) {
        return Err(Error::NotHermitian(herr));
    }
    let mut a = (*h + h.adjoint()).scale_real(0.5);
    let mut v = CMatrix::<N>::identity();
    let scale = a.frobenius();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_frobenius() <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    let diag: Vec<f64> = (0..N).map(|k| a[(k, k)].re).collect();
    let vecs: Vec<CVector<N>> = (0..N)
        .map(|k| CVector(std::array::from_fn(|i| v[(i, k)])).phase_normalized())
        .collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    // Near-equal eigenvalues are ordered by their (phase-fixed) eigenvectors.
    let tie = 1e-12 * diag.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut start = 0;
    while start < N {
        let mut end = start + 1;
        while end < N && diag[order[end - 1]] - diag[order[end]] <= tie {
            end += 1;
        }
        order[start..end].sort_by(|&x, &y| lex_desc(&vecs[x], &vecs[y]));
        start = end;
    }

    Ok(HermitianEig {
        values: std::array::from_fn(|k| diag[order[k]]),
        vectors: std::array::from_fn(|k| vecs[order[k]]),
    })
}

fn lex_desc<const N: usize>(a: &CVector<N>, b: &CVector<N>) -> std::cmp::Ordering {
    for (x, y) in a.0.iter().zip(b.0.iter()) {
        let o = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

fn jacobi_rotate<const N: usize>(a: &mut CMatrix<N>, v: &mut CMatrix<N>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = diag(1, e^{-iφ}) · real rotation, restricted to the (p, q) plane.
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

pub fn psd_sqrt<const N: usize>(h: &CMatrix<N>) -> Result<CMatrix<N>> {
    psd_sqrt_with(h, &Tolerances::default())
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-tol.psd, 0)` are clamped to zero.
pub fn psd_sqrt_with<const N: usize>(h: &CMatrix<N>, tol: &Tolerances) -> Result<CMatrix<N>> {
    let eig = hermitian_eig_with(h, tol)?;
    let min = eig.min_value();
    if min < -tol.psd {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.map_values(|x| x.max(0.0).sqrt()))
}

/// Small dense complex square matrix used for Gram and coefficient systems.
type Dense = Vec<Vec<C64>>;

/// Gauss-Jordan inverse with partial pivoting. Returns the inverse and the
/// determinant, or `None` when a pivot falls below `rel_tol * max|a|`.
fn invert_dense(a: &Dense, rel_tol: f64) -> Option<(Dense, C64)> {
    let n = a.len();
    let scale = a.iter().flatten().map(|x| x.norm()).fold(0.0_f64, f64::max);
    if n == 0 {
        return Some((Vec::new(), ONE));
    }
    if !(scale > 0.0) {
        return None;
    }
    let mut m = a.clone();
    let mut inv: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let mut det = ONE;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
            .unwrap();
        if m[piv][col].norm() <= rel_tol * scale {
            return None;
        }
        if piv != col {
            m.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let d = m[col][col];
        det *= d;
        for j in 0..n {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != ZERO {
                    for j in 0..n {
                        let mc = m[col][j];
                        let ic = inv[col][j];
                        m[row][j] -= f * mc;
                        inv[row][j] -= f * ic;
                    }
                }
            }
        }
    }
    Some((inv, det))
}

fn gram<const N: usize>(vectors: &[CVector<N>]) -> Dense {
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| a.dot(b)).collect())
        .collect()
}

/// Determinant of the Gram matrix `⟨φ_i|φ_j⟩`.
pub fn gram_determinant<const N: usize>(vectors: &[CVector<N>]) -> f64 {
    match invert_dense(&gram(vectors), 0.0) {
        Some((_, det)) => det.re,
        None => 0.0,
    }
}

pub fn dual_basis<const N: usize>(vectors: &[CVector<N>]) -> Result<Vec<CVector<N>>> {
    dual_basis_with(vectors, &Tolerances::default())
}

/// Dual vectors `φ̂_i` in the span of `vectors` with `⟨φ̂_i|φ_j⟩ = δ_ij`.
pub fn dual_basis_with<const N: usize>(
    vectors: &[CVector<N>],
    tol: &Tolerances,
) -> Result<Vec<CVector<N>>> {
    if vectors.len() > N {
        return Err(Error::RankDeficient(0.0));
    }
    let g = gram(vectors);
    let det = match invert_dense(&g, 0.0) {
        Some((_, d)) => d.norm(),
        None => 0.0,
    };
    if !(det > tol.rank) {
        return Err(Error::RankDeficient(det));
    }
    let (ginv, _) = invert_dense(&g, 0.0).ok_or(Error::RankDeficient(det))?;
    Ok((0..vectors.len())
        .map(|i| {
            vectors
                .iter()
                .enumerate()
                .fold(CVector::zeros(), |acc, (j, v)| acc + v.scale(ginv[j][i]))
        })
        .collect())
}

pub fn restricted_inverse<const N: usize>(
    m: &CMatrix<N>,
    range_basis: &[CVector<N>],
) -> Result<CMatrix<N>> {
    restricted_inverse_with(m, range_basis, &Tolerances::default())
}

/// Inverse of `m` restricted to the span of `range_basis`.
///
/// With `m = Σ a_ij |φ_i⟩⟨φ_j|` the result is `Σ b_ij |φ̂_i⟩⟨φ̂_j|` where
/// `b = a^{-1}`; the coefficients are recovered as `a_ij = ⟨φ̂_i|m|φ̂_j⟩`.
pub fn restricted_inverse_with<const N: usize>(
    m: &CMatrix<N>,
    range_basis: &[CVector<N>],
    tol: &Tolerances,
) -> Result<CMatrix<N>> {
    let duals = dual_basis_with(range_basis, tol)?;
    let a: Dense = duals
        .iter()
        .map(|di| duals.iter().map(|dj| m.sandwich(di, dj)).collect())
        .collect();
    let (b, _) = invert_dense(&a, tol.rank).ok_or(Error::SingularOnRange)?;
    let mut out = CMatrix::zeros();
    for (i, di) in duals.iter().enumerate() {
        for (j, dj) in duals.iter().enumerate() {
            out = out + di.outer(dj).scale(b[i][j]);
        }
    }
    Ok(out)
}

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix, dropping
/// eigenvalues at or below `cutoff`.
pub fn psd_pseudo_inverse<const N: usize>(h: &CMatrix<N>, cutoff: f64) -> Result<CMatrix<N>> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_values(|x| if x > cutoff { 1.0 / x } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(entries: &[f64]) -> Mat4 {
        let mut m = Mat4::zeros();
        let mut k = 0;
        for i in 0..4 {
            m[(i, i)] = c(entries[k], 0.0);
            k += 1;
            for j in (i + 1)..4 {
                m[(i, j)] = c(entries[k], entries[k + 1]);
                m[(j, i)] = m[(i, j)].conj();
                k += 2;
            }
        }
        m
    }

    #[test]
    fn tensor_examples() {
        let id = Mat2::identity();
        assert_eq!(tensor(&id, &id), Mat4::identity());

        let yy = sigma_yy();
        let expected = Mat4::from_real([
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ]);
        assert!(yy.max_abs_diff(&expected) < 1e-15);

        let d = tensor(&Mat2::diag_real([2.0, 3.0]), &Mat2::diag_real([5.0, 7.0]));
        assert_eq!(d, Mat4::diag_real([10.0, 14.0, 15.0, 21.0]));
    }

    #[test]
    fn eig_examples() {
        let e = hermitian_eig(&Mat4::identity()).unwrap();
        assert_eq!(e.values, [1.0; 4]);
        let e = hermitian_eig(&Mat4::diag_real([1.0, 4.0, 2.0, 3.0])).unwrap();
        assert_eq!(e.values, [4.0, 3.0, 2.0, 1.0]);
        let e = hermitian_eig(&sigma_yy()).unwrap();
        for (got, want) in e.values.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(e.reconstruct().max_abs_diff(&sigma_yy()) < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = Mat4::identity();
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_is_deterministic_on_degenerate_spectrum() {
        let a = hermitian_eig(&Mat4::identity()).unwrap();
        for (k, v) in a.vectors.iter().enumerate() {
            assert_eq!(*v, Vec4::basis(k));
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        assert!(
            psd_sqrt(&Mat4::identity())
                .unwrap()
                .max_abs_diff(&Mat4::identity())
                < 1e-14
        );
        let r = psd_sqrt(&Mat4::diag_real([4.0, 1.0, 0.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&Mat4::diag_real([2.0, 1.0, 0.0, 3.0])) < 1e-14);
        let phi = CVector([c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(-0.5, 0.0)]);
        let p = phi.projector();
        assert!(psd_sqrt(&p).unwrap().max_abs_diff(&p) < 1e-12);
        assert!(matches!(
            psd_sqrt(&Mat4::diag_real([1.0, 1.0, 1.0, -0.1])),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn partial_transpose_examples() {
        let a = Mat2::from_rows([[c(1.0, 0.0), c(2.0, 1.0)], [c(3.0, -1.0), c(4.0, 0.5)]]);
        let b = Mat2::from_rows([[c(0.5, 0.0), c(0.0, 1.0)], [c(2.0, 0.0), c(-1.0, 0.0)]]);
        let ab = tensor(&a, &b);
        assert_eq!(
            partial_transpose(&ab, Subsystem::Second),
            tensor(&a, &b.transpose())
        );
        assert_eq!(
            partial_transpose(&ab, Subsystem::First),
            tensor(&a.transpose(), &b)
        );

        let d = Mat4::diag_real([0.1, 0.2, 0.3, 0.4]);
        assert_eq!(partial_transpose(&d, Subsystem::Second), d);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Vec4::from_real([s, 0.0, 0.0, s]).projector();
        let e = hermitian_eig(&partial_transpose(&bell, Subsystem::Second)).unwrap();
        assert!((e.min_value() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn dual_basis_examples() {
        let e: Vec<Vec4> = (0..4).map(Vec4::basis).collect();
        let d = dual_basis(&e).unwrap();
        for (x, y) in d.iter().zip(&e) {
            assert!(x.max_abs_diff(y) < 1e-15);
        }

        let e1 = Vec4::basis(0);
        let e2 = Vec4::basis(1);
        let d = dual_basis(&[e1, e1 + e2]).unwrap();
        assert!(d[0].max_abs_diff(&(e1 - e2)) < 1e-14);
        assert!(d[1].max_abs_diff(&e2) < 1e-14);

        assert!(matches!(
            dual_basis(&[e1, e1.scale_real(2.0)]),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn restricted_inverse_examples() {
        let m = Mat4::diag_real([1.0, 2.0, 4.0, 8.0]);
        let basis: Vec<Vec4> = (0..4).map(Vec4::basis).collect();
        let inv = restricted_inverse(&m, &basis).unwrap();
        assert!(inv.max_abs_diff(&Mat4::diag_real([1.0, 0.5, 0.25, 0.125])) < 1e-14);

        let phi = CVector([c(1.0, 0.0), c(0.0, 2.0), c(0.5, 0.0), ZERO]);
        let m = phi.projector().scale_real(3.0);
        let inv = restricted_inverse(&m, &[phi]).unwrap();
        let hat = dual_basis(&[phi]).unwrap()[0];
        assert!(inv.max_abs_diff(&hat.projector().scale_real(1.0 / 3.0)) < 1e-14);
    }

    #[test]
    fn restricted_inverse_rank_two_matches_direct_solve() {
        // M = L1 |z1><z1| + L2 |z2><z2|, compared against an explicit 2x2
        // solve of M x = z1 inside span{z1, z2}.
        let z1 = CVector([c(0.3, 0.1), c(0.2, -0.4), c(0.0, 0.5), c(0.1, 0.0)]);
        let z2 = CVector([c(-0.2, 0.0), c(0.6, 0.1), c(0.3, 0.3), c(0.0, -0.2)]);
        let (l1, l2) = (0.7, 0.2);
        let m = z1.projector().scale_real(l1) + z2.projector().scale_real(l2);
        let inv = restricted_inverse(&m, &[z1, z2]).unwrap();

        // Brute force: x = c1 z1 + c2 z2 with M x = z1 gives
        // l1 c1 <z1|z1> + l1 c2 <z1|z2> = 1 and l2 c1 <z2|z1> + l2 c2 <z2|z2> = 0.
        let g11 = z1.dot(&z1);
        let g12 = z1.dot(&z2);
        let g21 = z2.dot(&z1);
        let g22 = z2.dot(&z2);
        let det = l1 * l2 * (g11 * g22 - g12 * g21);
        let c1 = l2 * g22 / det;
        let c2 = -l2 * g21 / det;
        let x = z1.scale(c1) + z2.scale(c2);
        let direct = z1.dot(&x);
        let via_duals = inv.sandwich(&z1, &z1);
        assert!((direct - via_duals).norm() < 1e-12);
        assert!(via_duals.re > 0.0);
    }

    #[test]
    fn cholesky_psd_test() {
        assert!(Mat4::identity().is_psd_shifted(0.0));
        assert!(!Mat4::diag_real([1.0, 1.0, 1.0, -1e-6]).is_psd_shifted(1e-9));
        assert!(Mat4::diag_real([1.0, 1.0, 1.0, -1e-12]).is_psd_shifted(1e-9));
    }

    fn herm_entries() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0..10.0_f64, 16)
    }

    fn vec_entries() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0..1.0_f64, 8)
    }

    fn cvec(x: &[f64]) -> Vec4 {
        CVector(std::array::from_fn(|k| c(x[2 * k], x[2 * k + 1])))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn eig_reconstructs(entries in herm_entries()) {
            let h = random_hermitian(&entries);
            let e = hermitian_eig(&h).unwrap();
            prop_assert!(e.reconstruct().max_abs_diff(&h) <= 1e-10);
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((e.vectors[i].dot(&e.vectors[j]) - want).norm() < 1e-10);
                }
            }
            for w in e.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }

        #[test]
        fn sqrt_squares_back(entries in herm_entries()) {
            let g = random_hermitian(&entries);
            let h = g * g;
            let r = psd_sqrt(&h).unwrap();
            prop_assert!((r * r).max_abs_diff(&h) <= 1e-9 * h.max_abs().max(1.0));
        }

        #[test]
        fn partial_transpose_is_involution(entries in herm_entries(), first in any::<bool>()) {
            let h = random_hermitian(&entries);
            let s = if first { Subsystem::First } else { Subsystem::Second };
            prop_assert_eq!(partial_transpose(&partial_transpose(&h, s), s), h);
        }

        #[test]
        fn partial_transpose_spectrum_is_subsystem_independent(entries in herm_entries()) {
            let h = random_hermitian(&entries);
            let a = hermitian_eig(&partial_transpose(&h, Subsystem::First)).unwrap();
            let b = hermitian_eig(&partial_transpose(&h, Subsystem::Second)).unwrap();
            for (x, y) in a.values.iter().zip(b.values.iter()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn biduality(a in vec_entries(), b in vec_entries(), c3 in vec_entries()) {
            let vs = [cvec(&a), cvec(&b), cvec(&c3)];
            prop_assume!(gram_determinant(&vs) > 1e-6);
            let d = dual_basis(&vs).unwrap();
            for (i, di) in d.iter().enumerate() {
                for (j, vj) in vs.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((di.dot(vj) - want).norm() < 1e-9);
                }
            }
            let dd = dual_basis(&d).unwrap();
            for (x, y) in dd.iter().zip(vs.iter()) {
                prop_assert!(x.max_abs_diff(y) < 1e-9);
            }
            // Gram of duals is the inverse Gram of the inputs.
            let g = gram(&vs);
            let gd = gram(&d);
            for i in 0..3 {
                for j in 0..3 {
                    let prod: C64 = (0..3).map(|k| g[i][k] * gd[k][j]).sum();
                    let want = if i == j { ONE } else { ZERO };
                    prop_assert!((prod - want).norm() < 1e-8);
                }
            }
        }

        #[test]
        fn restricted_inverse_is_identity_on_span(
            a in vec_entries(), b in vec_entries(), w in proptest::collection::vec(0.1..2.0_f64, 2)
        ) {
            let vs = [cvec(&a), cvec(&b)];
            prop_assume!(gram_determinant(&vs) > 1e-4);
            let m = vs[0].projector().scale_real(w[0]) + vs[1].projector().scale_real(w[1]);
            let inv = restricted_inverse(&m, &vs).unwrap();
            for v in &vs {
                let back = m.mul_vec(&inv.mul_vec(v));
                prop_assert!(back.max_abs_diff(v) < 1e-9);
            }
        }
    }
}
