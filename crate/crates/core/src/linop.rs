//! Dense complex Hermitian linear algebra.
//!
//! Everything downstream (states, tests, decoders) is carried by
//! [`HermitianOperator`]. Spectral decompositions cluster nearly degenerate
//! eigenvalues into a single projector, which is what makes the pinching map
//! [`pinch`] stable: pinching onto exact eigenprojectors of a numerically
//! perturbed matrix would split degenerate eigenspaces and break the
//! projection property.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Hermiticity tolerance, relative to the largest entry magnitude.
pub const TAU_HERM: f64 = 1e-10;
/// Strict-positivity cutoff for `{X > 0}`: eigenvalues in (-TAU_ZERO, TAU_ZERO]
/// count as non-positive.
pub const TAU_ZERO: f64 = 1e-10;

fn herm_residual(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A finite-dimensional complex Hermitian matrix, symmetrized at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Checks Hermiticity (relative residual below [`TAU_HERM`]) and stores
    /// the exactly symmetrized matrix (H + H*)/2.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimMismatch(mat.nrows(), mat.ncols()));
        }
        if mat.nrows() == 0 {
            return Err(Error::Empty("zero-dimensional operator".into()));
        }
        let residual = herm_residual(&mat);
        let scale = 1.0 + max_abs(&mat);
        if residual > TAU_HERM * scale {
            return Err(Error::NotHermitian(residual));
        }
        Ok(Self::symmetrize(mat))
    }

    /// Symmetrizes without the residual check. For internal constructions
    /// that are Hermitian up to roundoff by design.
    pub(crate) fn symmetrize(mat: CMatrix) -> Self {
        let adj = mat.adjoint();
        HermitianOperator {
            mat: (mat + adj).scale(0.5),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        HermitianOperator { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator {
            mat: self.mat.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        Ok(HermitianOperator {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        Ok(HermitianOperator {
            mat: &self.mat - &other.mat,
        })
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    /// Real part of Tr[self * other].
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        // Tr[AB] = sum_{ij} A_ij B_ji
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        Ok(acc.re)
    }
}

/// Spectral decomposition with eigenvalue clustering: strictly decreasing
/// distinct eigenvalues, one projector per cluster.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<HermitianOperator>,
}

impl SpectralDecomposition {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Sum of a_i E_i.
    pub fn reconstruct(&self) -> HermitianOperator {
        let dim = self.projectors[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (a, e) in self.eigenvalues.iter().zip(&self.projectors) {
            m += e.matrix().scale(*a);
        }
        HermitianOperator::symmetrize(m)
    }

    /// Sum of f(a_i) E_i over eigenvalues with |a_i| > `tau_zero`; clusters at
    /// or below the cutoff are annihilated (pseudo-function convention).
    pub fn apply_on_support(&self, tau_zero: f64, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let dim = self.projectors[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (a, e) in self.eigenvalues.iter().zip(&self.projectors) {
            if a.abs() > tau_zero {
                m += e.matrix().scale(f(*a));
            }
        }
        HermitianOperator::symmetrize(m)
    }

    /// Sum of f(a_i) E_i over all clusters, including (near-)zero ones.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let dim = self.projectors[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (a, e) in self.eigenvalues.iter().zip(&self.projectors) {
            m += e.matrix().scale(f(*a));
        }
        HermitianOperator::symmetrize(m)
    }

    /// Projector onto eigenvalues strictly above `tau_zero`.
    pub fn positive_projector(&self, tau_zero: f64) -> Projector {
        let dim = self.projectors[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (a, e) in self.eigenvalues.iter().zip(&self.projectors) {
            if *a > tau_zero {
                m += e.matrix();
            }
        }
        Projector(HermitianOperator::symmetrize(m))
    }

    /// Projector onto eigenvalues of magnitude above `tau_zero`.
    pub fn support_projector(&self, tau_zero: f64) -> Projector {
        let dim = self.projectors[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (a, e) in self.eigenvalues.iter().zip(&self.projectors) {
            if a.abs() > tau_zero {
                m += e.matrix();
            }
        }
        Projector(HermitianOperator::symmetrize(m))
    }
}

/// Orthogonal projector: Hermitian with P^2 = P.
#[derive(Debug, Clone)]
pub struct Projector(HermitianOperator);

impl Projector {
    /// Validates idempotence within 1e-9.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let p2 = op.matrix() * op.matrix();
        let residual = max_abs(&(p2 - op.matrix()));
        if residual > 1e-9 {
            return Err(Error::Numerical(format!(
                "projector idempotence residual {residual:.3e}"
            )));
        }
        Ok(Projector(op))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        self.0.trace().round() as usize
    }

    pub fn complement(&self) -> Projector {
        let id = CMatrix::identity(self.dim(), self.dim());
        Projector(HermitianOperator::symmetrize(id - self.0.matrix()))
    }
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Debug, Clone)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    /// Validates smallest eigenvalue >= -1e-10 and unit trace within 1e-10.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min_eig = op
            .matrix()
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::InvalidDensity(format!(
                "smallest eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityOperator(op))
    }

    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        DensityOperator::new(HermitianOperator::new(mat)?)
    }

    /// Pure state |v><v| / <v|v>.
    pub fn pure(v: &DVector<C64>) -> Result<Self> {
        let norm2 = v.dot(&v.map(|z| z.conj())).re;
        if norm2 <= 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let m = v * v.adjoint();
        DensityOperator::new(HermitianOperator::symmetrize(m.scale(1.0 / norm2)))
    }

    /// Diagonal (classical) state from a probability vector.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        DensityOperator::new(HermitianOperator::from_real_diag(probs))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator(HermitianOperator::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Default clustering tolerance: relative to the spectral radius so that
/// badly scaled inputs still get their degenerate eigenvalues grouped.
pub fn default_cluster_tol(spectral_radius: f64) -> f64 {
    1e-8 * (spectral_radius + 1.0)
}

fn decompose_pairs(eigenvalues: &DVector<f64>, eigenvectors: &CMatrix, tau_cluster: f64) -> SpectralDecomposition {
    let dim = eigenvectors.nrows();
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eigenvalues[j].partial_cmp(&eigenvalues[i]).unwrap());

    let mut values = Vec::new();
    let mut projectors = Vec::new();
    let mut idx = 0;
    while idx < order.len() {
        let mut end = idx + 1;
        while end < order.len() && eigenvalues[order[end - 1]] - eigenvalues[order[end]] <= tau_cluster {
            end += 1;
        }
        let cluster = &order[idx..end];
        let mean = cluster.iter().map(|&i| eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let mut proj = CMatrix::zeros(dim, dim);
        for &i in cluster {
            let v = eigenvectors.column(i);
            proj += v * v.adjoint();
        }
        values.push(mean);
        projectors.push(HermitianOperator::symmetrize(proj));
        idx = end;
    }
    SpectralDecomposition {
        eigenvalues: values,
        projectors,
    }
}

/// Spectral decomposition with explicit clustering tolerance.
pub fn spectral_decompose(h: &HermitianOperator, tau_cluster: f64) -> Result<SpectralDecomposition> {
    if !(tau_cluster > 0.0) {
        return Err(Error::Numerical(format!(
            "cluster tolerance must be positive, got {tau_cluster}"
        )));
    }
    let eig = h.matrix().clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        let residual = herm_residual(h.matrix());
        return Err(Error::Numerical(format!(
            "eigensolver produced non-finite eigenvalues (hermiticity residual {residual:.3e})"
        )));
    }
    Ok(decompose_pairs(&eig.eigenvalues, &eig.eigenvectors, tau_cluster))
}

/// Spectral decomposition with the default relative clustering tolerance.
pub fn spectral_decompose_auto(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let eig = h.matrix().clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        let residual = herm_residual(h.matrix());
        return Err(Error::Numerical(format!(
            "eigensolver produced non-finite eigenvalues (hermiticity residual {residual:.3e})"
        )));
    }
    let radius = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(decompose_pairs(
        &eig.eigenvalues,
        &eig.eigenvectors,
        default_cluster_tol(radius),
    ))
}

/// Projector onto the strictly positive eigenspace {H > 0}.
pub fn proj_pos(h: &HermitianOperator) -> Result<Projector> {
    Ok(spectral_decompose_auto(h)?.positive_projector(TAU_ZERO))
}

/// Projector onto the support of H (eigenvalues of magnitude above TAU_ZERO).
pub fn support_projector(h: &HermitianOperator) -> Result<Projector> {
    Ok(spectral_decompose_auto(h)?.support_projector(TAU_ZERO))
}

/// Pinching of `b` by the clustered eigenprojectors of `a`:
/// sum_i E_i b E_i.
pub fn pinch(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let decomp = spectral_decompose_auto(a)?;
    Ok(pinch_with(&decomp, b))
}

/// Pinching with a precomputed decomposition of the pinching operator.
pub fn pinch_with(decomp: &SpectralDecomposition, b: &HermitianOperator) -> HermitianOperator {
    let dim = b.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for e in &decomp.projectors {
        m += e.matrix() * b.matrix() * e.matrix();
    }
    HermitianOperator::symmetrize(m)
}

/// Hilbert-Schmidt inner product Tr[A* B] on arbitrary (not necessarily
/// Hermitian) operators.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::DimMismatch(a.nrows(), b.nrows()));
    }
    Ok((a.adjoint() * b).trace())
}

/// Kronecker product with a dimension guard.
pub fn kron(a: &CMatrix, b: &CMatrix, max_dim: usize) -> Result<CMatrix> {
    let out = a.nrows() as u128 * b.nrows() as u128;
    if out > max_dim as u128 {
        return Err(Error::DimLimitExceeded {
            dim: out,
            limit: max_dim,
        });
    }
    Ok(a.kronecker(b))
}

/// n-fold Kronecker power, n >= 1.
pub fn kron_power(a: &CMatrix, n: usize, max_dim: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Empty("kron_power requires n >= 1".into()));
    }
    let out = (a.nrows() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if out > max_dim as u128 {
        return Err(Error::DimLimitExceeded {
            dim: out,
            limit: max_dim,
        });
    }
    let mut acc = a.clone();
    for _ in 1..n {
        acc = acc.kronecker(a);
    }
    Ok(acc)
}

pub fn kron_herm(a: &HermitianOperator, b: &HermitianOperator, max_dim: usize) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrize(kron(a.matrix(), b.matrix(), max_dim)?))
}

pub fn kron_power_herm(a: &HermitianOperator, n: usize, max_dim: usize) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrize(kron_power(a.matrix(), n, max_dim)?))
}

/// Block-diagonal direct sum of a nonempty list of operators.
pub fn direct_sum(blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.is_empty() {
        return Err(Error::Empty("direct_sum of no blocks".into()));
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = CMatrix::zeros(rows, cols);
    let mut r = 0;
    let mut c = 0;
    for b in blocks {
        m.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    Ok(m)
}

/// Trace norm: sum of singular values.
pub fn trace_norm(a: &CMatrix) -> f64 {
    a.clone().svd(false, false).singular_values.iter().sum()
}

/// Square root of a PSD Hermitian operator; eigenvalues in [-TAU_ZERO, 0)
/// are clamped to zero, anything below that is an error.
pub fn matrix_sqrt(h: &HermitianOperator) -> Result<HermitianOperator> {
    let decomp = spectral_decompose_auto(h)?;
    if let Some(&min) = decomp
        .eigenvalues
        .iter()
        .filter(|a| **a < -TAU_ZERO)
        .next()
    {
        return Err(Error::NegativeEigenvalue(min));
    }
    Ok(decomp.apply(|a| if a > 0.0 { a.sqrt() } else { 0.0 }))
}
