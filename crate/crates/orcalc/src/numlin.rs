//! Dense-linear-algebra substrate.
//!
//! Everything downstream works with complex double precision and funnels
//! every rank, inclusion or equality decision through one [`TolerancePolicy`].
//! The module provides canonical subspaces (deterministic rank-revealing
//! orthonormalization), Moore-Penrose pseudoinverses, positive square roots
//! and the polar decomposition of selfadjoint matrices.
//!
//! Canonicality matters: two spanning sets of the same subspace must produce
//! the same basis, not merely the same projector, so that block
//! decompositions taken against a subspace are reproducible. The basis is
//! extracted from the orthogonal projector (a function of the subspace
//! alone) by column-pivoted Gram-Schmidt with a deterministic pivot rule.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::Error;
use crate::Result;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Real scalar as a complex entry.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Build a complex matrix from a nested array of real entries.
pub fn mat_from_real(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = if n > 0 { rows[0].len() } else { 0 };
    CMat::from_fn(n, m, |i, j| re(rows[i][j]))
}

/// Horizontal concatenation.
pub fn hcat(parts: &[&CMat]) -> CMat {
    assert!(!parts.is_empty());
    let n = parts[0].nrows();
    let total: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMat::zeros(n, total);
    let mut c = 0;
    for p in parts {
        assert_eq!(p.nrows(), n);
        out.view_mut((0, c), (n, p.ncols())).copy_from(*p);
        c += p.ncols();
    }
    out
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Relative Frobenius distance against `max(norms, 1)`; the equality measure
/// used across the whole crate.
pub fn rel_dist(a: &CMat, b: &CMat) -> f64 {
    let scale = a.norm().max(b.norm()).max(1.0);
    (a - b).norm() / scale
}

/// `rel_dist(a, b) <= tol`.
pub fn rel_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
    rel_dist(a, b) <= tol
}

/// Thresholds governing every rank and residual decision.
///
/// * `rank_tol_rel`: relative singular-value cutoff, default `64 u max(n, m)`
///   with `u` the unit roundoff;
/// * `sym_tol`: admissible relative Hermiticity deviation at construction;
/// * `residual_tol`: relative residual bound for equation and membership
///   checks.
#[derive(Clone, Copy, Debug)]
pub struct TolerancePolicy {
    pub rank_tol_rel: f64,
    pub sym_tol: f64,
    pub residual_tol: f64,
}

impl TolerancePolicy {
    /// Defaults for matrices of shape `rows x cols`.
    pub fn for_shape(rows: usize, cols: usize) -> Self {
        let u = f64::EPSILON / 2.0;
        let dim = rows.max(cols).max(1) as f64;
        let t = TolerancePolicy {
            rank_tol_rel: 64.0 * u * dim,
            sym_tol: 1e-9,
            residual_tol: 1e-9,
        };
        t.validate();
        t
    }

    /// Defaults for an ambient dimension `n`.
    pub fn for_dim(n: usize) -> Self {
        Self::for_shape(n, n)
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self.validate();
        self
    }

    pub fn with_sym_tol(mut self, tol: f64) -> Self {
        self.sym_tol = tol;
        self.validate();
        self
    }

    pub fn with_rank_tol_rel(mut self, tol: f64) -> Self {
        self.rank_tol_rel = tol;
        self.validate();
        self
    }

    fn validate(&self) {
        for t in [self.rank_tol_rel, self.sym_tol, self.residual_tol] {
            assert!(t > 0.0 && t < 1.0, "tolerances must lie in (0, 1)");
        }
    }
}

/// Dense selfadjoint matrix; the stored value is the symmetrization of the
/// input, accepted only when the input deviates from its adjoint by at most
/// `sym_tol` relative.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    pub fn new(m: CMat, tol: &TolerancePolicy) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let norm = m.norm();
        let deviation = if norm == 0.0 {
            0.0
        } else {
            (&m - m.adjoint()).norm() / norm
        };
        if deviation > tol.sym_tol {
            return Err(Error::NotHermitian {
                deviation,
                tol: tol.sym_tol,
            });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrize without a deviation check; for matrices Hermitian by
    /// construction.
    pub fn symmetrize(m: CMat) -> Self {
        let sym = (&m + m.adjoint()) * re(0.5);
        HermitianOperator { mat: sym }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let se = SymmetricEigen::new(self.mat.clone());
        let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Smallest eigenvalue; `0` for the empty matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Positive semidefinite up to `residual_tol` relative to the spectral
    /// radius.
    pub fn is_psd(&self, tol: &TolerancePolicy) -> bool {
        let ev = self.eigenvalues();
        let scale = ev.iter().fold(0.0f64, |m, &l| m.max(l.abs())).max(1.0);
        ev.first().map_or(true, |&l| l >= -tol.residual_tol * scale)
    }
}

/// A linear subspace of `C^n`, stored as an orthonormal basis. `dim` may be
/// zero. Produced bases are canonical: they depend only on the subspace.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: CMat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: CMat::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: CMat::identity(ambient, ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::symmetrize(&self.basis * self.basis.adjoint())
    }

    /// Canonical orthogonal complement.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient;
        let k = self.dim();
        if k == 0 {
            return Subspace::full(n);
        }
        if k == n {
            return Subspace::zero(n);
        }
        let p = CMat::identity(n, n) - &self.basis * self.basis.adjoint();
        Subspace {
            ambient: n,
            basis: gs_extract(&p, n - k),
        }
    }

    /// Membership with the crate-wide relative residual rule.
    pub fn contains_vec(&self, v: &CVec, tol: &TolerancePolicy) -> bool {
        self.vec_residual(v) <= tol.residual_tol
    }

    /// `|(I - P)v| / max(|v|, 1)`.
    pub fn vec_residual(&self, v: &CVec) -> f64 {
        let proj = &self.basis * (self.basis.adjoint() * v);
        (v - proj).norm() / v.norm().max(1.0)
    }

    /// `other` is contained in `self` up to the residual rule.
    pub fn contains(&self, other: &Subspace, tol: &TolerancePolicy) -> bool {
        if other.dim() == 0 {
            return true;
        }
        let residual = (other.basis()
            - &self.basis * (self.basis.adjoint() * other.basis()))
            .norm()
            / other.basis().norm().max(1.0);
        residual <= tol.residual_tol
    }

    /// Equality as subspaces: projectors within `residual_tol`.
    pub fn same_space(&self, other: &Subspace, tol: &TolerancePolicy) -> bool {
        self.ambient == other.ambient
            && rel_eq(
                self.projector().matrix(),
                other.projector().matrix(),
                tol.residual_tol,
            )
    }
}

/// An operator defined on a subspace of `C^n`, stored as the images of a
/// canonical domain basis.
#[derive(Clone, Debug)]
pub struct PartialOperator {
    domain: Subspace,
    action: CMat,
}

impl PartialOperator {
    pub fn new(domain: Subspace, action: CMat) -> Result<Self> {
        if action.ncols() != domain.dim() || action.nrows() != domain.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", domain.ambient_dim(), domain.dim()),
                found: format!("{}x{}", action.nrows(), action.ncols()),
            });
        }
        Ok(PartialOperator { domain, action })
    }

    /// Everywhere-defined operator.
    pub fn total(mat: CMat) -> Self {
        let n = mat.nrows();
        PartialOperator {
            domain: Subspace::full(n),
            action: mat,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn action(&self) -> &CMat {
        &self.action
    }

    /// Defined only on the domain; vectors outside it are rejected.
    pub fn apply(&self, v: &CVec, tol: &TolerancePolicy) -> Result<CVec> {
        let residual = self.domain.vec_residual(v);
        if residual > tol.residual_tol {
            return Err(Error::NotInDomain { residual });
        }
        Ok(&self.action * (self.domain.basis().adjoint() * v))
    }

    /// The matrix that agrees with the operator on its domain and vanishes
    /// on the orthogonal complement of the domain.
    pub fn canonical_matrix(&self) -> CMat {
        &self.action * self.domain.basis().adjoint()
    }
}

/// Canonical rank-revealing orthonormalization of a spanning set. Numerical
/// rank is decided by singular values `>= rank_tol_rel * sigma_max`; the
/// basis is then extracted from the column-space projector so it depends on
/// the subspace only.
pub fn orthonormalize(span: &CMat, tol: &TolerancePolicy) -> Subspace {
    orthonormalize_scaled(span, 0.0, tol)
}

/// Rank-revealing orthonormalization with an external noise scale. The rank
/// cut is `rank_tol_rel * max(sigma_max, scale)`: when `span` was produced by
/// arithmetic on data of size `scale`, singular values at round-off relative
/// to that scale are cancellation noise, even if they dominate `span` itself.
/// A plain relative cut would promote such noise to full rank (an operator
/// applied to a subspace of its nullspace is the canonical offender).
pub fn orthonormalize_scaled(span: &CMat, scale: f64, tol: &TolerancePolicy) -> Subspace {
    let n = span.nrows();
    if span.ncols() == 0 || span.norm() == 0.0 {
        return Subspace::zero(n);
    }
    let (u, sv, _) = jacobi_svd(span);
    let smax = sv[0];
    if smax <= 0.0 {
        return Subspace::zero(n);
    }
    let cut = tol.rank_tol_rel * smax.max(scale);
    let rank = sv.iter().filter(|&&s| s >= cut).count();
    if rank == 0 {
        return Subspace::zero(n);
    }
    let ur = u.columns(0, rank).into_owned();
    let p = &ur * ur.adjoint();
    Subspace {
        ambient: n,
        basis: gs_extract(&p, rank),
    }
}

/// One-sided Jacobi SVD, `a = u diag(sigma) v^H` with `sigma` sorted
/// descending and `v` unitary; columns of `u` past the rank are zero.
///
/// The bidiagonalization SVD shipped with the matrix library silently loses
/// accuracy on complex inputs (column spaces off by 1e-3 on benign 4x4
/// matrices were observed), so every rank, basis, and pseudoinverse
/// decision in the crate routes through this routine instead. One-sided
/// Jacobi rotations also resolve small singular values with high relative
/// accuracy, which is what the rank cutoffs rely on.
pub fn jacobi_svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let n = a.nrows();
    let m = a.ncols();
    let mut w = a.clone();
    let mut v = CMat::identity(m, m);
    if n == 0 || m == 0 {
        return (CMat::zeros(n, m), vec![0.0; m], v);
    }
    let eps = f64::EPSILON;
    let scale = (0..m).map(|j| w.column(j).norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return (CMat::zeros(n, m), vec![0.0; m], v);
    }
    // freeze columns once they fall to round-off: rank-deficient inputs only
    // drive them to zero in the limit, and rotating subnormal columns breeds NaN
    let floor2 = {
        let f = eps * scale * (n.max(m) as f64);
        f * f
    };
    for _ in 0..64 {
        let mut rotated = false;
        for i in 0..m {
            for j in (i + 1)..m {
                let wi = w.column(i).into_owned();
                let wj = w.column(j).into_owned();
                let alpha = wi.norm_squared();
                let beta = wj.norm_squared();
                let gamma = wi.dotc(&wj);
                let g = gamma.norm();
                if alpha <= floor2 || beta <= floor2 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // absorb the phase so the 2x2 Gram block is real symmetric;
                // divide componentwise, the complex formula underflows g^2
                let d = Complex::new(gamma.re / g, gamma.im / g);
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let dc = d.conj();
                let new_wi = &wi * re(c) - &wj * (dc * re(s));
                let new_wj = &wi * re(s) + &wj * (dc * re(c));
                w.set_column(i, &new_wi);
                w.set_column(j, &new_wj);
                let vi = v.column(i).into_owned();
                let vj = v.column(j).into_owned();
                let new_vi = &vi * re(c) - &vj * (dc * re(s));
                let new_vj = &vi * re(s) + &vj * (dc * re(c));
                v.set_column(i, &new_vi);
                v.set_column(j, &new_vj);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    let norms: Vec<f64> = (0..m).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let mut u = CMat::zeros(n, m);
    let mut vs = CMat::zeros(m, m);
    let mut sigma = vec![0.0f64; m];
    for (pos, &j) in order.iter().enumerate() {
        sigma[pos] = norms[j];
        vs.set_column(pos, &v.column(j).into_owned());
        if norms[j] > 0.0 {
            u.set_column(pos, &(w.column(j).into_owned() / re(norms[j])));
        }
    }
    (u, sigma, vs)
}

/// Singular values only, sorted descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    jacobi_svd(a).1
}

/// Column-pivoted modified Gram-Schmidt on the columns of a projector.
/// Pivot rule: largest residual norm, ties resolved to the lowest index.
fn gs_extract(p: &CMat, rank: usize) -> CMat {
    let n = p.nrows();
    let mut residual: Vec<CVec> = (0..n).map(|j| p.column(j).into_owned()).collect();
    let mut basis = CMat::zeros(n, rank);
    for k in 0..rank {
        let mut best = 0usize;
        let mut best_norm = -1.0f64;
        for (j, r) in residual.iter().enumerate() {
            let nrm = r.norm();
            if nrm > best_norm {
                best = j;
                best_norm = nrm;
            }
        }
        let mut q = residual[best].clone();
        // one re-orthogonalization pass keeps the basis orthonormal to
        // working precision even for skewed projector columns
        for i in 0..k {
            let qi = basis.column(i);
            let coef = qi.dotc(&q);
            q -= CVec::from(qi.into_owned()) * coef;
        }
        let nrm = q.norm();
        q /= re(nrm);
        basis.set_column(k, &q);
        for r in residual.iter_mut() {
            let coef = q.dotc(r);
            *r -= &q * coef;
        }
    }
    basis
}

/// Orthogonal projector onto a subspace, as an operation.
pub fn projector(s: &Subspace) -> HermitianOperator {
    s.projector()
}

/// Moore-Penrose pseudoinverse with the shared rank cutoff.
pub fn pinv(a: &CMat, tol: &TolerancePolicy) -> CMat {
    let (n, m) = a.shape();
    if n == 0 || m == 0 || a.norm() == 0.0 {
        return CMat::zeros(m, n);
    }
    let (u, sv, v) = jacobi_svd(a);
    let smax = sv[0];
    if smax <= 0.0 {
        return CMat::zeros(m, n);
    }
    let cut = tol.rank_tol_rel * smax;
    let mut out = CMat::zeros(m, n);
    for i in 0..sv.len() {
        if sv[i] >= cut {
            let vi = v.column(i).into_owned();
            let ui = u.column(i).into_owned();
            out += vi * ui.adjoint() * re(1.0 / sv[i]);
        }
    }
    out
}

/// Positive square root of a PSD matrix. Eigenvalues inside the rank band
/// around zero count as zero: without the band, an eigenvalue that is pure
/// rounding noise (about `eps * |A|`) would surface as a square root of
/// order `sqrt(eps) * |A|^{1/2}`, inflating the rank of the result far
/// above any cutoff. Eigenvalues in `[-residual_tol * |A|, 0)` are clamped
/// to zero; anything lower is an error.
pub fn sqrt_psd(a: &HermitianOperator, tol: &TolerancePolicy) -> Result<HermitianOperator> {
    let n = a.dim();
    if n == 0 {
        return Ok(a.clone());
    }
    let se = SymmetricEigen::new(a.matrix().clone());
    let scale = se.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let floor = -tol.residual_tol * scale;
    let band = tol.rank_tol_rel * scale;
    let mut lam = DVector::<f64>::zeros(n);
    for i in 0..n {
        let l = se.eigenvalues[i];
        if l < floor {
            return Err(Error::NotPositive { min_eig: l });
        }
        lam[i] = if l <= band { 0.0 } else { l.sqrt() };
    }
    let q = &se.eigenvectors;
    let mut root = CMat::zeros(n, n);
    for i in 0..n {
        let qi = q.column(i).into_owned();
        root += &qi * qi.adjoint() * re(lam[i]);
    }
    Ok(HermitianOperator::symmetrize(root))
}

/// Polar decomposition `T = U |T|` of a selfadjoint matrix, with
/// `U = U* = U^{-1}` and `U` commuting with `|T|`. The sign on the
/// nullspace is a convention; the default is `sign(0) = +1`.
pub fn polar_selfadjoint(
    t: &HermitianOperator,
    tol: &TolerancePolicy,
) -> (HermitianOperator, HermitianOperator) {
    polar_selfadjoint_with_zero_sign(t, tol, true)
}

/// Polar decomposition with an explicit choice of `sign(0)`; used to verify
/// that the convention is inert wherever `U` composes with range-supported
/// factors only.
pub fn polar_selfadjoint_with_zero_sign(
    t: &HermitianOperator,
    tol: &TolerancePolicy,
    zero_sign_positive: bool,
) -> (HermitianOperator, HermitianOperator) {
    let n = t.dim();
    if n == 0 {
        return (t.clone(), t.clone());
    }
    let se = SymmetricEigen::new(t.matrix().clone());
    let scale = se.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let zero_band = tol.rank_tol_rel * scale;
    let zero_sign = if zero_sign_positive { 1.0 } else { -1.0 };
    let q = &se.eigenvectors;
    let mut u = CMat::zeros(n, n);
    let mut abs = CMat::zeros(n, n);
    for i in 0..n {
        let l = se.eigenvalues[i];
        let sign = if l.abs() <= zero_band {
            zero_sign
        } else {
            l.signum()
        };
        let qi = q.column(i).into_owned();
        let outer = &qi * qi.adjoint();
        u += &outer * re(sign);
        abs += &outer * re(l.abs());
    }
    (
        HermitianOperator::symmetrize(u),
        HermitianOperator::symmetrize(abs),
    )
}

/// Canonical column space.
pub fn range_of(a: &CMat, tol: &TolerancePolicy) -> Subspace {
    orthonormalize(a, tol)
}

/// Image `A(S)` of a subspace under an operator, with the rank cut floored at
/// round-off relative to `|A|` so that `A` annihilating `S` yields the zero
/// subspace instead of a basis of cancellation noise.
pub fn image_of(a: &CMat, s: &Subspace, tol: &TolerancePolicy) -> Subspace {
    orthonormalize_scaled(&(a * s.basis()), a.norm(), tol)
}

/// Canonical nullspace: the orthogonal complement of the row space.
pub fn nullspace_of(a: &CMat, tol: &TolerancePolicy) -> Subspace {
    let row_space = orthonormalize(&a.adjoint(), tol);
    row_space.complement()
}

/// Smallest principal angle between two subspaces, in radians. The cosines
/// of the principal angles are the singular values of `Ua^H Ub`; an empty
/// subspace yields `pi/2` (nothing to intersect).
pub fn min_principal_angle(a: &Subspace, b: &Subspace) -> f64 {
    assert_eq!(a.ambient_dim(), b.ambient_dim());
    if a.dim() == 0 || b.dim() == 0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let overlap = a.basis().adjoint() * b.basis();
    let cos = spectral_norm(&overlap).clamp(0.0, 1.0);
    cos.acos()
}
