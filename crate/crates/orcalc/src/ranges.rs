//! Operator-range algebra.
//!
//! Ranges of matrices form a lattice under sum and intersection, and each
//! range `R(T)` carries its own norm `|u|_T = |pinv(T) u|` that turns it
//! into a Hilbert space in its own right. This module provides the lattice
//! operations, inclusion tests in the sense of Douglas, the reduced
//! solution of `A X = B`, Ando's minimal splitting of a vector across two
//! ranges, and de Branges complements of contraction ranges.

use crate::error::Error;
use crate::numlin::{
    hcat, orthonormalize, pinv, polar_selfadjoint, range_of, re, spectral_norm, sqrt_psd, CMat,
    CVec, HermitianOperator, Subspace, TolerancePolicy,
};
use crate::Result;

/// The range `R(T)` equipped with the norm `|u|_T = |pinv(T) u|`.
///
/// Caches the pseudoinverse and the range subspace so repeated norm
/// evaluations cost one matrix-vector product. For `u` in the range,
/// `|u| <= |T| |u|_T` with `|T|` the operator norm.
#[derive(Clone, Debug)]
pub struct RangeNormContext {
    t: CMat,
    tpinv: CMat,
    range: Subspace,
    op_norm: f64,
}

impl RangeNormContext {
    pub fn new(t: CMat, tol: &TolerancePolicy) -> Self {
        let tpinv = pinv(&t, tol);
        let range = range_of(&t, tol);
        let op_norm = spectral_norm(&t);
        RangeNormContext {
            t,
            tpinv,
            range,
            op_norm,
        }
    }

    pub fn t(&self) -> &CMat {
        &self.t
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    /// Operator norm of `T`.
    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn contains(&self, u: &CVec, tol: &TolerancePolicy) -> bool {
        self.range.contains_vec(u, tol)
    }

    /// `|u|_T`; defined only on the range.
    pub fn mt_norm(&self, u: &CVec, tol: &TolerancePolicy) -> Result<f64> {
        let residual = self.range.vec_residual(u);
        if residual > tol.residual_tol {
            return Err(Error::NotInRange { residual });
        }
        Ok((&self.tpinv * u).norm())
    }
}

/// `|u|_T` through a context.
pub fn mt_norm(ctx: &RangeNormContext, u: &CVec, tol: &TolerancePolicy) -> Result<f64> {
    ctx.mt_norm(u, tol)
}

fn check_same_ambient(a: &CMat, b: &CMat) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", a.nrows()),
            found: format!("{} rows", b.nrows()),
        });
    }
    Ok(())
}

/// Sum of ranges: `R(A) + R(B) = R((A A^H + B B^H)^{1/2})`. Returns the sum
/// subspace together with the positive square root realizing it.
pub fn range_sum(
    a: &CMat,
    b: &CMat,
    tol: &TolerancePolicy,
) -> Result<(Subspace, HermitianOperator)> {
    check_same_ambient(a, b)?;
    let gram = a * a.adjoint() + b * b.adjoint();
    let t = sqrt_psd(&HermitianOperator::symmetrize(gram), tol)?;
    let s = range_of(t.matrix(), tol);
    Ok((s, t))
}

/// Intersection of ranges. A vector lies in both ranges exactly when it is
/// `Ua x = Ub y` for orthonormal bases `Ua`, `Ub`, so the intersection is
/// the image under `Ua` of the top block of the nullspace of `[Ua | -Ub]`.
pub fn range_intersection(a: &CMat, b: &CMat, tol: &TolerancePolicy) -> Result<Subspace> {
    check_same_ambient(a, b)?;
    let n = a.nrows();
    let sa = range_of(a, tol);
    let sb = range_of(b, tol);
    let (ka, kb) = (sa.dim(), sb.dim());
    if ka == 0 || kb == 0 {
        return Ok(Subspace::zero(n));
    }
    let stacked = hcat(&[sa.basis(), &(sb.basis() * re(-1.0))]);
    let null = crate::numlin::nullspace_of(&stacked, tol);
    if null.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    let coeffs = null.basis().rows(0, ka).into_owned();
    Ok(orthonormalize(&(sa.basis() * coeffs), tol))
}

/// Douglas inclusion test: `R(B)` is contained in `R(A)` exactly when
/// `A X = B` is solvable; numerically, when the residual of `B` against the
/// range projector of `A` is small.
pub fn range_included(b: &CMat, a: &CMat, tol: &TolerancePolicy) -> Result<bool> {
    Ok(range_inclusion_residual(b, a, tol)? <= tol.residual_tol)
}

/// `|(I - P_{R(A)}) B| / max(|B|, 1)`.
pub fn range_inclusion_residual(b: &CMat, a: &CMat, tol: &TolerancePolicy) -> Result<f64> {
    check_same_ambient(a, b)?;
    let p = range_of(a, tol).projector();
    Ok((b - p.matrix() * b).norm() / b.norm().max(1.0))
}

/// The reduced solution of `A X = B`: the unique solution whose range lies
/// in `R(A^H)`, namely `pinv(A) B`.
pub fn douglas_reduced(a: &CMat, b: &CMat, tol: &TolerancePolicy) -> Result<CMat> {
    let residual = range_inclusion_residual(b, a, tol)?;
    if residual > tol.residual_tol {
        return Err(Error::NoSolution { residual });
    }
    Ok(pinv(a, tol) * b)
}

/// Ando's minimal decomposition of `u` across `R(T1)` and `R(T2)`: the
/// unique splitting `u = u1 + u2` with `u_i` in `R(T_i)` minimizing
/// `|u1|_{T1}^2 + |u2|_{T2}^2`, where the minimum equals `|u|_T^2` for
/// `T = (T1 T1^H + T2 T2^H)^{1/2}`. Realized as the minimum-norm solution
/// of `[T1 T2] (x1; x2) = u`.
pub fn ando_decompose(
    t1: &CMat,
    t2: &CMat,
    u: &CVec,
    tol: &TolerancePolicy,
) -> Result<(CVec, CVec)> {
    check_same_ambient(t1, t2)?;
    let gram = t1 * t1.adjoint() + t2 * t2.adjoint();
    let t = sqrt_psd(&HermitianOperator::symmetrize(gram), tol)?;
    let range = range_of(t.matrix(), tol);
    let residual = range.vec_residual(u);
    if residual > tol.residual_tol {
        return Err(Error::NotInRange { residual });
    }
    let concat = hcat(&[t1, t2]);
    let x = pinv(&concat, tol) * u;
    let m1 = t1.ncols();
    let x1 = x.rows(0, m1).into_owned();
    let x2 = x.rows(m1, t2.ncols()).into_owned();
    Ok((t1 * x1, t2 * x2))
}

/// De Branges complement of the range of a contraction `T`: the range of
/// `(I - T T^H)^{1/2}`. Together with `R(T)` it spans the whole space.
pub fn debranges_complement(t: &CMat, tol: &TolerancePolicy) -> Result<Subspace> {
    let norm = spectral_norm(t);
    if norm > 1.0 + tol.residual_tol {
        return Err(Error::NotContraction { norm });
    }
    let n = t.nrows();
    let g = CMat::identity(n, n) - t * t.adjoint();
    // a norm within tolerance of 1 can push an eigenvalue of G slightly
    // below the sqrt_psd floor; clamp through the spectral absolute value
    let gh = HermitianOperator::symmetrize(g);
    let (_, abs) = polar_selfadjoint(&gh, tol);
    let clamped = HermitianOperator::symmetrize((gh.matrix() + abs.matrix()) * re(0.5));
    let root = sqrt_psd(&clamped, tol)?;
    Ok(range_of(root.matrix(), tol))
}
