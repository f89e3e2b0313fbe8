//! Projections with prescribed range and nullspace.
//!
//! A projection here is an idempotent defined on the direct sum of its
//! range `M` and nullspace `N`; the domain may be a proper subspace of the
//! ambient space, which keeps the semiclosed phenomena representable in
//! finite dimension. On top of the basic constructor the module offers the
//! Gamma representation through a pair of PSD generators, similarity
//! transport of orthogonal projectors, the two block forms (range-oriented
//! and nullspace-oriented), the Moore-Penrose inverse as a product of two
//! orthogonal projectors, the optimal-factorization projection of a matrix,
//! and evaluation of quotient operators given by a Kaufman pair.

use crate::error::Error;
use crate::numlin::{
    hcat, orthonormalize, pinv, range_of, re, rel_dist, rel_eq, singular_values, sqrt_psd, CMat,
    CVec, HermitianOperator, PartialOperator, Subspace, TolerancePolicy,
};
use crate::ranges::range_intersection;
use crate::Result;

/// Idempotent `E = P_{M // N}` defined on `M + N` (direct sum), acting as
/// the identity on `M` and as zero on `N`.
#[derive(Clone, Debug)]
pub struct Projection {
    base: PartialOperator,
    range_sub: Subspace,
    null_sub: Subspace,
}

impl Projection {
    pub(crate) fn from_parts(
        base: PartialOperator,
        range_sub: Subspace,
        null_sub: Subspace,
    ) -> Self {
        Projection {
            base,
            range_sub,
            null_sub,
        }
    }

    pub fn base(&self) -> &PartialOperator {
        &self.base
    }

    /// `M = R(E)`.
    pub fn range_sub(&self) -> &Subspace {
        &self.range_sub
    }

    /// `N = N(E)` inside the domain.
    pub fn null_sub(&self) -> &Subspace {
        &self.null_sub
    }

    pub fn domain(&self) -> &Subspace {
        self.base.domain()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    pub fn is_full_domain(&self) -> bool {
        self.domain().dim() == self.ambient_dim()
    }

    pub fn apply(&self, v: &CVec, tol: &TolerancePolicy) -> Result<CVec> {
        self.base.apply(v, tol)
    }

    /// Matrix agreeing with `E` on its domain and vanishing on the
    /// orthogonal complement of the domain.
    pub fn canonical_matrix(&self) -> CMat {
        self.base.canonical_matrix()
    }
}

/// Build `P_{M // N}`. The spaces must not overlap; the domain is their
/// direct sum and each `m + n` maps to `m`.
pub fn make_projection(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<Projection> {
    if m.ambient_dim() != n.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("ambient {}", m.ambient_dim()),
            found: format!("ambient {}", n.ambient_dim()),
        });
    }
    let overlap = range_intersection(m.basis(), n.basis(), tol)?;
    if overlap.dim() > 0 {
        return Err(Error::Overlap { dim: overlap.dim() });
    }
    let pair = hcat(&[m.basis(), n.basis()]);
    let domain = orthonormalize(&pair, tol);
    // each domain basis vector splits uniquely as m + n; keep the m part
    let coeffs = pinv(&pair, tol) * domain.basis();
    let head = coeffs.rows(0, m.dim()).into_owned();
    let action = m.basis() * head;
    Ok(Projection {
        base: PartialOperator::new(domain, action)?,
        range_sub: m.clone(),
        null_sub: n.clone(),
    })
}

/// Gamma representation of `P_{M // N}` through PSD generators `A1`, `A2`
/// with ranges `M`, `N`: with `Gamma = (A1^2 + A2^2)^{1/2}`, the projection
/// acts as `A1^2 (Gamma^2)^+` on `R(Gamma) = M + N`, and
/// `Pgamma = Gamma^+ A1^2 Gamma^+` is the orthogonal projector conjugate to
/// it under `Gamma`.
#[derive(Clone, Debug)]
pub struct GammaRep {
    a1: HermitianOperator,
    a2: HermitianOperator,
    gamma: HermitianOperator,
    pgamma: HermitianOperator,
    projection: Projection,
}

impl GammaRep {
    pub fn a1(&self) -> &HermitianOperator {
        &self.a1
    }

    pub fn a2(&self) -> &HermitianOperator {
        &self.a2
    }

    pub fn gamma(&self) -> &HermitianOperator {
        &self.gamma
    }

    pub fn pgamma(&self) -> &HermitianOperator {
        &self.pgamma
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }
}

/// Build a [`GammaRep`] from caller-supplied generators; no representation
/// is distinguished, any PSD pair with the right ranges works.
pub fn gamma_rep(
    m: &Subspace,
    n: &Subspace,
    a1: &HermitianOperator,
    a2: &HermitianOperator,
    tol: &TolerancePolicy,
) -> Result<GammaRep> {
    for (a, name) in [(a1, "A1"), (a2, "A2")] {
        if !a.is_psd(tol) {
            return Err(Error::NotPositive {
                min_eig: a.min_eigenvalue(),
            });
        }
        let target = if name == "A1" { m } else { n };
        if !range_of(a.matrix(), tol).same_space(target, tol) {
            return Err(Error::RangeMismatch {
                what: format!("R({name}) differs from the prescribed subspace"),
            });
        }
    }
    let overlap = range_intersection(m.basis(), n.basis(), tol)?;
    if overlap.dim() > 0 {
        return Err(Error::Overlap { dim: overlap.dim() });
    }

    let a1sq = a1.matrix() * a1.matrix();
    let gamma2 = HermitianOperator::symmetrize(&a1sq + a2.matrix() * a2.matrix());
    let gamma = sqrt_psd(&gamma2, tol)?;
    let gamma_pinv = pinv(gamma.matrix(), tol);
    let pgamma = HermitianOperator::symmetrize(&gamma_pinv * &a1sq * &gamma_pinv);

    let e_mat = &a1sq * pinv(gamma2.matrix(), tol);
    // the representation identity E Gamma^2 = A1^2 pins E on the domain
    if rel_dist(&(&e_mat * gamma2.matrix()), &a1sq) > tol.residual_tol {
        return Err(Error::RangeMismatch {
            what: "Gamma representation identity E*Gamma^2 = A1^2 failed".into(),
        });
    }
    let domain = range_of(gamma.matrix(), tol);
    let action = &e_mat * domain.basis();
    let projection = Projection {
        base: PartialOperator::new(domain, action)?,
        range_sub: m.clone(),
        null_sub: n.clone(),
    };
    Ok(GammaRep {
        a1: a1.clone(),
        a2: a2.clone(),
        gamma,
        pgamma,
        projection,
    })
}

/// [`gamma_rep`] with the closed-case generators `(P_M, P_N)`.
pub fn gamma_rep_default(m: &Subspace, n: &Subspace, tol: &TolerancePolicy) -> Result<GammaRep> {
    gamma_rep(m, n, &m.projector(), &n.projector(), tol)
}

/// Transport an orthogonal projector along an invertible `G`: the oblique
/// bounded projection `G^{-1} Pg G`.
pub fn pgamma_change(g: &CMat, pg: &HermitianOperator, tol: &TolerancePolicy) -> Result<CMat> {
    if g.nrows() != g.ncols() || g.nrows() != pg.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", pg.dim()),
            found: format!("{}x{}", g.nrows(), g.ncols()),
        });
    }
    let sv = singular_values(g);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin < tol.rank_tol_rel * smax {
        return Err(Error::Singular);
    }
    let g_inv = g.clone().try_inverse().ok_or(Error::Singular)?;
    debug_assert!(rel_dist(&(pg.matrix() * pg.matrix()), pg.matrix()) <= tol.residual_tol);
    Ok(g_inv * pg.matrix() * g)
}

/// Range-oriented block form: with respect to `M ⊕ M⊥` the projection is
/// `[[1, x], [0, 0]]`, where `x : P_{M⊥}(N) -> M` sends `P_{M⊥} n` to
/// `-P_M n`. Requires a projection defined on the whole space.
pub fn block_rep(e: &Projection, tol: &TolerancePolicy) -> Result<PartialOperator> {
    if !e.is_full_domain() {
        return Err(Error::DomainNotFull);
    }
    block_rep_unchecked(e, tol)
}

fn block_rep_unchecked(e: &Projection, tol: &TolerancePolicy) -> Result<PartialOperator> {
    let m = e.range_sub();
    let n = e.null_sub();
    let ambient = e.ambient_dim();
    let pm_perp = m.complement().projector();
    let w = pm_perp.matrix() * n.basis();
    let domain = orthonormalize(&w, tol);
    if domain.dim() == 0 {
        return PartialOperator::new(Subspace::zero(ambient), CMat::zeros(ambient, 0));
    }
    let coeffs = pinv(&w, tol) * domain.basis();
    let action = m.projector().matrix() * n.basis() * coeffs * re(-1.0);
    PartialOperator::new(domain, action)
}

/// Nullspace-oriented block form: with `S = N⊥`, the projection is
/// `[[I, 0], [y, 0]]` with respect to `S ⊕ S⊥`, where `y : P_S(M) -> S⊥`
/// sends `P_S m` to `P_{S⊥} m`. Defined for any projection.
pub fn block_rep_null_oriented(
    e: &Projection,
    tol: &TolerancePolicy,
) -> Result<PartialOperator> {
    let m = e.range_sub();
    let s = e.null_sub().complement();
    let ambient = e.ambient_dim();
    let v = s.projector().matrix() * m.basis();
    let domain = orthonormalize(&v, tol);
    if domain.dim() == 0 {
        return PartialOperator::new(Subspace::zero(ambient), CMat::zeros(ambient, 0));
    }
    let coeffs = pinv(&v, tol) * domain.basis();
    let p_s_perp = e.null_sub().projector();
    let action = p_s_perp.matrix() * m.basis() * coeffs;
    PartialOperator::new(domain, action)
}

/// Moore-Penrose inverse of a projection: the product of two orthogonal
/// projectors, `P_{N⊥} P_M`.
pub fn projection_pinv(e: &Projection) -> CMat {
    let pn_perp = e.null_sub().complement().projector();
    let pm = e.range_sub().projector();
    pn_perp.matrix() * pm.matrix()
}

/// Projection attached to an optimal factorization `T = P A`: the oblique
/// projection `P_{R(A) // R(T)⊥}`. Optimality means `P` is the orthogonal
/// projector onto `R(T)`, `T = P A`, and `N(T) = N(A)`.
pub fn phi_set(
    t: &CMat,
    p: &HermitianOperator,
    a: &HermitianOperator,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let t_range = range_of(t, tol);
    if !rel_eq(p.matrix(), t_range.projector().matrix(), tol.residual_tol) {
        return Err(Error::NotOptimal {
            what: "P is not the orthogonal projector onto R(T)".into(),
        });
    }
    if !a.is_psd(tol) {
        return Err(Error::NotPositive {
            min_eig: a.min_eigenvalue(),
        });
    }
    if rel_dist(&(p.matrix() * a.matrix()), t) > tol.residual_tol {
        return Err(Error::NotOptimal {
            what: "T does not equal P*A".into(),
        });
    }
    let nt = crate::numlin::nullspace_of(t, tol);
    let na = crate::numlin::nullspace_of(a.matrix(), tol);
    if !nt.same_space(&na, tol) {
        return Err(Error::NotOptimal {
            what: "N(T) differs from N(A)".into(),
        });
    }
    make_projection(&range_of(a.matrix(), tol), &t_range.complement(), tol)
}

/// Evaluate the quotient operator of a Kaufman pair `(A, D)` at `v`:
/// `A pinv(D) v` for `v` in `R(D)`. Requires `N(D) ⊆ N(A)`, which makes the
/// composition with `D` bounded and equal to `A`.
pub fn kaufman_factor_apply(
    a: &CMat,
    d: &HermitianOperator,
    v: &CVec,
    tol: &TolerancePolicy,
) -> Result<CVec> {
    if a.ncols() != d.dim() || a.nrows() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", d.dim()),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    if !d.is_psd(tol) {
        return Err(Error::NotPositive {
            min_eig: d.min_eigenvalue(),
        });
    }
    let nd = crate::numlin::nullspace_of(d.matrix(), tol);
    let na = crate::numlin::nullspace_of(a, tol);
    if !na.contains(&nd, tol) {
        return Err(Error::NullspaceViolation);
    }
    let range = range_of(d.matrix(), tol);
    let residual = range.vec_residual(v);
    if residual > tol.residual_tol {
        return Err(Error::NotInDomain { residual });
    }
    Ok(a * (pinv(d.matrix(), tol) * v))
}
