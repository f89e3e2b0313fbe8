//! Weighted symmetry of projections.
//!
//! A selfadjoint weight `B` turns symmetry questions about a projection `E`
//! into geometry: `E` is B-symmetric when `<Ex, y>_B = <x, Ey>_B` on its
//! domain, which happens exactly when the nullspace of `E` is B-orthogonal
//! to the range. The module computes Grammian splits of a subspace into
//! B-positive and B-nonpositive parts, decides B-symmetry by two
//! independent routes, constructs a B-symmetric projection with prescribed
//! range whenever one exists, characterizes symmetry through commutation in
//! a Gamma representation, and solves the block equation `b* = x a` behind
//! quasi-complementability.

use nalgebra::SymmetricEigen;

use crate::error::Error;
use crate::numlin::{
    hcat, image_of, orthonormalize, pinv, range_of, re, rel_dist, CMat, CVec, HermitianOperator,
    PartialOperator, Subspace, TolerancePolicy,
};
use crate::proj::{make_projection, GammaRep, Projection};
use crate::ranges::{range_inclusion_residual, range_intersection};
use crate::Result;

/// Spectral split of the Grammian `G_{B,S} = P_S B |_S` into its positive
/// and negative parts, with the matching decomposition of `S` into a
/// B-positive part and a B-nonpositive part. `g1`, `g2` live in
/// S-coordinates; the subspaces live in the ambient space.
#[derive(Clone, Debug)]
pub struct GrammianSplit {
    g1: HermitianOperator,
    g2: HermitianOperator,
    splus: Subspace,
    sminus: Subspace,
}

impl GrammianSplit {
    pub fn g1(&self) -> &HermitianOperator {
        &self.g1
    }

    pub fn g2(&self) -> &HermitianOperator {
        &self.g2
    }

    pub fn splus(&self) -> &Subspace {
        &self.splus
    }

    pub fn sminus(&self) -> &Subspace {
        &self.sminus
    }

    /// The Grammian itself, `g1 - g2`.
    pub fn grammian(&self) -> CMat {
        self.g1.matrix() - self.g2.matrix()
    }
}

/// Compress `B` to `S` and split spectrally. Eigenvalues inside the rank
/// band around zero count as null and their directions join the
/// nonpositive part.
pub fn grammian_split(b: &HermitianOperator, s: &Subspace, tol: &TolerancePolicy) -> GrammianSplit {
    let k = s.dim();
    let sb = s.basis();
    let g = HermitianOperator::symmetrize(sb.adjoint() * b.matrix() * sb);
    let mut g1 = CMat::zeros(k, k);
    let mut g2 = CMat::zeros(k, k);
    let mut wplus: Vec<CVec> = Vec::new();
    let mut wrest: Vec<CVec> = Vec::new();
    if k > 0 {
        let se = SymmetricEigen::new(g.matrix().clone());
        let scale = se.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let band = tol.rank_tol_rel * scale;
        for i in 0..k {
            let l = se.eigenvalues[i];
            let w = se.eigenvectors.column(i).into_owned();
            let outer = &w * w.adjoint();
            if l > band {
                g1 += &outer * re(l);
                wplus.push(w);
            } else if l < -band {
                g2 += &outer * re(-l);
                wrest.push(w);
            } else {
                wrest.push(w);
            }
        }
    }
    let lift = |cols: &[CVec]| -> Subspace {
        if cols.is_empty() {
            return Subspace::zero(s.ambient_dim());
        }
        let w = CMat::from_fn(k, cols.len(), |i, j| cols[j][i]);
        orthonormalize(&(sb * w), tol)
    };
    GrammianSplit {
        g1: HermitianOperator::symmetrize(g1),
        g2: HermitianOperator::symmetrize(g2),
        splus: lift(&wplus),
        sminus: lift(&wrest),
    }
}

/// Outcome of the two independent B-symmetry routes: the subspace
/// criterion `N(E) ⊆ (B R(E))⊥` and the operator identity `B E = E^H B`
/// compressed to the domain. The verdict is their conjunction; the two
/// always agree in exact arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct BSymmetryCheck {
    pub subspace_route: bool,
    pub operator_route: bool,
    pub nullspace_residual: f64,
    pub operator_residual: f64,
}

impl BSymmetryCheck {
    pub fn holds(&self) -> bool {
        self.subspace_route && self.operator_route
    }
}

/// Run both B-symmetry routes and report their residuals.
pub fn b_symmetry_check(
    e: &Projection,
    b: &HermitianOperator,
    tol: &TolerancePolicy,
) -> BSymmetryCheck {
    let bm = image_of(b.matrix(), e.range_sub(), tol);
    let p_bm = bm.projector();
    let mut nullspace_residual = 0.0f64;
    for j in 0..e.null_sub().dim() {
        let n = e.null_sub().basis().column(j).into_owned();
        let r = (p_bm.matrix() * &n).norm();
        nullspace_residual = nullspace_residual.max(r);
    }

    let pd = e.domain().projector();
    let em = e.canonical_matrix();
    let lhs = pd.matrix() * b.matrix() * &em * pd.matrix();
    let rhs = pd.matrix() * em.adjoint() * b.matrix() * pd.matrix();
    let operator_residual = rel_dist(&lhs, &rhs);

    BSymmetryCheck {
        subspace_route: nullspace_residual <= tol.residual_tol,
        operator_route: operator_residual <= tol.residual_tol,
        nullspace_residual,
        operator_residual,
    }
}

/// `E` is symmetric for the weight `B`.
pub fn is_b_symmetric(e: &Projection, b: &HermitianOperator, tol: &TolerancePolicy) -> bool {
    b_symmetry_check(e, b, tol).holds()
}

/// Construct a B-symmetric projection with range `S`, namely
/// `P_{S // (BS)⊥ ∩ L'⊥}` with `L' = S ∩ (BS)⊥`. Exists exactly when
/// `S + (BS)⊥` spans the whole space.
pub fn b_symmetric_construct(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let n = s.ambient_dim();
    let bs = image_of(b.matrix(), s, tol);
    let bs_perp = bs.complement();
    let sum = orthonormalize(&hcat(&[s.basis(), bs_perp.basis()]), tol);
    if sum.dim() < n {
        return Err(Error::NotSpanning {
            defect: n - sum.dim(),
        });
    }
    let lprime = range_intersection(s.basis(), bs_perp.basis(), tol)?;
    let null = range_intersection(bs_perp.basis(), lprime.complement().basis(), tol)?;
    let e = make_projection(s, &null, tol)?;
    if !is_b_symmetric(&e, b, tol) {
        return Err(Error::NotBSymmetric);
    }
    // the overlap of S with (BS)⊥ is exactly the B-degenerate part of S
    let degenerate = range_intersection(s.basis(), crate::numlin::nullspace_of(b.matrix(), tol).basis(), tol)?;
    if !lprime.same_space(&degenerate, tol) {
        return Err(Error::RangeMismatch {
            what: "S ∩ (BS)⊥ differs from S ∩ N(B)".into(),
        });
    }
    Ok(e)
}

/// B-symmetry through the Gamma representation: with `K = Gamma B Gamma`,
/// the projection is B-symmetric exactly when `Pgamma` commutes with `K`.
pub fn commutation_check(
    e: &Projection,
    b: &HermitianOperator,
    rep: &GammaRep,
    tol: &TolerancePolicy,
) -> bool {
    debug_assert!(rel_dist(
        &rep.projection().canonical_matrix(),
        &e.canonical_matrix()
    ) <= tol.residual_tol);
    let _ = e;
    let gamma = rep.gamma().matrix();
    let k = gamma * b.matrix() * gamma;
    let pg = rep.pgamma().matrix();
    let comm = (pg * &k - &k * pg).norm();
    comm <= tol.residual_tol * k.norm()
}

/// Solve the block equation `b* = x a` for the compression of a weight `B`
/// to `S ⊕ S⊥`, where `a = P_S B |_S` and `b = P_S B |_{S⊥}`. Returns the
/// reduced solution `x0 = b* pinv(a)` as an operator from the lift of
/// `R(a)` inside `S` to `S⊥`. Solvable exactly when `R(b) ⊆ R(a)` in
/// S-coordinates.
pub fn solve_xa(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<PartialOperator> {
    let sb = s.basis();
    let s_perp = s.complement();
    let spb = s_perp.basis();
    let a_coord = sb.adjoint() * b.matrix() * sb;
    let b_coord = sb.adjoint() * b.matrix() * spb;
    let residual = range_inclusion_residual(&b_coord, &a_coord, tol)?;
    if residual > tol.residual_tol {
        return Err(Error::NoSolution { residual });
    }
    let x0 = b_coord.adjoint() * pinv(&a_coord, tol);
    let ra = range_of(&a_coord, tol);
    let domain = orthonormalize(&(sb * ra.basis()), tol);
    let action = spb * &x0 * (sb.adjoint() * domain.basis());
    PartialOperator::new(domain, action)
}
