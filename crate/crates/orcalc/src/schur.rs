//! Schur complements of selfadjoint matrices and matrix partial orders.
//!
//! Everything here revolves around the block decomposition of a selfadjoint
//! `B` against a subspace `S`: complementability predicates, the Riccati
//! witness, the distinguished projection `E0` and its perturbation family,
//! the three-term decomposition `B = B1 + B2 - B3`, the Schur complement
//! `B_{/S}` by formula and by projection, the minus, left-minus and `≺`
//! partial orders, and the maximality of `B_{/S}` inside `M(B, S)`.
//!
//! Statements involving closures (of `BS`, of `BE`) are implemented
//! closure-free: at finite dimension every range is closed, so predicates
//! quantify over literal ranges.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::numlin::{
    hcat, image_of, nullspace_of, orthonormalize, orthonormalize_scaled, pinv,
    polar_selfadjoint_with_zero_sign,
    range_of, re,
    rel_dist, rel_eq, sqrt_psd, CMat, HermitianOperator, PartialOperator, Subspace,
    TolerancePolicy,
};
use crate::proj::{make_projection, Projection};
use crate::ranges::{range_inclusion_residual, range_intersection};
use crate::Result;

/// Blocks of a selfadjoint matrix against the canonical bases of `S` and
/// `S⊥`: `B = [[a, b], [b^H, c]]` with `a` on S-coordinates, `c` on
/// S⊥-coordinates and `b` mapping S⊥-coordinates into S-coordinates.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    s: Subspace,
    s_perp: Subspace,
    a: HermitianOperator,
    b: CMat,
    c: HermitianOperator,
}

impl BlockDecomposition {
    pub fn s(&self) -> &Subspace {
        &self.s
    }

    pub fn s_perp(&self) -> &Subspace {
        &self.s_perp
    }

    pub fn a(&self) -> &HermitianOperator {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &HermitianOperator {
        &self.c
    }

    /// Assemble an ambient matrix from coordinate blocks.
    pub fn assemble(&self, ss: &CMat, sp: &CMat, ps: &CMat, pp: &CMat) -> CMat {
        let sb = self.s.basis();
        let pb = self.s_perp.basis();
        sb * ss * sb.adjoint()
            + sb * sp * pb.adjoint()
            + pb * ps * sb.adjoint()
            + pb * pp * pb.adjoint()
    }

    /// Reassemble the original matrix from the blocks.
    pub fn reassemble(&self) -> CMat {
        self.assemble(
            self.a.matrix(),
            &self.b,
            &self.b.adjoint(),
            self.c.matrix(),
        )
    }
}

/// Compress `B` to the canonical `(S, S⊥)` bases.
pub fn block_decompose(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> BlockDecomposition {
    assert_eq!(b.dim(), s.ambient_dim(), "ambient dimensions must agree");
    let s_perp = s.complement();
    let sb = s.basis();
    let pb = s_perp.basis();
    // a block whose norm sits at round-off relative to B is compression
    // noise; keeping it would hand phantom rank to every consumer downstream
    let floor = tol.rank_tol_rel * b.matrix().norm();
    let clean = |m: CMat| if m.norm() <= floor { CMat::zeros(m.nrows(), m.ncols()) } else { m };
    let a = HermitianOperator::symmetrize(clean(sb.adjoint() * b.matrix() * sb));
    let off = clean(sb.adjoint() * b.matrix() * pb);
    let c = HermitianOperator::symmetrize(clean(pb.adjoint() * b.matrix() * pb));
    BlockDecomposition {
        s: s.clone(),
        s_perp,
        a,
        b: off,
        c,
    }
}

/// Polar data certifying weak complementability: `u` the selfadjoint polar
/// factor of `a` with `sign(0) = +1`, `absa_half = |a|^{1/2}`, and `f` the
/// reduced solution of `|a|^{1/2} f = b`.
#[derive(Clone, Debug)]
pub struct WeakWitness {
    u: HermitianOperator,
    absa_half: HermitianOperator,
    f: CMat,
}

impl WeakWitness {
    pub fn u(&self) -> &HermitianOperator {
        &self.u
    }

    pub fn absa_half(&self) -> &HermitianOperator {
        &self.absa_half
    }

    pub fn f(&self) -> &CMat {
        &self.f
    }

    /// Compute the witness for a block decomposition, failing when
    /// `R(b) ⊄ R(|a|^{1/2})`.
    pub fn compute(dec: &BlockDecomposition, tol: &TolerancePolicy) -> Result<Self> {
        Self::compute_with_zero_sign(dec, tol, true)
    }

    pub(crate) fn compute_with_zero_sign(
        dec: &BlockDecomposition,
        tol: &TolerancePolicy,
        zero_sign_positive: bool,
    ) -> Result<Self> {
        let (u, abs_a) = polar_selfadjoint_with_zero_sign(dec.a(), tol, zero_sign_positive);
        let h = sqrt_psd(&abs_a, tol)?;
        let residual = range_inclusion_residual(dec.b(), h.matrix(), tol)?;
        if residual > tol.residual_tol {
            return Err(Error::NotWeaklyComplementable { residual });
        }
        let f = pinv(h.matrix(), tol) * dec.b();
        Ok(WeakWitness {
            u,
            absa_half: h,
            f,
        })
    }
}

fn decompose_and_witness(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<(BlockDecomposition, WeakWitness)> {
    let dec = block_decompose(b, s, tol);
    let w = WeakWitness::compute(&dec, tol)?;
    Ok((dec, w))
}

/// Both complementability routes: the algebraic characterization
/// `R(b) ⊆ R(a)` and the geometric definition `S + (BS)⊥ = H`. They agree
/// in exact arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct ComplementabilityCheck {
    pub algebraic: bool,
    pub geometric: bool,
    pub inclusion_residual: f64,
}

pub fn complementability_check(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> ComplementabilityCheck {
    let dec = block_decompose(b, s, tol);
    let inclusion_residual =
        range_inclusion_residual(dec.b(), dec.a().matrix(), tol).expect("blocks share S rows");
    let bs_perp = image_of(b.matrix(), s, tol).complement();
    let sum = orthonormalize(&hcat(&[s.basis(), bs_perp.basis()]), tol);
    ComplementabilityCheck {
        algebraic: inclusion_residual <= tol.residual_tol,
        geometric: sum.dim() == s.ambient_dim(),
        inclusion_residual,
    }
}

/// `S` is complementable for `B`: `R(b) ⊆ R(a)`.
pub fn is_complementable(b: &HermitianOperator, s: &Subspace, tol: &TolerancePolicy) -> bool {
    complementability_check(b, s, tol).algebraic
}

/// Weak complementability, `R(b) ⊆ R(|a|^{1/2})`, with the witness when it
/// holds.
pub fn is_weakly_complementable(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> (bool, Option<WeakWitness>) {
    let dec = block_decompose(b, s, tol);
    match WeakWitness::compute(&dec, tol) {
        Ok(w) => (true, Some(w)),
        Err(_) => (false, None),
    }
}

/// Part of `b` outside a range projector, normalized by `‖b‖`; zero when
/// the inclusion holds with room, one when `b` lies entirely outside.
fn inclusion_defect(b: &CMat, projector: &CMat) -> f64 {
    let nb = b.norm();
    if nb == 0.0 {
        return 0.0;
    }
    (b - projector * b).norm() / nb
}

/// Violation of `R(b) ⊆ R(a)` normalized by `‖b‖`.
pub fn complementable_margin(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> f64 {
    let dec = block_decompose(b, s, tol);
    inclusion_defect(dec.b(), range_of(dec.a().matrix(), tol).projector().matrix())
}

/// Violation of `R(b) ⊆ R(|a|^{1/2})` normalized by `‖b‖`.
pub fn weak_margin(b: &HermitianOperator, s: &Subspace, tol: &TolerancePolicy) -> f64 {
    let dec = block_decompose(b, s, tol);
    let (_, abs_a) = polar_selfadjoint_with_zero_sign(dec.a(), tol, true);
    match sqrt_psd(&abs_a, tol) {
        Ok(h) => inclusion_defect(dec.b(), range_of(h.matrix(), tol).projector().matrix()),
        Err(_) => f64::INFINITY,
    }
}

/// Sine of the smallest principal angle between `BS` and `S⊥`: positive
/// exactly when the pair is quasi-complementable, sinking to zero as the
/// two spaces close in on each other.
pub fn quasi_margin(b: &HermitianOperator, s: &Subspace, tol: &TolerancePolicy) -> f64 {
    let bs = image_of(b.matrix(), s, tol);
    let s_perp = s.complement();
    if bs.dim() == 0 || s_perp.dim() == 0 {
        return 1.0;
    }
    crate::numlin::min_principal_angle(&bs, &s_perp).sin()
}

/// Quasi-complementability: `BS ∩ S⊥ = {0}` (the finite-dimensional form of
/// the closure statement `closure(BS) ∩ S⊥ = {0}`).
pub fn is_quasi_complementable(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> bool {
    let bs = b.matrix() * s.basis();
    let s_perp = s.complement();
    range_intersection(&bs, s_perp.basis(), tol)
        .map(|i| i.dim() == 0)
        .unwrap_or(false)
}

/// The PSD Riccati witness `A` with `B P_S B = A P_S A`:
/// `A = [[|a|, u|a|^{1/2}f], [f^H|a|^{1/2}u, f^H f]]`.
pub fn riccati_witness(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<HermitianOperator> {
    let (dec, w) = decompose_and_witness(b, s, tol)?;
    let uh = w.u().matrix() * w.absa_half().matrix();
    let top_right = &uh * w.f();
    let abs_a = w.absa_half().matrix() * w.absa_half().matrix();
    let bottom_right = w.f().adjoint() * w.f();
    let a = dec.assemble(&abs_a, &top_right, &top_right.adjoint(), &bottom_right);
    Ok(HermitianOperator::symmetrize(a))
}

/// Positivity through blocks: `a` PSD, `R(b) ⊆ R(a^{1/2})`, and
/// `c - f^H f` PSD. Equivalent to `B` PSD.
pub fn positivity_blocks(b: &HermitianOperator, s: &Subspace, tol: &TolerancePolicy) -> bool {
    let dec = block_decompose(b, s, tol);
    if !dec.a().is_psd(tol) {
        return false;
    }
    let clamped = clamp_psd(dec.a(), tol);
    let h = match sqrt_psd(&clamped, tol) {
        Ok(h) => h,
        Err(_) => return false,
    };
    let residual =
        range_inclusion_residual(dec.b(), h.matrix(), tol).expect("blocks share S rows");
    if residual > tol.residual_tol {
        return false;
    }
    let f = pinv(h.matrix(), tol) * dec.b();
    let t = HermitianOperator::symmetrize(dec.c().matrix() - f.adjoint() * &f);
    t.is_psd(tol)
}

/// Replace eigenvalues in the PSD tolerance band by zero.
fn clamp_psd(a: &HermitianOperator, tol: &TolerancePolicy) -> HermitianOperator {
    let (_, abs) = polar_selfadjoint_with_zero_sign(a, tol, true);
    HermitianOperator::symmetrize((a.matrix() + abs.matrix()) * re(0.5))
}

fn e0_matrix(dec: &BlockDecomposition, w: &WeakWitness, tol: &TolerancePolicy) -> CMat {
    let k = dec.s().dim();
    let p = dec.s_perp().dim();
    let y0 = w.f().adjoint() * w.u().matrix() * pinv(w.absa_half().matrix(), tol);
    dec.assemble(
        &CMat::identity(k, k),
        &CMat::zeros(k, p),
        &y0,
        &CMat::zeros(p, p),
    )
}

/// The distinguished member of `P*(B, S)`: `E0 = [[I, 0], [y0, 0]]` with
/// `y0 = f^H u (|a|^{1/2})^+`. Its nullspace is `S⊥` and `E0 B` is
/// selfadjoint.
pub fn e0_projection(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let (dec, w) = decompose_and_witness(b, s, tol)?;
    let e0 = e0_matrix(&dec, &w, tol);
    Ok(Projection::from_parts(
        PartialOperator::total(e0.clone()),
        range_of(&e0, tol),
        s.complement(),
    ))
}

/// Membership of a projection in `P*(B, S)`: the nullspace must be `S⊥`,
/// the domain must contain `R(|a|^{1/2}) ⊕ S⊥`, and the block `y` of
/// `E = [[I, 0], [y, 0]]` must solve `y a = b^H` with `y b` selfadjoint.
/// Equivalently, `BS ⊆ R(E)`.
pub fn pstar_membership(
    e: &Projection,
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<bool> {
    if !e.null_sub().same_space(&s.complement(), tol) {
        return Err(Error::WrongNullspace);
    }
    let dec = block_decompose(b, s, tol);
    let (_, abs_a) = polar_selfadjoint_with_zero_sign(dec.a(), tol, true);
    let h = sqrt_psd(&abs_a, tol)?;
    let h_lift = orthonormalize(&(s.basis() * range_of(h.matrix(), tol).basis()), tol);
    let domain_ok =
        e.domain().contains(&h_lift, tol) && e.domain().contains(&s.complement(), tol);
    if !domain_ok {
        return Ok(false);
    }
    let em = e.canonical_matrix();
    let y = dec.s_perp().basis().adjoint() * &em * s.basis();
    let ya_ok = rel_eq(&(&y * dec.a().matrix()), &dec.b().adjoint(), tol.residual_tol);
    let yb = &y * dec.b();
    let yb_hermitian = rel_eq(&yb, &yb.adjoint(), tol.residual_tol);
    Ok(ya_ok && yb_hermitian)
}

/// Perturb `E0` by an admissible `W`: everywhere defined, `R(W) ⊆ S⊥` and
/// `BS + S⊥ ⊆ N(W)`. The sum is again a member of `P*(B, S)` with the same
/// domain.
pub fn pstar0_perturb(
    b: &HermitianOperator,
    s: &Subspace,
    w: &PartialOperator,
    tol: &TolerancePolicy,
) -> Result<Projection> {
    let (dec, wit) = decompose_and_witness(b, s, tol)?;
    if w.domain().dim() < s.ambient_dim() {
        return Err(Error::InadmissibleW {
            condition: "D(W) must contain D(E0)".into(),
        });
    }
    let wm = w.canonical_matrix();
    let s_perp = s.complement();
    if !s_perp.contains(&range_of(&wm, tol), tol) {
        return Err(Error::InadmissibleW {
            condition: "R(W) must lie in S_perp".into(),
        });
    }
    let bs = b.matrix() * s.basis();
    let on_bs = (&wm * &bs).norm() / bs.norm().max(1.0);
    let on_perp = (&wm * s_perp.basis()).norm() / s_perp.basis().norm().max(1.0);
    if on_bs > tol.residual_tol || on_perp > tol.residual_tol {
        return Err(Error::InadmissibleW {
            condition: "N(W) must contain BS + S_perp".into(),
        });
    }
    let e = e0_matrix(&dec, &wit, tol) + wm;
    Ok(Projection::from_parts(
        PartialOperator::total(e.clone()),
        range_of(&e, tol),
        s_perp,
    ))
}

/// Split a selfadjoint `h` into its positive and negative spectral parts
/// `(h_plus, h_minus)` with `h = h_plus - h_minus`.
fn spectral_split(h: &HermitianOperator, tol: &TolerancePolicy) -> (CMat, CMat) {
    let k = h.dim();
    let mut plus = CMat::zeros(k, k);
    let mut minus = CMat::zeros(k, k);
    if k == 0 {
        return (plus, minus);
    }
    let se = SymmetricEigen::new(h.matrix().clone());
    let scale = se.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let band = tol.rank_tol_rel * scale;
    for i in 0..k {
        let l = se.eigenvalues[i];
        if l.abs() <= band {
            continue;
        }
        let v = se.eigenvectors.column(i).into_owned();
        let outer = &v * v.adjoint();
        if l > 0.0 {
            plus += &outer * re(l);
        } else {
            minus += &outer * re(-l);
        }
    }
    (plus, minus)
}

/// The three-term decomposition `B = B1 + B2 - B3` with `B2, B3` PSD,
/// `S ⊆ N(B1)`, `S₋ ⊆ N(B2)`, `S₊ ⊆ N(B3)`, built from the spectral split
/// `a = a₊ - a₋` and the matching split of `f`. Moreover `B1 = B_{/S}`.
pub fn weak_decomposition(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<(HermitianOperator, HermitianOperator, HermitianOperator)> {
    let (dec, w) = decompose_and_witness(b, s, tol)?;
    let (aplus, aminus) = spectral_split(dec.a(), tol);
    let p_plus = range_of(&aplus, tol).projector();
    let p_minus = range_of(&aminus, tol).projector();
    let fplus = p_plus.matrix() * w.f();
    let fminus = p_minus.matrix() * w.f();
    let hplus = sqrt_psd(&HermitianOperator::symmetrize(aplus.clone()), tol)?;
    let hminus = sqrt_psd(&HermitianOperator::symmetrize(aminus.clone()), tol)?;
    let b2_sp = hplus.matrix() * &fplus;
    let b3_sp = hminus.matrix() * &fminus * re(-1.0);
    let b2 = dec.assemble(
        &aplus,
        &b2_sp,
        &b2_sp.adjoint(),
        &(fplus.adjoint() * &fplus),
    );
    let b3 = dec.assemble(
        &aminus,
        &b3_sp,
        &b3_sp.adjoint(),
        &(fminus.adjoint() * &fminus),
    );
    let b1 = b.matrix() - &b2 + &b3;
    Ok((
        HermitianOperator::symmetrize(b1),
        HermitianOperator::symmetrize(b2),
        HermitianOperator::symmetrize(b3),
    ))
}

fn schur_from(
    dec: &BlockDecomposition,
    w: &WeakWitness,
    _tol: &TolerancePolicy,
) -> HermitianOperator {
    let core = dec.c().matrix() - w.f().adjoint() * w.u().matrix() * w.f();
    let k = dec.s().dim();
    let p = dec.s_perp().dim();
    let lifted = dec.assemble(
        &CMat::zeros(k, k),
        &CMat::zeros(k, p),
        &CMat::zeros(p, k),
        &core,
    );
    HermitianOperator::symmetrize(lifted)
}

/// Schur complement `B_{/S} = [[0, 0], [0, c - f^H u f]]`.
pub fn schur_complement(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<HermitianOperator> {
    let (dec, w) = decompose_and_witness(b, s, tol)?;
    Ok(schur_from(&dec, &w, tol))
}

#[cfg(test)]
pub(crate) fn schur_complement_with_zero_sign(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
    zero_sign_positive: bool,
) -> Result<HermitianOperator> {
    let dec = block_decompose(b, s, tol);
    let w = WeakWitness::compute_with_zero_sign(&dec, tol, zero_sign_positive)?;
    Ok(schur_from(&dec, &w, tol))
}

/// Compression `B_S = B - B_{/S}`.
pub fn compression(
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<HermitianOperator> {
    let sc = schur_complement(b, s, tol)?;
    Ok(HermitianOperator::symmetrize(b.matrix() - sc.matrix()))
}

/// Schur complement through a member of `P*(B, S)`: `(I - E) B`. The value
/// does not depend on the member chosen.
pub fn schur_via_projection(
    b: &HermitianOperator,
    s: &Subspace,
    e: &Projection,
    tol: &TolerancePolicy,
) -> Result<HermitianOperator> {
    if !pstar_membership(e, b, s, tol)? {
        return Err(Error::NotMember);
    }
    let n = b.dim();
    let value = (CMat::identity(n, n) - e.canonical_matrix()) * b.matrix();
    HermitianOperator::new(value, tol)
}

/// The three partial orders on matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// Rank additivity on both the range and the adjoint-range side.
    Minus,
    /// Rank additivity on the range side only.
    LeftMinus,
    /// Trivial intersections `R(A) ∩ R(B-A)` and `R(A^H) ∩ R(B^H-A^H)`.
    Prec,
}

fn rank_additive(a: &CMat, b: &CMat, tol: &TolerancePolicy) -> bool {
    let diff = b - a;
    // the difference is our arithmetic, so cancellation noise in it is cut
    // at round-off relative to the operands
    let scale = a.norm().max(b.norm());
    range_of(a, tol).dim() + orthonormalize_scaled(&diff, scale, tol).dim()
        == range_of(b, tol).dim()
}

/// The witnessing projection of the left-minus order,
/// `P = P_{R(A) // R(B-A) ⊕ N(B^H)}`, which satisfies `A = P B` whenever
/// `A` left-minus precedes `B`.
pub fn left_minus_witness(a: &CMat, b: &CMat, tol: &TolerancePolicy) -> Result<Projection> {
    let diff = b - a;
    let scale = a.norm().max(b.norm());
    let ra = range_of(a, tol);
    let null_part = orthonormalize(
        &hcat(&[
            orthonormalize_scaled(&diff, scale, tol).basis(),
            nullspace_of(&b.adjoint(), tol).basis(),
        ]),
        tol,
    );
    make_projection(&ra, &null_part, tol)
}

fn trivial_intersections(a: &CMat, b: &CMat, tol: &TolerancePolicy) -> Result<bool> {
    let diff = b - a;
    let primal = range_intersection(a, &diff, tol)?.dim() == 0;
    let at = a.adjoint();
    let dt = diff.adjoint();
    let dual = range_intersection(&at, &dt, tol)?.dim() == 0;
    Ok(primal && dual)
}

/// Decide `A ≤ B` in the chosen order. At finite dimension the three
/// coincide; their definitions differ and are implemented separately.
pub fn order_check(kind: OrderKind, a: &CMat, b: &CMat, tol: &TolerancePolicy) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", b.nrows(), b.ncols()),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    match kind {
        OrderKind::Minus => {
            Ok(rank_additive(a, b, tol) && rank_additive(&a.adjoint(), &b.adjoint(), tol))
        }
        OrderKind::LeftMinus => {
            if !rank_additive(a, b, tol) {
                return Ok(false);
            }
            let p = left_minus_witness(a, b, tol)?;
            Ok(rel_eq(&(p.canonical_matrix() * b), a, tol.residual_tol))
        }
        OrderKind::Prec => trivial_intersections(a, b, tol),
    }
}

fn is_m_member(
    x: &CMat,
    q: &CMat,
    b: &HermitianOperator,
    s_perp: &Subspace,
    tol: &TolerancePolicy,
) -> bool {
    rel_eq(&(q * q), q, tol.residual_tol)
        && rel_eq(&(q * b.matrix()), x, tol.residual_tol)
        && rel_eq(x, &x.adjoint(), tol.residual_tol)
        && s_perp.contains(&range_of(x, tol), tol)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        crate::numlin::C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

/// Deterministic sample of members of
/// `M(B, S) = {X selfadjoint : R(X) ⊆ S⊥, X = Q B for an idempotent Q}`.
/// The sample always contains `B_{/S}` (through `Q = I - E0`) and the zero
/// matrix (`Q = 0`); further members come from spectral truncations of
/// `B_{/S}` and from rejection-sampled random idempotents. Up to `count`
/// distinct members are returned; every one is verified against the
/// membership definition.
pub fn m_set_sample(
    b: &HermitianOperator,
    s: &Subspace,
    count: usize,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<Vec<HermitianOperator>> {
    let (dec, w) = decompose_and_witness(b, s, tol)?;
    let n = b.dim();
    let s_perp = s.complement();
    let e0 = e0_matrix(&dec, &w, tol);
    let q0 = CMat::identity(n, n) - &e0;
    let bs = schur_from(&dec, &w, tol);

    let mut out: Vec<HermitianOperator> = Vec::new();
    let push_unique = |x: CMat, q: &CMat, out: &mut Vec<HermitianOperator>| {
        if !is_m_member(&x, q, b, &s_perp, tol) {
            return;
        }
        if out
            .iter()
            .all(|y| rel_dist(y.matrix(), &x) > tol.residual_tol)
        {
            out.push(HermitianOperator::symmetrize(x));
        }
    };

    push_unique(bs.matrix().clone(), &q0, &mut out);
    push_unique(CMat::zeros(n, n), &CMat::zeros(n, n), &mut out);

    // spectral truncations of B_{/S}: Q'_T (I - E0) stays idempotent because
    // I - E0 acts as the identity on S⊥ ⊇ R(Q'_T)
    let se = SymmetricEigen::new(bs.matrix().clone());
    let scale = se.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let band = tol.rank_tol_rel * scale;
    let kept: Vec<usize> = (0..n).filter(|&i| se.eigenvalues[i].abs() > band).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masks: Vec<u64> = if kept.len() <= 6 {
        (1..(1u64 << kept.len())).collect()
    } else {
        (0..count as u64)
            .map(|_| rng.gen_range(1..(1u64 << kept.len().min(63))))
            .collect()
    };
    for mask in masks {
        if out.len() >= count {
            break;
        }
        let mut qt = CMat::zeros(n, n);
        for (pos, &i) in kept.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                let v = se.eigenvectors.column(i).into_owned();
                qt += &v * v.adjoint();
            }
        }
        let q = &qt * &q0;
        push_unique(&q * b.matrix(), &q, &mut out);
    }

    // random idempotents, accepted only when Q B is selfadjoint with range
    // in S⊥
    let mut attempts = 0usize;
    while out.len() < count && attempts < 60 * count.max(1) {
        attempts += 1;
        let dm = rng.gen_range(0..=n);
        let dn = rng.gen_range(0..=(n - dm));
        let m_sub = orthonormalize(&random_matrix(&mut rng, n, dm), tol);
        let n_sub = orthonormalize(&random_matrix(&mut rng, n, dn), tol);
        if let Ok(proj) = make_projection(&m_sub, &n_sub, tol) {
            let q = proj.canonical_matrix();
            push_unique(&q * b.matrix(), &q, &mut out);
        }
    }
    Ok(out)
}

/// `B_{/S}` is the `≺`-maximum of `M(B, S)`: it belongs to the sample and
/// every sampled member precedes it.
pub fn max_check(
    b: &HermitianOperator,
    s: &Subspace,
    sample: &[HermitianOperator],
    tol: &TolerancePolicy,
) -> Result<bool> {
    let bs = schur_complement(b, s, tol)?;
    let present = sample
        .iter()
        .any(|x| rel_dist(x.matrix(), bs.matrix()) <= tol.residual_tol);
    if !present {
        return Ok(false);
    }
    for x in sample {
        if !order_check(OrderKind::Prec, x.matrix(), bs.matrix(), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Selfadjoint extension of `B E` for a B-symmetric projection `E` onto a
/// weakly complementable `S`:
/// `B2^{1/2} P_{M2} B2^{1/2} - B3^{1/2} P_{M3} B3^{1/2}` with
/// `M2 = B2^{1/2}(S₊)` and `M3 = B3^{1/2}(S₋)`.
pub fn closure_extension(
    e: &Projection,
    b: &HermitianOperator,
    tol: &TolerancePolicy,
) -> Result<HermitianOperator> {
    if !crate::weights::is_b_symmetric(e, b, tol) {
        return Err(Error::NotBSymmetric);
    }
    let s = e.range_sub();
    let (_, b2, b3) = weak_decomposition(b, s, tol)?;
    let split = crate::weights::grammian_split(b, s, tol);
    let b2h = sqrt_psd(&b2, tol)?;
    let b3h = sqrt_psd(&b3, tol)?;
    let m2 = image_of(b2h.matrix(), split.splus(), tol);
    let m3 = image_of(b3h.matrix(), split.sminus(), tol);
    let term2 = b2h.matrix() * m2.projector().matrix() * b2h.matrix();
    let term3 = b3h.matrix() * m3.projector().matrix() * b3h.matrix();
    Ok(HermitianOperator::symmetrize(term2 - term3))
}

/// Factor a B-symmetric projection onto `S` as `E = E₊ + E₋` along the
/// Grammian split `S = S₊ ⊕ S₋`: `E₊ = P_{S₊} E` is B2-symmetric and
/// `E₋ = P_{S₋} E` is B3-symmetric, with `E₊ E₋ = E₋ E₊ = 0`.
pub fn bsym_split(
    e: &Projection,
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> Result<(Projection, Projection)> {
    if !s.same_space(e.range_sub(), tol) {
        return Err(Error::RangeMismatch {
            what: "S differs from R(E)".into(),
        });
    }
    if !crate::weights::is_b_symmetric(e, b, tol) {
        return Err(Error::NotBSymmetric);
    }
    let split = crate::weights::grammian_split(b, s, tol);
    let part = |target: &Subspace, other: &Subspace| -> Result<Projection> {
        let action = target.projector().matrix() * e.base().action();
        let base = PartialOperator::new(e.domain().clone(), action)?;
        let null = orthonormalize(&hcat(&[e.null_sub().basis(), other.basis()]), tol);
        Ok(Projection::from_parts(base, target.clone(), null))
    };
    let eplus = part(split.splus(), split.sminus())?;
    let eminus = part(split.sminus(), split.splus())?;
    Ok((eplus, eminus))
}
