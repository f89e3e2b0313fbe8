//! Shared random generators for the integration suites.
//!
//! Each test binary compiles this module independently and uses a different
//! subset of the helpers.
#![allow(dead_code)]

use orcalc::numlin::{
    orthonormalize, polar_selfadjoint, range_of, re, sqrt_psd, CMat, CVec, HermitianOperator,
    Subspace, TolerancePolicy, C64,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

pub fn random_real_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| re(rng.gen::<f64>() * 2.0 - 1.0))
}

pub fn random_subspace(rng: &mut ChaCha8Rng, n: usize, dim: usize, tol: &TolerancePolicy) -> Subspace {
    orthonormalize(&random_matrix(rng, n, dim), tol)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let g = random_matrix(rng, n, n);
    HermitianOperator::symmetrize(&g + g.adjoint())
}

/// PSD matrix of the prescribed rank.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> HermitianOperator {
    let g = random_matrix(rng, n, rank);
    HermitianOperator::symmetrize(&g * g.adjoint())
}

/// PSD matrix whose range is exactly `s`: a ridge keeps the core positive
/// definite on the subspace.
pub fn psd_with_range(rng: &mut ChaCha8Rng, s: &Subspace) -> HermitianOperator {
    let k = s.dim();
    let g = random_matrix(rng, k, k);
    let core = &g * g.adjoint() + CMat::identity(k, k) * re(0.5);
    HermitianOperator::symmetrize(s.basis() * core * s.basis().adjoint())
}

/// Hermitian matrix with `zeros` eigenvalues pinned to zero and the rest
/// drawn from `[-1, 1]` away from the origin.
pub fn random_hermitian_with_kernel(rng: &mut ChaCha8Rng, n: usize, zeros: usize) -> HermitianOperator {
    let q = orthonormalize(&random_matrix(rng, n, n), &TolerancePolicy::for_dim(n));
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        let lam = if i < zeros {
            0.0
        } else {
            let mag = 0.2 + 0.8 * rng.gen::<f64>();
            if rng.gen::<bool>() {
                mag
            } else {
                -mag
            }
        };
        let qi = q.basis().column(i).into_owned();
        m += &qi * qi.adjoint() * re(lam);
    }
    HermitianOperator::symmetrize(m)
}

/// Assemble an ambient Hermitian matrix from blocks against the canonical
/// bases of `s` and its complement.
pub fn assemble(s: &Subspace, a: &CMat, b: &CMat, c: &CMat) -> HermitianOperator {
    let sb = s.basis();
    let perp = s.complement();
    let pb = perp.basis();
    let m = sb * a * sb.adjoint()
        + sb * b * pb.adjoint()
        + pb * b.adjoint() * sb.adjoint()
        + pb * c * pb.adjoint();
    HermitianOperator::symmetrize(m)
}

/// Weakly complementable pair engineered as `b = |a|^{1/2} * random`, with
/// an optionally singular corner `a`.
pub fn weakly_complementable_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    singular_corner: bool,
    tol: &TolerancePolicy,
) -> (HermitianOperator, Subspace) {
    let s = random_subspace(rng, n, k, tol);
    let k = s.dim();
    let zeros = if singular_corner && k > 1 { 1 + rng.gen_range(0..k / 2 + 1) } else { 0 };
    let a = random_hermitian_with_kernel(rng, k, zeros.min(k));
    let (_, abs_a) = polar_selfadjoint(&a, tol);
    let h = sqrt_psd(&abs_a, tol).expect("|a| is PSD");
    let b = h.matrix() * random_matrix(rng, k, n - k);
    let cg = random_matrix(rng, n - k, n - k);
    let c = &cg + cg.adjoint();
    (assemble(&s, a.matrix(), &b, &c), s)
}

/// A pair `(A, B)` with `A` below `B` in all three partial orders: the
/// difference is built on ranges and corange independent from `A`'s.
pub fn ordered_pair(rng: &mut ChaCha8Rng, n: usize, r1: usize, r2: usize) -> (CMat, CMat) {
    let x = random_matrix(rng, n, r1 + r2);
    let y = random_matrix(rng, n, r1 + r2);
    let a = x.columns(0, r1) * y.columns(0, r1).adjoint();
    let d = x.columns(r1, r2) * y.columns(r1, r2).adjoint();
    let b = &a + &d;
    (a.into_owned(), b)
}

/// Membership residual of `v` in a subspace.
pub fn outside_norm(v: &CMat, s: &Subspace) -> f64 {
    (v - s.projector().matrix() * v).norm()
}

/// Admissible perturbations for `pstar0_perturb`: operators sending the
/// complement of `BS + S⊥` into `S⊥`.
pub fn admissible_w(
    rng: &mut ChaCha8Rng,
    b: &HermitianOperator,
    s: &Subspace,
    tol: &TolerancePolicy,
) -> CMat {
    let n = b.dim();
    let s_perp = s.complement();
    let bs = b.matrix() * s.basis();
    let span = orthonormalize(
        &orcalc::numlin::hcat(&[&bs, s_perp.basis()]),
        tol,
    );
    let z = span.complement();
    if z.dim() == 0 || s_perp.dim() == 0 {
        return CMat::zeros(n, n);
    }
    let coeff = random_matrix(rng, s_perp.dim(), z.dim());
    s_perp.basis() * coeff * z.basis().adjoint()
}

/// Largest singular value of `m`, used for scale-aware bounds.
pub fn spec_norm(m: &CMat) -> f64 {
    orcalc::numlin::spectral_norm(m)
}

pub fn range_dim(m: &CMat, tol: &TolerancePolicy) -> usize {
    range_of(m, tol).dim()
}
