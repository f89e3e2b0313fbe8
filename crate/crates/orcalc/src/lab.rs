//! Truncation lab: finite sections of two infinite-dimensional phenomena.
//!
//! Both models are genuinely semiclosed only in infinite dimension; their
//! finite sections are honest instances whose margins trend toward the
//! degenerate limit as the truncation size grows. The lab builds the ladder
//! `n = 4, 8, 16, ...` and tracks, per rung, the weak-complementability
//! margin, the quasi-complementability margin (smallest principal angle
//! between `BS` and `S⊥`) and the norm of the `E0` coupling block `y0`.
//!
//! * `ex1`: on `C^{2n}`, `B = [[a, I], [I, 0]]` with `a = diag(1, 1/2, ...,
//!   1/n)` and `S` the first coordinate block. The coupling is invertible
//!   while `a` flattens, so `y0 = a^{-1}` and `‖y0‖ = n` diverges: the limit
//!   object has no bounded B-symmetric projection onto `S`.
//! * `ex214`: on `C^{2n}`, `B = diag(1, 1/2, ..., 1/n) ⊕ 0` and `S⊥` spanned
//!   by the near-limit vector `(1, 1/2, ..., 1/n, 0, ..., 0)`, a truncation
//!   of a vector in `closure(R(B)) \ R(B)`. The angle between `BS` and `S⊥`
//!   sinks toward zero: quasi-complementability degenerates in the limit.

use crate::error::Error;
use crate::numlin::{
    orthonormalize, pinv, re, spectral_norm, CMat, HermitianOperator, Subspace, TolerancePolicy,
};
use crate::schur::{
    is_quasi_complementable, is_weakly_complementable, quasi_margin, weak_margin,
};
use crate::Result;

/// The two lab models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabModel {
    Ex1,
    Ex214,
}

impl LabModel {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ex1" => Ok(LabModel::Ex1),
            "ex214" => Ok(LabModel::Ex214),
            other => Err(Error::BadModel {
                model: other.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LabModel::Ex1 => "ex1",
            LabModel::Ex214 => "ex214",
        }
    }
}

/// `B = [[a, I], [I, 0]]` on `C^{2n}`, `a = diag(1, 1/2, ..., 1/n)`,
/// `S` = first coordinate block.
pub fn ex1_instance(n: usize) -> (HermitianOperator, Subspace) {
    let dim = 2 * n;
    let m = CMat::from_fn(dim, dim, |i, j| {
        if i < n && j < n && i == j {
            re(1.0 / (i as f64 + 1.0))
        } else if (i < n && j == i + n) || (j < n && i == j + n) {
            re(1.0)
        } else {
            re(0.0)
        }
    });
    let s_cols = CMat::from_fn(dim, n, |i, j| if i == j { re(1.0) } else { re(0.0) });
    let tol = TolerancePolicy::for_dim(dim);
    let b = HermitianOperator::new(m, &tol).expect("constructed symmetric");
    (b, orthonormalize(&s_cols, &tol))
}

/// `B = diag(1, 1/2, ..., 1/n) ⊕ 0` on `C^{2n}` with `S⊥` spanned by the
/// near-limit vector `(1, 1/2, ..., 1/n, 0, ..., 0)`.
pub fn ex214_instance(n: usize) -> (HermitianOperator, Subspace) {
    let dim = 2 * n;
    let m = CMat::from_fn(dim, dim, |i, j| {
        if i == j && i < n {
            re(1.0 / (i as f64 + 1.0))
        } else {
            re(0.0)
        }
    });
    let v = CMat::from_fn(dim, 1, |i, _| {
        if i < n {
            re(1.0 / (i as f64 + 1.0))
        } else {
            re(0.0)
        }
    });
    let tol = TolerancePolicy::for_dim(dim);
    let b = HermitianOperator::new(m, &tol).expect("constructed symmetric");
    let s = orthonormalize(&v, &tol).complement();
    (b, s)
}

pub fn instance(model: LabModel, n: usize) -> (HermitianOperator, Subspace) {
    match model {
        LabModel::Ex1 => ex1_instance(n),
        LabModel::Ex214 => ex214_instance(n),
    }
}

/// Measurements at one truncation size.
#[derive(Clone, Copy, Debug)]
pub struct LabPoint {
    pub n: usize,
    pub weak: bool,
    pub quasi: bool,
    pub weak_margin: f64,
    pub quasi_margin_sin: f64,
    pub quasi_margin_deg: f64,
    pub y0_norm: f64,
}

/// Keep the user-facing decision tolerances while letting the rank cutoff
/// scale with the rung dimension.
fn scaled(base: &TolerancePolicy, dim: usize) -> TolerancePolicy {
    let mut t = TolerancePolicy::for_dim(dim);
    t.sym_tol = base.sym_tol;
    t.residual_tol = base.residual_tol;
    t
}

pub fn lab_point(model: LabModel, n: usize, base: &TolerancePolicy) -> Result<LabPoint> {
    if n < 4 {
        return Err(Error::Parse("lab truncation size must be at least 4".into()));
    }
    let (b, s) = instance(model, n);
    let tol = scaled(base, b.dim());
    let (weak, witness) = is_weakly_complementable(&b, &s, &tol);
    let quasi = is_quasi_complementable(&b, &s, &tol);
    let wm = weak_margin(&b, &s, &tol);
    let qs = quasi_margin(&b, &s, &tol);
    let y0_norm = match witness {
        Some(w) => {
            let y0 = w.f().adjoint() * w.u().matrix() * pinv(w.absa_half().matrix(), &tol);
            spectral_norm(&y0)
        }
        None => f64::INFINITY,
    };
    Ok(LabPoint {
        n,
        weak,
        quasi,
        weak_margin: wm,
        quasi_margin_sin: qs,
        quasi_margin_deg: qs.asin().to_degrees(),
        y0_norm,
    })
}

/// Truncation sizes `4, 8, 16, ...` up to `max_n`.
pub fn ladder(max_n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 4;
    while n <= max_n {
        out.push(n);
        n *= 2;
    }
    out
}

/// Run the ladder for a model and collect the per-rung measurements.
pub fn lab_run(model: LabModel, max_n: usize, base: &TolerancePolicy) -> Result<Vec<LabPoint>> {
    if max_n < 4 {
        return Err(Error::Parse("lab truncation size must be at least 4".into()));
    }
    ladder(max_n)
        .into_iter()
        .map(|n| lab_point(model, n, base))
        .collect()
}

/// Reference value of the ex214 quasi margin: the sine of the angle between
/// `BS = 1⊥` and the normalized near-limit vector is `H_n / (sqrt(n) ‖v‖)`.
pub fn ex214_margin_formula(n: usize) -> f64 {
    let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    let vnorm: f64 = (1..=n)
        .map(|i| 1.0 / (i as f64 * i as f64))
        .sum::<f64>()
        .sqrt();
    harmonic / ((n as f64).sqrt() * vnorm)
}
