//! Command implementations behind the `orcalc` binary.
//!
//! Each command loads explicit-shape matrix files, runs library calls under
//! a dimension-aware tolerance policy (optionally overridden by the user)
//! and assembles a [`Report`](crate::io::Report) pairing every verdict with
//! its numerical margin. The binary decides exit codes from the error kind
//! and, under `--strict`, from the verdicts.

use std::time::Instant;

use clap::ValueEnum;

use crate::error::Error;
use crate::io::{MatrixFile, Report};
use crate::lab::{lab_run, LabModel, LabPoint};
use crate::numlin::{
    orthonormalize, range_of, rel_dist, CMat, HermitianOperator, Subspace, TolerancePolicy,
};
use crate::ranges::range_intersection;
use crate::schur::{
    complementability_check, complementable_margin, compression, e0_projection,
    is_quasi_complementable, is_weakly_complementable, left_minus_witness, order_check,
    quasi_margin, schur_complement, schur_via_projection, weak_margin, OrderKind,
};
use crate::Result;

/// Predicates decidable by `orcalc check`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckProperty {
    Complementable,
    Weak,
    Quasi,
}

impl CheckProperty {
    fn name(&self) -> &'static str {
        match self {
            CheckProperty::Complementable => "complementable",
            CheckProperty::Weak => "weak",
            CheckProperty::Quasi => "quasi",
        }
    }
}

/// How `orcalc schur` computes the complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchurRoute {
    Formula,
    Projection,
    Both,
}

/// Partial orders accepted by `orcalc order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Minus,
    LeftMinus,
    Prec,
}

impl OrderArg {
    fn name(&self) -> &'static str {
        match self {
            OrderArg::Minus => "minus",
            OrderArg::LeftMinus => "left-minus",
            OrderArg::Prec => "prec",
        }
    }
}

impl From<OrderArg> for OrderKind {
    fn from(a: OrderArg) -> Self {
        match a {
            OrderArg::Minus => OrderKind::Minus,
            OrderArg::LeftMinus => OrderKind::LeftMinus,
            OrderArg::Prec => OrderKind::Prec,
        }
    }
}

/// Dimension-aware tolerance policy with the user override applied to the
/// decision tolerances (the rank cutoff keeps its dimensional scaling).
pub fn policy_for(dim: usize, user_tol: Option<f64>) -> Result<TolerancePolicy> {
    let t = TolerancePolicy::for_dim(dim);
    match user_tol {
        None => Ok(t),
        Some(u) if u > 0.0 && u < 1.0 => Ok(t.with_sym_tol(u).with_residual_tol(u)),
        Some(u) => Err(Error::Parse(format!(
            "tolerance must lie strictly between 0 and 1, got {u}"
        ))),
    }
}

fn load_pair(
    b_file: &MatrixFile,
    s_file: &MatrixFile,
    user_tol: Option<f64>,
) -> Result<(HermitianOperator, Subspace, TolerancePolicy)> {
    let bm = b_file.to_matrix()?;
    if bm.nrows() != bm.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", bm.nrows(), bm.ncols()),
        });
    }
    let tol = policy_for(bm.nrows(), user_tol)?;
    let b = HermitianOperator::new(bm, &tol)?;
    let sm = s_file.to_matrix()?;
    if sm.nrows() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("subspace over C^{}", b.dim()),
            found: format!("vectors of length {}", sm.nrows()),
        });
    }
    Ok((b, orthonormalize(&sm, &tol), tol))
}

/// `orcalc check`: decide one of the complementability predicates.
pub fn cmd_check(
    property: CheckProperty,
    b_file: &MatrixFile,
    s_file: &MatrixFile,
    user_tol: Option<f64>,
) -> Result<Report> {
    let start = Instant::now();
    let (b, s, tol) = load_pair(b_file, s_file, user_tol)?;
    let mut r = Report::new(format!("check --property {}", property.name()), &tol);
    match property {
        CheckProperty::Complementable => {
            let chk = complementability_check(&b, &s, &tol);
            r.verdict(
                "complementable",
                chk.algebraic,
                complementable_margin(&b, &s, &tol),
            );
            r.verdict(
                "geometric_route_agrees",
                chk.geometric == chk.algebraic,
                if chk.geometric == chk.algebraic { 0.0 } else { 1.0 },
            );
            r.residual("range_inclusion_residual", chk.inclusion_residual);
        }
        CheckProperty::Weak => {
            let (ok, _) = is_weakly_complementable(&b, &s, &tol);
            r.verdict("weakly_complementable", ok, weak_margin(&b, &s, &tol));
        }
        CheckProperty::Quasi => {
            let ok = is_quasi_complementable(&b, &s, &tol);
            r.verdict("quasi_complementable", ok, quasi_margin(&b, &s, &tol));
        }
    }
    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}

/// `orcalc schur`: Schur complement and compression, by block formula, by
/// projection, or by both with the cross-route residual.
pub fn cmd_schur(
    b_file: &MatrixFile,
    s_file: &MatrixFile,
    route: SchurRoute,
    user_tol: Option<f64>,
) -> Result<Report> {
    let start = Instant::now();
    let (b, s, tol) = load_pair(b_file, s_file, user_tol)?;
    let route_name = match route {
        SchurRoute::Formula => "formula",
        SchurRoute::Projection => "projection",
        SchurRoute::Both => "both",
    };
    let mut r = Report::new(format!("schur --route {route_name}"), &tol);
    match route {
        SchurRoute::Formula => {
            let sc = schur_complement(&b, &s, &tol)?;
            r.matrix("schur_complement", sc.matrix());
            r.matrix("compression", compression(&b, &s, &tol)?.matrix());
        }
        SchurRoute::Projection => {
            let e0 = e0_projection(&b, &s, &tol)?;
            let sc = schur_via_projection(&b, &s, &e0, &tol)?;
            r.matrix("schur_complement", sc.matrix());
            r.matrix("e0", &e0.canonical_matrix());
        }
        SchurRoute::Both => {
            let sc = schur_complement(&b, &s, &tol)?;
            let e0 = e0_projection(&b, &s, &tol)?;
            let via = schur_via_projection(&b, &s, &e0, &tol)?;
            let cross = rel_dist(sc.matrix(), via.matrix());
            r.matrix("schur_complement", sc.matrix());
            r.matrix("compression", compression(&b, &s, &tol)?.matrix());
            r.matrix("e0", &e0.canonical_matrix());
            r.residual("cross_route", cross);
            r.verdict("routes_agree", cross <= tol.residual_tol, cross);
        }
    }
    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}

fn rank_defect(a: &CMat, b: &CMat, tol: &TolerancePolicy) -> f64 {
    let diff = b - a;
    let ra = range_of(a, tol).dim() as f64;
    let rd = range_of(&diff, tol).dim() as f64;
    let rb = range_of(b, tol).dim() as f64;
    (ra + rd - rb).abs()
}

/// `orcalc order`: decide `A ≤ B` in the chosen order; when the verdict is
/// positive the witnessing projection(s) are attached.
pub fn cmd_order(
    kind: OrderArg,
    a_file: &MatrixFile,
    b_file: &MatrixFile,
    user_tol: Option<f64>,
) -> Result<Report> {
    let start = Instant::now();
    let a = a_file.to_matrix()?;
    let b = b_file.to_matrix()?;
    let tol = policy_for(
        a.nrows().max(a.ncols()).max(b.nrows()).max(b.ncols()),
        user_tol,
    )?;
    let verdict = order_check(kind.into(), &a, &b, &tol)?;
    let margin = match kind {
        OrderArg::Minus => {
            rank_defect(&a, &b, &tol) + rank_defect(&a.adjoint(), &b.adjoint(), &tol)
        }
        OrderArg::LeftMinus => rank_defect(&a, &b, &tol),
        OrderArg::Prec => {
            let diff = &b - &a;
            let primal = range_intersection(&a, &diff, &tol)?.dim();
            let dual = range_intersection(&a.adjoint(), &diff.adjoint(), &tol)?.dim();
            (primal + dual) as f64
        }
    };
    let mut r = Report::new(format!("order --kind {}", kind.name()), &tol);
    r.verdict(kind.name(), verdict, margin);
    if verdict && kind != OrderArg::Prec {
        let p = left_minus_witness(&a, &b, &tol)?;
        r.matrix("witness_p", &p.canonical_matrix());
        r.residual("witness_residual", rel_dist(&(p.canonical_matrix() * &b), &a));
        if kind == OrderArg::Minus {
            let q = left_minus_witness(&a.adjoint(), &b.adjoint(), &tol)?;
            r.matrix("witness_p_adjoint", &q.canonical_matrix());
            r.residual(
                "witness_adjoint_residual",
                rel_dist(&(q.canonical_matrix() * b.adjoint()), &a.adjoint()),
            );
        }
    }
    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}

fn monotone(values: &[f64], increasing: bool) -> (bool, f64) {
    let mut ok = true;
    let mut gap = f64::INFINITY;
    for w in values.windows(2) {
        let d = if increasing { w[1] - w[0] } else { w[0] - w[1] };
        ok &= d > 0.0;
        gap = gap.min(d);
    }
    (ok, if gap.is_finite() { gap } else { 0.0 })
}

/// `orcalc lab`: run the truncation ladder up to `n` and report margins,
/// `‖y0‖` growth and the model's trend verdicts.
pub fn cmd_lab(model: LabModel, n: usize, user_tol: Option<f64>) -> Result<Report> {
    let start = Instant::now();
    let tol = policy_for(2 * n.max(4), user_tol)?;
    let points = lab_run(model, n, &tol)?;
    let sizes: Vec<usize> = points.iter().map(|p| p.n).collect();
    let grab = |f: fn(&LabPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
    let weak_margins = grab(|p| p.weak_margin);
    let quasi_sins = grab(|p| p.quasi_margin_sin);
    let quasi_degs = grab(|p| p.quasi_margin_deg);
    let y0_norms = grab(|p| p.y0_norm);

    let mut r = Report::new(format!("lab --model {} --n {n}", model.name()), &tol);
    r.series("weak_margin", sizes.clone(), weak_margins.clone());
    r.series("quasi_margin_sin", sizes.clone(), quasi_sins.clone());
    r.series("quasi_margin_deg", sizes.clone(), quasi_degs.clone());
    r.series("y0_norm", sizes.clone(), y0_norms.clone());

    let weak_all = points.iter().all(|p| p.weak);
    let worst_weak = weak_margins.iter().cloned().fold(0.0f64, f64::max);
    r.verdict("weak_all", weak_all, worst_weak);
    let quasi_all = points.iter().all(|p| p.quasi);
    let least_quasi = quasi_sins.iter().cloned().fold(f64::INFINITY, f64::min);
    r.verdict("quasi_all", quasi_all, least_quasi);
    match model {
        LabModel::Ex1 => {
            let (ok, gap) = monotone(&y0_norms, true);
            r.verdict("y0_norm_increasing", ok, gap);
        }
        LabModel::Ex214 => {
            let (ok, gap) = monotone(&quasi_sins, false);
            r.verdict("quasi_margin_decreasing", ok, gap);
        }
    }
    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}
