//! The non-isospectral partner construction.
//!
//! From a hermitian `h1` and an intertwiner `x` with `[h1, x x^dagger] = 0`:
//! `N1 = x x^dagger`, `N2 = x^dagger x`, `h2 = x^dagger h1 x`. The joint
//! eigenbasis `phi1(n, k)` of `(h1, N1)` is mapped to `phi2 = x^dagger phi1`,
//! an eigenvector of `h2` with eigenvalue `eps1 * nu` whenever `nu > 0`.

use serde::{Deserialize, Serialize};

use crate::checks::{value_residual, Check};
use crate::error::{Error, Result};
use crate::linalg::{
    canonical_phase, commutator, dominant_index, hermitian_eig, kernel_basis, positive_powers,
    rank_of, rel, CMat, CVec, ToleranceConfig, C64,
};
use crate::models::ModelInstance;

/// Joint-eigensystem label: `n` indexes the `h1` eigenvalue cluster, `k` the
/// position inside it (ascending `nu`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformOps {
    pub n1: CMat,
    pub n2: CMat,
    pub h2: CMat,
}

/// Simultaneous eigenpairs of `(h1, N1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEigensystem {
    pub labels: Vec<Label>,
    pub eps1: Vec<f64>,
    pub nu: Vec<f64>,
    /// Unit columns `phi1(n, k)`.
    pub vectors: CMat,
    /// Positions (into `labels`) with `nu > rank_tol * max(nu)`.
    pub j_prime: Vec<usize>,
}

impl LabeledEigensystem {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vector(&self, i: usize) -> CVec {
        self.vectors.column(i)
    }
}

/// `phi2 = x^dagger phi1` over the labels in `J'`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedFamily {
    pub labels: Vec<Label>,
    /// Position of each label in the source eigensystem.
    pub source: Vec<usize>,
    /// Unnormalized columns, `||phi2||^2 = nu`.
    pub vectors: CMat,
    pub eps2: Vec<f64>,
    pub nu: Vec<f64>,
    /// Labels in `J \ J'`, where `x^dagger phi1` vanishes.
    pub dropped: Vec<Label>,
}

impl MappedFamily {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vector(&self, i: usize) -> CVec {
        self.vectors.column(i)
    }
}

/// Finite-rank form of the completeness criterion:
/// `f2_rank = space_dim - kernel_dim`, complete iff `ker(x) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessDefect {
    pub kernel_dim: usize,
    pub f2_rank: usize,
    pub space_dim: usize,
}

impl CompletenessDefect {
    pub fn is_complete(&self) -> bool {
        self.f2_rank == self.space_dim
    }

    pub fn rank_sum_holds(&self) -> bool {
        self.f2_rank + self.kernel_dim == self.space_dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub ops: TransformOps,
    pub f1: LabeledEigensystem,
    pub f2: MappedFamily,
    pub completeness: CompletenessDefect,
    pub checks: Vec<Check>,
}

/// `N1 = x x^dagger`, `N2 = x^dagger x`, `h2 = x^dagger h1 x`.
pub fn build_transform(model: &ModelInstance, tol: &ToleranceConfig) -> Result<TransformOps> {
    model.validate(tol)?;
    Ok(transform_ops(&model.h1, &model.x))
}

pub(crate) fn transform_ops(h1: &CMat, x: &CMat) -> TransformOps {
    let xd = x.adjoint();
    TransformOps {
        n1: x * &xd,
        n2: &xd * x,
        h2: &(&xd * h1) * x,
    }
}

/// Splits ascending values into runs whose consecutive gaps are within
/// `cluster_tol` relative to the largest magnitude.
fn clusters(values: &[f64], cluster_tol: f64) -> Vec<std::ops::Range<usize>> {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > cluster_tol * scale {
            if start < i {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Diagonalizes `h1`, groups its eigenvalues into clusters and resolves each
/// cluster with the compression of `N1`.
pub fn joint_eigenbasis(
    h1: &CMat,
    n1: &CMat,
    tol: &ToleranceConfig,
) -> Result<LabeledEigensystem> {
    let comm = commutator(h1, n1)?;
    let residual = rel(comm.fro_norm(), h1.fro_norm() * n1.fro_norm());
    if residual > tol.residual_tol {
        return Err(Error::CommutatorTooLarge { residual });
    }
    let n1_herm = n1.hermiticity_residual();
    if n1_herm > tol.residual_tol {
        return Err(Error::NotHermitian { residual: n1_herm });
    }

    let dim = h1.rows();
    let eig = hermitian_eig(h1, tol)?;
    let mut labels = Vec::with_capacity(dim);
    let mut eps1 = Vec::with_capacity(dim);
    let mut nu = Vec::with_capacity(dim);
    let mut vectors: Vec<CVec> = Vec::with_capacity(dim);

    for (n, range) in clusters(&eig.values, tol.cluster_tol).into_iter().enumerate() {
        let base = eig.values[range.start];
        let mean = base
            + eig.values[range.clone()].iter().map(|v| v - base).sum::<f64>() / range.len() as f64;
        let block: Vec<CVec> = range.clone().map(|j| eig.vectors.column(j)).collect();
        let vc = CMat::from_columns(dim, &block);
        let compressed = &(&vc.adjoint() * n1) * &vc;
        let compressed = (&compressed + &compressed.adjoint()).scale_real(0.5);
        let inner = hermitian_eig(&compressed, tol)?;

        let mut members: Vec<(f64, CVec)> = inner
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let mut w = vc.mul_vec(&inner.vectors.column(j));
                let norm = w.norm();
                w /= C64::from(norm);
                canonical_phase(&mut w);
                (v, w)
            })
            .collect();
        sort_cluster(&mut members, tol.cluster_tol);

        for (k, (v, w)) in members.into_iter().enumerate() {
            labels.push(Label { n, k });
            eps1.push(mean);
            nu.push(v);
            vectors.push(w);
        }
    }

    let max_nu = nu.iter().copied().fold(0.0, f64::max);
    let j_prime = (0..nu.len())
        .filter(|&i| max_nu > 0.0 && nu[i] > tol.rank_tol * max_nu)
        .collect();
    Ok(LabeledEigensystem {
        labels,
        eps1,
        nu,
        vectors: CMat::from_columns(dim, &vectors),
        j_prime,
    })
}

/// Ascending `nu`; near-equal `nu` ordered by the dominant basis coefficient.
fn sort_cluster(members: &mut [(f64, CVec)], cluster_tol: f64) {
    members.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = members.iter().map(|m| m.0.abs()).fold(0.0, f64::max).max(1.0);
    let mut start = 0;
    for i in 1..=members.len() {
        if i == members.len() || members[i].0 - members[i - 1].0 > cluster_tol * scale {
            members[start..i].sort_by_key(|m| dominant_index(&m.1));
            start = i;
        }
    }
}

pub fn map_family(x: &CMat, f1: &LabeledEigensystem, _tol: &ToleranceConfig) -> MappedFamily {
    let xd = x.adjoint();
    let in_jp: std::collections::BTreeSet<usize> = f1.j_prime.iter().copied().collect();
    let vectors: Vec<CVec> = f1.j_prime.iter().map(|&i| xd.mul_vec(&f1.vector(i))).collect();
    MappedFamily {
        labels: f1.j_prime.iter().map(|&i| f1.labels[i]).collect(),
        source: f1.j_prime.clone(),
        vectors: CMat::from_columns(x.cols(), &vectors),
        eps2: f1.j_prime.iter().map(|&i| f1.eps1[i] * f1.nu[i]).collect(),
        nu: f1.j_prime.iter().map(|&i| f1.nu[i]).collect(),
        dropped: (0..f1.len())
            .filter(|i| !in_jp.contains(i))
            .map(|i| f1.labels[i])
            .collect(),
    }
}

/// `phi1 = (1/nu) x phi2` for every mapped label.
pub fn recover_f1(x: &CMat, f2: &MappedFamily) -> Result<Vec<CVec>> {
    f2.labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let nu = f2.nu[i];
            if !(nu > 0.0) {
                return Err(Error::ZeroNu {
                    n: label.n,
                    k: label.k,
                });
            }
            Ok(x.mul_vec(&f2.vector(i)) / C64::from(nu))
        })
        .collect()
}

/// The isospectral partner `N2^{-1} x^dagger h1 x`; fails when `N2` is singular.
pub fn tilde_h2(h1: &CMat, x: &CMat, tol: &ToleranceConfig) -> Result<CMat> {
    let TransformOps { n2, h2, .. } = transform_ops(h1, x);
    let powers = positive_powers(&n2, tol).map_err(|e| match e {
        Error::NotPositiveDefinite { min_eigenvalue } => Error::SingularN2 { min_eigenvalue },
        other => other,
    })?;
    Ok(&powers.inv * &h2)
}

pub fn completeness_defect(
    x: &CMat,
    f2: &MappedFamily,
    tol: &ToleranceConfig,
) -> CompletenessDefect {
    let space_dim = x.cols();
    let kernel_dim = kernel_basis(x, tol).cols();
    let f2_rank = if f2.is_empty() {
        0
    } else {
        rank_of(&f2.vectors, tol)
    };
    CompletenessDefect {
        kernel_dim,
        f2_rank,
        space_dim,
    }
}

/// Largest `||A v_i - lambda_i v_i|| / (||A|| ||v_i||)` over the columns.
pub(crate) fn eigen_residual(a: &CMat, vectors: &CMat, values: &[f64]) -> f64 {
    let scale = a.fro_norm();
    (0..vectors.cols())
        .map(|i| {
            let v = vectors.column(i);
            let r = (a.mul_vec(&v) - &v * C64::from(values[i])).norm();
            rel(r, scale * v.norm())
        })
        .fold(0.0, f64::max)
}

pub(crate) fn identity_residual(m: &CMat) -> f64 {
    (m - &CMat::identity(m.rows())).max_abs()
}

/// Every relation of the construction, measured on one result.
pub fn check_relations(
    model: &ModelInstance,
    ops: &TransformOps,
    f1: &LabeledEigensystem,
    f2: &MappedFamily,
    completeness: &CompletenessDefect,
    tol: &ToleranceConfig,
) -> Vec<Check> {
    let rt = tol.residual_tol;
    let (h1, x) = (&model.h1, &model.x);
    let TransformOps { n1, n2, h2 } = ops;
    let mut checks = Vec::new();

    let mr = model.residuals();
    checks.push(Check::new("model.h1_hermitian", mr.h1_hermiticity, rt));
    checks.push(Check::new("model.h1_n1_commute", mr.commutator, rt));

    checks.push(Check::new("rel.h2_hermitian", h2.hermiticity_residual(), rt));
    let c = &(h2 * n2) - &(n2 * h2);
    checks.push(Check::new(
        "rel.h2_n2_commute",
        rel(c.fro_norm(), h2.fro_norm() * n2.fro_norm()),
        rt,
    ));
    let c = &(n1 * x) - &(x * n2);
    checks.push(Check::new(
        "rel.n1x_eq_xn2",
        rel(c.fro_norm(), n1.fro_norm() * x.fro_norm()),
        rt,
    ));
    let c = &(&(h1 * n1) * x) - &(x * h2);
    checks.push(Check::new(
        "rel.h1n1x_eq_xh2",
        rel(c.fro_norm(), h1.fro_norm() * n1.fro_norm() * x.fro_norm()),
        rt,
    ));

    checks.push(Check::new(
        "f1.h1_eigen",
        eigen_residual(h1, &f1.vectors, &f1.eps1),
        rt,
    ));
    checks.push(Check::new(
        "f1.n1_eigen",
        eigen_residual(n1, &f1.vectors, &f1.nu),
        rt,
    ));
    checks.push(Check::new(
        "f1.orthonormal",
        identity_residual(&(&f1.vectors.adjoint() * &f1.vectors)),
        rt,
    ));
    checks.push(Check::new(
        "f1.closure",
        identity_residual(&(&f1.vectors * &f1.vectors.adjoint())),
        rt,
    ));
    let max_nu = f1.nu.iter().copied().fold(0.0, f64::max).max(1.0);
    let min_nu = f1.nu.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check::new(
        "f1.nu_nonnegative",
        (-min_nu).max(0.0) / max_nu,
        rt,
    ));

    checks.push(
        Check::new("f2.h2_eigen", eigen_residual(h2, &f2.vectors, &f2.eps2), rt)
            .with_note(format!("{} labels in J', {} dropped", f2.len(), f2.dropped.len())),
    );
    checks.push(Check::new(
        "f2.n2_eigen",
        eigen_residual(n2, &f2.vectors, &f2.nu),
        rt,
    ));
    let norm_res = (0..f2.len())
        .map(|i| (f2.vector(i).norm_squared() - f2.nu[i]).abs() / f2.nu[i])
        .fold(0.0, f64::max);
    checks.push(Check::new("f2.norm_sq_eq_nu", norm_res, 1e-9));
    let g = &f2.vectors.adjoint() * &f2.vectors;
    let gram_res = if f2.is_empty() {
        0.0
    } else {
        (&g - &CMat::from_real_diagonal(&f2.nu)).max_abs() / max_nu
    };
    checks.push(Check::new("f2.gram_diagonal", gram_res, 1e-9));

    let recovery = match recover_f1(x, f2) {
        Ok(vs) => vs
            .iter()
            .enumerate()
            .map(|(i, v)| (v - f1.vector(f2.source[i])).norm())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    checks.push(Check::new("f2.recover_f1", recovery, 1e-9));

    let rayleigh = (0..f2.len())
        .map(|i| {
            let v = f2.vector(i);
            let e = (v.dotc(&h2.mul_vec(&v)) / v.dotc(&v)).re;
            value_residual(e, f2.eps2[i])
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("f2.product_law", rayleigh, rt));

    // Spectrum of h2 is {eps1 nu : J'} plus zeros on ker(x).
    let spectrum_res = match hermitian_eig(h2, tol) {
        Ok(e) => {
            let mut predicted = f2.eps2.clone();
            predicted.resize(h2.rows(), 0.0);
            predicted.sort_by(|a, b| a.total_cmp(b));
            let scale = e.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
            e.values
                .iter()
                .zip(&predicted)
                .map(|(a, b)| (a - b).abs() / scale)
                .fold(0.0, f64::max)
        }
        Err(_) => f64::INFINITY,
    };
    checks.push(Check::new("h2.spectrum", spectrum_res, rt));

    if let Some(oracle) = model.oracle {
        let mut rows = 0;
        let (mut r_eps1, mut r_nu, mut r_eps2) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..f1.len() {
            let basis = model.space.label_of(dominant_index(&f1.vector(i)));
            if !model.in_safe_margin(&basis) {
                continue;
            }
            rows += 1;
            let o = oracle.eval(&basis);
            r_eps1 = r_eps1.max(value_residual(f1.eps1[i], o.eps1));
            r_nu = r_nu.max(value_residual(f1.nu[i], o.nu));
            r_eps2 = r_eps2.max(value_residual(f1.eps1[i] * f1.nu[i], o.eps2));
        }
        let note = format!("{rows} labels inside the safe margin");
        checks.push(Check::new("oracle.eps1", r_eps1, rt).with_note(note.clone()));
        checks.push(Check::new("oracle.nu", r_nu, rt).with_note(note.clone()));
        checks.push(Check::new("oracle.eps2", r_eps2, rt).with_note(note));
    }

    let cd = completeness;
    checks.push(
        Check::new(
            "completeness.rank_sum",
            (cd.f2_rank + cd.kernel_dim).abs_diff(cd.space_dim) as f64,
            0.0,
        )
        .with_note(format!(
            "kernel_dim = {}, f2_rank = {}, space_dim = {}",
            cd.kernel_dim, cd.f2_rank, cd.space_dim
        )),
    );
    let consistent = cd.is_complete() == (cd.kernel_dim == 0);
    checks.push(
        Check::new(
            "completeness.iff_trivial_kernel",
            if consistent { 0.0 } else { 1.0 },
            0.0,
        )
        .with_note(if cd.is_complete() {
            "F2 complete"
        } else {
            "F2 not complete"
        }),
    );

    match tilde_h2(h1, x, tol) {
        Ok(t) => {
            let eps1: Vec<f64> = f2.source.iter().map(|&i| f1.eps1[i]).collect();
            checks.push(
                Check::new("contrast.tilde_h2_isospectral", eigen_residual(&t, &f2.vectors, &eps1), 1e-9)
                    .with_note("isospectral partner keeps eps1 on each phi2"),
            );
        }
        Err(Error::SingularN2 { min_eigenvalue }) => {
            let n2_norm = n2.fro_norm();
            checks.push(
                Check::new(
                    "contrast.tilde_h2_inapplicable",
                    rel(min_eigenvalue.abs(), n2_norm),
                    tol.rank_tol,
                )
                .with_note("N2 admits no inverse"),
            );
        }
        Err(_) => checks.push(Check::new("contrast.tilde_h2", f64::INFINITY, 0.0)),
    }

    checks
}

/// Full pipeline on one model.
pub fn transform(model: &ModelInstance, tol: &ToleranceConfig) -> Result<TransformResult> {
    let ops = build_transform(model, tol)?;
    let f1 = joint_eigenbasis(&model.h1, &ops.n1, tol)?;
    let f2 = map_family(&model.x, &f1, tol);
    let completeness = completeness_defect(&model.x, &f2, tol);
    let checks = check_relations(model, &ops, &f1, &f2, &completeness, tol);
    Ok(TransformResult {
        ops,
        f1,
        f2,
        completeness,
        checks,
    })
}
