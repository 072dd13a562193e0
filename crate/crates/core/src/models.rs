//! Truncated number-basis realizations of the worked operator families:
//! bosons, quons, the two-mode Landau operators and the mode-swap map `j`.
//!
//! Two-mode states `Psi(n+, n-)` are flattened as `n+ * D- + n-`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{commutator, rel, CMat, ToleranceConfig, C64, ONE, ZERO};

/// Carrier space of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    SingleMode { dim: usize },
    TwoMode { plus: usize, minus: usize },
}

impl Space {
    pub fn total_dim(&self) -> usize {
        match *self {
            Space::SingleMode { dim } => dim,
            Space::TwoMode { plus, minus } => plus * minus,
        }
    }

    /// Number-basis quantum numbers of a flattened index: `[n]` or `[n+, n-]`.
    pub fn label_of(&self, index: usize) -> Vec<usize> {
        match *self {
            Space::SingleMode { .. } => vec![index],
            Space::TwoMode { minus, .. } => vec![index / minus, index % minus],
        }
    }

    pub fn index_of(&self, label: &[usize]) -> Option<usize> {
        match (*self, label) {
            (Space::SingleMode { dim }, &[n]) if n < dim => Some(n),
            (Space::TwoMode { plus, minus }, &[np, nm]) if np < plus && nm < minus => {
                Some(np * minus + nm)
            }
            _ => None,
        }
    }
}

/// The closed catalogue of model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Boson,
    Quon,
    LandauA,
    LandauB,
    Custom,
}

impl ModelKind {
    pub const BUILT_IN: [ModelKind; 4] = [
        ModelKind::Boson,
        ModelKind::Quon,
        ModelKind::LandauA,
        ModelKind::LandauB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Boson => "boson",
            ModelKind::Quon => "quon",
            ModelKind::LandauA => "landau-a",
            ModelKind::LandauB => "landau-b",
            ModelKind::Custom => "custom",
        }
    }

    pub fn is_two_mode(&self) -> bool {
        matches!(self, ModelKind::LandauA | ModelKind::LandauB)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::BUILT_IN
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Power of the lowering operator in `x` (boson, quon).
    pub k: usize,
    /// Quon deformation in `[0, 1]`.
    pub q: f64,
    pub hbar_omega: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            k: 1,
            q: 0.5,
            hbar_omega: 1.0,
        }
    }
}

/// Closed-form infinite-dimensional values for one number-basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValues {
    pub eps1: f64,
    pub nu: f64,
    pub eps2: f64,
}

/// Closed-form eigenvalue laws of the built-in families, indexed by
/// number-basis quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Boson { k: usize },
    Quon { k: usize, q: f64 },
    LandauA { hbar_omega: f64 },
    LandauB { hbar_omega: f64 },
}

impl Oracle {
    pub fn eval(&self, basis: &[usize]) -> OracleValues {
        match (*self, basis) {
            (Oracle::Boson { k }, &[n]) => {
                let nu = rising(n + 1, k);
                OracleValues {
                    eps1: n as f64,
                    nu,
                    // (n+k)!/(n-1)!, zero at n = 0
                    eps2: if n == 0 { 0.0 } else { rising(n, k + 1) },
                }
            }
            (Oracle::Quon { k, q }, &[n]) => {
                let eps1 = quon_epsilon(n, q);
                let nu = quon_nu(n, k, q);
                OracleValues {
                    eps1,
                    nu,
                    eps2: eps1 * nu,
                }
            }
            (Oracle::LandauA { hbar_omega }, &[np, nm]) => {
                let eps1 = hbar_omega * (2 * nm + 1) as f64;
                let nu = ((np + 1) * (nm + 1)) as f64;
                OracleValues {
                    eps1,
                    nu,
                    eps2: eps1 * nu,
                }
            }
            (Oracle::LandauB { hbar_omega }, &[np, nm]) => {
                let eps1 = hbar_omega * (2 * nm + 1) as f64;
                let nu = (np + 1) as f64;
                OracleValues {
                    eps1,
                    nu,
                    eps2: eps1 * nu,
                }
            }
            _ => panic!("oracle {self:?} does not accept label {basis:?}"),
        }
    }
}

/// `n (n+1) ... (n+len-1)` as a float.
fn rising(n: usize, len: usize) -> f64 {
    (n..n + len).map(|i| i as f64).product()
}

/// A named scenario: `h1`, the intertwiner `x`, and its closed-form oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub kind: ModelKind,
    pub space: Space,
    pub h1: CMat,
    pub x: CMat,
    /// Raising degree of `x^dagger`, in quanta.
    pub margin: usize,
    pub params: ModelParams,
    pub oracle: Option<Oracle>,
}

/// Residuals of the standing model assumptions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelResiduals {
    /// `||h1 - h1^dagger|| / ||h1||`
    pub h1_hermiticity: f64,
    /// `||[h1, x x^dagger]|| / (||h1|| ||x x^dagger||)`
    pub commutator: f64,
}

impl ModelInstance {
    /// A model outside the built-in catalogue, with no oracle.
    pub fn custom(h1: CMat, x: CMat, tol: &ToleranceConfig) -> Result<Self> {
        if !h1.is_square() || x.rows() != h1.rows() {
            return Err(Error::ShapeMismatch {
                op: "custom model",
                left: h1.shape(),
                right: x.shape(),
            });
        }
        let model = Self::new_unchecked(ModelKind::Custom, h1, x);
        model.validate(tol)?;
        Ok(model)
    }

    /// Bundles operators without validating the model assumptions.
    pub fn new_unchecked(kind: ModelKind, h1: CMat, x: CMat) -> Self {
        let space = Space::SingleMode { dim: h1.rows() };
        Self {
            kind,
            space,
            h1,
            x,
            margin: 0,
            params: ModelParams::default(),
            oracle: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn residuals(&self) -> ModelResiduals {
        let n1 = &self.x * &self.x.adjoint();
        let comm = &(&self.h1 * &n1) - &(&n1 * &self.h1);
        ModelResiduals {
            h1_hermiticity: self.h1.hermiticity_residual(),
            commutator: rel(comm.fro_norm(), self.h1.fro_norm() * n1.fro_norm()),
        }
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<ModelResiduals> {
        let r = self.residuals();
        if r.h1_hermiticity > tol.residual_tol {
            return Err(Error::ModelInvariant {
                what: "h1 hermitian",
                residual: r.h1_hermiticity,
            });
        }
        if r.commutator > tol.residual_tol {
            return Err(Error::ModelInvariant {
                what: "[h1, x x^dagger] = 0",
                residual: r.commutator,
            });
        }
        Ok(r)
    }

    /// True when the closed-form oracle is trustworthy for this basis state:
    /// raising by `x^dagger` stays strictly inside the truncation.
    pub fn in_safe_margin(&self, basis: &[usize]) -> bool {
        match (self.kind, self.space, basis) {
            (ModelKind::Boson | ModelKind::Quon, Space::SingleMode { dim }, &[n]) => {
                n + self.margin < dim
            }
            (ModelKind::LandauA, Space::TwoMode { plus, minus }, &[np, nm]) => {
                np + 1 < plus && nm + 1 < minus
            }
            (ModelKind::LandauB, Space::TwoMode { plus, .. }, &[np, _]) => np + 1 < plus,
            _ => false,
        }
    }

    /// Invertible variant of `x` built from the periodically closed ladder
    /// operators. `x x^dagger` stays diagonal, so it still commutes with `h1`.
    pub fn periodic_companion(&self) -> Option<CMat> {
        let p = self.params;
        match (self.kind, self.space) {
            (ModelKind::Boson, Space::SingleMode { dim }) => {
                Some(matrix_power(&boson_lowering_periodic(dim).ok()?, p.k))
            }
            (ModelKind::Quon, Space::SingleMode { dim }) => {
                Some(matrix_power(&quon_lowering_periodic(dim, p.q).ok()?, p.k))
            }
            (ModelKind::LandauA, Space::TwoMode { plus, minus }) => {
                let ap = boson_lowering_periodic(plus).ok()?.kron(&CMat::identity(minus));
                let am = CMat::identity(plus).kron(&boson_lowering_periodic(minus).ok()?);
                Some(&ap * &am)
            }
            (ModelKind::LandauB, Space::TwoMode { plus, minus }) => {
                let ap = boson_lowering_periodic(plus).ok()?.kron(&CMat::identity(minus));
                Some(&ap * &swap_j(plus, minus).ok()?)
            }
            _ => None,
        }
    }
}

pub(crate) fn matrix_power(m: &CMat, k: usize) -> CMat {
    (0..k).fold(CMat::identity(m.rows()), |acc, _| &acc * m)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "truncation dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    Ok(())
}

/// Truncated annihilation operator: `(n-1, n) = sqrt(n)`.
pub fn boson_lowering(d: usize) -> Result<CMat> {
    check_dim(d)?;
    Ok(CMat::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::from((j as f64).sqrt())
        } else {
            ZERO
        }
    }))
}

/// Annihilation operator with the top state wrapped onto the vacuum:
/// `a e_0 = sqrt(D) e_{D-1}`. Then `a a^dagger = diag(1, ..., D)`.
pub fn boson_lowering_periodic(d: usize) -> Result<CMat> {
    let mut a = boson_lowering(d)?;
    a.set(d - 1, 0, C64::from((d as f64).sqrt()));
    Ok(a)
}

/// `1 + q + ... + q^{n-1}`; zero for `n = 0`.
pub fn quon_epsilon(n: usize, q: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for _ in 0..n {
        sum += power;
        power *= q;
    }
    sum
}

/// Quon lowering operator with `(n-1, n) = beta_{n-1}`, where
/// `beta_n^2 = 1 + q + ... + q^n`. Returns `beta_0 .. beta_{D-1}`.
pub fn quon_lowering(d: usize, q: f64) -> Result<(CMat, Vec<f64>)> {
    check_dim(d)?;
    check_q(q)?;
    let beta: Vec<f64> = (0..d).map(|n| quon_epsilon(n + 1, q).sqrt()).collect();
    let b = CMat::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::from(beta[i])
        } else {
            ZERO
        }
    });
    Ok((b, beta))
}

pub fn quon_lowering_periodic(d: usize, q: f64) -> Result<CMat> {
    let (mut b, beta) = quon_lowering(d, q)?;
    b.set(d - 1, 0, C64::from(beta[d - 1]));
    Ok(b)
}

/// Eigenvalue of `B^k (B^dagger)^k` on `phi_n`, from the k-step recurrence
/// `nu^{(k+1)} = nu^{(k)} (q^{k+1} eps_n + eps_{k+1})`, `nu^{(1)} = 1 + q eps_n`.
pub fn quon_nu(n: usize, k: usize, q: f64) -> f64 {
    let eps_n = quon_epsilon(n, q);
    let mut nu = 1.0 + q * eps_n;
    for step in 1..k {
        nu *= q.powi(step as i32 + 1) * eps_n + quon_epsilon(step + 1, q);
    }
    nu
}

/// Two-mode ladder operators on the flattened `(n+, n-)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOps {
    pub a_plus: CMat,
    pub a_minus: CMat,
    pub n_plus: CMat,
    pub n_minus: CMat,
}

pub fn two_mode_ops(dp: usize, dm: usize) -> Result<TwoModeOps> {
    let a_plus = boson_lowering(dp)?.kron(&CMat::identity(dm));
    let a_minus = CMat::identity(dp).kron(&boson_lowering(dm)?);
    let n_plus = &a_plus.adjoint() * &a_plus;
    let n_minus = &a_minus.adjoint() * &a_minus;
    Ok(TwoModeOps {
        a_plus,
        a_minus,
        n_plus,
        n_minus,
    })
}

/// Landau hamiltonians in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauHamiltonians {
    /// `hbar omega (N+ + N- + 1)`
    pub h0: CMat,
    /// `hbar omega (N- - N+)`
    pub h1_up: CMat,
    /// `hbar omega (2 N- + 1)`
    pub h_up: CMat,
    /// `hbar omega (2 N+ + 1)`
    pub h_down: CMat,
}

pub fn landau_hamiltonians(ops: &TwoModeOps, hbar_omega: f64) -> LandauHamiltonians {
    let id = CMat::identity(ops.n_plus.rows());
    let w = hbar_omega;
    let h0 = (&(&ops.n_plus + &ops.n_minus) + &id).scale_real(w);
    let h1_up = (&ops.n_minus - &ops.n_plus).scale_real(w);
    let h_up = (&ops.n_minus.scale_real(2.0) + &id).scale_real(w);
    let h_down = (&ops.n_plus.scale_real(2.0) + &id).scale_real(w);
    LandauHamiltonians {
        h0,
        h1_up,
        h_up,
        h_down,
    }
}

/// Permutation `Psi(n+, n-) -> Psi(n-, n+)` on a square two-mode space.
pub fn swap_j(dp: usize, dm: usize) -> Result<CMat> {
    if dp != dm {
        return Err(Error::InvalidParameter(format!(
            "swap map needs a square two-mode space, got {dp}x{dm}"
        )));
    }
    check_dim(dp)?;
    let d = dp;
    Ok(CMat::from_fn(d * d, d * d, |row, col| {
        let (np, nm) = (col / d, col % d);
        if row == nm * d + np {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Builds a catalogue model. For two-mode families `dim` is the per-mode
/// truncation, so the carrier space has `dim^2` states.
pub fn make_model(kind: ModelKind, dim: usize, params: ModelParams) -> Result<ModelInstance> {
    if kind != ModelKind::Custom && !(params.hbar_omega.is_finite() && params.hbar_omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hbar_omega must be positive, got {}",
            params.hbar_omega
        )));
    }
    let model = match kind {
        ModelKind::Boson => {
            check_k(params.k, dim)?;
            let a = boson_lowering(dim)?;
            ModelInstance {
                kind,
                space: Space::SingleMode { dim },
                h1: &a.adjoint() * &a,
                x: matrix_power(&a, params.k),
                margin: params.k,
                params,
                oracle: Some(Oracle::Boson { k: params.k }),
            }
        }
        ModelKind::Quon => {
            check_k(params.k, dim)?;
            let (b, _) = quon_lowering(dim, params.q)?;
            ModelInstance {
                kind,
                space: Space::SingleMode { dim },
                h1: &b.adjoint() * &b,
                x: matrix_power(&b, params.k),
                margin: params.k,
                params,
                oracle: Some(Oracle::Quon {
                    k: params.k,
                    q: params.q,
                }),
            }
        }
        ModelKind::LandauA => {
            let ops = two_mode_ops(dim, dim)?;
            let h = landau_hamiltonians(&ops, params.hbar_omega);
            ModelInstance {
                kind,
                space: Space::TwoMode {
                    plus: dim,
                    minus: dim,
                },
                h1: h.h_up,
                x: &ops.a_plus * &ops.a_minus,
                margin: 2,
                params,
                oracle: Some(Oracle::LandauA {
                    hbar_omega: params.hbar_omega,
                }),
            }
        }
        ModelKind::LandauB => {
            let ops = two_mode_ops(dim, dim)?;
            let h = landau_hamiltonians(&ops, params.hbar_omega);
            ModelInstance {
                kind,
                space: Space::TwoMode {
                    plus: dim,
                    minus: dim,
                },
                h1: h.h_up,
                x: &ops.a_plus * &swap_j(dim, dim)?,
                margin: 1,
                params,
                oracle: Some(Oracle::LandauB {
                    hbar_omega: params.hbar_omega,
                }),
            }
        }
        ModelKind::Custom => {
            return Err(Error::InvalidParameter(
                "custom models are built with ModelInstance::custom".into(),
            ))
        }
    };
    model.validate(&ToleranceConfig::default())?;
    Ok(model)
}

fn check_k(k: usize, dim: usize) -> Result<()> {
    if k == 0 || k >= dim {
        return Err(Error::InvalidParameter(format!(
            "power k = {k} must satisfy 1 <= k < dim = {dim}"
        )));
    }
    Ok(())
}

/// Exact `[h1, x x^dagger]` for diagnostics.
pub fn model_commutator(model: &ModelInstance) -> CMat {
    let n1 = &model.x * &model.x.adjoint();
    commutator(&model.h1, &n1).expect("model operators share one square shape")
}
