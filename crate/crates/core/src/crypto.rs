//! Crypto-hermitian layer.
//!
//! A positive metric `Theta` defines the adjoint `H^ddagger = Theta^-1 H^dagger Theta`.
//! Hermitian models are dressed into crypto-hermitian ones by the similarity
//! `H = Theta^{-1/2} h Theta^{1/2}`, and both families of the construction are
//! rebuilt from there: the level-one family from `(H1, N1)` and the level-two
//! family from `H2 = X^ddagger H1 X`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checks::{value_residual, Check};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kernel_basis, positive_powers, rel, CMat, CVec, ToleranceConfig, C64,
};
use crate::models::ModelInstance;
use crate::transform::{
    eigen_residual, identity_residual, joint_eigenbasis, transform, Label,
};

/// Largest metric condition number the pipelines accept.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Tolerance for eigen-equations, frame identities and biorthogonality.
pub const FAMILY_TOL: f64 = 1e-9;

/// `Theta` together with `Theta^{1/2}`, `Theta^{-1/2}` and `Theta^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBundle {
    pub theta: CMat,
    pub sqrt: CMat,
    pub inv_sqrt: CMat,
    pub inv: CMat,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl MetricBundle {
    pub fn identity(d: usize) -> Self {
        let i = CMat::identity(d);
        Self {
            theta: i.clone(),
            sqrt: i.clone(),
            inv_sqrt: i.clone(),
            inv: i,
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
        }
    }

    /// Validates a hermitian positive-definite `theta` and derives its powers.
    pub fn new(theta: CMat, tol: &ToleranceConfig) -> Result<Self> {
        let p = positive_powers(&theta, tol)?;
        let bundle = Self {
            theta,
            sqrt: p.sqrt,
            inv_sqrt: p.inv_sqrt,
            inv: p.inv,
            min_eigenvalue: p.min_eigenvalue,
            max_eigenvalue: p.max_eigenvalue,
        };
        bundle.validate(tol)?;
        Ok(bundle)
    }

    /// `Theta = exp(epsilon G)`; every power comes from one decomposition of `G`.
    /// `epsilon = 0` yields the exact identity.
    pub fn from_generator(g: &CMat, epsilon: f64, tol: &ToleranceConfig) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
        if epsilon == 0.0 {
            return Ok(Self::identity(g.rows()));
        }
        let eig = hermitian_eig(g, tol)?;
        let lo = eig.values.first().copied().unwrap_or(0.0);
        let hi = eig.values.last().copied().unwrap_or(0.0);
        let bundle = Self {
            theta: eig.apply(|l| (epsilon * l).exp()),
            sqrt: eig.apply(|l| (0.5 * epsilon * l).exp()),
            inv_sqrt: eig.apply(|l| (-0.5 * epsilon * l).exp()),
            inv: eig.apply(|l| (-epsilon * l).exp()),
            min_eigenvalue: (epsilon * lo).exp(),
            max_eigenvalue: (epsilon * hi).exp(),
        };
        bundle.validate(tol)?;
        Ok(bundle)
    }

    fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        let condition = self.condition();
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::IllConditioned {
                condition,
                limit: CONDITION_LIMIT,
            });
        }
        let sq = &(&self.sqrt * &self.sqrt) - &self.theta;
        let r = rel(sq.fro_norm(), self.theta.fro_norm());
        if r > tol.residual_tol {
            return Err(Error::ModelInvariant {
                what: "Theta^{1/2} Theta^{1/2} = Theta",
                residual: r,
            });
        }
        let r = identity_residual(&(&self.sqrt * &self.inv_sqrt));
        if r > tol.residual_tol * condition.max(1.0) {
            return Err(Error::ModelInvariant {
                what: "Theta^{1/2} Theta^{-1/2} = I",
                residual: r,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.theta.rows()
    }

    pub fn condition(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    fn check_dim(&self, op: &'static str, h: &CMat) -> Result<()> {
        if h.shape() != self.theta.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: h.shape(),
                right: self.theta.shape(),
            });
        }
        Ok(())
    }
}

/// Seeded hermitian matrix: real diagonal in `[-1, 1]`, off-diagonal moduli in `[0, 1)`.
pub fn random_hermitian(d: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = CMat::zeros(d, d);
    for i in 0..d {
        g.set(i, i, C64::from(rng.random_range(-1.0..=1.0)));
        for j in i + 1..d {
            let r: f64 = rng.random_range(0.0..1.0);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let z = C64::from_polar(r, phase);
            g.set(i, j, z);
            g.set(j, i, z.conj());
        }
    }
    g
}

/// `Theta^{-1} H^dagger Theta`.
pub fn ddagger(h: &CMat, m: &MetricBundle) -> Result<CMat> {
    m.check_dim("ddagger", h)?;
    Ok(&(&m.inv * &h.adjoint()) * &m.theta)
}

/// `(||H - H^ddagger|| / ||H|| <= residual_tol, residual)`; a shape mismatch
/// reports an infinite residual.
pub fn is_crypto_hermitian(h: &CMat, m: &MetricBundle, tol: &ToleranceConfig) -> (bool, f64) {
    match ddagger(h, m) {
        Ok(hd) => {
            let r = rel((h - &hd).fro_norm(), h.fro_norm());
            (r <= tol.residual_tol, r)
        }
        Err(_) => (false, f64::INFINITY),
    }
}

/// `Theta^{-1/2} h Theta^{1/2}` for hermitian `h`.
pub fn dress(h: &CMat, m: &MetricBundle, tol: &ToleranceConfig) -> Result<CMat> {
    m.check_dim("dress", h)?;
    let residual = h.hermiticity_residual();
    if residual > tol.residual_tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(&(&m.inv_sqrt * h) * &m.sqrt)
}

/// `Theta^{1/2} H Theta^{-1/2}`.
pub fn undress(h: &CMat, m: &MetricBundle) -> Result<CMat> {
    m.check_dim("undress", h)?;
    Ok(&(&m.sqrt * h) * &m.inv_sqrt)
}

/// A hermitian model dressed by a seeded metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CryptoScenario {
    pub base: ModelInstance,
    pub epsilon: f64,
    pub seed: u64,
    pub generator: CMat,
    pub metric: MetricBundle,
    /// `H1 = Theta^{-1/2} h1 Theta^{1/2}`
    pub h1: CMat,
    /// `X = Theta^{-1/2} x Theta^{1/2}`
    pub x: CMat,
}

impl CryptoScenario {
    /// Dresses any operator on the model space with this scenario's metric.
    pub fn dress_operator(&self, op: &CMat) -> Result<CMat> {
        self.metric.check_dim("dress_operator", op)?;
        Ok(&(&self.metric.inv_sqrt * op) * &self.metric.sqrt)
    }

    /// `N1 = X X^ddagger`.
    pub fn n1(&self) -> Result<CMat> {
        Ok(&self.x * &ddagger(&self.x, &self.metric)?)
    }
}

pub fn make_crypto_scenario(
    base: &ModelInstance,
    epsilon: f64,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<CryptoScenario> {
    base.validate(tol)?;
    if !base.x.is_square() {
        return Err(Error::NotSquare {
            op: "make_crypto_scenario",
            rows: base.x.rows(),
            cols: base.x.cols(),
        });
    }
    let generator = random_hermitian(base.dim(), seed);
    let metric = MetricBundle::from_generator(&generator, epsilon, tol)?;
    let h1 = dress(&base.h1, &metric, tol)?;
    let x = &(&metric.inv_sqrt * &base.x) * &metric.sqrt;
    Ok(CryptoScenario {
        base: base.clone(),
        epsilon,
        seed,
        generator,
        metric,
        h1,
        x,
    })
}

/// One level of the crypto-hermitian construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CryptoFamily {
    pub level: u8,
    pub labels: Vec<Label>,
    /// Position of each label in the level-one family.
    pub source: Vec<usize>,
    /// `H`
    pub hamiltonian: CMat,
    /// `N`
    pub number: CMat,
    /// Hermitian counterpart of `H`.
    pub h: CMat,
    pub n_hat: CMat,
    /// Orthonormal columns.
    pub phi: CMat,
    pub big_phi: CMat,
    pub eta: CMat,
    pub s_phi: CMat,
    pub s_eta: CMat,
    pub eps: Vec<f64>,
    pub nu: Vec<f64>,
    /// Labels with `nu > rank_tol * max(nu)`.
    pub j_prime: Vec<usize>,
    pub checks: Vec<Check>,
}

impl CryptoFamily {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn crypto_check(name: &str, h: &CMat, m: &MetricBundle, tol: &ToleranceConfig) -> Check {
    Check::new(name, is_crypto_hermitian(h, m, tol).1, tol.residual_tol)
}

fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).max_abs()
}

/// `||A B - B A||` relative to `||A|| ||B||`.
fn commutator_residual(a: &CMat, b: &CMat) -> f64 {
    rel((&(a * b) - &(b * a)).fro_norm(), a.fro_norm() * b.fro_norm())
}

/// `<eta_i, A Phi_i>` for a biorthogonal pair; real parts are eigenvalues.
fn biorthogonal_values(a: &CMat, big_phi: &CMat, eta: &CMat) -> Vec<C64> {
    (0..big_phi.cols())
        .map(|i| eta.column(i).dotc(&a.mul_vec(&big_phi.column(i))))
        .collect()
}

fn imaginary_residual(values: &[C64]) -> f64 {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    values.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale
}

pub fn build_g1(
    h1: &CMat,
    n1: &CMat,
    m: &MetricBundle,
    tol: &ToleranceConfig,
) -> Result<CryptoFamily> {
    for (what, op) in [("H1 = H1^ddagger", h1), ("N1 = N1^ddagger", n1)] {
        let (ok, residual) = is_crypto_hermitian(op, m, tol);
        if !ok {
            return Err(Error::ModelInvariant { what, residual });
        }
    }
    let h = undress(h1, m)?;
    let n_hat = undress(n1, m)?;
    let f1 = joint_eigenbasis(&h, &n_hat, tol)?;
    let phi = f1.vectors.clone();
    let big_phi = &m.inv_sqrt * &phi;
    let eta = &m.sqrt * &phi;
    let s_phi = &big_phi * &big_phi.adjoint();
    let s_eta = &eta * &eta.adjoint();

    let mut checks = vec![
        crypto_check("g1.H_crypto_hermitian", h1, m, tol),
        crypto_check("g1.N_crypto_hermitian", n1, m, tol),
        Check::new("g1.h_hermitian", h.hermiticity_residual(), tol.residual_tol),
        Check::new("g1.n_hat_hermitian", n_hat.hermiticity_residual(), tol.residual_tol),
        Check::new("g1.h_phi_eigen", eigen_residual(&h, &phi, &f1.eps1), FAMILY_TOL),
        Check::new("g1.n_hat_phi_eigen", eigen_residual(&n_hat, &phi, &f1.nu), FAMILY_TOL),
        Check::new("g1.H_Phi_eigen", eigen_residual(h1, &big_phi, &f1.eps1), FAMILY_TOL),
        Check::new("g1.N_Phi_eigen", eigen_residual(n1, &big_phi, &f1.nu), FAMILY_TOL),
        Check::new(
            "g1.H_adjoint_eta_eigen",
            eigen_residual(&h1.adjoint(), &eta, &f1.eps1),
            FAMILY_TOL,
        ),
        Check::new(
            "g1.N_adjoint_eta_eigen",
            eigen_residual(&n1.adjoint(), &eta, &f1.nu),
            FAMILY_TOL,
        ),
        Check::new(
            "g1.biorthogonal",
            identity_residual(&(&big_phi.adjoint() * &eta)),
            FAMILY_TOL,
        ),
        Check::new(
            "g1.resolution",
            identity_residual(&(&big_phi * &eta.adjoint())),
            FAMILY_TOL,
        ),
        Check::new(
            "g1.s_phi_eq_theta_inv",
            rel(max_abs_diff(&s_phi, &m.inv), m.inv.max_abs()),
            FAMILY_TOL,
        ),
        Check::new(
            "g1.s_eta_eq_theta",
            rel(max_abs_diff(&s_eta, &m.theta), m.theta.max_abs()),
            FAMILY_TOL,
        ),
        Check::new(
            "g1.frame_duality",
            identity_residual(&(&s_phi * &s_eta)),
            FAMILY_TOL,
        ),
    ];

    // Gram spectrum of {Phi} inside [1/max(Theta), 1/min(Theta)].
    let gram = &big_phi.adjoint() * &big_phi;
    let (lo, hi) = (1.0 / m.max_eigenvalue, 1.0 / m.min_eigenvalue);
    let riesz = match hermitian_eig(&gram, tol) {
        Ok(e) => e
            .values
            .iter()
            .map(|&g| (lo - g).max(g - hi).max(0.0))
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    checks.push(
        Check::new("g1.riesz_bounds", riesz, FAMILY_TOL)
            .with_note(format!("bounds [{lo:.6e}, {hi:.6e}]")),
    );

    let mut values = biorthogonal_values(h1, &big_phi, &eta);
    values.extend(biorthogonal_values(n1, &big_phi, &eta));
    checks.push(Check::new(
        "g1.spectral_reality",
        imaginary_residual(&values),
        FAMILY_TOL,
    ));

    Ok(CryptoFamily {
        level: 1,
        labels: f1.labels,
        source: (0..phi.cols()).collect(),
        hamiltonian: h1.clone(),
        number: n1.clone(),
        h,
        n_hat,
        phi,
        big_phi,
        eta,
        s_phi,
        s_eta,
        eps: f1.eps1,
        nu: f1.nu,
        j_prime: f1.j_prime,
        checks,
    })
}

/// Level-two operators and the mapped family `Phi2 = X^ddagger Phi1` over `J'`.
/// Valid whether or not `ker(X) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTwoCore {
    /// `H2 = X^ddagger H1 X`
    pub h2: CMat,
    /// `N2 = X^ddagger X`
    pub n2: CMat,
    pub labels: Vec<Label>,
    pub source: Vec<usize>,
    pub big_phi: CMat,
    pub eps2: Vec<f64>,
    pub nu: Vec<f64>,
    /// `sum |Phi2><Phi2|`
    pub s_sum: CMat,
    /// `X^ddagger Theta^-1 (X^ddagger)^dagger`
    pub s_closed: CMat,
    /// `Theta^{-1/2} X_T^dagger X_T Theta^{-1/2}` with `X_T = Theta^{1/2} X Theta^{1/2}`
    pub s_stated: CMat,
    /// Same with `X_T = Theta^{1/2} X Theta^{-1/2}`
    pub s_adopted: CMat,
    /// `dim ker(X Theta^-1)`
    pub kernel_dim: usize,
    pub checks: Vec<Check>,
}

pub fn level_two_core(
    h1: &CMat,
    x: &CMat,
    g1: &CryptoFamily,
    m: &MetricBundle,
    tol: &ToleranceConfig,
) -> Result<LevelTwoCore> {
    let xdd = ddagger(x, m)?;
    let h2 = &(&xdd * h1) * x;
    let n2 = &xdd * x;
    let n1 = &g1.number;

    let source = g1.j_prime.clone();
    let cols: Vec<CVec> = source
        .iter()
        .map(|&i| xdd.mul_vec(&g1.big_phi.column(i)))
        .collect();
    let big_phi = CMat::from_columns(x.cols(), &cols);
    let nu: Vec<f64> = source.iter().map(|&i| g1.nu[i]).collect();
    let eps2: Vec<f64> = source.iter().map(|&i| g1.eps[i] * g1.nu[i]).collect();

    let s_sum = &big_phi * &big_phi.adjoint();
    let s_closed = &(&xdd * &m.inv) * &xdd.adjoint();
    let sandwich = |xt: &CMat| &(&(&m.inv_sqrt * &xt.adjoint()) * xt) * &m.inv_sqrt;
    let s_stated = sandwich(&(&(&m.sqrt * x) * &m.sqrt));
    let s_adopted = sandwich(&(&(&m.sqrt * x) * &m.inv_sqrt));
    let kernel_dim = kernel_basis(&(x * &m.inv), tol).cols();

    // eps2 read back through the Theta inner product.
    let theta_values: Vec<C64> = (0..big_phi.cols())
        .map(|i| {
            let v = big_phi.column(i);
            let tv = m.theta.mul_vec(&v);
            tv.dotc(&h2.mul_vec(&v)) / tv.dotc(&v)
        })
        .collect();
    let product = theta_values
        .iter()
        .zip(&eps2)
        .map(|(z, &e)| value_residual(z.re, e))
        .fold(0.0, f64::max);

    let checks = vec![
        crypto_check("g2.H_crypto_hermitian", &h2, m, tol),
        crypto_check("g2.N_crypto_hermitian", &n2, m, tol),
        Check::new("g2.H_N_commute", commutator_residual(&h2, &n2), tol.residual_tol),
        Check::new(
            "g2.n1x_eq_xn2",
            rel(
                (&(n1 * x) - &(x * &n2)).fro_norm(),
                n1.fro_norm() * x.fro_norm(),
            ),
            tol.residual_tol,
        ),
        Check::new(
            "g2.h1n1x_eq_xh2",
            rel(
                (&(&(h1 * n1) * x) - &(x * &h2)).fro_norm(),
                h1.fro_norm() * n1.fro_norm() * x.fro_norm(),
            ),
            tol.residual_tol,
        ),
        Check::new("g2.H_Phi_eigen", eigen_residual(&h2, &big_phi, &eps2), FAMILY_TOL)
            .with_note(format!("{} labels in J'", source.len())),
        Check::new("g2.N_Phi_eigen", eigen_residual(&n2, &big_phi, &nu), FAMILY_TOL),
        Check::new("g2.product_law", product, FAMILY_TOL),
        Check::new(
            "g2.spectral_reality",
            imaginary_residual(&theta_values),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.frame_sum_eq_closed_form",
            rel(max_abs_diff(&s_sum, &s_closed), s_closed.max_abs()),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.intertwine_truncated",
            intertwining_residual(&s_sum, &h2),
            tol.residual_tol,
        )
        .with_note("holds on the truncated family as well"),
    ];

    Ok(LevelTwoCore {
        h2,
        n2,
        labels: source.iter().map(|&i| g1.labels[i]).collect(),
        source,
        big_phi,
        eps2,
        nu,
        s_sum,
        s_closed,
        s_stated,
        s_adopted,
        kernel_dim,
        checks,
    })
}

/// Everything produced while building a complete level-two family.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Build {
    pub g1: CryptoFamily,
    pub core: LevelTwoCore,
    pub family: CryptoFamily,
}

/// Complete level-two family; requires `ker(X Theta^-1) = {0}`.
pub fn build_g2(
    h1: &CMat,
    x: &CMat,
    m: &MetricBundle,
    tol: &ToleranceConfig,
) -> Result<CryptoFamily> {
    build_g2_full(h1, x, m, tol).map(|b| b.family)
}

pub fn build_g2_full(
    h1: &CMat,
    x: &CMat,
    m: &MetricBundle,
    tol: &ToleranceConfig,
) -> Result<G2Build> {
    let n1 = &(x * &ddagger(x, m)?);
    let g1 = build_g1(h1, n1, m, tol)?;
    let core = level_two_core(h1, x, &g1, m, tol)?;
    if core.kernel_dim > 0 {
        return Err(Error::KernelCondition {
            kernel_dim: core.kernel_dim,
        });
    }

    let s = (&core.s_sum + &core.s_sum.adjoint()).scale_real(0.5);
    let p = positive_powers(&s, tol)?;
    let condition = p.condition();
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    let h = &(&p.inv_sqrt * &core.h2) * &p.sqrt;
    let n_hat = &(&p.inv_sqrt * &core.n2) * &p.sqrt;
    let phi = &p.inv_sqrt * &core.big_phi;
    let eta = &p.inv * &core.big_phi;
    let s_eta = p.inv.clone();
    let eta_sum = &eta * &eta.adjoint();
    let big_phi = &core.big_phi;

    let mut checks = core.checks.clone();
    checks.extend([
        Check::new("g2.frame_condition", condition, CONDITION_LIMIT).with_note(format!(
            "gram spectrum [{:.6e}, {:.6e}]",
            p.min_eigenvalue, p.max_eigenvalue
        )),
        Check::new("g2.h_hermitian", h.hermiticity_residual(), tol.residual_tol),
        Check::new("g2.n_hat_hermitian", n_hat.hermiticity_residual(), tol.residual_tol),
        Check::new(
            "g2.phi_orthonormal",
            identity_residual(&(&phi.adjoint() * &phi)),
            FAMILY_TOL,
        ),
        Check::new("g2.h_phi_eigen", eigen_residual(&h, &phi, &core.eps2), FAMILY_TOL),
        Check::new("g2.n_hat_phi_eigen", eigen_residual(&n_hat, &phi, &core.nu), FAMILY_TOL),
        Check::new(
            "g2.H_adjoint_eta_eigen",
            eigen_residual(&core.h2.adjoint(), &eta, &core.eps2),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.N_adjoint_eta_eigen",
            eigen_residual(&core.n2.adjoint(), &eta, &core.nu),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.biorthogonal",
            identity_residual(&(&big_phi.adjoint() * &eta)),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.resolution",
            identity_residual(&(big_phi * &eta.adjoint())),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.s_eta_eq_s_phi_inv",
            rel(max_abs_diff(&eta_sum, &s_eta), s_eta.max_abs()),
            FAMILY_TOL,
        ),
        Check::new(
            "g2.frame_duality",
            identity_residual(&(&core.s_sum * &eta_sum)),
            FAMILY_TOL,
        ),
    ]);

    let family = CryptoFamily {
        level: 2,
        labels: core.labels.clone(),
        source: core.source.clone(),
        hamiltonian: core.h2.clone(),
        number: core.n2.clone(),
        h,
        n_hat,
        phi,
        big_phi: core.big_phi.clone(),
        eta,
        s_phi: core.s_sum.clone(),
        s_eta,
        eps: core.eps2.clone(),
        nu: core.nu.clone(),
        j_prime: (0..core.labels.len()).collect(),
        checks,
    };
    Ok(G2Build { g1, core, family })
}

/// `||S H^dagger - H S||` relative to `||S|| ||H||`.
pub fn intertwining_residual(s: &CMat, h: &CMat) -> f64 {
    rel(
        (&(s * &h.adjoint()) - &(h * s)).fro_norm(),
        s.fro_norm() * h.fro_norm(),
    )
}

/// `S_Phi H^dagger = H S_Phi` at both levels.
pub fn intertwining_checks(
    g1: &CryptoFamily,
    g2: &CryptoFamily,
    tol: &ToleranceConfig,
) -> Vec<Check> {
    vec![
        Check::new(
            "intertwine.level1",
            intertwining_residual(&g1.s_phi, &g1.hamiltonian),
            tol.residual_tol,
        ),
        Check::new(
            "intertwine.level2",
            intertwining_residual(&g2.s_phi, &g2.hamiltonian),
            tol.residual_tol,
        ),
    ]
}

/// Largest entry-wise gap between the `epsilon = 0` crypto pipeline and the
/// hermitian pipeline on the same model.
pub fn degeneration_residual(base: &ModelInstance, seed: u64, tol: &ToleranceConfig) -> Result<f64> {
    let sc = make_crypto_scenario(base, 0.0, seed, tol)?;
    let g1 = build_g1(&sc.h1, &sc.n1()?, &sc.metric, tol)?;
    let core = level_two_core(&sc.h1, &sc.x, &g1, &sc.metric, tol)?;
    let r = transform(base, tol)?;

    let vec_gap = |a: &[f64], b: &[f64]| {
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let mat_gap = |a: &CMat, b: &CMat| {
        if a.shape() != b.shape() {
            return f64::INFINITY;
        }
        max_abs_diff(a, b)
    };
    Ok([
        mat_gap(&sc.h1, &base.h1),
        mat_gap(&sc.x, &base.x),
        mat_gap(&g1.number, &r.ops.n1),
        mat_gap(&g1.phi, &r.f1.vectors),
        mat_gap(&g1.big_phi, &r.f1.vectors),
        mat_gap(&g1.eta, &r.f1.vectors),
        vec_gap(&g1.eps, &r.f1.eps1),
        vec_gap(&g1.nu, &r.f1.nu),
        mat_gap(&core.h2, &r.ops.h2),
        mat_gap(&core.n2, &r.ops.n2),
        mat_gap(&core.big_phi, &r.f2.vectors),
        vec_gap(&core.eps2, &r.f2.eps2),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}
