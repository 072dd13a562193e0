//! Known misprints in the source formulas, each backed by two residuals
//! measured against an independent oracle: one for the form as stated and one
//! for the form the crate uses.

use serde::{Deserialize, Serialize};

use crate::checks::value_residual;
use crate::crypto::{CryptoFamily, LevelTwoCore};
use crate::error::Result;
use crate::linalg::{positive_powers, rel, CMat, CVec, ToleranceConfig, C64, ONE, ZERO};
use crate::models::{matrix_power, quon_epsilon, quon_lowering, quon_nu, ModelInstance, Space};
use crate::transform::identity_residual;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Erratum {
    pub id: String,
    pub description: String,
    pub stated_form_residual: f64,
    pub adopted_form_residual: f64,
}

/// The `nu` recurrence with `eps_{n+1}` in the factor where `eps_{k+1}` belongs.
pub fn quon_nu_stated(n: usize, k: usize, q: f64) -> f64 {
    let eps_n = quon_epsilon(n, q);
    let mut nu = 1.0 + q * eps_n;
    for step in 1..k {
        nu *= q.powi(step as i32 + 1) * eps_n + quon_epsilon(n + 1, q);
    }
    nu
}

/// Largest deviation of each recurrence from the diagonal of `B^k (B^dagger)^k`,
/// over in-margin `n` and `k <= k_max`. Returns `(stated, adopted)`.
pub fn quon_recurrence_residuals(dim: usize, q: f64, k_max: usize) -> Result<(f64, f64)> {
    let (b, _) = quon_lowering(dim, q)?;
    let (mut stated, mut adopted) = (0.0f64, 0.0f64);
    for k in 1..=k_max.min(dim - 1) {
        let bk = matrix_power(&b, k);
        let n1 = &bk * &bk.adjoint();
        for n in 0..dim - k {
            let brute = n1.get(n, n).re;
            stated = stated.max(value_residual(quon_nu_stated(n, k, q), brute));
            adopted = adopted.max(value_residual(quon_nu(n, k, q), brute));
        }
    }
    Ok((stated, adopted))
}

pub fn quon_recurrence(dim: usize, q: f64) -> Result<Erratum> {
    let (stated, adopted) = quon_recurrence_residuals(dim, q, 3)?;
    Ok(Erratum {
        id: "quon-nu-recurrence".into(),
        description: format!(
            "nu^(k+1) = nu^(k) (q^(k+1) eps_n + eps_(k+1)); the stated factor eps_(n+1) \
             disagrees with the diagonal of B^k (B^dagger)^k (q = {q}, k <= 3)"
        ),
        stated_form_residual: stated,
        adopted_form_residual: adopted,
    })
}

/// `x^dagger Psi(n+, n-) = sqrt((n+ + 1)(n- + 1)) Psi(n+ + 1, n- + 1)`, checked
/// against the swapped target `Psi(n- + 1, n+ + 1)`.
pub fn landau_a_index_order(model: &ModelInstance) -> Option<Erratum> {
    let Space::TwoMode { plus, minus } = model.space else {
        return None;
    };
    let d = model.dim();
    let xd = model.x.adjoint();
    let unit = |i: usize| CVec::from_fn(d, |r, _| if r == i { ONE } else { ZERO });
    let (mut stated, mut adopted) = (0.0f64, 0.0f64);
    for np in 0..plus.min(minus) - 1 {
        for nm in 0..plus.min(minus) - 1 {
            let src = model.space.index_of(&[np, nm])?;
            let image = xd.mul_vec(&unit(src));
            let c = (((np + 1) * (nm + 1)) as f64).sqrt();
            let target = |a: usize, b: usize| unit(model.space.index_of(&[a, b]).unwrap()) * C64::from(c);
            adopted = adopted.max((&image - target(np + 1, nm + 1)).norm() / c);
            stated = stated.max((&image - target(nm + 1, np + 1)).norm() / c);
        }
    }
    Some(Erratum {
        id: "landau-a-index-order".into(),
        description: "phi2 = sqrt((n+ + 1)(n- + 1)) Psi(n+ + 1, n- + 1); the stated \
                      Psi(n- + 1, n+ + 1) disagrees with the action of x^dagger"
            .into(),
        stated_form_residual: stated,
        adopted_form_residual: adopted,
    })
}

/// Orthonormality defect of `S^{-1/2} phi1` (stated) versus `S^{-1/2} Phi2` (adopted).
pub fn phi2_definition(
    g1: &CryptoFamily,
    g2: &CryptoFamily,
    tol: &ToleranceConfig,
) -> Result<Erratum> {
    let p = positive_powers(&(&g2.s_phi + &g2.s_phi.adjoint()).scale_real(0.5), tol)?;
    let cols: Vec<CVec> = g2.source.iter().map(|&i| g1.phi.column(i)).collect();
    let stated = &p.inv_sqrt * &CMat::from_columns(g1.phi.rows(), &cols);
    Ok(Erratum {
        id: "level2-phi-definition".into(),
        description: "phi2 = S^(-1/2) Phi2; the stated S^(-1/2) phi1 is not orthonormal \
                      (residual: largest entry of gram - I)"
            .into(),
        stated_form_residual: identity_residual(&(&stated.adjoint() * &stated)),
        adopted_form_residual: identity_residual(&(&g2.phi.adjoint() * &g2.phi)),
    })
}

/// Closed form of the level-two frame operator with `X_T = Theta^{1/2} X Theta^{1/2}`
/// (stated) versus `Theta^{1/2} X Theta^{-1/2}` (adopted), both against the sum.
pub fn frame_closed_form(core: &LevelTwoCore) -> Erratum {
    let scale = core.s_sum.max_abs();
    Erratum {
        id: "level2-frame-closed-form".into(),
        description: "S = Theta^(-1/2) X_T^dagger X_T Theta^(-1/2) holds for \
                      X_T = Theta^(1/2) X Theta^(-1/2); the stated Theta^(1/2) X Theta^(1/2) \
                      disagrees with sum |Phi2><Phi2| whenever Theta != I"
            .into(),
        stated_form_residual: rel((&core.s_stated - &core.s_sum).max_abs(), scale),
        adopted_form_residual: rel((&core.s_adopted - &core.s_sum).max_abs(), scale),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_model, ModelKind, ModelParams};

    #[test]
    fn quon_stated_form_fails_only_where_expected() {
        for q in [0.0, 0.3, 0.7, 1.0] {
            let (stated, adopted) = quon_recurrence_residuals(16, q, 3).unwrap();
            assert!(adopted <= 1e-12, "q = {q}: {adopted}");
            // at q = 0 every eps_m with m >= 1 equals 1, so both factors coincide
            if q > 0.0 {
                assert!(stated > 1e-3, "q = {q}: {stated}");
            } else {
                assert!(stated <= 1e-12);
            }
        }
        // k = 1 has no recurrence step
        let (stated, adopted) = quon_recurrence_residuals(16, 0.5, 1).unwrap();
        assert!(stated <= 1e-12 && adopted <= 1e-12);
    }

    #[test]
    fn quon_stated_form_at_q_one() {
        // boson limit nu_n^(2) = (n+1)(n+2); the stated form gives (n+1)(2n+1)
        assert_eq!(quon_nu(3, 2, 1.0), 4.0 * 5.0);
        assert_eq!(quon_nu_stated(3, 2, 1.0), 4.0 * 7.0);
        assert_eq!(quon_nu(3, 3, 1.0), 4.0 * 5.0 * 6.0);
        assert_eq!(quon_nu_stated(3, 3, 1.0), 4.0 * 7.0 * 7.0);
        assert_eq!(quon_nu_stated(1, 2, 1.0), quon_nu(1, 2, 1.0));
    }

    #[test]
    fn landau_index_order() {
        let m = make_model(ModelKind::LandauA, 5, ModelParams::default()).unwrap();
        let e = landau_a_index_order(&m).unwrap();
        assert!(e.adopted_form_residual < 1e-14);
        assert!(e.stated_form_residual > 1.0);
        let b = make_model(ModelKind::Boson, 5, ModelParams::default()).unwrap();
        assert!(landau_a_index_order(&b).is_none());
    }
}
