//! Non-isospectral intertwining transforms on truncated Fock spaces.
//!
//! Given a hermitian `h1` and an operator `x` with `[h1, x x^dagger] = 0`, the
//! partner `h2 = x^dagger h1 x` has eigenvalues `eps1 * nu`, where `nu` are the
//! eigenvalues of `N1 = x x^dagger`. The crate builds the boson, quon and
//! Landau-level instances of this construction, verifies every identity it
//! relies on as a measured residual, and extends the whole picture to
//! crypto-hermitian operators through a seeded positive metric.
//!
//! ```
//! use intertwine::{make_model, transform, ModelKind, ModelParams, ToleranceConfig};
//!
//! let model = make_model(ModelKind::Boson, 8, ModelParams::default()).unwrap();
//! let result = transform(&model, &ToleranceConfig::default()).unwrap();
//! assert!(result.checks.iter().all(|c| c.pass));
//! // h2 = a^dagger (a^dagger a) a has eigenvalue n (n - 1) on |n>
//! assert!((result.f2.eps2[2] - 6.0).abs() < 1e-12);
//! ```

pub mod checks;
pub mod cli;
pub mod crypto;
pub mod errata;
pub mod error;
pub mod linalg;
pub mod models;
pub mod report;
pub mod transform;

pub use checks::Check;
pub use crypto::{
    build_g1, build_g2, ddagger, dress, intertwining_checks, is_crypto_hermitian,
    make_crypto_scenario, undress, CryptoFamily, MetricBundle,
};
pub use error::{Error, Result};
pub use linalg::{CMat, CVec, ToleranceConfig, C64};
pub use models::{make_model, ModelInstance, ModelKind, ModelParams};
pub use report::{render, run_scenario, CheckReport, Format, RunConfig, Scenario};
pub use transform::{transform, TransformResult};
