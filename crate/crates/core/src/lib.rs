//! Structural vector error correction toolkit.
//!
//! The crate covers the empirical chain used to study unemployment
//! hysteresis with cointegrated systems: ADF unit-root tests, Johansen and
//! Saikkonen–Lütkepohl rank tests, reduced-rank VECM estimation, structural
//! identification with short- and long-run zero restrictions, impulse
//! responses and variance decompositions. A wage-setting/price-setting
//! simulator provides data with known structural shocks.
//!
//! The five-variable system is always ordered `(p, y-n, w-p, n, u)`, and the
//! structural shocks `(ε^p, ε^s, ε^w, ε^d, ε^l)`.

pub mod cointegration;
pub mod dataset;
pub mod dynamics;
pub mod linalg;
pub mod pipeline;
pub mod rng;
pub mod svec;
pub mod unitroot;
pub mod vecm;
pub mod wsps;

pub use cointegration::{
    johansen, select_lag, sl_test, test_beta_restriction, trace_critical_values, BetaRestriction,
    CointegrationError, Deterministic, InfoCriterion, JohansenFit, RankTestResult,
};
pub use dataset::{build_system, load_csv, save_csv, DatasetError, RoleMap, TimePanel};
pub use dynamics::{fevd, irf, FevdResult, IrfResult};
pub use svec::{
    bootstrap_tvalues, check_identification, count_restrictions, identify, long_run_multiplier,
    IdentifyOptions, RestrictionPattern, SvecError, SvecModel,
};
pub use unitroot::{adf_test, AdfDeterministic, AdfResult, LagSelection};
pub use vecm::{fit_vecm, to_level_var, VecmError, VecmModel};
