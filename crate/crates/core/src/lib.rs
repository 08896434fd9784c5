//! Thermodynamic formalism and zeta measures for locally constant potentials on
//! subshifts of finite type.
//!
//! Pressure and Gibbs states come from the Perron data of a log-domain transfer matrix,
//! the maximizing value `β(f)` and the deviation function `I` from cycle problems on the
//! same de Bruijn graph, and the zeta measures from level sums over periodic orbits.

pub mod ergopt;
pub mod error;
pub mod logspace;
pub mod thermo;
pub mod transfer;
pub mod zeta;

pub use zetatherm_symbolic as symbolic;

pub use ergopt::{
    beta, critical_graph, deviation_i, h_max, inf_i_cylinder, tilde_i, CriticalGraph, DeviationFunction,
    InfMethod,
};
pub use error::{CoreError, Result};
pub use thermo::{
    epsilon_c, gibbs_cylinder, log_pressure, pressure, pressure_derivative, CylinderMeasure, GibbsState,
    PerronData,
};
pub use transfer::{DeBruijnGraph, TransferMatrix};
pub use zeta::{
    eta_measure, ldp_rate, log_partition_rate, pi_measure, predicted_rate, series_gibbs_decomposition,
    zeta_level_sum, zeta_measure, zeta_truncated, Decomposition, LevelRoute, RateRegime, RateResult,
    SeriesResult, Truncated, ZetaMeasure, ZetaParams,
};
