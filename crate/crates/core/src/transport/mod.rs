//! One-dimensional and radial mass transport: Legendre transforms, quadratic
//! Wasserstein distance, free energies, entropy production and the
//! inequalities built from them.

mod density;
mod duality;
mod energy;
mod inequalities;
mod legendre;

pub use density::{
    monotone_map, push_forward_check, wasserstein_1d, DensityGrid, Geometry, PushForwardResidual, Wasserstein,
    MASS_TOL, TEST_FUNCTIONS,
};
pub use duality::{sobolev_duality_gap, sobolev_inf_side, sobolev_sup_side, yamabe_check, DualityGap};
pub use energy::{
    chemical_gradient, convolve, entropy_production, free_energy, EnergySpec, EntropyProduction, FreeEnergy,
    Internal, Potential, YoungPair,
};
pub use inequalities::{
    check_energy_entropy, check_hwbi, check_master_inequality, gaussian_log_sobolev_constant, EnergyEntropyOutcome,
    HwbiMode,
};
pub use legendre::{legendre, legendre_on, GridFunction};

#[cfg(test)]
mod tests;
