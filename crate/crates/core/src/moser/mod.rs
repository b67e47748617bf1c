//! Moser–Onofri functionals on `(-1, 1)` and on the sphere, Ghigi's
//! functional on convex functions, and the singular Moser threshold.
//!
//! Line integrals use `dx` on `(-1, 1)` with the `½` inside the logarithm, so
//! that constants cancel and `I_α(g) = J_α(u)` for `g(cos θ) = u(θ)`.

mod ghigi;
mod line;
mod singular;
mod sphere;

pub use ghigi::{convex_from_increments, ghigi_minimize, ghigi_phi, random_convex, ConvexFunction, GhigiSearch};
pub use line::{i_alpha, minimize_i_alpha, BlowUp, LineFunction, LineIntegrals, MinimizeOutcome, MinimizeStatus, TraceRow};
pub use singular::{singular_moser_check, singular_moser_threshold, SingularMoserOutcome};
pub use sphere::{aubin_threshold_probe, j_alpha_sphere, AubinProbe, SphereFunction};
