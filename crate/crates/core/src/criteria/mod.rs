//! Positivity, boundedness, global-existence and blow-up criteria. Each
//! returns a [`Verdict`] with the discrete margin and a witness.

mod focusing;
mod nonradial;
mod oned;
mod radial;
mod scan;
mod verdict;

pub use focusing::{focusing_domination, singular_soliton_constant, supercritical_envelope, DominationCase};
pub use nonradial::{kato_bound, nonradial_laplacian, nonradial_momentum};
pub use oned::{antiderivative, oned_positivity, oned_solution, LineField};
pub use radial::{
    local_existence_time, outgoing_check, quadratic_global_condition, radial_bounds, radial_positivity,
    LocalTime,
};
pub use verdict::{nonfinite, Bounds, Verdict, Witness};
pub(crate) use radial::is_unit_constant;
