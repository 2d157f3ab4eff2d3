//! The change of unknown `v = F(u)` that turns the null-form equation into the
//! free wave equation, and the endpoint structure of `F`.

mod profile;
mod push;

pub use profile::{
    Confidence, Endpoint, EndpointCase, EndpointClassification, NonlinearityProfile, Orientation,
    ProfileOptions, ProfileSpec, ScalarFn, TailHint,
};
pub use push::{
    nonradial_laplacian_push, pull_back, push_forward, push_forward_general, push_forward_radial,
    LaplacianPush, PushedMomentum, PushedPosition,
};

#[cfg(test)]
mod tests;
