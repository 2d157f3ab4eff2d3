//! Exact free waves: the `T`-transform reduction to the half line,
//! d'Alembert splitting and nonradial point evaluation.

mod data;
mod nonradial;
mod wave;

pub use data::{CauchyData, Decay, GeneralCauchyData, RadialCauchyData};
pub use nonradial::{
    evaluate_at_origin_nonradial, evaluate_nonradial, local_envelope, EvalForm, SphericalOptions,
};
pub use wave::{
    dalembert_split, inv_t_transform, propagate_radial, t_transform, time_translate_split,
    DalembertPair, RadialWave, WaveState,
};
