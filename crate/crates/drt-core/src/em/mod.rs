//! Electromagnetic layer: reflection, diffraction, diffuse scattering and
//! field bookkeeping on top of the geometric paths.

pub mod field;
pub mod fresnel;
pub mod scatter;
pub mod utd;
