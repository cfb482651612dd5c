//! Effective-roughness diffuse scattering, Lambertian lobe.

/// Scalar amplitude factor for a tile: the scattered far field is
/// `|E_s| = |E_i(tile)| * factor / r_s`, with `|E_i(tile)|` the incident
/// field magnitude at the tile. Power-wise this spreads `S^2` of the power
/// intercepted by the tile over the hemisphere with a `cos(theta_s)` lobe.
pub fn scatter_amplitude_factor(s: f64, area: f64, cos_i: f64, cos_s: f64) -> f64 {
    let ci = cos_i.clamp(0.0, 1.0);
    let cs = cos_s.clamp(0.0, 1.0);
    s * (area * ci * cs / std::f64::consts::PI).sqrt()
}
