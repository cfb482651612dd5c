//! Fresnel reflection at a homogeneous half-space boundary.

use num_complex::Complex64;

use crate::scene::Material;

/// Complex relative permittivity at `freq_hz`, conduction losses included.
pub fn complex_permittivity(mat: &Material, freq_hz: f64) -> Complex64 {
    const EPS0: f64 = 8.854_187_8128e-12;
    let omega = 2.0 * std::f64::consts::PI * freq_hz;
    Complex64::new(mat.eps_r, -mat.sigma / (omega * EPS0))
}

/// Reflection coefficients for incidence from vacuum, as a (TE, TM) pair.
///
/// `cos_theta` is the cosine of the incidence angle measured from the surface
/// normal. TE has the electric field perpendicular to the plane of incidence,
/// TM parallel to it. The TM sign convention is fixed by the perfect-conductor
/// limit together with the field composition in [`crate::em::field`]: tangential
/// total E vanishes on the surface.
pub fn reflection_coefficients(
    mat: &Material,
    freq_hz: f64,
    cos_theta: f64,
) -> (Complex64, Complex64) {
    if mat.perfect_conductor {
        return (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let eta = complex_permittivity(mat, freq_hz);
    let cos_t = cos_theta.clamp(0.0, 1.0);
    let sin2 = 1.0 - cos_t * cos_t;
    let root = (eta - sin2).sqrt();
    let gamma_te = (Complex64::new(cos_t, 0.0) - root) / (Complex64::new(cos_t, 0.0) + root);
    let gamma_tm = (eta * cos_t - root) / (eta * cos_t + root);
    (gamma_te, gamma_tm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concrete() -> Material {
        Material {
            name: "c".into(),
            eps_r: 5.0,
            sigma: 0.01,
            scattering: 0.0,
            perfect_conductor: false,
        }
    }

    /// Independent formulation through the complex refraction angle
    /// (Snell): n1 sin(ti) = n2 sin(tt), coefficients in terms of both
    /// cosines. Must agree with the impedance form used by the library.
    fn snell_coefficients(eta: Complex64, cos_i: f64) -> (Complex64, Complex64) {
        let n2 = eta.sqrt();
        let sin_i = (1.0 - cos_i * cos_i).sqrt();
        let sin_t = Complex64::new(sin_i, 0.0) / n2;
        let cos_t = (Complex64::new(1.0, 0.0) - sin_t * sin_t).sqrt();
        let te = (cos_i - n2 * cos_t) / (cos_i + n2 * cos_t);
        let tm = (n2 * Complex64::new(cos_i, 0.0) - cos_t) / (n2 * cos_i + cos_t);
        (te, tm)
    }

    #[test]
    fn matches_snell_formulation() {
        let mat = concrete();
        let eta = complex_permittivity(&mat, 3e9);
        for k in 0..20 {
            let cos_i = 0.02 + 0.049 * k as f64;
            let (te, tm) = reflection_coefficients(&mat, 3e9, cos_i);
            let (te2, tm2) = snell_coefficients(eta, cos_i);
            assert!((te - te2).norm() < 1e-12, "TE mismatch at cos {cos_i}");
            assert!((tm - tm2).norm() < 1e-12, "TM mismatch at cos {cos_i}");
        }
    }

    #[test]
    fn normal_incidence_limits() {
        let mat = concrete();
        let (te, tm) = reflection_coefficients(&mat, 3e9, 1.0);
        // At normal incidence the TE/TM split is arbitrary; magnitudes match
        // and with this convention the signs are opposite.
        assert!((te.norm() - tm.norm()).abs() < 1e-12);
        assert!((te + tm).norm() < 1e-12);
        // Lossless value: (1 - sqrt(5))/(1 + sqrt(5)), up to small sigma.
        let r = (1.0 - 5f64.sqrt()) / (1.0 + 5f64.sqrt());
        assert!((te.re - r).abs() < 1e-3);
    }

    #[test]
    fn grazing_incidence_is_total() {
        let (te, tm) = reflection_coefficients(&concrete(), 3e9, 0.0);
        assert!((te.norm() - 1.0).abs() < 1e-9);
        assert!((tm.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn brewster_dip_for_tm() {
        // Lossless eps 5: Brewster angle atan(sqrt(5)); TM goes through ~0.
        let mat = Material { sigma: 0.0, ..concrete() };
        let theta_b = 5f64.sqrt().atan();
        let (_, tm) = reflection_coefficients(&mat, 3e9, theta_b.cos());
        assert!(tm.norm() < 1e-9);
    }

    #[test]
    fn pec_limits() {
        let pec = Material {
            name: "m".into(),
            eps_r: 1.0,
            sigma: 0.0,
            scattering: 0.0,
            perfect_conductor: true,
        };
        let (te, tm) = reflection_coefficients(&pec, 3e9, 0.7);
        assert_eq!(te, Complex64::new(-1.0, 0.0));
        assert_eq!(tm, Complex64::new(1.0, 0.0));
    }
}
