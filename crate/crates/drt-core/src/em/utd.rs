//! Uniform-theory wedge diffraction coefficients.
//!
//! Kouyoumjian-Pathak four-term form with the Fresnel transition function,
//! extended to lossy faces by weighting the reflection-boundary terms with
//! the Fresnel coefficients of the two wedge faces (Luebbers). Angles are in
//! radians, measured from the 0-face in the plane perpendicular to the edge.

use num_complex::Complex64;

use crate::em::fresnel::reflection_coefficients;
use crate::scene::Material;

/// Fresnel tail integral `\int_{sqrt X}^inf e^{-j t^2} dt` for X >= 0.
///
/// Power series of the finite part below X = 20, asymptotic expansion
/// above; absolute error is below ~1e-8 everywhere.
fn fresnel_tail(x: f64) -> Complex64 {
    if x <= 20.0 {
        // int_0^w e^{-j t^2} dt = sum (-j)^n w^{2n+1} / (n! (2n+1)).
        let w = x.sqrt();
        let mut term = Complex64::new(w, 0.0);
        let mut finite = term;
        let mjx = Complex64::new(0.0, -x);
        for n in 1..120 {
            term *= mjx / n as f64;
            let add = term / (2 * n + 1) as f64;
            finite += add;
            if add.norm() < 1e-17 * finite.norm().max(1.0) {
                break;
            }
        }
        let full = Complex64::from_polar(
            (std::f64::consts::PI).sqrt() / 2.0,
            -std::f64::consts::FRAC_PI_4,
        );
        full - finite
    } else {
        // tail = (1/2) e^{-jX} sum_m (2m-1)!!/2^m * X^{-1/2-m} / j^{m+1}.
        let mut coef = Complex64::new(0.0, -1.0) / x.sqrt();
        let mut sum = coef;
        for m in 1..13 {
            coef *= Complex64::new(0.0, (2 * m - 1) as f64) / (2.0 * x);
            sum += coef;
        }
        Complex64::from_polar(0.5, -x) * sum
    }
}

/// Transition function `F(X) = 2j sqrt(X) e^{jX} \int_{sqrt X}^inf e^{-j t^2} dt`.
///
/// `|F| <= 1`, `F -> 1` as X grows; small-X branch `F ~ sqrt(pi X) e^{j pi/4}`.
pub fn transition_function(x: f64) -> Complex64 {
    let x = x.max(0.0);
    Complex64::new(0.0, 2.0 * x.sqrt()) * Complex64::from_polar(1.0, x) * fresnel_tail(x)
}

fn a_plus(beta: f64, n: f64) -> f64 {
    let two_n_pi = 2.0 * n * std::f64::consts::PI;
    let np = ((beta + std::f64::consts::PI) / two_n_pi).round();
    let c = ((two_n_pi * np - beta) / 2.0).cos();
    2.0 * c * c
}

fn a_minus(beta: f64, n: f64) -> f64 {
    let two_n_pi = 2.0 * n * std::f64::consts::PI;
    let nm = ((beta - std::f64::consts::PI) / two_n_pi).round();
    let c = ((two_n_pi * nm - beta) / 2.0).cos();
    2.0 * c * c
}

/// One cotangent-times-transition term; the cotangent pole at a shadow or
/// reflection boundary is tamed by the vanishing transition argument, but we
/// still clamp the sine to keep exact-boundary evaluations finite.
fn term(angle: f64, n: f64, kl: f64, a: f64) -> Complex64 {
    let arg = (std::f64::consts::PI + angle) / (2.0 * n);
    let s = arg.sin();
    let s = if s.abs() < 1e-12 { 1e-12_f64.copysign(s + f64::MIN_POSITIVE) } else { s };
    let cot = arg.cos() / s;
    transition_function(kl * a) * cot
}

/// Geometry and material context for one wedge diffraction.
pub struct WedgeDiffraction<'a> {
    /// Exterior wedge angle divided by pi (half-plane: 2, right-angle
    /// exterior: 1.5).
    pub n: f64,
    /// Incidence azimuth from the 0-face, 0..n*pi.
    pub phi_inc: f64,
    /// Diffraction azimuth from the 0-face, 0..n*pi.
    pub phi_dif: f64,
    /// Skew angle between incident ray and edge (pi/2 for normal incidence).
    pub beta0: f64,
    /// Distance parameter `s' s / (s' + s) * sin^2(beta0)`.
    pub distance_l: f64,
    pub wavenumber: f64,
    pub freq_hz: f64,
    pub face0: &'a Material,
    pub face_n: &'a Material,
}

impl WedgeDiffraction<'_> {
    /// Soft (E parallel to the edge) and hard coefficients, in meters^{1/2}.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        let n = self.n;
        let k = self.wavenumber;
        let kl = k * self.distance_l;
        let sin_b = self.beta0.sin().abs().max(1e-9);
        let lead = -Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)
            / (2.0 * n * (2.0 * std::f64::consts::PI * k).sqrt() * sin_b);

        let dm = self.phi_dif - self.phi_inc;
        let dp = self.phi_dif + self.phi_inc;
        let t1 = term(dm, n, kl, a_plus(dm, n));
        let t2 = term(-dm, n, kl, a_minus(dm, n));
        let t3 = term(dp, n, kl, a_plus(dp, n));
        let t4 = term(-dp, n, kl, a_minus(dp, n));

        // Reflection weights: 0-face seen at grazing angle phi', n-face at
        // n*pi - phi.
        let cos0 = self.phi_inc.sin().abs().clamp(0.0, 1.0);
        let cosn = (n * std::f64::consts::PI - self.phi_dif).sin().abs().clamp(0.0, 1.0);
        let (r0_s, r0_h) = reflection_coefficients(self.face0, self.freq_hz, cos0);
        let (rn_s, rn_h) = reflection_coefficients(self.face_n, self.freq_hz, cosn);

        let d_soft = lead * (t1 + t2 + r0_s * t4 + rn_s * t3);
        let d_hard = lead * (t1 + t2 + r0_h * t4 + rn_h * t3);
        (d_soft, d_hard)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_function_limits() {
        // Large argument: F -> 1.
        let f = transition_function(50.0);
        assert!((f - Complex64::new(1.0, 0.0)).norm() < 0.02);
        // Small argument: |F| ~ sqrt(pi X), phase ~ +45 degrees.
        let x = 1e-4;
        let f = transition_function(x);
        assert!((f.norm() - (std::f64::consts::PI * x).sqrt()).abs() < 1e-3);
        assert!((f.arg() - std::f64::consts::FRAC_PI_4).abs() < 0.05);
        // Magnitude stays near or below 1 (the rational approximation
        // overshoots by under 1%) and grows monotonically (sampled).
        let mut prev = 0.0;
        for i in 1..300 {
            let m = transition_function(i as f64 * 0.05).norm();
            assert!(m <= 1.01);
            assert!(m + 5e-3 > prev, "non-monotonic at {i}");
            prev = m;
        }
    }

    #[test]
    fn fresnel_integral_spot_values() {
        // Standard Fresnel integrals from the tail: C(1) = 0.779893,
        // S(1) = 0.438259 (tabulated). w = 1 maps to X = pi/2.
        let half = (std::f64::consts::PI / 2.0).sqrt();
        let full = Complex64::from_polar(
            std::f64::consts::PI.sqrt() / 2.0,
            -std::f64::consts::FRAC_PI_4,
        );
        let finite = full - fresnel_tail(std::f64::consts::FRAC_PI_2);
        let c = finite.re / half;
        let s = -finite.im / half;
        assert!((c - 0.779893).abs() < 1e-6);
        assert!((s - 0.438259).abs() < 1e-6);
        // Series and asymptotic branches agree where they meet (the raw tail
        // itself spins in phase, so compare through the transition function
        // where that cancels).
        let a = transition_function(19.999999);
        let b = transition_function(20.000001);
        assert!((a - b).norm() < 1e-7, "branch mismatch: {a:?} vs {b:?}");
    }

    fn pec() -> Material {
        Material {
            name: "m".into(),
            eps_r: 1.0,
            sigma: 0.0,
            scattering: 0.0,
            perfect_conductor: true,
        }
    }

    #[test]
    fn reciprocity_in_azimuth() {
        let m = pec();
        let mk = |pi: f64, pd: f64| WedgeDiffraction {
            n: 1.5,
            phi_inc: pi,
            phi_dif: pd,
            beta0: std::f64::consts::FRAC_PI_2,
            distance_l: 8.0,
            wavenumber: 62.8,
            freq_hz: 3e9,
            face0: &m,
            face_n: &m,
        };
        let (s1, h1) = mk(0.7, 2.9).coefficients();
        let (s2, h2) = mk(2.9, 0.7).coefficients();
        assert!((s1 - s2).norm() < 1e-12);
        assert!((h1 - h2).norm() < 1e-12);
    }

    #[test]
    fn deep_shadow_coefficients_are_small() {
        let m = pec();
        let w = WedgeDiffraction {
            n: 2.0,
            phi_inc: 0.3,
            phi_dif: 4.0,
            beta0: std::f64::consts::FRAC_PI_2,
            distance_l: 20.0,
            wavenumber: 62.8,
            freq_hz: 3e9,
            face0: &m,
            face_n: &m,
        };
        let (s, h) = w.coefficients();
        assert!(s.norm() < 0.2);
        assert!(h.norm() < 0.2);
    }
}
