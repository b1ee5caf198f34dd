//! Cubic lattice constant from a Bragg reflection.

use crate::error::{PipelineError, Result};

/// Cu Kα1.
pub const CU_K_ALPHA1_ANGSTROM: f64 = 1.5406;

/// `a = λ sqrt(h² + k² + l²) / (2 sin θ)`.
pub fn lattice_constant(two_theta_deg: f64, hkl: [i32; 3], wavelength_angstrom: f64) -> Result<f64> {
    if !(two_theta_deg > 0.0 && two_theta_deg < 180.0) {
        return Err(PipelineError::Input(format!("2θ must lie in (0, 180) degrees, got {two_theta_deg}")));
    }
    if hkl == [0, 0, 0] {
        return Err(PipelineError::Input("Miller indices cannot all be zero".into()));
    }
    if !(wavelength_angstrom > 0.0) {
        return Err(PipelineError::Input(format!("wavelength must be positive, got {wavelength_angstrom}")));
    }
    let s2: i32 = hkl.iter().map(|i| i * i).sum();
    let theta = (0.5 * two_theta_deg).to_radians();
    Ok(wavelength_angstrom * f64::from(s2).sqrt() / (2.0 * theta.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nbn_reflections() {
        assert!((lattice_constant(35.73, [1, 1, 1], CU_K_ALPHA1_ANGSTROM).unwrap() - 4.35).abs() < 0.01);
        assert!((lattice_constant(41.38, [2, 0, 0], CU_K_ALPHA1_ANGSTROM).unwrap() - 4.36).abs() < 0.01);
    }

    #[test]
    fn unit_scaling() {
        let lambda = 1.0;
        let two_theta = 2.0 * (lambda / 2.0f64).asin().to_degrees();
        assert!((lattice_constant(two_theta, [1, 0, 0], lambda).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain() {
        assert!(lattice_constant(0.0, [1, 1, 1], 1.5).is_err());
        assert!(lattice_constant(180.0, [1, 1, 1], 1.5).is_err());
        assert!(lattice_constant(30.0, [0, 0, 0], 1.5).is_err());
    }
}
