//! Junction incidence matrices and their images in the rotating-mode basis.
//!
//! Mode vectors are ordered `(in-phase, +, -)`; `T` maps mode amplitudes to tank
//! quantities and `T^-1 = T^H / 3`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

type M3 = Matrix3<Complex64>;

pub const ALPHA: f64 = 2.0 * std::f64::consts::FRAC_PI_3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ej(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

fn real(m: [[f64; 3]; 3]) -> M3 {
    M3::from_fn(|r, k| c(m[r][k]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionBasis {
    pub t: M3,
    pub t_inv: M3,
    pub u: M3,
    /// Port/tank incidence: `i_s = -G i_u = G i_l`.
    pub g: M3,
    pub q: M3,
    pub h: M3,
    pub e: M3,
    pub h_t: M3,
    pub q_t: M3,
    pub g_t: M3,
    pub e_t: M3,
}

impl JunctionBasis {
    pub fn new() -> Self {
        let t = M3::from_fn(|n, j| {
            let m = [0.0, 1.0, -1.0][j];
            ej(m * n as f64 * ALPHA)
        });
        let t_inv = t.adjoint() / c(3.0);
        let u = M3::identity();
        let g = real([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0], [-1.0, 0.0, 1.0]]);
        let q = u - g;
        let h = g * g;
        let e = real([[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]]);
        let h_t = t_inv * h * t;
        let q_t = t_inv * q * t;
        let g_t = t_inv * g;
        let e_t = t_inv * e * t;
        Self { t, t_inv, u, g, q, h, e, h_t, q_t, g_t, e_t }
    }

    /// `Cc` at modulation phase `wt = omega_m t`.
    pub fn cc(&self, wt: f64) -> M3 {
        M3::from_diagonal(&Vector3::from_fn(|n, _| c((wt + n as f64 * ALPHA).cos())))
    }

    /// `Cs` at modulation phase `wt`.
    pub fn cs(&self, wt: f64) -> M3 {
        M3::from_diagonal(&Vector3::from_fn(|n, _| c((wt + n as f64 * ALPHA).sin())))
    }

    /// `T^-1 Cc T`.
    pub fn cc_t(&self, wt: f64) -> M3 {
        self.t_inv * self.cc(wt) * self.t
    }

    /// `T^-1 Cs T`.
    pub fn cs_t(&self, wt: f64) -> M3 {
        self.t_inv * self.cs(wt) * self.t
    }

    /// `T^-1 H Cc T`, the modulation coupling as it enters the differential equation.
    pub fn hcc_t(&self, wt: f64) -> M3 {
        self.t_inv * self.h * self.cc(wt) * self.t
    }

    /// `T^-1 H Cs T`.
    pub fn hcs_t(&self, wt: f64) -> M3 {
        self.t_inv * self.h * self.cs(wt) * self.t
    }
}

impl Default for JunctionBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Closed forms of the mode-basis images, used to check the matrix products above.
pub mod closed_form {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

    pub fn h_t() -> M3 {
        M3::from_diagonal(&Vector3::new(c(0.0), ej(-FRAC_PI_3), ej(FRAC_PI_3))) * c(3.0)
    }

    pub fn q_t() -> M3 {
        M3::from_diagonal(&Vector3::new(c(1.0), -ej(-FRAC_PI_3), -ej(FRAC_PI_3)))
    }

    /// `T^-1 G`; the last column is `+-j/sqrt(3)`.
    pub fn g_t() -> M3 {
        let j = Complex64::i();
        let z = c(0.0);
        M3::new(
            z,
            z,
            z,
            ej(-FRAC_PI_6),
            -ej(FRAC_PI_6),
            j,
            ej(FRAC_PI_6),
            -ej(-FRAC_PI_6),
            -j,
        ) / c(3f64.sqrt())
    }

    pub fn e_t() -> M3 {
        M3::from_diagonal(&Vector3::new(c(0.0), c(3.0), c(3.0)))
    }

    /// `T^-1 H Cc T`.
    pub fn hcc_t(wt: f64) -> M3 {
        let z = c(0.0);
        M3::new(
            z,
            z,
            z,
            ej(wt - FRAC_PI_3),
            z,
            ej(-(wt + FRAC_PI_3)),
            ej(-(wt - FRAC_PI_3)),
            ej(wt + FRAC_PI_3),
            z,
        ) * c(1.5)
    }

    /// `T^-1 H Cs T`.
    pub fn hcs_t(wt: f64) -> M3 {
        let z = c(0.0);
        M3::new(
            z,
            z,
            z,
            -ej(wt - FRAC_PI_3),
            z,
            ej(-(wt + FRAC_PI_3)),
            ej(-(wt - FRAC_PI_3)),
            -ej(wt + FRAC_PI_3),
            z,
        ) * Complex64::new(0.0, 1.5)
    }

    /// `T^-1 Cc T`: every mode is coupled to both of the others.
    pub fn cc_t(wt: f64) -> M3 {
        let z = c(0.0);
        let (p, m) = (ej(wt), ej(-wt));
        M3::new(z, m, p, p, z, m, m, p, z) * c(0.5)
    }

    /// `T^-1 Cs T`.
    pub fn cs_t(wt: f64) -> M3 {
        let z = c(0.0);
        let j = Complex64::i();
        let (p, m) = (-j * ej(wt), j * ej(-wt));
        M3::new(z, m, p, p, z, m, m, p, z) * c(0.5)
    }
}

/// Tank quantities to mode amplitudes `(in-phase, +, -)`.
pub fn to_modes(v: &Vector3<Complex64>) -> Vector3<Complex64> {
    let b = JunctionBasis::new();
    b.t_inv * v
}

pub fn from_modes(m: &Vector3<Complex64>) -> Vector3<Complex64> {
    let b = JunctionBasis::new();
    b.t * m
}

/// S-matrix of an ideal 1 -> 2 -> 3 -> 1 circulator.
pub fn ideal_smatrix() -> M3 {
    real([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &M3, b: &M3) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn inverse_is_scaled_adjoint() {
        let b = JunctionBasis::new();
        assert!(close(&(b.t * b.t_inv), &M3::identity()) < 1e-15);
    }

    #[test]
    fn constant_vector_is_in_phase() {
        let v = Vector3::new(c(1.0), c(1.0), c(1.0));
        let m = to_modes(&v);
        assert!((m[0] - c(1.0)).norm() < 1e-15 && m[1].norm() < 1e-15 && m[2].norm() < 1e-15);
        assert!((from_modes(&m) - v).norm() < 1e-15);
    }

    #[test]
    fn static_images() {
        let b = JunctionBasis::new();
        assert!(close(&b.h, &(b.g * b.g)) < 1e-15);
        assert!(close(&b.h, &real([[1.0, -2.0, 1.0], [1.0, 1.0, -2.0], [-2.0, 1.0, 1.0]])) < 1e-15);
        assert!(close(&b.q, &real([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])) < 1e-15);
        assert!(close(&b.e, &(b.g.transpose() * b.g)) < 1e-15);
        assert!(close(&b.h_t, &closed_form::h_t()) < 1e-12);
        assert!(close(&b.q_t, &closed_form::q_t()) < 1e-12);
        assert!(close(&b.g_t, &closed_form::g_t()) < 1e-12);
        assert!(close(&b.e_t, &closed_form::e_t()) < 1e-12);
    }

    #[test]
    fn modulation_images_at_sample_phases() {
        let b = JunctionBasis::new();
        for wt in [0.0, PI / 3.0, PI] {
            assert!(close(&b.hcc_t(wt), &closed_form::hcc_t(wt)) < 1e-12);
            assert!(close(&b.hcs_t(wt), &closed_form::hcs_t(wt)) < 1e-12);
            assert!(close(&b.cc_t(wt), &closed_form::cc_t(wt)) < 1e-12);
            assert!(close(&b.cs_t(wt), &closed_form::cs_t(wt)) < 1e-12);
        }
    }

    #[test]
    fn ideal_is_unitary_cube_root_of_identity() {
        let s = ideal_smatrix();
        assert!(close(&(s.adjoint() * s), &M3::identity()) < 1e-15);
        assert!(close(&(s * s * s), &M3::identity()) < 1e-15);
    }
}
