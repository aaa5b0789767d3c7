//! Numerical tolerances, gathered in one record so experiments can tune them.

use crate::error::{Error, Result};

/// Every threshold used by the library. Defaults target `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Singular values at or below this are treated as zero.
    pub svd_cutoff: f64,
    /// Singular values between the cutoff and `svd_gap * largest` make a rank decision ambiguous.
    pub svd_gap: f64,
    pub orthonormality: f64,
    /// Principal-angle threshold for span equality and containment.
    pub subspace_angle: f64,
    pub isotropy: f64,
    pub darboux: f64,
    /// Minimum norm of a projected hint column during frame propagation.
    pub hint_projection: f64,
    /// Largest principal angle allowed between consecutive loop samples.
    pub loop_step: f64,
    pub loop_closure: f64,
    pub max_loop_samples: usize,
    pub symplectic: f64,
    /// Largest operator-norm distance between consecutive symplectic matrix samples.
    pub matrix_loop_step: f64,
    pub unit_modulus: f64,
    pub winding_jump: f64,
    pub winding_residual: f64,
    pub contraction_floor: f64,
    pub on_surface: f64,
    pub gradient_norm: f64,
    pub fd_step: f64,
    pub sff_symmetry: f64,
    pub leafwise_special: f64,
    pub integrability: f64,
    pub minimality: f64,
    pub flow_step: f64,
    pub bracket_tangency: f64,
    /// Central-difference step of the bracket route.
    pub bracket_step: f64,
    /// Agreement required between independently computed curvature routes.
    pub route_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            svd_cutoff: 1e-10,
            svd_gap: 1e-3,
            orthonormality: 1e-10,
            subspace_angle: 1e-8,
            isotropy: 1e-9,
            darboux: 1e-9,
            hint_projection: 1e-6,
            loop_step: std::f64::consts::FRAC_PI_8,
            loop_closure: 1e-8,
            max_loop_samples: 1 << 20,
            symplectic: 1e-9,
            matrix_loop_step: 0.5,
            unit_modulus: 1e-9,
            winding_jump: std::f64::consts::FRAC_PI_2,
            winding_residual: 0.05,
            contraction_floor: 1e-6,
            on_surface: 1e-8,
            gradient_norm: 1e-4,
            fd_step: 1e-5,
            sff_symmetry: 1e-5,
            leafwise_special: 1e-6,
            integrability: 1e-5,
            minimality: 1e-5,
            flow_step: 1e-3,
            bracket_tangency: 1e-3,
            bracket_step: 1e-4,
            route_agreement: 1e-3,
        }
    }
}

macro_rules! tolerance_fields {
    ($mac:ident) => {
        $mac!(
            svd_cutoff,
            svd_gap,
            orthonormality,
            subspace_angle,
            isotropy,
            darboux,
            hint_projection,
            loop_step,
            loop_closure,
            symplectic,
            matrix_loop_step,
            unit_modulus,
            winding_jump,
            winding_residual,
            contraction_floor,
            on_surface,
            gradient_norm,
            fd_step,
            sff_symmetry,
            leafwise_special,
            integrability,
            minimality,
            flow_step,
            bracket_tangency,
            bracket_step,
            route_agreement
        )
    };
}

impl Tolerances {
    /// All entries as `(name, value)` pairs in declaration order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        macro_rules! collect {
            ($($f:ident),*) => {
                vec![$((stringify!($f), self.$f),)* ("max_loop_samples", self.max_loop_samples as f64)]
            };
        }
        tolerance_fields!(collect)
    }

    /// Overrides one entry by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Argument(format!("tolerance {name} must be finite and non-negative")));
        }
        macro_rules! assign {
            ($($f:ident),*) => {
                match name {
                    $(stringify!($f) => self.$f = value,)*
                    "max_loop_samples" => {
                        if value.fract() != 0.0 {
                            return Err(Error::Argument("max_loop_samples must be an integer".into()));
                        }
                        self.max_loop_samples = value as usize
                    }
                    _ => return Err(Error::Argument(format!("unknown tolerance `{name}`"))),
                }
            };
        }
        tolerance_fields!(assign);
        Ok(())
    }

    /// Looser thresholds suitable for single precision.
    pub fn single_precision() -> Self {
        Self {
            svd_cutoff: 1e-5,
            orthonormality: 1e-5,
            subspace_angle: 1e-3,
            isotropy: 1e-5,
            darboux: 1e-5,
            loop_closure: 1e-4,
            symplectic: 1e-5,
            unit_modulus: 1e-5,
            on_surface: 1e-5,
            fd_step: 1e-3,
            sff_symmetry: 1e-2,
            leafwise_special: 1e-3,
            integrability: 1e-2,
            minimality: 1e-2,
            ..Self::default()
        }
    }
}
