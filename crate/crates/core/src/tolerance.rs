//! Tolerance policy shared by all modules.
//!
//! Two grades of checks coexist in this crate: exact-arithmetic-grade checks
//! on polytopes and orthogonal matrices, and quadrature-grade checks on smooth
//! bodies. The defaults keep the two regimes clearly separated.

/// Numerical tolerances and quadrature resolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Orthogonality residual allowed on group elements, `‖MᵀM − I‖_max`.
    pub tol_orth: f64,
    /// Geometric tolerance for hull predicates, vertex merging and
    /// exact-path volume comparisons.
    pub tol_geom: f64,
    /// Relative tolerance of quadrature-path quantities.
    pub tol_quad: f64,
    /// Subdivision levels of the parameter-simplex quadrature
    /// (each level doubles the resolution per axis).
    pub quad_subdivisions: u32,
    /// Monte Carlo node count for sphere quadrature in dimension ≥ 4.
    pub mc_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_orth: 1e-12,
            tol_geom: 1e-9,
            tol_quad: 1e-4,
            quad_subdivisions: 6,
            mc_samples: 40_000,
        }
    }
}

impl Tolerances {
    /// Stricter quadrature profile: one extra subdivision level and a
    /// denser Monte Carlo sphere rule.
    pub fn strict() -> Self {
        Tolerances {
            quad_subdivisions: 7,
            mc_samples: 160_000,
            ..Self::default()
        }
    }

    /// Faster, coarser quadrature profile for smoke runs.
    pub fn fast() -> Self {
        Tolerances {
            tol_quad: 1e-3,
            quad_subdivisions: 4,
            mc_samples: 10_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = self.tol_orth > 0.0 && self.tol_geom > 0.0 && self.tol_quad > 0.0;
        if !positive || self.quad_subdivisions < 1 {
            return Err(crate::GeometryError::InvalidArgument(
                "tolerances must be positive and quad_subdivisions >= 1".into(),
            ));
        }
        Ok(())
    }
}
