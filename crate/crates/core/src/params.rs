use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Physical constants of a run plus the eigenstate quantum number.
///
/// `kappa` is an inverse length. Natural units (`m = c = hbar = 1`, `kappa = 0`)
/// are the default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    pub light_speed: f64,
    pub hbar: f64,
    pub kappa: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            light_speed: 1.0,
            hbar: 1.0,
            kappa: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(mass: f64, light_speed: f64, hbar: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            mass,
            light_speed,
            hbar,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mass, self.light_speed, self.hbar, self.kappa]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("physical parameters must be finite"));
        }
        if self.mass < 0.0 {
            return Err(invalid(format!("mass must be >= 0, got {}", self.mass)));
        }
        if self.light_speed <= 0.0 {
            return Err(invalid(format!(
                "light speed must be > 0, got {}",
                self.light_speed
            )));
        }
        if self.hbar <= 0.0 {
            return Err(invalid(format!("hbar must be > 0, got {}", self.hbar)));
        }
        Ok(())
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    /// Rest energy `m c^2`.
    pub fn rest_energy(&self) -> f64 {
        self.mass * self.light_speed * self.light_speed
    }

    /// `c hbar kappa`, the kinetic energy scale of the quantum number.
    pub fn kinetic_energy_of_kappa(&self) -> f64 {
        self.light_speed * self.hbar * self.kappa
    }
}
