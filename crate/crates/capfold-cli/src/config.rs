//! Generator settings as a JSON file. Angles are in degrees here, as on the
//! command line; the library works in radians.
//!
//! ```json
//! { "n": 98, "phi_deg": 33.0, "seed": 7, "surface": "paraboloid", "jitter": 0.3 }
//! ```
//!
//! `surface` (`paraboloid` or `spherical_cap`) and `jitter` may be omitted.

use anyhow::{ensure, Result};
use serde::{Deserialize, Serialize};

use capfold::gen::{GenConfig, Surface};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenFile {
    pub n: usize,
    pub phi_deg: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_surface")]
    pub surface: Surface,
    #[serde(default = "default_jitter")]
    pub jitter: f64,
}

fn default_surface() -> Surface {
    Surface::Paraboloid
}

fn default_jitter() -> f64 {
    0.3
}

impl GenFile {
    pub fn parse(text: &str) -> Result<GenConfig> {
        let f: GenFile = serde_json::from_str(text)?;
        ensure!(f.n >= 4, "n must be at least 4, got {}", f.n);
        ensure!(f.phi_deg > 0.0 && f.phi_deg < 90.0, "phi_deg must lie in (0, 90), got {}", f.phi_deg);
        Ok(f.to_config())
    }

    pub fn to_config(self) -> GenConfig {
        GenConfig {
            n: self.n,
            surface: self.surface,
            target_phi: self.phi_deg.to_radians(),
            seed: self.seed,
            jitter: self.jitter,
        }
    }

    pub fn from_config(c: &GenConfig) -> Self {
        GenFile { n: c.n, phi_deg: c.target_phi.to_degrees(), seed: c.seed, surface: c.surface, jitter: c.jitter }
    }
}
