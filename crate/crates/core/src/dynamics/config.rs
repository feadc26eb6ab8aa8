use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scheme {
    /// Forward Euler on the penalised energy `E_N + (1/(Nε)) Σ d²`.
    EpsilonFlow { eps: f64 },
    /// Free Euler step of `E_N` followed by projection onto the domain.
    Projected,
}

/// Constant step size, either given or chosen once by backtracking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    Fixed(f64),
    Auto,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StepSizeRepr {
    Fixed(f64),
    Keyword(String),
}

impl Serialize for StepSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            StepSize::Fixed(t) => StepSizeRepr::Fixed(t),
            StepSize::Auto => StepSizeRepr::Keyword("auto".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match StepSizeRepr::deserialize(d)? {
            StepSizeRepr::Fixed(t) => Ok(StepSize::Fixed(t)),
            StepSizeRepr::Keyword(k) if k == "auto" => Ok(StepSize::Auto),
            StepSizeRepr::Keyword(k) => {
                Err(serde::de::Error::custom(format!("tau must be a number or \"auto\", got {k:?}")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Stopping {
    /// `|∇E| < tol`, with `|∇E|` the reported gradient norm.
    GradNorm,
    /// `|E(xⁿ⁺¹) - E(xⁿ)| / τ < tol`.
    EnergyRate,
    FixedTime {
        t: f64,
    },
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub tau: StepSize,
    pub tol: f64,
    pub stopping: Stopping,
    pub max_steps: usize,
    pub snapshot_every: usize,
    pub seed: u64,
    /// Threads used for force evaluation; results do not depend on it.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            scheme: Scheme::Projected,
            tau: StepSize::Auto,
            tol: 1e-9,
            stopping: Stopping::GradNorm,
            max_steps: 1_000_000,
            snapshot_every: 1000,
            seed: 0,
            workers: 1,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if let Scheme::EpsilonFlow { eps } = self.scheme {
            positive("eps", eps)?;
        }
        if let StepSize::Fixed(t) = self.tau {
            positive("tau", t)?;
        }
        positive("tol", self.tol)?;
        if let Stopping::FixedTime { t } = self.stopping {
            positive("final time", t)?;
        }
        if self.max_steps == 0 || self.snapshot_every == 0 || self.workers == 0 {
            return Err(Error::InvalidConfig("max_steps, snapshot_every and workers must be at least 1".into()));
        }
        Ok(())
    }
}
