//! Run configuration: TOML sections with every key required to be known.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use friedrichs::evolution::DtPolicy;
use friedrichs::model::{discretize, DiscreteModel, ModelParams};
use friedrichs::spectral::LevelShift;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub omega1: f64,
    pub lambda: f64,
    pub cutoff_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    pub box_length: f64,
    pub n_modes: usize,
}

/// Inclusive uniform grid `min, min + step, ..., max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Range {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Range { min, max, step }
    }

    pub fn validate(&self, what: &str) -> Result<(), HarnessError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step > 0.0 && self.max >= self.min) {
            return Err(HarnessError::Config(format!(
                "{what}: need finite min <= max and step > 0, got {:?}",
                self
            )));
        }
        Ok(())
    }

    /// Grid points computed as min + k·step so repeated runs give identical values.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.min + k as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalSection {
    pub t: Range,
    /// Resonance window [a, b]; the mirrored window [−b, −a] is checked too.
    pub window: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionSection {
    pub t: f64,
    pub x: Range,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSection {
    pub t: f64,
    pub x2: f64,
    pub x1: Range,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    /// `auto` or `fixed:<dt>`.
    pub dt_policy: String,
    /// Convergence target of the automatic step selection.
    pub tolerance: f64,
}

/// Pass thresholds for the scenario and self-test metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub decay_rate_rel: f64,
    pub survival_pointwise_rel: f64,
    pub rest_fraction: f64,
    pub cn4_deviation: f64,
    pub emission_tail: f64,
    pub emission_l2: f64,
    pub correlation_l2: f64,
    pub front_ratio: f64,
    pub projection: f64,
    pub paley_wiener: f64,
    pub eval_complex: f64,
    pub restriction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub model: ModelSection,
    pub discretization: DiscretizationSection,
    pub survival: SurvivalSection,
    pub emission: EmissionSection,
    pub correlation: CorrelationSection,
    pub evolution: EvolutionSection,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// ω₁ = 2, λ = 0.1, M = 5 in a box of length 100 with 1200 modes.
    pub fn paper() -> Self {
        RunConfig {
            seed: 20240917,
            output_dir: PathBuf::from("out"),
            model: ModelSection {
                omega1: 2.0,
                lambda: 0.1,
                cutoff_m: 5.0,
            },
            discretization: DiscretizationSection {
                box_length: 100.0,
                n_modes: 1200,
            },
            survival: SurvivalSection {
                t: Range::new(-40.0, 40.0, 0.1),
                window: [2.0, 30.0],
            },
            emission: EmissionSection {
                t: 10.0,
                x: Range::new(-30.0, 30.0, 0.1),
            },
            correlation: CorrelationSection {
                t: 30.0,
                x2: 15.0,
                x1: Range::new(-48.0, 48.0, 0.1),
            },
            evolution: EvolutionSection {
                dt_policy: "auto".into(),
                tolerance: 1e-6,
            },
            tolerances: Tolerances {
                decay_rate_rel: 0.05,
                survival_pointwise_rel: 0.05,
                rest_fraction: 0.10,
                cn4_deviation: 1e-4,
                emission_tail: 1e-3,
                emission_l2: 0.15,
                correlation_l2: 0.25,
                front_ratio: 10.0,
                projection: 1e-8,
                paley_wiener: 1e-6,
                eval_complex: 1e-6,
                restriction: 1e-8,
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Canonical TOML form, written to `config.echo`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.params()?;
        self.survival.t.validate("survival.t")?;
        self.emission.x.validate("emission.x")?;
        self.correlation.x1.validate("correlation.x1")?;
        let [a, b] = self.survival.window;
        if !(0.0 <= a && a < b) {
            return Err(HarnessError::Config(format!("survival.window must satisfy 0 <= a < b, got [{a}, {b}]")));
        }
        if !(self.emission.t > 0.0 && self.correlation.t > 0.0) {
            return Err(HarnessError::Config("emission.t and correlation.t must be positive".into()));
        }
        self.dt_policy()?;
        let t = &self.tolerances;
        let all = [
            ("evolution.tolerance", self.evolution.tolerance),
            ("decay_rate_rel", t.decay_rate_rel),
            ("survival_pointwise_rel", t.survival_pointwise_rel),
            ("rest_fraction", t.rest_fraction),
            ("cn4_deviation", t.cn4_deviation),
            ("emission_tail", t.emission_tail),
            ("emission_l2", t.emission_l2),
            ("correlation_l2", t.correlation_l2),
            ("front_ratio", t.front_ratio),
            ("projection", t.projection),
            ("paley_wiener", t.paley_wiener),
            ("eval_complex", t.eval_complex),
            ("restriction", t.restriction),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(HarnessError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams, HarnessError> {
        Ok(ModelParams::new(self.model.omega1, self.model.lambda, self.model.cutoff_m)?)
    }

    pub fn level_shift(&self) -> Result<LevelShift, HarnessError> {
        Ok(LevelShift::new(self.params()?))
    }

    pub fn discrete_model(&self) -> Result<DiscreteModel, HarnessError> {
        Ok(discretize(self.params()?, self.discretization.box_length, self.discretization.n_modes)?)
    }

    pub fn dt_policy(&self) -> Result<DtPolicy, HarnessError> {
        self.evolution.dt_policy.parse::<DtPolicyArg>().map(|p| p.0)
    }
}

/// `auto` or `fixed:<dt>` as accepted on the command line and in configs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DtPolicyArg(pub DtPolicy);

impl FromStr for DtPolicyArg {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(DtPolicyArg(DtPolicy::Auto));
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            if let Ok(dt) = v.parse::<f64>() {
                if dt > 0.0 && dt.is_finite() {
                    return Ok(DtPolicyArg(DtPolicy::Fixed(dt)));
                }
            }
        }
        Err(HarnessError::Config(format!("dt policy must be 'auto' or 'fixed:<dt>' with dt > 0, got '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_preset_round_trips() {
        let cfg = RunConfig::paper();
        cfg.validate().unwrap();
        let back = RunConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = RunConfig::paper().to_toml();
        text = text.replace("[model]\n", "[model]\nomega2 = 3.0\n");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(HarnessError::Config(_))));
    }

    #[test]
    fn bad_values_are_rejected() {
        let mut cfg = RunConfig::paper();
        cfg.tolerances.emission_l2 = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::paper();
        cfg.emission.x = Range::new(1.0, -1.0, 0.1);
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::paper();
        cfg.evolution.dt_policy = "fixed:-1".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn range_points_are_inclusive() {
        let p = Range::new(-1.0, 1.0, 0.5).points();
        assert_eq!(p, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(Range::new(2.0, 2.0, 1.0).points(), vec![2.0]);
    }

    #[test]
    fn dt_policy_parsing() {
        assert_eq!("auto".parse::<DtPolicyArg>().unwrap().0, DtPolicy::Auto);
        assert_eq!("fixed:0.01".parse::<DtPolicyArg>().unwrap().0, DtPolicy::Fixed(0.01));
        assert!("fixed".parse::<DtPolicyArg>().is_err());
        assert!("0.01".parse::<DtPolicyArg>().is_err());
    }
}
