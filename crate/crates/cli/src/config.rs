//! JSON run configuration.

use serde::Deserialize;
use subfpt::models::{JumpSpec, LevyModel, ProblemTriple, Sign, SubJumps, SubordinatorModel};
use subfpt::sampler::SamplerConfig;

/// Model of `X`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevySpec {
    Bm {
        sigma2: f64,
        #[serde(default)]
        drift: f64,
    },
    CompoundPoissonExp {
        rate: f64,
        jump_rate: f64,
        sign: SignSpec,
        #[serde(default)]
        drift: f64,
        #[serde(default)]
        sigma2: f64,
    },
    /// Claim process of the risk model: `Exp(p)` claims at rate `lambda`.
    Claims { lambda: f64, p: f64 },
    Stable { index: f64, rho: f64 },
    SnStable { index: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSpec {
    Positive,
    Negative,
}

/// Model of a subordinator (`Sub` or `K`).
#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubSpec {
    #[default]
    Zero,
    Drift { delta: f64 },
    Stable {
        alpha: f64,
        #[serde(default)]
        drift: f64,
    },
    TemperedStable {
        alpha: f64,
        theta: f64,
        #[serde(default)]
        drift: f64,
    },
    CompoundPoissonExp {
        rate: f64,
        mean: f64,
        #[serde(default)]
        drift: f64,
    },
}

/// Sampler choice and discretization.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSpec {
    pub method: String,
    pub step: f64,
    pub horizon: f64,
    pub bridge: bool,
    pub phys_step: Option<f64>,
    pub phys_horizon: Option<f64>,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self { method: "reduced".into(), step: 1e-3, horizon: 10.0, bridge: true, phys_step: None, phys_horizon: None }
    }
}

impl SamplerSpec {
    pub fn config(&self) -> SamplerConfig {
        let mut c = SamplerConfig::new(self.step, self.horizon).with_bridge(self.bridge);
        if let Some(h) = self.phys_step {
            c = c.with_phys_step(h);
        }
        if let Some(h) = self.phys_horizon {
            c = c.with_phys_horizon(h);
        }
        c
    }
}

/// A list of points or an evenly spaced range with `count` points.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { from: f64, to: f64, count: usize },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { from, to, count } => match count {
                0 => vec![],
                1 => vec![*from],
                n => (0..*n).map(|k| from + (to - from) * k as f64 / (*n - 1) as f64).collect(),
            },
        }
    }
}

/// Contour and output options of the `density` command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensitySpec {
    pub abscissa: Option<f64>,
    pub half_width: f64,
    pub nodes: usize,
    pub derivative: u32,
    /// `mellin`, `series` or `auto`.
    pub method: String,
}

impl Default for DensitySpec {
    fn default() -> Self {
        Self { abscissa: None, half_width: 60.0, nodes: 4096, derivative: 0, method: "auto".into() }
    }
}

/// The whole configuration document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub x_process: LevySpec,
    pub time_change: SubSpec,
    #[serde(default)]
    pub boundary: SubSpec,
    pub level: f64,
    #[serde(default)]
    pub start: f64,
    #[serde(default)]
    pub sampler: SamplerSpec,
    /// Killing rates for `fpt-lt`; the first entry is used by `scale-fn`.
    #[serde(default)]
    pub q: Vec<f64>,
    /// `(q, p, v)` triples for `wh-check`.
    #[serde(default)]
    pub triples: Vec<[f64; 3]>,
    /// Spatial grid (`scale-fn`), time grid (`density`) or capital grid (`ruin`).
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub density: DensitySpec,
}

impl LevySpec {
    pub fn model(&self) -> subfpt::Result<LevyModel<f64>> {
        match *self {
            LevySpec::Bm { sigma2, drift } => LevyModel::brownian(sigma2, drift),
            LevySpec::CompoundPoissonExp { rate, jump_rate, sign, drift, sigma2 } => {
                let sign = match sign {
                    SignSpec::Positive => Sign::Positive,
                    SignSpec::Negative => Sign::Negative,
                };
                LevyModel::new(sigma2, drift, JumpSpec::CompoundPoissonExp { rate, jump_rate, sign })
            }
            LevySpec::Claims { lambda, p } => subfpt::wiener_hopf::claims_model(lambda, p),
            LevySpec::Stable { index, rho } => LevyModel::two_sided_stable(index, rho),
            LevySpec::SnStable { index } => LevyModel::spectrally_negative_stable(index),
        }
    }
}

impl SubSpec {
    pub fn model(&self) -> subfpt::Result<SubordinatorModel<f64>> {
        match *self {
            SubSpec::Zero => Ok(SubordinatorModel::zero()),
            SubSpec::Drift { delta } => SubordinatorModel::pure_drift(delta),
            SubSpec::Stable { alpha, drift } => SubordinatorModel::new(drift, SubJumps::Stable { alpha }),
            SubSpec::TemperedStable { alpha, theta, drift } => {
                SubordinatorModel::new(drift, SubJumps::TemperedStable { alpha, theta })
            }
            SubSpec::CompoundPoissonExp { rate, mean, drift } => {
                SubordinatorModel::new(drift, SubJumps::CompoundPoissonExp { rate, mean })
            }
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn problem(&self) -> subfpt::Result<ProblemTriple<f64>> {
        ProblemTriple::new(
            self.x_process.model()?,
            self.time_change.model()?,
            self.boundary.model()?,
            self.level,
            self.start,
        )
    }

    pub fn grid_or(&self, default: GridSpec) -> Vec<f64> {
        self.grid.clone().unwrap_or(default).points()
    }
}
