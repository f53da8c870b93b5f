//! The JSON run configuration. Every field has a default except `plan`, which
//! `evolve` and `compile` require; the resolved document is echoed into each
//! output file.

use std::path::Path;

use schwinger_core::bounds::LambdaReading;
use schwinger_core::{build_model, Hopping, ModelParams, OrderingScheme, SchwingerModel, TrotterPlan};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub plan: Option<TrotterPlan>,
    /// If set, `plan.steps · plan.dt` must equal it.
    pub total_time: Option<f64>,
    pub seed: u64,
    pub shots: Option<u64>,
    pub dense_limit: usize,
    pub observables: ObservableSection,
    pub bounds: BoundsSection,
    pub alpha: AlphaSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSection::default(),
            plan: None,
            total_time: None,
            seed: 0,
            shots: None,
            dense_limit: schwinger_core::DEFAULT_DENSE_LIMIT,
            observables: ObservableSection::default(),
            bounds: BoundsSection::default(),
            alpha: AlphaSection::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub n_sites: usize,
    pub x: f64,
    pub mu: f64,
    pub hopping: Hopping,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { n_sites: 4, x: 0.6, mu: 0.1, hopping: Hopping::Pauli }
    }
}

impl ModelSection {
    pub fn build(&self, n_sites: usize) -> Result<SchwingerModel, CliError> {
        let params = ModelParams::new(n_sites, self.x, self.mu)?.with_hopping(self.hopping);
        Ok(build_model(params)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservableSection {
    /// Also run exact evolution alongside the product formula.
    pub exact: bool,
    /// Emit per-bitstring projections onto the zero-charge sector.
    pub projections: bool,
}

impl Default for ObservableSection {
    fn default() -> Self {
        Self { exact: true, projections: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub sites: Vec<usize>,
    /// Evolution time; `null` means `t = N` for each lattice.
    pub t: Option<f64>,
    pub epsilon: f64,
    /// Step size at which the one-step bound values are reported.
    pub dt: f64,
    pub lambda_reading: LambdaReading,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self { sites: vec![4, 6, 8, 10], t: None, epsilon: 0.01, dt: 1.0, lambda_reading: LambdaReading::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlphaSection {
    pub times: Vec<f64>,
    pub dt: f64,
    pub ordering: OrderingScheme,
    pub grid_points: usize,
    /// Also write the full leakage-vs-α₁ curve for each time.
    pub curves: bool,
}

impl Default for AlphaSection {
    fn default() -> Self {
        Self {
            times: (1..=10).map(f64::from).collect(),
            dt: 1.0,
            ordering: OrderingScheme::XYZ,
            grid_points: 4096,
            curves: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// The plan, checked against `total_time` when one is given.
    pub fn plan(&self) -> Result<&TrotterPlan, CliError> {
        let plan = self
            .plan
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a \"plan\" section".into()))?;
        plan.validate()?;
        if let Some(t) = self.total_time {
            if (plan.total_time() - t).abs() > 1e-12 {
                return Err(CliError::Config(format!(
                    "plan covers t = {} ({} steps of {}), but total_time is {t}",
                    plan.total_time(),
                    plan.steps,
                    plan.dt
                )));
            }
        }
        Ok(plan)
    }

    /// `# config: {...}` provenance line.
    pub fn header(&self) -> String {
        format!("# config: {}", serde_json::to_string(self).expect("config serializes"))
    }
}
