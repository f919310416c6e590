use clap::ValueEnum;
use gsmon_core::monads::{exhaustive_cost, MonadKind, SamplerConfig, EXHAUSTIVE_BUDGET};
use gsmon_core::{Mode, MonadInstance};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Exhaustive,
    Random,
    /// Exhaustive when the carriers are enumerable within budget.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Markdown,
}

/// Everything a run depends on. Echoed verbatim into the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub monads: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<Vec<usize>>,
    pub mode: ModeChoice,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    pub max_numerator: u32,
    pub max_denominator: u32,
    /// Subcommand-specific options (square, partition, kernel path, ...).
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub options: Map<String, Value>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if self.sizes.iter().flatten().any(|&n| n == 0) {
            return Err(CliError::Usage("--sizes entries must be at least 1".into()));
        }
        if self.max_denominator == 0 {
            return Err(CliError::Usage("--max-denominator must be at least 1".into()));
        }
        if matches!(self.bound, Some(b) if b < 1) {
            return Err(CliError::Usage("--bound must be at least 1".into()));
        }
        Ok(())
    }

    /// Parses a monad id and applies the bound and sampler caps.
    pub fn instance(&self, id: &str) -> Result<MonadInstance, CliError> {
        let mut inst = MonadInstance::parse(id)?;
        if let (MonadKind::FreeAbelian { .. }, Some(b)) = (inst.kind(), self.bound) {
            if !id.contains(':') {
                inst = MonadInstance::free_abelian(b);
            }
        }
        let sampler = SamplerConfig {
            max_numerator: self.max_numerator,
            max_denominator: self.max_denominator,
            ..inst.sampler().clone()
        };
        Ok(inst.with_sampler(sampler))
    }

    /// The concrete mode for a check on `inst`; `feasible` says whether
    /// exhaustive enumeration fits the budget.
    pub fn resolve(&self, feasible: bool) -> Mode {
        match self.mode {
            ModeChoice::Exhaustive => Mode::Exhaustive,
            ModeChoice::Random => Mode::Randomized,
            ModeChoice::Auto if feasible => Mode::Exhaustive,
            ModeChoice::Auto => Mode::Randomized,
        }
    }

    pub fn law_mode(&self, inst: &MonadInstance, sizes: &[usize]) -> Mode {
        self.resolve(exhaustive_cost(inst, sizes).is_some_and(|c| c <= EXHAUSTIVE_BUDGET))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig {
            command: "check laws".into(),
            monads: vec!["F".into()],
            sizes: vec![vec![1, 2]],
            mode: ModeChoice::Auto,
            trials: 10,
            seed: 42,
            format: Format::Json,
            bound: None,
            max_numerator: 9,
            max_denominator: 4,
            options: Map::new(),
        }
    }

    #[test]
    fn rejects_zero_trials_and_sizes() {
        let mut c = base();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.sizes = vec![vec![0]];
        assert!(c.validate().is_err());
        assert!(base().validate().is_ok());
    }

    #[test]
    fn bound_applies_to_plain_f_only() {
        let mut c = base();
        c.bound = Some(5);
        assert_eq!(c.instance("F").unwrap().kind(), &MonadKind::FreeAbelian { bound: 5 });
        assert_eq!(c.instance("F:7").unwrap().kind(), &MonadKind::FreeAbelian { bound: 7 });
    }

    #[test]
    fn auto_mode_follows_enumerability() {
        let c = base();
        assert_eq!(c.law_mode(&MonadInstance::distribution(), &[1]), Mode::Randomized);
        assert_eq!(c.law_mode(&MonadInstance::identity(), &[1, 2]), Mode::Exhaustive);
    }
}
