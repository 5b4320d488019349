//! Declarative experiment descriptions.

use std::path::Path;

use cogfeed_core::channel::db_to_linear;
use cogfeed_core::sim::{CdiModel, CodebookSettings};
use cogfeed_core::{BeamMode, Bits, Error, Result, SystemParams};
use serde::{Deserialize, Serialize};

/// Which experiment to run. The kind fixes the default sweep grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// OCB outage vs γ_max for several CDI budgets.
    Figure2,
    /// OCB vs NOCB.
    Figure3,
    /// With and without feedforward.
    Figure4,
    /// Perfect vs quantized local feedback of the SU channel shape.
    Figure5,
    /// Outage vs IPC bits under a fixed total budget.
    Figure6,
    ValidateDistributions,
    AllocateBits,
    CustomSweep,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Figure2 => "figure2",
            ExperimentKind::Figure3 => "figure3",
            ExperimentKind::Figure4 => "figure4",
            ExperimentKind::Figure5 => "figure5",
            ExperimentKind::Figure6 => "figure6",
            ExperimentKind::ValidateDistributions => "validate-distributions",
            ExperimentKind::AllocateBits => "allocate-bits",
            ExperimentKind::CustomSweep => "custom-sweep",
        }
    }

    pub fn is_sweep(self) -> bool {
        !matches!(self, ExperimentKind::ValidateDistributions | ExperimentKind::AllocateBits)
    }
}

/// Partial system parameters. Powers and thresholds are in dB; the path
/// loss λ is a plain factor.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antennas: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_p_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_s_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_p_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_max_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_cdi: Option<Bits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_ipc: Option<Bits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_local: Option<Bits>,
}

impl Overrides {
    /// Apply to the default parameters. γ_max is applied after σ² so that
    /// it stays an SNR.
    pub fn apply(&self, mut p: SystemParams) -> Result<SystemParams> {
        if let Some(l) = self.antennas {
            if l < 3 {
                return Err(Error::Config(format!("overrides.antennas: L must be at least 3, got {l}")));
            }
            p.antennas = l;
        }
        if let Some(x) = self.lambda {
            p.lambda = x;
        }
        let gamma_max_db = self.gamma_max_db.unwrap_or_else(|| cogfeed_core::channel::linear_to_db(p.gamma_max()));
        if let Some(x) = self.sigma2_db {
            p.sigma2 = db_to_linear(x);
        }
        p = p.with_gamma_max_db(gamma_max_db);
        if let Some(x) = self.theta_p_db {
            p.theta_p = db_to_linear(x);
        }
        if let Some(x) = self.theta_s_db {
            p.theta_s = db_to_linear(x);
        }
        if let Some(x) = self.gamma_p_db {
            p = p.with_gamma_p_db(x);
        }
        if let Some(b) = self.b_cdi {
            p.b_cdi = b;
        }
        if let Some(a) = self.a_ipc {
            p.a_ipc = a;
        }
        if let Some(b) = self.b_local {
            p.b_local = b;
        }
        p.validate().map_err(|e| Error::Config(format!("overrides: {e}")))?;
        Ok(p)
    }
}

/// Replacement sweep axes. Any axis left out keeps the kind's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<BeamMode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedforward: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antennas: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_p_db: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_cdi: Option<Vec<Bits>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_ipc: Option<Vec<Bits>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_local: Option<Vec<Bits>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_max_db: Option<Vec<f64>>,
    /// Total feedback bits `A + B` for figure6 and allocate-bits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_bits: Option<u32>,
}

fn default_trials() -> u64 {
    1_000_000
}

/// A complete experiment description, as read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default = "default_trials")]
    pub n_trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Output file stem, relative to the output directory unless absolute.
    /// Defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub cdi_model: CdiModel,
    #[serde(default)]
    pub codebook: CodebookSettings,
    /// allocate-bits only: also search the split by simulation.
    #[serde(default)]
    pub empirical: bool,
}

impl ExperimentSpec {
    pub fn new(name: &str, kind: ExperimentKind) -> Self {
        Self {
            name: name.to_string(),
            kind,
            overrides: Overrides::default(),
            grid: GridOverrides::default(),
            n_trials: default_trials(),
            master_seed: 0,
            output_path: None,
            cdi_model: CdiModel::default(),
            codebook: CodebookSettings::default(),
            empirical: false,
        }
    }

    /// Parse JSON, reporting the path of the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("{path}: {}", e.into_inner()))
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("name: must not be empty".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials: must be at least 1".into()));
        }
        self.overrides.apply(SystemParams::default())?;
        if let Some(ls) = &self.grid.antennas {
            if let Some((i, l)) = ls.iter().enumerate().find(|(_, &l)| l < 3) {
                return Err(Error::Config(format!("grid.antennas[{i}]: L must be at least 3, got {l}")));
            }
        }
        if self.grid.total_bits == Some(0) {
            return Err(Error::Config("grid.total_bits: must be at least 1".into()));
        }
        let empty = [
            ("modes", self.grid.modes.as_ref().map(Vec::len)),
            ("feedforward", self.grid.feedforward.as_ref().map(Vec::len)),
            ("antennas", self.grid.antennas.as_ref().map(Vec::len)),
            ("gamma_p_db", self.grid.gamma_p_db.as_ref().map(Vec::len)),
            ("b_cdi", self.grid.b_cdi.as_ref().map(Vec::len)),
            ("a_ipc", self.grid.a_ipc.as_ref().map(Vec::len)),
            ("b_local", self.grid.b_local.as_ref().map(Vec::len)),
            ("gamma_max_db", self.grid.gamma_max_db.as_ref().map(Vec::len)),
        ];
        if let Some((axis, _)) = empty.iter().find(|(_, n)| *n == Some(0)) {
            return Err(Error::Config(format!("grid.{axis}: axis must not be empty")));
        }
        Ok(())
    }

    /// Base parameters after overrides.
    pub fn params(&self) -> Result<SystemParams> {
        self.overrides.apply(SystemParams::default())
    }

    pub fn output_stem(&self) -> &str {
        self.output_path.as_deref().unwrap_or(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_takes_defaults() {
        let s = ExperimentSpec::from_json(r#"{"name": "f2", "kind": "figure2"}"#).unwrap();
        assert_eq!(s.n_trials, 1_000_000);
        assert_eq!(s.params().unwrap(), SystemParams::default());
        assert_eq!(s.output_stem(), "f2");
    }

    #[test]
    fn overrides_are_in_db() {
        let s = ExperimentSpec::from_json(
            r#"{"name": "x", "kind": "custom-sweep",
                "overrides": {"gamma_p_db": 13, "gamma_max_db": 30, "lambda": 0.2, "b_cdi": "inf", "a_ipc": 5}}"#,
        )
        .unwrap();
        let p = s.params().unwrap();
        assert!((p.gamma_p - 10f64.powf(1.3)).abs() < 1e-12);
        assert!((p.p_max - 1000.0).abs() < 1e-9);
        assert_eq!(p.lambda, 0.2);
        assert_eq!(p.b_cdi, Bits::Infinite);
        assert_eq!(p.a_ipc, Bits::Finite(5));
    }

    #[test]
    fn gamma_max_stays_an_snr() {
        let mut o = Overrides {
            sigma2_db: Some(10.0),
            ..Default::default()
        };
        let p = o.apply(SystemParams::default()).unwrap();
        assert!((p.gamma_max() - 10.0).abs() < 1e-12);
        o.gamma_max_db = Some(20.0);
        let p = o.apply(SystemParams::default()).unwrap();
        assert!((p.p_max - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn errors_carry_field_paths() {
        let cases = [
            (r#"{"name": "x", "kind": "figure9"}"#, "kind"),
            (r#"{"name": "x", "kind": "figure2", "overrides": {"gamma_p_db": "ten"}}"#, "overrides.gamma_p_db"),
            (r#"{"name": "x", "kind": "figure2", "overrides": {"gama_p_db": 3}}"#, "overrides"),
            (r#"{"name": "x", "kind": "figure2", "overrides": {"antennas": 2}}"#, "overrides.antennas"),
            (r#"{"name": "x", "kind": "figure2", "grid": {"antennas": [4, 2]}}"#, "grid.antennas[1]"),
            (r#"{"name": "x", "kind": "figure2", "grid": {"b_cdi": []}}"#, "grid.b_cdi"),
            (r#"{"name": "x", "kind": "figure2", "n_trials": 0}"#, "n_trials"),
            (r#"{"name": "x", "kind": "figure2", "overrides": {"lambda": 1.5}}"#, "overrides"),
        ];
        for (text, path) in cases {
            match ExperimentSpec::from_json(text) {
                Err(Error::Config(msg)) => assert!(msg.starts_with(path), "{msg} lacks {path}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trips() {
        let mut s = ExperimentSpec::new("a", ExperimentKind::Figure6);
        s.grid.total_bits = Some(10);
        s.overrides.gamma_p_db = Some(13.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(ExperimentSpec::from_json(&text).unwrap(), s);
    }
}
