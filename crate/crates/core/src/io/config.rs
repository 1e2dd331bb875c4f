use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::solver::{DiagnosticsSpec, InitialData, SimConfig};
use crate::spectral::Grid;

use super::IoError;

/// JSON shape of a run configuration. Optional keys take the documented
/// defaults when converted to [`SimConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dim: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    pub gamma: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_fixed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_every: Option<f64>,
    pub initial_data: InitialData,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ConfigFile {
    pub fn into_config(self) -> Result<SimConfig, IoError> {
        let bad = |field: &str, message: String| IoError::Config {
            field: field.into(),
            message,
        };
        let grid = Grid::new(self.dim, self.n).map_err(|e| {
            let field = if matches!(e, crate::spectral::GridError::Dimension(_)) { "dim" } else { "n" };
            bad(field, e.to_string())
        })?;
        let grid = match self.period {
            Some(p) => grid.with_period(p).map_err(|e| bad("period", e.to_string()))?,
            None => grid,
        };
        let mut cfg = SimConfig::new(grid, self.gamma, self.t_end, self.initial_data);
        if let Some(v) = self.cfl {
            cfg.cfl = v;
        }
        if let Some(v) = self.dt_max {
            cfg.dt_max = v;
        }
        if let Some(v) = self.output_every {
            cfg.output_every = v;
        }
        cfg.dt_fixed = self.dt_fixed;
        cfg.diagnostics = self.diagnostics;
        cfg.seed = self.seed;
        cfg.validate().map_err(|message| {
            let field = message.split_whitespace().next().unwrap_or("config").to_string();
            IoError::Config { field, message }
        })?;
        Ok(cfg)
    }

    /// Every key materialized.
    pub fn from_config(cfg: &SimConfig) -> Self {
        Self {
            dim: cfg.grid.dim(),
            n: cfg.grid.n(),
            period: Some(cfg.grid.period()),
            gamma: cfg.gamma,
            t_end: cfg.t_end,
            cfl: Some(cfg.cfl),
            dt_max: Some(cfg.dt_max),
            dt_fixed: cfg.dt_fixed,
            output_every: Some(cfg.output_every),
            initial_data: cfg.initial_data.clone(),
            diagnostics: cfg.diagnostics.clone(),
            seed: cfg.seed,
        }
    }
}

/// Strict parse: unknown keys, missing keys, type mismatches and constraint
/// violations all name the offending field.
pub fn parse_config_str(text: &str) -> Result<SimConfig, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        let field = if path == "." {
            // Root-level missing/unknown keys: serde names them in backticks.
            message.split('`').nth(1).unwrap_or("config").to_string()
        } else {
            path
        };
        IoError::Config { field, message }
    })?;
    file.into_config()
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<SimConfig, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_config_str(&text)
}

/// Pretty JSON with all defaults materialized.
pub fn emit_config(cfg: &SimConfig) -> String {
    serde_json::to_string_pretty(&ConfigFile::from_config(cfg)).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"dim": 2, "n": 64, "gamma": 2, "t_end": 1, "initial_data": {"recipe": "shear"}}"#;

    fn field_of(text: &str) -> String {
        match parse_config_str(text) {
            Err(IoError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.cfl, 0.5);
        assert_eq!(cfg.output_every, 0.01);
        assert_eq!(cfg.dt_max, 0.01);
        assert_eq!(cfg.grid.period(), 1.0);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.diagnostics, DiagnosticsSpec::default());
    }

    #[test]
    fn errors_name_fields() {
        let neg = MINIMAL.replace("\"gamma\": 2", "\"gamma\": -1");
        match parse_config_str(&neg) {
            Err(IoError::Config { field, message }) => {
                assert_eq!(field, "gamma");
                assert_eq!(message, "gamma must be ≥ 0");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(field_of(&MINIMAL.replace("\"n\": 64", "\"n\": 64, \"gama\": 1")), "gama");
        assert_eq!(field_of(&MINIMAL.replace("\"gamma\": 2, ", "")), "gamma");
        assert_eq!(field_of(&MINIMAL.replace("\"t_end\": 1", "\"t_end\": \"one\"")), "t_end");
        assert_eq!(field_of(&MINIMAL.replace("\"n\": 64", "\"n\": 48")), "n");
        let nested = MINIMAL.replace("\"recipe\": \"shear\"", "\"recipe\": \"shear\", \"amplitud\": 2");
        assert!(field_of(&nested).starts_with("initial_data"));
        let p = MINIMAL.replace("}}", "}, \"diagnostics\": {\"p_list\": [2, \"x\"]}}");
        assert!(field_of(&p).starts_with("diagnostics.p_list"));
    }

    #[test]
    fn emit_parse_round_trip() {
        let text = r#"{"dim": 3, "n": 16, "period": 6.5, "gamma": 3, "t_end": 2, "cfl": 0.25, "dt_fixed": 0.01,
            "initial_data": {"recipe": "abc", "scale": 2}, "diagnostics": {"p_list": [2, "inf"], "alpha_list": [0.5]},
            "seed": 9}"#;
        let cfg = parse_config_str(text).unwrap();
        let emitted = emit_config(&cfg);
        assert_eq!(parse_config_str(&emitted).unwrap(), cfg);
        assert_eq!(emit_config(&parse_config_str(&emitted).unwrap()), emitted);
        let value: serde_json::Value = serde_json::from_str(&emitted).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["dim", "n", "period", "gamma", "t_end", "cfl", "dt_max", "dt_fixed", "output_every", "initial_data", "diagnostics", "seed"] {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(value["diagnostics"]["p_list"][1], "inf");
    }
}
