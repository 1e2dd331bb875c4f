use serde::{Deserialize, Serialize};

use crate::spectral::Grid;

/// Fourier mode entry of an explicit initial field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoeff {
    /// Integer wavenumber, one entry per axis.
    pub k: Vec<i64>,
    /// `[re, im]` of each vector component at `k`; the conjugate mode is implied.
    pub value: Vec<[f64; 2]>,
}

/// Initial magnetic field recipe.
///
/// Every recipe is followed by dealias truncation, Hermitian symmetrization
/// and Leray projection, so the resulting field always satisfies the solver
/// invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `e₁ + η·b` with `b` a normalized random solenoidal perturbation whose
    /// `k₁ = 0` modes vanish, so the x₁-average of `B − e₁` is zero.
    E1PlusPerturbation {
        eta: f64,
        #[serde(default = "default_kmax")]
        kmax: u32,
    },
    /// Zero-mean random solenoidal field on `1 ≤ |k| ≤ kmax` with
    /// `‖B‖_{L²} = amplitude`.
    RandomBandlimited {
        #[serde(default = "default_kmax")]
        kmax: u32,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `B = (mean + amplitude·sin(2π·wavenumber·x₂/period), 0[, 0])`.
    Shear {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_u32")]
        wavenumber: u32,
        #[serde(default)]
        mean: f64,
    },
    /// Arnold–Beltrami–Childress field scaled by `scale`, plus an optional
    /// random solenoidal perturbation of `L²` size `eta`.
    Abc {
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        b: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "one_u32")]
        wavenumber: u32,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        eta: f64,
        #[serde(default = "default_kmax")]
        kmax: u32,
    },
    /// Explicit mean plus a list of Fourier coefficients.
    Coefficients {
        #[serde(default)]
        mean: Vec<f64>,
        modes: Vec<ModeCoeff>,
    },
}

fn default_kmax() -> u32 {
    8
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::E1PlusPerturbation { .. } => "e1_plus_perturbation",
            InitialData::RandomBandlimited { .. } => "random_bandlimited",
            InitialData::Shear { .. } => "shear",
            InitialData::Abc { .. } => "abc",
            InitialData::Coefficients { .. } => "coefficients",
        }
    }
}

/// Observables to record beyond the fixed diagnostics columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    /// `L^p` exponents for `‖B‖_{L^p}`; `f64::INFINITY` is written as `"inf"`.
    #[serde(default = "default_p_list", with = "p_list_serde")]
    pub p_list: Vec<f64>,
    /// Sobolev exponents for `‖u‖_{H^α}`.
    #[serde(default = "default_alpha_list")]
    pub alpha_list: Vec<f64>,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        Self {
            p_list: default_p_list(),
            alpha_list: default_alpha_list(),
        }
    }
}

fn default_p_list() -> Vec<f64> {
    vec![2.0, 4.0, f64::INFINITY]
}

fn default_alpha_list() -> Vec<f64> {
    vec![0.0, 1.0]
}

mod p_list_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum PValue {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(list: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<PValue> = list
            .iter()
            .map(|&p| {
                if p.is_infinite() {
                    PValue::Text("inf".into())
                } else {
                    PValue::Num(p)
                }
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<PValue>::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                PValue::Num(p) => Ok(p),
                PValue::Text(t) if t == "inf" || t == "infinity" => Ok(f64::INFINITY),
                PValue::Text(t) => Err(serde::de::Error::custom(format!(
                    "p_list entries must be numbers or \"inf\", got {t:?}"
                ))),
            })
            .collect()
    }
}

/// Validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Grid,
    pub gamma: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub dt_fixed: Option<f64>,
    pub output_every: f64,
    pub initial_data: InitialData,
    pub diagnostics: DiagnosticsSpec,
    pub seed: u64,
}

impl SimConfig {
    /// Config with the documented defaults: `cfl = 0.5`,
    /// `output_every = dt_max = t_end/100`.
    pub fn new(grid: Grid, gamma: f64, t_end: f64, initial_data: InitialData) -> Self {
        Self {
            grid,
            gamma,
            t_end,
            cfl: 0.5,
            dt_max: t_end / 100.0,
            dt_fixed: None,
            output_every: t_end / 100.0,
            initial_data,
            diagnostics: DiagnosticsSpec::default(),
            seed: 0,
        }
    }

    /// Critical exponent `γ_c = d/2 + 1`.
    pub fn gamma_critical(&self) -> f64 {
        self.grid.dim() as f64 / 2.0 + 1.0
    }

    /// Checks the numeric constraints, naming the offending field.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err("gamma must be ≥ 0".into());
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err("t_end must be > 0".into());
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err("cfl must lie in (0, 1]".into());
        }
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return Err("dt_max must be > 0".into());
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt.is_finite() && dt > 0.0) {
                return Err("dt_fixed must be > 0".into());
            }
        }
        if !(self.output_every.is_finite() && self.output_every > 0.0) {
            return Err("output_every must be > 0".into());
        }
        if let Some(p) = self.diagnostics.p_list.iter().find(|&&p| !(p >= 1.0)) {
            return Err(format!("diagnostics.p_list entries must be ≥ 1, got {p}"));
        }
        if self.diagnostics.alpha_list.iter().any(|a| !a.is_finite()) {
            return Err("diagnostics.alpha_list entries must be finite".into());
        }
        let d = self.grid.dim();
        match &self.initial_data {
            InitialData::Abc { .. } if d != 3 => {
                return Err("initial_data.recipe abc requires dim = 3".into());
            }
            InitialData::E1PlusPerturbation { eta, .. } if !(*eta >= 0.0) => {
                return Err("initial_data.eta must be ≥ 0".into());
            }
            InitialData::Coefficients { mean, modes } => {
                if !mean.is_empty() && mean.len() != d {
                    return Err(format!("initial_data.mean must have {d} entries"));
                }
                if modes.iter().any(|m| m.k.len() != d || m.value.len() != d) {
                    return Err(format!(
                        "initial_data.modes entries need k and value of length {d}"
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
