//! Run configuration: flat `key = value` file, flag overrides, validation.
//!
//! Recognized keys: `lambda_p_m`, `n_p`, `L_m`, `w_p_m`, `w0_m` (physical
//! block) or `wbar_p`, `wbar_0` (normalized block); `pump_l0` or
//! `pump_coeffs` (comma-separated `m:re:im`); `l_max`, `p_max`, `tol`,
//! `format`, `out`; quadrature tuning `panels`, `points`, `angular`,
//! `refine_max`. Exactly one of the physical/normalized blocks may be
//! present (none selects the normalized defaults `wbar_p = wbar_0 = 1`).
//! Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use spdc_core::{
    NormalizedParams, PhysicalSetup, PumpSpec, QuadratureConfig, PARAXIAL_MARGIN_THRESHOLD,
};

use crate::error::{CliError, CliResult};
use crate::output::OutputFormat;

const KNOWN_KEYS: &[&str] = &[
    "lambda_p_m", "n_p", "L_m", "w_p_m", "w0_m", "wbar_p", "wbar_0", "pump_l0", "pump_coeffs",
    "l_max", "p_max", "tol", "format", "out", "panels", "points", "angular", "refine_max",
];

/// Key/value pairs from the config file with flag overrides applied.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn from_file(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key '{key}'",
                    path.display(),
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("key '{key}': {e}"))),
        }
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: NormalizedParams,
    /// Present when the parameters came from a physical block.
    pub physical: Option<PhysicalSetup>,
    pub pump: PumpSpec,
    pub l_max: u32,
    pub p_max: u32,
    pub quad: QuadratureConfig,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// The single pump winding required by the spectrum/amplitude engines.
    pub fn pump_winding(&self) -> CliResult<i32> {
        self.pump.single_winding().ok_or_else(|| {
            CliError::Usage(
                "this command requires a single-winding pump (use pump_l0, not pump_coeffs)"
                    .into(),
            )
        })
    }

    /// Parameter echo for artifact headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut meta = Vec::new();
        if let Some(s) = &self.physical {
            meta.push(("lambda_p_m".to_string(), format!("{}", s.pump_wavelength)));
            meta.push(("L_m".to_string(), format!("{}", s.crystal_length)));
            meta.push(("n_p".to_string(), format!("{}", s.refractive_index)));
            meta.push(("w_p_m".to_string(), format!("{}", s.pump_width)));
            meta.push(("w0_m".to_string(), format!("{}", s.analysis_width)));
        }
        meta.extend([
            ("wbar_p".to_string(), format!("{}", self.params.wbar_p)),
            ("wbar_0".to_string(), format!("{}", self.params.wbar_0)),
            ("a".to_string(), crate::output::fmt_num(self.params.a)),
            ("b".to_string(), crate::output::fmt_num(self.params.b)),
        ]);
        let pump = match self.pump.single_winding() {
            Some(l0) => format!("LG_0^{l0}"),
            None => {
                let parts: Vec<String> = self
                    .pump
                    .components()
                    .iter()
                    .map(|c| format!("{}:{}:{}", c.winding, c.coeff.re, c.coeff.im))
                    .collect();
                parts.join(",")
            }
        };
        meta.push(("pump".to_string(), pump));
        meta.push(("l_max".to_string(), self.l_max.to_string()));
        meta.push(("p_max".to_string(), self.p_max.to_string()));
        meta.push(("tol".to_string(), format!("{:e}", self.quad.rel_tolerance)));
        meta
    }
}

fn parse_pump_coeffs(raw: &str) -> CliResult<PumpSpec> {
    let mut components = Vec::new();
    for part in raw.split(',') {
        let fields: Vec<&str> = part.trim().split(':').collect();
        if fields.len() != 3 {
            return Err(CliError::Usage(format!(
                "pump_coeffs entry '{part}' is not m:re:im"
            )));
        }
        let m: i32 = fields[0]
            .parse()
            .map_err(|e| CliError::Usage(format!("pump winding '{}': {e}", fields[0])))?;
        let re: f64 = fields[1]
            .parse()
            .map_err(|e| CliError::Usage(format!("pump coefficient '{}': {e}", fields[1])))?;
        let im: f64 = fields[2]
            .parse()
            .map_err(|e| CliError::Usage(format!("pump coefficient '{}': {e}", fields[2])))?;
        components.push((m, Complex64::new(re, im)));
    }
    PumpSpec::superposition(components).map_err(CliError::from)
}

pub fn build(raw: &RawConfig) -> CliResult<RunConfig> {
    let physical_keys: Vec<&str> = ["lambda_p_m", "L_m", "w_p_m", "w0_m"]
        .into_iter()
        .filter(|k| raw.get(k).is_some())
        .collect();
    let normalized_keys: Vec<&str> = ["wbar_p", "wbar_0"]
        .into_iter()
        .filter(|k| raw.get(k).is_some())
        .collect();
    if !physical_keys.is_empty() && !normalized_keys.is_empty() {
        return Err(CliError::Usage(
            "give either the physical block (lambda_p_m, L_m, w_p_m, w0_m) or the normalized block (wbar_p, wbar_0), not both".into(),
        ));
    }

    let pump = match (raw.get("pump_l0"), raw.get("pump_coeffs")) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "pump_l0 and pump_coeffs are mutually exclusive".into(),
            ))
        }
        (Some(l0), None) => PumpSpec::single(
            l0.parse()
                .map_err(|e| CliError::Usage(format!("pump_l0 '{l0}': {e}")))?,
        ),
        (None, Some(coeffs)) => parse_pump_coeffs(coeffs)?,
        (None, None) => PumpSpec::gaussian(),
    };

    let n_p: f64 = raw.parse("n_p")?.unwrap_or(1.0);

    let (params, physical) = if !physical_keys.is_empty() {
        if physical_keys.len() != 4 {
            return Err(CliError::Usage(format!(
                "incomplete physical block: have {physical_keys:?}, need lambda_p_m, L_m, w_p_m, w0_m"
            )));
        }
        let setup = PhysicalSetup::new(
            raw.parse("L_m")?.unwrap(),
            raw.parse("lambda_p_m")?.unwrap(),
            n_p,
            pump.clone(),
            raw.parse("w_p_m")?.unwrap(),
            raw.parse("w0_m")?.unwrap(),
        )?;
        if !setup.paraxial_ok() {
            eprintln!(
                "warning: thin-crystal margin pi n_p wbar_p = {:.3} is below {PARAXIAL_MARGIN_THRESHOLD}; \
                 the collinear treatment assumes it is large",
                setup.phase_match_margin()
            );
        }
        (NormalizedParams::from_physical(&setup), Some(setup))
    } else {
        let wbar_p: f64 = raw.parse("wbar_p")?.unwrap_or(1.0);
        let wbar_0: f64 = raw.parse("wbar_0")?.unwrap_or(1.0);
        (
            NormalizedParams::from_widths_with_index(wbar_p, wbar_0, n_p)?,
            None,
        )
    };

    let mut quad = QuadratureConfig::default();
    if let Some(tol) = raw.parse::<f64>("tol")? {
        quad.rel_tolerance = tol;
    }
    if let Some(panels) = raw.parse::<usize>("panels")? {
        quad.radial_panels = panels;
    }
    if let Some(points) = raw.parse::<usize>("points")? {
        quad.radial_points = points;
    }
    if let Some(angular) = raw.parse::<usize>("angular")? {
        quad.angular_points = angular;
    }
    if let Some(rmax) = raw.parse::<usize>("refine_max")? {
        quad.refinement_max = rmax;
    }
    quad.validate()?;

    let format: OutputFormat = raw
        .parse::<String>("format")?
        .map(|s| s.parse())
        .transpose()
        .map_err(CliError::Usage)?
        .unwrap_or_default();

    Ok(RunConfig {
        params,
        physical,
        pump,
        l_max: raw.parse("l_max")?.unwrap_or(10),
        p_max: raw.parse("p_max")?.unwrap_or(10),
        quad,
        format,
        out: raw.get("out").map(PathBuf::from),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_normalized_unit_widths() {
        let cfg = build(&RawConfig::default()).unwrap();
        assert_eq!(cfg.params.wbar_p, 1.0);
        assert_eq!(cfg.params.wbar_0, 1.0);
        assert_eq!(cfg.pump.single_winding(), Some(0));
        assert!(cfg.physical.is_none());
    }

    #[test]
    fn mixed_blocks_are_rejected() {
        let mut raw = RawConfig::default();
        raw.set("wbar_p", 2.0);
        raw.set("L_m", 1e-3);
        assert!(matches!(build(&raw), Err(CliError::Usage(_))));
    }

    #[test]
    fn pump_coeffs_parse() {
        let mut raw = RawConfig::default();
        raw.set("pump_coeffs", "0:1:0, 2:0:1");
        let cfg = build(&raw).unwrap();
        assert_eq!(cfg.pump.components().len(), 2);
        assert!(cfg.pump_winding().is_err());
    }

    #[test]
    fn physical_block_converts() {
        let mut raw = RawConfig::default();
        raw.set("lambda_p_m", 0.4e-6);
        raw.set("L_m", 1e-3);
        raw.set("w_p_m", 20e-6);
        raw.set("w0_m", 20e-6);
        let cfg = build(&raw).unwrap();
        assert!((cfg.params.wbar_p - 1.0).abs() < 1e-12);
        assert!(cfg.physical.is_some());
    }

    #[test]
    fn bad_tolerance_is_a_usage_error() {
        let mut raw = RawConfig::default();
        raw.set("tol", 0.5);
        assert!(build(&raw).is_err());
    }
}
