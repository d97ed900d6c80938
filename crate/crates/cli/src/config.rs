//! Run configuration: flag values, the flat key=value config file, and the
//! α expression tags that hit exceptional parameter lines exactly.

use anyhow::{anyhow, bail, Result};
use halfspace_resonances::BoundaryCondition;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// α given either as a literal or as an expression tag evaluated against
/// (bc, y₃): `critical-` → −1/(8πy₃), `critical+` → +1/(8πy₃),
/// `lnpi2k:<k>` → ln(π/2 + kπ)/(8πy₃).
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    Literal(f64),
    CriticalMinus,
    CriticalPlus,
    LnPi2K(i64),
}

impl AlphaSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "critical-" => Ok(AlphaSpec::CriticalMinus),
            "critical+" => Ok(AlphaSpec::CriticalPlus),
            _ => {
                if let Some(k) = s.strip_prefix("lnpi2k:") {
                    let k: i64 = k
                        .parse()
                        .map_err(|_| anyhow!("bad branch index in alpha tag: {s}"))?;
                    return Ok(AlphaSpec::LnPi2K(k));
                }
                let v: f64 = s.parse().map_err(|_| anyhow!("bad alpha value: {s}"))?;
                Ok(AlphaSpec::Literal(v))
            }
        }
    }

    pub fn resolve(&self, y3: f64) -> f64 {
        match *self {
            AlphaSpec::Literal(v) => v,
            AlphaSpec::CriticalMinus => -1.0 / (8.0 * PI * y3),
            AlphaSpec::CriticalPlus => 1.0 / (8.0 * PI * y3),
            AlphaSpec::LnPi2K(k) => (PI / 2.0 + k as f64 * PI).ln() / (8.0 * PI * y3),
        }
    }

    pub fn as_tag(&self) -> String {
        match self {
            AlphaSpec::Literal(v) => format!("{v}"),
            AlphaSpec::CriticalMinus => "critical-".into(),
            AlphaSpec::CriticalPlus => "critical+".into(),
            AlphaSpec::LnPi2K(k) => format!("lnpi2k:{k}"),
        }
    }
}

pub fn parse_bc(s: &str) -> Result<BoundaryCondition> {
    match s.to_ascii_lowercase().as_str() {
        "dirichlet" | "d" => Ok(BoundaryCondition::Dirichlet),
        "neumann" | "n" => Ok(BoundaryCondition::Neumann),
        other => bail!("unknown boundary condition: {other}"),
    }
}

/// Flat key=value file; '#' starts a comment, blank lines ignored.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("cannot read config {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {} is not key=value: {raw}", lineno + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// 17-significant-digit float formatting; fixed width aids diffing and makes
/// byte-identical reruns possible.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
