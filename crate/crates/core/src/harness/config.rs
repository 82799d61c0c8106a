//! Controller configuration files: flat `key = value` documents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::control::{StanleyConfig, StanleyGains, VelocityLimits};
use crate::ftg::FtgParams;

/// Keys of a Stanley controller file, in canonical order.
pub const STANLEY_KEYS: [&str; 15] = [
    "k_ang", "k_dist", "k_soft", "k_damp", "k_rate", "k_steer", "L_max", "kappa_norm", "v_min", "v_max", "a_x_max",
    "a_x_min", "a_y_max", "da_min", "da_max",
];

pub const FTG_KEYS: [&str; 6] = [
    "bubble_radius",
    "max_considered_range",
    "min_gap_width",
    "speed_straight",
    "speed_turn",
    "steer_gain",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Stanley,
    Ftg,
}

impl std::str::FromStr for ControllerKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stanley" => Ok(Self::Stanley),
            "ftg" => Ok(Self::Ftg),
            other => Err(HarnessError::ConfigParse(format!("unknown controller '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllerConfig {
    Stanley(StanleyConfig),
    Ftg(FtgParams),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StanleyFile {
    k_ang: f64,
    k_dist: f64,
    k_soft: f64,
    k_damp: f64,
    k_rate: f64,
    k_steer: f64,
    #[serde(rename = "L_max")]
    l_max: f64,
    kappa_norm: f64,
    v_min: f64,
    v_max: f64,
    a_x_max: f64,
    a_x_min: f64,
    a_y_max: f64,
    da_min: f64,
    da_max: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FtgFile {
    bubble_radius: f64,
    max_considered_range: f64,
    min_gap_width: usize,
    speed_straight: f64,
    speed_turn: f64,
    steer_gain: f64,
}

fn parse_err(e: toml::de::Error) -> HarnessError {
    HarnessError::ConfigParse(e.to_string().trim_end().to_string())
}

pub fn parse_stanley(text: &str) -> Result<StanleyConfig, HarnessError> {
    let f: StanleyFile = toml::from_str(text).map_err(parse_err)?;
    let cfg = StanleyConfig {
        gains: StanleyGains {
            k_ang: f.k_ang,
            k_dist: f.k_dist,
            k_soft: f.k_soft,
            k_damp: f.k_damp,
            k_rate: f.k_rate,
            k_steer: f.k_steer,
            l_max: f.l_max,
            kappa_norm: f.kappa_norm,
        },
        limits: VelocityLimits {
            v_min: f.v_min,
            v_max: f.v_max,
            a_x_max: f.a_x_max,
            a_x_min: f.a_x_min,
            a_y_max: f.a_y_max,
            da_min: f.da_min,
            da_max: f.da_max,
        },
    };
    cfg.validate().map_err(|e| HarnessError::ConfigParse(e.to_string()))?;
    Ok(cfg)
}

pub fn parse_ftg(text: &str) -> Result<FtgParams, HarnessError> {
    let f: FtgFile = toml::from_str(text).map_err(parse_err)?;
    let p = FtgParams {
        bubble_radius: f.bubble_radius,
        max_considered_range: f.max_considered_range,
        min_gap_width: f.min_gap_width,
        speed_straight: f.speed_straight,
        speed_turn: f.speed_turn,
        steer_gain: f.steer_gain,
    };
    p.validate().map_err(|e| HarnessError::ConfigParse(e.to_string()))?;
    Ok(p)
}

pub fn parse_config(kind: ControllerKind, text: &str) -> Result<ControllerConfig, HarnessError> {
    Ok(match kind {
        ControllerKind::Stanley => ControllerConfig::Stanley(parse_stanley(text)?),
        ControllerKind::Ftg => ControllerConfig::Ftg(parse_ftg(text)?),
    })
}

pub fn load_config(kind: ControllerKind, path: &Path) -> Result<ControllerConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(kind, &text)
}

impl ControllerConfig {
    pub fn kind(&self) -> ControllerKind {
        match self {
            Self::Stanley(_) => ControllerKind::Stanley,
            Self::Ftg(_) => ControllerKind::Ftg,
        }
    }

    /// Key/value pairs in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        match self {
            Self::Stanley(c) => {
                let (g, l) = (&c.gains, &c.limits);
                let v = [
                    g.k_ang, g.k_dist, g.k_soft, g.k_damp, g.k_rate, g.k_steer, g.l_max, g.kappa_norm, l.v_min, l.v_max,
                    l.a_x_max, l.a_x_min, l.a_y_max, l.da_min, l.da_max,
                ];
                STANLEY_KEYS.into_iter().zip(v).collect()
            }
            Self::Ftg(p) => {
                let v = [
                    p.bubble_radius,
                    p.max_considered_range,
                    p.min_gap_width as f64,
                    p.speed_straight,
                    p.speed_turn,
                    p.steer_gain,
                ];
                FTG_KEYS.into_iter().zip(v).collect()
            }
        }
    }

    pub fn get(&self, key: &str) -> Result<f64, HarnessError> {
        self.entries()
            .into_iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| HarnessError::UnknownKey(key.to_string()))
    }

    /// Replaces one value. The result is re-validated.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), HarnessError> {
        let mut text = String::new();
        let mut found = false;
        for (k, v) in self.entries() {
            let v = if k == key {
                found = true;
                value
            } else {
                v
            };
            text.push_str(&format_entry(self.kind(), k, v));
        }
        if !found {
            return Err(HarnessError::UnknownKey(key.to_string()));
        }
        *self = parse_config(self.kind(), &text)?;
        Ok(())
    }

    /// Serializes to the on-disk format.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format_entry(self.kind(), k, v))
            .collect()
    }
}

fn format_entry(kind: ControllerKind, key: &str, value: f64) -> String {
    if kind == ControllerKind::Ftg && key == "min_gap_width" {
        format!("{key} = {}\n", value.round() as i64)
    } else {
        format!("{key} = {value:?}\n")
    }
}
