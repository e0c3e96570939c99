//! Flat `section.key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are an
//! error. Anything not set keeps its default.

use lumen::mhe::ClassCount;
use lumen::pipeline::MergeWeights;
use lumen::PipelineConfig;

use crate::error::{CliError, Result};

/// Effective run configuration: pipeline parameters plus metric knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    /// Step between CII windows.
    pub cii_stride: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pipeline: PipelineConfig::default(),
            cii_stride: 1,
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config {
            line,
            reason: format!("`{key}` expects a number, got `{v}`"),
        })
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| CliError::Config {
        line,
        reason: format!("`{key}` expects a non-negative integer, got `{v}`"),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut weights = [0.7, 0.2, 0.1];
        let mut entropy_mode = false;
        let (mut mhe_k, mut rho, mut kmax) = (
            None::<usize>,
            lumen::mhe::DEFAULT_RHO,
            lumen::mhe::DEFAULT_MAX_CLASSES,
        );

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| CliError::Config {
                line,
                reason: format!("expected `section.key = value`, got `{trimmed}`"),
            })?;
            let (key, v) = (key.trim(), value.trim());
            let p = &mut cfg.pipeline;
            let num = || parse_f64(line, key, v);
            match key {
                "hvs.alpha1" => p.hvs.alpha1 = num()?,
                "hvs.alpha2" => p.hvs.alpha2 = num()?,
                "hvs.alpha3" => p.hvs.alpha3 = num()?,
                "hvs.beta" => p.hvs.beta = num()?,
                "epce.a" => p.epce.gain = num()?,
                "epce.alpha" => p.epce.alpha = num()?,
                "epce.gamma" => p.epce.gamma = num()?,
                "epce.c" => p.epce.c = num()?,
                "epce.m" => p.epce.m = num()?,
                "edbi.k" => p.edbi.k = num()?,
                "edbi.c" => p.edbi.c = num()?,
                "edbi.t" => p.edbi.t = if v == "mean" { None } else { Some(num()?) },
                "clahe.clip" => p.clip_limit = num()?,
                "frost.n" => p.frost.size = parse_usize(line, key, v)?,
                "frost.damping" => p.frost.damping_scale = num()?,
                "merge.mode" => {
                    entropy_mode = match v {
                        "fixed" => false,
                        "entropy" => true,
                        _ => {
                            return Err(CliError::Config {
                                line,
                                reason: format!("`merge.mode` is `fixed` or `entropy`, got `{v}`"),
                            })
                        }
                    }
                }
                "merge.w1" => weights[0] = num()?,
                "merge.w2" => weights[1] = num()?,
                "merge.w3" => weights[2] = num()?,
                "merge.alpha" => p.merge.alpha = num()?,
                "merge.beta" => p.merge.beta = num()?,
                "alrs.level" => p.alrs.enhancement_level = num()?,
                "mhe.k" => {
                    mhe_k = if v == "auto" {
                        None
                    } else {
                        Some(parse_usize(line, key, v)?)
                    }
                }
                "mhe.rho" => rho = num()?,
                "mhe.kmax" => kmax = parse_usize(line, key, v)?,
                "metrics.cii_stride" => cfg.cii_stride = parse_usize(line, key, v)?,
                _ => {
                    return Err(CliError::Config {
                        line,
                        reason: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        cfg.pipeline.merge.weights = if entropy_mode {
            MergeWeights::Entropy
        } else {
            MergeWeights::Fixed(weights)
        };
        cfg.pipeline.mhe = match mhe_k {
            Some(k) => ClassCount::Fixed(k),
            None => ClassCount::Auto {
                rho,
                max_classes: kmax,
            },
        };
        cfg.pipeline.validate().map_err(|e| CliError::Config {
            line: 0,
            reason: e.to_string(),
        })?;
        if cfg.cii_stride == 0 {
            return Err(CliError::Config {
                line: 0,
                reason: "metrics.cii_stride must be at least 1".into(),
            });
        }
        Ok(cfg)
    }

    /// Renders every key in the parseable format.
    pub fn render(&self) -> String {
        let p = &self.pipeline;
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("hvs.alpha1", p.hvs.alpha1.to_string());
        put("hvs.alpha2", p.hvs.alpha2.to_string());
        put("hvs.alpha3", p.hvs.alpha3.to_string());
        put("hvs.beta", p.hvs.beta.to_string());
        put("epce.a", p.epce.gain.to_string());
        put("epce.alpha", p.epce.alpha.to_string());
        put("epce.gamma", p.epce.gamma.to_string());
        put("epce.c", p.epce.c.to_string());
        put("epce.m", p.epce.m.to_string());
        put("edbi.k", p.edbi.k.to_string());
        put("edbi.c", p.edbi.c.to_string());
        put("edbi.t", p.edbi.t.map_or("mean".into(), |t| t.to_string()));
        put("clahe.clip", p.clip_limit.to_string());
        put("frost.n", p.frost.size.to_string());
        put("frost.damping", p.frost.damping_scale.to_string());
        match p.merge.weights {
            MergeWeights::Fixed(w) => {
                put("merge.mode", "fixed".into());
                put("merge.w1", w[0].to_string());
                put("merge.w2", w[1].to_string());
                put("merge.w3", w[2].to_string());
            }
            MergeWeights::Entropy => put("merge.mode", "entropy".into()),
        }
        put("merge.alpha", p.merge.alpha.to_string());
        put("merge.beta", p.merge.beta.to_string());
        put("alrs.level", p.alrs.enhancement_level.to_string());
        match p.mhe {
            ClassCount::Fixed(k) => put("mhe.k", k.to_string()),
            ClassCount::Auto { rho, max_classes } => {
                put("mhe.k", "auto".into());
                put("mhe.rho", rho.to_string());
                put("mhe.kmax", max_classes.to_string());
            }
        }
        put("metrics.cii_stride", self.cii_stride.to_string());
        out
    }
}
