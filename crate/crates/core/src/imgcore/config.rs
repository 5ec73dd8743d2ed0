//! Pipeline parameters and the plain-text `key = value` config format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Every tunable of the pipeline.
///
/// `Default` carries the reference operating point for the cost, contour and
/// densification coefficients; the remaining values are the crate's own choices.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub lambda_ad: f64,
    pub lambda_census: f64,
    pub gamma_l: f64,
    pub epsilon: f64,
    pub t_high: f64,
    pub t_low: f64,
    pub t_depth: f64,
    pub lambda_d: f64,
    pub lambda_s: f64,
    pub lambda_s2: f64,
    /// Disparity search range in quarter-scale pixels, inclusive.
    pub d_min: i32,
    pub d_max: i32,
    /// Focal length in full-resolution pixels.
    pub focal_px: f64,
    pub baseline_m: f64,
    /// Census window `(width, height)`, both odd.
    pub census_window: (usize, usize),
    pub cross_color_tau: f64,
    pub cross_color_tau2: f64,
    pub cross_arm_l1: usize,
    pub cross_arm_l2: usize,
    pub box_radius: usize,
    pub gauss_sigma: f64,
    pub confidence_offset_k: f64,
    pub hist_iterations: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub flow_patch_size: usize,
    pub flow_patch_stride: usize,
    pub flow_iterations: usize,
    pub flow_min_level_dim: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lambda_ad: 10.0,
            lambda_census: 40.0,
            gamma_l: 1.0,
            epsilon: 0.8,
            t_high: 0.06,
            t_low: 0.03,
            t_depth: 0.03,
            lambda_d: 0.8,
            lambda_s: 1.2,
            lambda_s2: 0.02,
            d_min: 0,
            d_max: 48,
            focal_px: 400.0,
            baseline_m: 0.12,
            census_window: (9, 7),
            cross_color_tau: 20.0 / 255.0,
            cross_color_tau2: 6.0 / 255.0,
            cross_arm_l1: 17,
            cross_arm_l2: 8,
            box_radius: 5,
            gauss_sigma: 1.4,
            confidence_offset_k: 2.0,
            hist_iterations: 2,
            solver_tol: 1e-5,
            solver_max_iter: 400,
            flow_patch_size: 8,
            flow_patch_stride: 4,
            flow_iterations: 12,
            flow_min_level_dim: 16,
        }
    }
}

impl PipelineConfig {
    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.d_min >= self.d_max {
            return err(format!("d_min {} must be < d_max {}", self.d_min, self.d_max));
        }
        if !(0.0 <= self.t_low && self.t_low < self.t_high && self.t_high <= 1.0) {
            return err(format!(
                "thresholds need 0 <= t_low < t_high <= 1, got {} / {}",
                self.t_low, self.t_high
            ));
        }
        if !(0.0..=1.0).contains(&self.t_depth) {
            return err(format!("t_depth {} outside [0,1]", self.t_depth));
        }
        for (name, v) in [
            ("lambda_ad", self.lambda_ad),
            ("lambda_census", self.lambda_census),
            ("lambda_d", self.lambda_d),
            ("lambda_s", self.lambda_s),
            ("lambda_s2", self.lambda_s2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return err(format!("{name} must be positive, got {v}"));
            }
        }
        let (w, h) = self.census_window;
        if w % 2 == 0 || h % 2 == 0 {
            return err(format!("census window {w}x{h} must have odd dimensions"));
        }
        if w * h - 1 > 64 {
            return err(format!("census window {w}x{h} exceeds 64 comparison bits"));
        }
        if self.cross_arm_l2 > self.cross_arm_l1 {
            return err("cross_arm_l2 must not exceed cross_arm_l1".into());
        }
        if !(self.focal_px > 0.0 && self.baseline_m > 0.0) {
            return err("focal_px and baseline_m must be positive".into());
        }
        if self.box_radius == 0 {
            return err("box_radius must be >= 1".into());
        }
        if !(self.gauss_sigma > 0.0) || !(self.gamma_l > 0.0) || !(self.epsilon > 0.0) {
            return err("gauss_sigma, gamma_l and epsilon must be positive".into());
        }
        if self.flow_patch_size < 2 || self.flow_patch_stride == 0 {
            return err("flow patch size must be >= 2 and stride >= 1".into());
        }
        if self.flow_min_level_dim < self.flow_patch_size {
            return err("flow_min_level_dim must be at least flow_patch_size".into());
        }
        if !(self.solver_tol > 0.0) || self.solver_max_iter == 0 {
            return err("solver_tol and solver_max_iter must be positive".into());
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unlisted keys keep defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
        }
        match key {
            "lambda_ad" => self.lambda_ad = num(key, value)?,
            "lambda_census" => self.lambda_census = num(key, value)?,
            "gamma_l" => self.gamma_l = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "t_high" => self.t_high = num(key, value)?,
            "t_low" => self.t_low = num(key, value)?,
            "t_depth" => self.t_depth = num(key, value)?,
            "lambda_d" => self.lambda_d = num(key, value)?,
            "lambda_s" => self.lambda_s = num(key, value)?,
            "lambda_s2" => self.lambda_s2 = num(key, value)?,
            "d_min" => self.d_min = num(key, value)?,
            "d_max" => self.d_max = num(key, value)?,
            "focal_px" => self.focal_px = num(key, value)?,
            "baseline_m" => self.baseline_m = num(key, value)?,
            "census_window" => {
                let (w, h) = value
                    .split_once(['x', 'X', ','])
                    .ok_or_else(|| format!("census_window must look like 9x7, got {value:?}"))?;
                self.census_window = (num(key, w.trim())?, num(key, h.trim())?);
            }
            "cross_color_tau" => self.cross_color_tau = num(key, value)?,
            "cross_color_tau2" => self.cross_color_tau2 = num(key, value)?,
            "cross_arm_l1" => self.cross_arm_l1 = num(key, value)?,
            "cross_arm_l2" => self.cross_arm_l2 = num(key, value)?,
            "box_radius" => self.box_radius = num(key, value)?,
            "gauss_sigma" => self.gauss_sigma = num(key, value)?,
            "confidence_offset_k" => self.confidence_offset_k = num(key, value)?,
            "hist_iterations" => self.hist_iterations = num(key, value)?,
            "solver_tol" => self.solver_tol = num(key, value)?,
            "solver_max_iter" => self.solver_max_iter = num(key, value)?,
            "flow_patch_size" => self.flow_patch_size = num(key, value)?,
            "flow_patch_stride" => self.flow_patch_stride = num(key, value)?,
            "flow_iterations" => self.flow_iterations = num(key, value)?,
            "flow_min_level_dim" => self.flow_min_level_dim = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Renders every key in the format accepted by [`PipelineConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("lambda_ad", self.lambda_ad.to_string());
        kv("lambda_census", self.lambda_census.to_string());
        kv("gamma_l", self.gamma_l.to_string());
        kv("epsilon", self.epsilon.to_string());
        kv("t_high", self.t_high.to_string());
        kv("t_low", self.t_low.to_string());
        kv("t_depth", self.t_depth.to_string());
        kv("lambda_d", self.lambda_d.to_string());
        kv("lambda_s", self.lambda_s.to_string());
        kv("lambda_s2", self.lambda_s2.to_string());
        kv("d_min", self.d_min.to_string());
        kv("d_max", self.d_max.to_string());
        kv("focal_px", self.focal_px.to_string());
        kv("baseline_m", self.baseline_m.to_string());
        kv("census_window", format!("{}x{}", self.census_window.0, self.census_window.1));
        kv("cross_color_tau", self.cross_color_tau.to_string());
        kv("cross_color_tau2", self.cross_color_tau2.to_string());
        kv("cross_arm_l1", self.cross_arm_l1.to_string());
        kv("cross_arm_l2", self.cross_arm_l2.to_string());
        kv("box_radius", self.box_radius.to_string());
        kv("gauss_sigma", self.gauss_sigma.to_string());
        kv("confidence_offset_k", self.confidence_offset_k.to_string());
        kv("hist_iterations", self.hist_iterations.to_string());
        kv("solver_tol", self.solver_tol.to_string());
        kv("solver_max_iter", self.solver_max_iter.to_string());
        kv("flow_patch_size", self.flow_patch_size.to_string());
        kv("flow_patch_stride", self.flow_patch_stride.to_string());
        kv("flow_iterations", self.flow_iterations.to_string());
        kv("flow_min_level_dim", self.flow_min_level_dim.to_string());
        s
    }
}
