//! Repeated in-memory pipeline runs reported per stage.

use std::fmt;

use dco_core::occlude::TriangleMesh;
use dco_core::{Error, PipelineConfig, Result};

use crate::pipeline::{LoadedFrame, Pipeline};
use crate::timings::{Stage, StageTimings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn of(samples: &[f64]) -> Self {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { mean, min, max }
    }
}

/// Per-stage statistics over repetitions of the mean per-frame time (ms).
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub repetitions: usize,
    pub frames_per_run: usize,
    pub width: usize,
    pub height: usize,
    pub stages: Vec<(Stage, Summary)>,
    pub frame_total: Summary,
}

impl BenchReport {
    pub fn stage(&self, s: Stage) -> Summary {
        self.stages.iter().find(|(k, _)| *k == s).map(|(_, v)| *v).expect("every stage is reported")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("stage,mean_ms,min_ms,max_ms\n");
        for (st, v) in &self.stages {
            s.push_str(&format!("{},{:.3},{:.3},{:.3}\n", st.key(), v.mean, v.min, v.max));
        }
        let t = self.frame_total;
        s.push_str(&format!("total,{:.3},{:.3},{:.3}\n", t.mean, t.min, t.max));
        s
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}x{}, {} composited frame(s) per run, {} repetition(s)",
            self.width, self.height, self.frames_per_run, self.repetitions
        )?;
        writeln!(f, "{:<36}{:>12}{:>12}{:>12}", "Stage (ms)", "mean", "min", "max")?;
        for (st, v) in &self.stages {
            writeln!(f, "{:<36}{:>12.3}{:>12.3}{:>12.3}", st.label(), v.mean, v.min, v.max)?;
        }
        let t = self.frame_total;
        write!(f, "{:<36}{:>12.3}{:>12.3}{:>12.3}", "Frame total", t.mean, t.min, t.max)
    }
}

fn run_once(cfg: &PipelineConfig, frames: &[LoadedFrame], mesh: Option<&TriangleMesh>) -> Result<Vec<StageTimings>> {
    let mut pipe = Pipeline::new(cfg.clone(), mesh.cloned())?;
    let mut out = Vec::new();
    for f in frames {
        if let Some(o) = pipe.push(f.clone())? {
            if o.is_composited() {
                out.push(o.timings);
            }
        }
    }
    Ok(out)
}

/// One untimed warm-up run, then `repetitions` timed runs.
pub fn bench(
    cfg: &PipelineConfig,
    frames: &[LoadedFrame],
    mesh: Option<&TriangleMesh>,
    repetitions: usize,
) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(Error::Input("repetitions must be at least 1".into()));
    }
    if frames.len() < 3 {
        return Err(Error::Input(format!("sequence has {} frames; at least 3 are required", frames.len())));
    }
    run_once(cfg, frames, mesh)?;
    let mut per_stage: Vec<Vec<f64>> = vec![Vec::new(); Stage::ALL.len()];
    let mut totals = Vec::new();
    let mut frames_per_run = 0;
    for _ in 0..repetitions {
        let runs = run_once(cfg, frames, mesh)?;
        frames_per_run = runs.len();
        let n = runs.len() as f64;
        for (k, st) in Stage::ALL.iter().enumerate() {
            per_stage[k].push(runs.iter().map(|t| t.get(*st)).sum::<f64>() / n);
        }
        totals.push(runs.iter().map(|t| t.total()).sum::<f64>() / n);
    }
    let (width, height) = frames[0].left.dims();
    Ok(BenchReport {
        repetitions,
        frames_per_run,
        width,
        height,
        stages: Stage::ALL.iter().zip(&per_stage).map(|(s, v)| (*s, Summary::of(v))).collect(),
        frame_total: Summary::of(&totals),
    })
}
