//! Post-processing of simulation results: rates, frame times, energy,
//! saturation and improvement tables.

use thiserror::Error;

use crate::model::Platform;
use crate::scalar::Scalar;
use crate::schedulers::SchedulerKind;
use crate::sim::SimResult;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no completed frames")]
    NoCompletedFrames,
    #[error("sweeps do not share a target-rate grid (index {index}: {a} vs {b})")]
    GridMismatch { index: usize, a: f64, b: f64 },
    #[error("sweep needs at least 2 points, got {0}")]
    TooFewPoints(usize),
}

/// One cell of a frame-rate sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint<S> {
    pub scheduler: SchedulerKind,
    pub target_rate: S,
    pub achieved_rate: S,
    pub avg_frame_exec_time: S,
    pub energy_dynamic: S,
    pub energy_static: S,
    pub energy_total: S,
    pub completed_frames: usize,
}

/// Frames completed within the configured horizon, per time unit.
/// A zero-length horizon has an achieved rate of zero by convention.
pub fn achieved_rate<S: Scalar>(result: &SimResult<S>) -> S {
    if result.duration <= S::zero() {
        return S::zero();
    }
    let done = result
        .frames
        .iter()
        .filter(|f| f.completed.map(|c| c <= result.duration).unwrap_or(false))
        .count();
    S::from_config(done as f64) / result.duration
}

/// Mean of (completion - injection) over completed frames, including frames
/// that drained past the horizon.
pub fn avg_frame_exec<S: Scalar>(result: &SimResult<S>) -> Result<S, MetricsError> {
    let mut sum = S::zero();
    let mut n = 0usize;
    for f in &result.frames {
        if let Some(c) = f.completed {
            sum += c - f.injected;
            n += 1;
        }
    }
    if n == 0 {
        return Err(MetricsError::NoCompletedFrames);
    }
    Ok(sum / S::from_config(n as f64))
}

/// Dynamic energy (executed intervals times power) plus static energy
/// (idle power accumulated over the configured horizon).
pub fn total_energy<S: Scalar>(result: &SimResult<S>, platform: &Platform<S>) -> (S, S, S) {
    let dynamic: S = result
        .pe_busy
        .iter()
        .flatten()
        .map(|b| (b.end - b.start) * b.power)
        .sum();
    let static_: S = platform
        .pes
        .iter()
        .map(|pe| pe.idle_power * result.duration)
        .sum();
    (dynamic, static_, dynamic + static_)
}

impl<S: Scalar> SweepPoint<S> {
    /// Summarize one run. A run that completed no frames yields a zero
    /// average frame time (its achieved rate is zero as well).
    pub fn from_result(result: &SimResult<S>, platform: &Platform<S>, target_rate: S) -> Self {
        let (energy_dynamic, energy_static, energy_total) = total_energy(result, platform);
        let completed_frames = result
            .frames
            .iter()
            .filter(|f| f.completed.is_some())
            .count();
        Self {
            scheduler: result.scheduler,
            target_rate,
            achieved_rate: achieved_rate(result),
            avg_frame_exec_time: avg_frame_exec(result).unwrap_or_else(|_| S::zero()),
            energy_dynamic,
            energy_static,
            energy_total,
            completed_frames,
        }
    }
}

/// Saturation summary of one sweep.
#[derive(Debug, Clone, Copy)]
pub struct Saturation<S> {
    /// Largest achieved rate among points that kept up with their target.
    pub rate: S,
    /// Set when no point kept up; `rate` is then the maximum achieved rate.
    pub saturated_everywhere: bool,
}

/// Find where a sweep stops keeping up: the largest achieved rate among
/// points with `achieved >= (1 - tol) * target`.
pub fn saturation_point<S: Scalar>(
    sweep: &[SweepPoint<S>],
    tol: f64,
) -> Result<Saturation<S>, MetricsError> {
    if sweep.len() < 2 {
        return Err(MetricsError::TooFewPoints(sweep.len()));
    }
    let keep_up: Vec<&SweepPoint<S>> = sweep
        .iter()
        .filter(|p| p.achieved_rate >= p.target_rate * S::from_config(1.0 - tol))
        .collect();
    if keep_up.is_empty() {
        let rate = sweep
            .iter()
            .map(|p| p.achieved_rate)
            .fold(S::neg_infinity(), |a, b| if b > a { b } else { a });
        return Ok(Saturation {
            rate,
            saturated_everywhere: true,
        });
    }
    let rate = keep_up
        .iter()
        .map(|p| p.achieved_rate)
        .fold(S::neg_infinity(), |a, b| if b > a { b } else { a });
    Ok(Saturation {
        rate,
        saturated_everywhere: false,
    })
}

/// Default keep-up tolerance for [`saturation_point`].
pub const SATURATION_TOL: f64 = 0.05;

/// Average and maximum percentage improvement of `other` over `base`:
/// `100 * (base - other) / base`, element-wise over a shared target grid.
pub fn improvement<S: Scalar>(
    base: &[SweepPoint<S>],
    other: &[SweepPoint<S>],
    metric: impl Fn(&SweepPoint<S>) -> S,
) -> Result<(f64, f64), MetricsError> {
    if base.len() != other.len() {
        return Err(MetricsError::GridMismatch {
            index: base.len().min(other.len()),
            a: f64::NAN,
            b: f64::NAN,
        });
    }
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    for (i, (b, o)) in base.iter().zip(other).enumerate() {
        let (tb, to) = (b.target_rate.to_config(), o.target_rate.to_config());
        if (tb - to).abs() > 1e-12 {
            return Err(MetricsError::GridMismatch {
                index: i,
                a: tb,
                b: to,
            });
        }
        let pct = 100.0 * (metric(b) - metric(o)).to_config() / metric(b).to_config();
        sum += pct;
        max = max.max(pct);
    }
    Ok((sum / base.len() as f64, max))
}

/// Header of the sweep/metrics CSV emitted by the command-line tools.
pub const CSV_HEADER: &str =
    "scheduler,target_rate,achieved_rate,avg_exec,energy_dynamic,energy_static,energy_total";

pub fn csv_row<S: Scalar>(p: &SweepPoint<S>) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        p.scheduler,
        p.target_rate.to_config(),
        p.achieved_rate.to_config(),
        p.avg_frame_exec_time.to_config(),
        p.energy_dynamic.to_config(),
        p.energy_static.to_config(),
        p.energy_total.to_config()
    )
}
