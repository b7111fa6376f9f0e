//! Running the walks: U on |π⟩, W F₁ on |π_z⟩, the s = 1 baseline, and the
//! amplification stage that turns |⟲⟩ into the marked vertex.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid_state::{uniform_state, uniform_state_z, GridDims, StateVector};
use crate::operators::{
    apply_gt_mut, apply_u_mut, apply_wf1_mut, build_f_vectors, InterpolationParams, MarkedConfig,
};
use crate::secular::CollapsedModel;

pub const MAX_STEPS: usize = 10_000_000;
pub const MAX_SAMPLES: usize = 10_000;
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;
/// The baseline has no β of its own; its auto sweep covers this many periods ⌊π/β⌋ of the main walk.
pub const BASELINE_SWEEP_PERIODS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepPolicy {
    /// ⌊π/β⌋ for the main walk, ⌊π/φ₁⌋ for the intermediate walk.
    Auto,
    Fixed(usize),
    /// Run this many steps and report the peak.
    Sweep(usize),
}

impl StepPolicy {
    pub fn label(&self) -> String {
        match self {
            StepPolicy::Auto => "auto".into(),
            StepPolicy::Fixed(k) => format!("fixed:{k}"),
            StepPolicy::Sweep(m) => format!("sweep:{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    Main,
    Intermediate,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub dims: GridDims,
    pub marked: (usize, usize),
    pub s: f64,
    pub policy: StepPolicy,
    /// With a stopping step K, keep going to 2K so the empirical peak of the first cycle is seen.
    pub scan: bool,
}

impl RunConfig {
    /// Mark at the origin, s = 1 − 1/(N+1), auto policy.
    pub fn new(dims: GridDims) -> Self {
        let s = InterpolationParams::default_for(dims).s();
        Self {
            dims,
            marked: (0, 0),
            s,
            policy: StepPolicy::Auto,
            scan: false,
        }
    }

    pub fn with_policy(mut self, policy: StepPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_scan(mut self, scan: bool) -> Self {
        self.scan = scan;
        self
    }

    pub fn with_marked(mut self, marked: (usize, usize)) -> Self {
        self.marked = marked;
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    /// The interpolation parameters, keeping 1 − s exact for the default weight.
    pub fn params(&self) -> Result<InterpolationParams> {
        let default = InterpolationParams::default_for(self.dims);
        if self.s == default.s() {
            Ok(default)
        } else {
            InterpolationParams::new(self.s)
        }
    }

    fn validate(&self) -> Result<()> {
        self.dims.check_vertex(self.marked)?;
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::Config(format!(
                "s must lie in (0, 1], got {}",
                self.s
            )));
        }
        if self.policy == StepPolicy::Auto {
            self.dims.require_square()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub p_selfloop: f64,
    pub p_marked: f64,
    pub norm_drift: f64,
}

#[derive(Debug, Clone)]
pub struct SearchTrajectory {
    pub walk: WalkKind,
    pub config: RunConfig,
    /// The stopping step: K for auto, k for fixed, the sweep length otherwise.
    pub stop_step: usize,
    /// Steps actually applied (2K with scan).
    pub steps_run: usize,
    /// Down-sampled record; always contains step 0, the stopping step and the last step.
    pub samples: Vec<Sample>,
    /// Largest p_selfloop (p_marked for the baseline) over every step run.
    pub peak_value: f64,
    pub peak_step: usize,
    pub final_p_selfloop: f64,
    pub final_p_marked: f64,
    pub max_norm_drift: f64,
    pub phi1: Option<f64>,
    pub beta: Option<f64>,
    /// State at the stopping step.
    pub final_state: StateVector,
}

fn floor_period(phase: f64) -> usize {
    (PI / phase).floor() as usize
}

/// ⌊π/β⌋ at the default weight, with φ₁ and β.
pub fn auto_steps(dims: GridDims, params: InterpolationParams) -> Result<(usize, f64, f64)> {
    dims.require_square()?;
    let model = CollapsedModel::new(dims, params)?;
    let beta = model.beta()?.alpha;
    Ok((floor_period(beta), model.phi1().alpha, beta))
}

struct Recorder {
    stride: usize,
    stop: usize,
    last: usize,
    track_marked: bool,
    samples: Vec<Sample>,
    peak: (f64, usize),
    max_drift: f64,
}

impl Recorder {
    fn new(stop: usize, last: usize, track_marked: bool) -> Self {
        Self {
            stride: (last / MAX_SAMPLES).max(1),
            stop,
            last,
            track_marked,
            samples: Vec::new(),
            peak: (f64::NEG_INFINITY, 0),
            max_drift: 0.0,
        }
    }

    fn observe(&mut self, step: usize, state: &StateVector, marked_idx: usize) -> Result<Sample> {
        let amps = state.amps();
        let sample = Sample {
            step,
            p_selfloop: state.selfloop_amp().norm_sqr(),
            p_marked: amps[marked_idx].norm_sqr(),
            norm_drift: (state.norm() - 1.0).abs(),
        };
        if sample.norm_drift > NORM_DRIFT_LIMIT {
            return Err(Error::Numeric(format!(
                "norm drift {:e} at step {step}",
                sample.norm_drift
            )));
        }
        self.max_drift = self.max_drift.max(sample.norm_drift);
        let p = if self.track_marked {
            sample.p_marked
        } else {
            sample.p_selfloop
        };
        if p > self.peak.0 {
            self.peak = (p, step);
        }
        if step.is_multiple_of(self.stride) || step == self.stop || step == self.last {
            self.samples.push(sample);
        }
        Ok(sample)
    }
}

fn run<F: FnMut(&mut StateVector)>(
    walk: WalkKind,
    config: RunConfig,
    stop_step: usize,
    initial: StateVector,
    marked_idx: usize,
    phases: (Option<f64>, Option<f64>),
    mut step: F,
) -> Result<SearchTrajectory> {
    let last = match config.policy {
        StepPolicy::Sweep(_) => stop_step,
        _ if config.scan => 2 * stop_step,
        _ => stop_step,
    };
    if last > MAX_STEPS {
        return Err(Error::Config(format!(
            "{last} steps exceeds the cap of {MAX_STEPS}"
        )));
    }
    let mut rec = Recorder::new(stop_step, last, walk == WalkKind::Baseline);
    let mut state = initial;
    let mut at_stop = rec.observe(0, &state, marked_idx)?;
    let mut final_state = state.clone();
    for t in 1..=last {
        step(&mut state);
        let sample = rec.observe(t, &state, marked_idx)?;
        if t == stop_step {
            at_stop = sample;
            final_state = state.clone();
        }
    }
    Ok(SearchTrajectory {
        walk,
        config,
        stop_step,
        steps_run: last,
        samples: rec.samples,
        peak_value: rec.peak.0,
        peak_step: rec.peak.1,
        final_p_selfloop: at_stop.p_selfloop,
        final_p_marked: at_stop.p_marked,
        max_norm_drift: rec.max_drift,
        phi1: phases.0,
        beta: phases.1,
        final_state,
    })
}

fn explicit_steps(policy: StepPolicy) -> Option<usize> {
    match policy {
        StepPolicy::Auto => None,
        StepPolicy::Fixed(k) | StepPolicy::Sweep(k) => Some(k),
    }
}

/// U applied to |π⟩; auto stops at ⌊π/β⌋.
pub fn run_main_walk(config: RunConfig) -> Result<SearchTrajectory> {
    config.validate()?;
    let params = config.params()?;
    let (stop, phases) = match explicit_steps(config.policy) {
        Some(k) => (k, (None, None)),
        None => {
            let (k, phi1, beta) = auto_steps(config.dims, params)?;
            (k, (Some(phi1), Some(beta)))
        }
    };
    let mc = MarkedConfig::new(config.dims, config.marked, params)?;
    let marked_idx = config.dims.index(config.marked.0, config.marked.1);
    run(
        WalkKind::Main,
        config,
        stop,
        uniform_state(config.dims),
        marked_idx,
        phases,
        |s| apply_u_mut(s, &mc),
    )
}

/// W F₁ applied to |π_z⟩; auto stops at ⌊π/φ₁⌋. Runs with the mark at the
/// origin, which only relabels vertices, so probabilities are frame independent.
pub fn run_intermediate_walk(config: RunConfig) -> Result<SearchTrajectory> {
    config.validate()?;
    let params = config.params()?;
    let (stop, phases) = match explicit_steps(config.policy) {
        Some(k) => (k, (None, None)),
        None => {
            config.dims.require_square()?;
            let phi1 = CollapsedModel::new(config.dims, params)?.phi1().alpha;
            (floor_period(phi1), (Some(phi1), None))
        }
    };
    let fvecs = build_f_vectors(config.dims, params);
    let origin = config.dims.index(0, 0);
    run(
        WalkKind::Intermediate,
        config,
        stop,
        uniform_state_z(config.dims),
        origin,
        phases,
        |s| apply_wf1_mut(s, &fvecs),
    )
}

/// U with s = 1 on |π⟩, tracking the marked vertex. Auto sweeps
/// BASELINE_SWEEP_PERIODS · ⌊π/β⌋ steps of the default-weight walk.
pub fn run_baseline(config: RunConfig) -> Result<SearchTrajectory> {
    if config.s != 1.0 {
        return Err(Error::Config(format!(
            "the baseline runs at s = 1, got {}",
            config.s
        )));
    }
    config.validate()?;
    let mut config = config;
    if config.policy == StepPolicy::Auto {
        let (k, _, _) = auto_steps(config.dims, InterpolationParams::default_for(config.dims))?;
        config.policy = StepPolicy::Sweep(BASELINE_SWEEP_PERIODS * k);
    }
    let stop = explicit_steps(config.policy).expect("resolved above");
    let mc = MarkedConfig::new(config.dims, config.marked, InterpolationParams::new(1.0)?)?;
    let marked_idx = config.dims.index(config.marked.0, config.marked.1);
    run(
        WalkKind::Baseline,
        config,
        stop,
        uniform_state(config.dims),
        marked_idx,
        (None, None),
        |s| apply_u_mut(s, &mc),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplification {
    pub p_marked: f64,
    /// Number of single reflections applied.
    pub steps: usize,
    /// Weight outside span{|marked⟩, |⟲⟩}.
    pub leakage: f64,
}

/// ⌊(π/2)/arcsin(√(1−s))⌋; for the default weight √(1−s) = 1/√(N+1).
pub fn amplification_steps(params: InterpolationParams) -> usize {
    (0.5 * PI / params.one_minus_s().sqrt().asin()).floor() as usize
}

/// Starting from |⟲⟩, alternates G̃ with the reflection about |⟲⟩, one
/// reflection per step, for amplification_steps(s) steps.
pub fn amplify_selfloop_to_marked(
    dims: GridDims,
    marked: (usize, usize),
    s: f64,
) -> Result<Amplification> {
    let params = if s == InterpolationParams::default_for(dims).s() {
        InterpolationParams::default_for(dims)
    } else {
        InterpolationParams::new(s)?
    };
    if params.one_minus_s() <= 0.0 {
        return Err(Error::Config("amplification needs s < 1".into()));
    }
    let mc = MarkedConfig::new(dims, marked, params)?;
    let steps = amplification_steps(params);
    let mut state = StateVector::selfloop(dims);
    let l = dims.selfloop();
    for t in 0..steps {
        if t % 2 == 0 {
            apply_gt_mut(&mut state, &mc);
        } else {
            state.amps_mut()[l] = -state.amps()[l];
        }
    }
    let m = dims.index(marked.0, marked.1);
    let p_marked = state.amps()[m].norm_sqr();
    let inside = p_marked + state.amps()[l].norm_sqr();
    Ok(Amplification {
        p_marked,
        steps,
        leakage: (state.norm_sqr() - inside).abs(),
    })
}

/// Closed form of the above in the plane {|marked⟩, |⟲⟩}: every pair of
/// reflections advances the state by 2θ₀ with sin θ₀ = √(1−s); a trailing
/// unpaired G̃ does not change the marked weight.
pub fn amplification_closed_form(params: InterpolationParams, steps: usize) -> f64 {
    let theta0 = params.one_minus_s().sqrt().asin();
    (2.0 * steps.div_ceil(2) as f64 * theta0).sin().powi(2)
}
