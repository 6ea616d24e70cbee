//! Numerical integration of the reduced 2-D flow and of the full 4-D flow
//! generated through the modified (Dirac) bracket, with conservation
//! monitors and cross-validation between the two.
//!
//! A single fixed-step classical RK4 integrator drives everything: the
//! orbits of these systems are exact circles with conserved radius, so RK4
//! at dt = 1e-3 is far inside every tolerance used downstream. The 4-D
//! vector field {x_i, H}* is precomputed symbolically once per flow and
//! evaluated numerically per step.

use serde::Serialize;
use thiserror::Error;

use crate::chart::Var;
use crate::constraint::ConstraintChainReport;
use crate::model::{ModelError, PhasePoint2D, ReducedSystem};
use crate::rational::{CompiledObservable, PhasePoint4, RationalObservable};

/// Full-space integration aborts when |q2| drops below this cutoff, keeping
/// the 1/q2 factors of the basic brackets bounded by 1e6. Configurable at
/// flow construction.
pub const DEFAULT_SINGULARITY_CUTOFF: f64 = 1e-6;

/// Residual bound an initial 4-D state must satisfy on every constraint.
pub const INITIAL_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("initial state violates constraint {label}: |{label}| = {residual:e}")]
    ConstraintViolated { label: String, residual: f64 },
    #[error("trajectory approached the excluded line q2 = 0 at t = {t}")]
    SingularityApproach { t: f64 },
    #[error("constraint matrix is singular; cannot build the bracket flow")]
    SingularBracket,
    #[error("vector field undefined at the requested state")]
    UndefinedField,
}

/// Fixed-step RK4 configuration. `t_max = 0` is allowed and produces a
/// single-sample trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    pub monitor_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_max: f64, monitor_stride: usize) -> Result<Self, DynamicsError> {
        let cfg = IntegratorConfig {
            dt,
            t_max,
            monitor_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(DynamicsError::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(DynamicsError::InvalidConfig(format!(
                "t_max must be nonnegative, got {}",
                self.t_max
            )));
        }
        if self.t_max > 0.0 && self.dt > self.t_max {
            return Err(DynamicsError::InvalidConfig(
                "dt must not exceed t_max".to_string(),
            ));
        }
        if self.monitor_stride == 0 {
            return Err(DynamicsError::InvalidConfig(
                "monitor_stride must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Recorded states of a trajectory, reduced or full.
#[derive(Debug, Clone, PartialEq)]
pub enum States {
    Reduced(Vec<[f64; 2]>),
    Full(Vec<PhasePoint4>),
}

impl States {
    pub fn len(&self) -> usize {
        match self {
            States::Reduced(v) => v.len(),
            States::Full(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The integration left the open domain; the record holds the last interior
/// samples and the time at which the step failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainExit {
    pub t: f64,
}

/// Time series with per-sample monitors. `energy` is always present;
/// `domain_margin` only for reduced runs, `constraint_residuals` only for
/// full-space runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: States,
    pub energy: Vec<f64>,
    pub domain_margin: Option<Vec<f64>>,
    pub constraint_residuals: Option<Vec<Vec<f64>>>,
    pub exit: Option<DomainExit>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV export: `t,q,p,H,margin` (reduced) or
    /// `t,q1,q2,p1,p2,H,phi1,phi2` (full). Floats use the shortest
    /// round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.states {
            States::Reduced(states) => {
                out.push_str("t,q,p,H,margin\n");
                let margins = self.domain_margin.as_deref().unwrap_or(&[]);
                for i in 0..self.times.len() {
                    let [q, p] = states[i];
                    let m = margins.get(i).copied().unwrap_or(f64::NAN);
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        self.times[i], q, p, self.energy[i], m
                    ));
                }
            }
            States::Full(states) => {
                out.push_str("t,q1,q2,p1,p2,H,phi1,phi2\n");
                let empty: Vec<Vec<f64>> = Vec::new();
                let residuals = self.constraint_residuals.as_ref().unwrap_or(&empty);
                for i in 0..self.times.len() {
                    let [q1, q2, p1, p2] = states[i];
                    let (r1, r2) = residuals
                        .get(i)
                        .map(|r| {
                            (
                                r.first().copied().unwrap_or(f64::NAN),
                                r.get(1).copied().unwrap_or(f64::NAN),
                            )
                        })
                        .unwrap_or((f64::NAN, f64::NAN));
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        self.times[i], q1, q2, p1, p2, self.energy[i], r1, r2
                    ));
                }
            }
        }
        out
    }
}

/// One classical RK4 step; `None` if any stage leaves the field's domain.
fn rk4_step<const N: usize>(
    field: &impl Fn(&[f64; N]) -> Option<[f64; N]>,
    y: &[f64; N],
    dt: f64,
) -> Option<[f64; N]> {
    let add = |a: &[f64; N], b: &[f64; N], s: f64| -> [f64; N] {
        std::array::from_fn(|i| a[i] + s * b[i])
    };
    let k1 = field(y)?;
    let k2 = field(&add(y, &k1, dt / 2.0))?;
    let k3 = field(&add(y, &k2, dt / 2.0))?;
    let k4 = field(&add(y, &k3, dt))?;
    Some(std::array::from_fn(|i| {
        y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

/// Step count and final partial step covering [0, t_max] exactly.
fn step_plan(cfg: &IntegratorConfig) -> (usize, f64) {
    if cfg.t_max == 0.0 {
        return (0, 0.0);
    }
    let n_full = (cfg.t_max / cfg.dt + 1e-9).floor() as usize;
    let remainder = cfg.t_max - n_full as f64 * cfg.dt;
    if remainder > 1e-12 * cfg.t_max.max(1.0) {
        (n_full + 1, remainder)
    } else {
        (n_full, 0.0)
    }
}

/// Integrate the reduced flow. Leaving the open domain is a recorded
/// outcome, not an error: the partial trajectory comes back with
/// [`TrajectoryRecord::exit`] set.
pub fn integrate_reduced(
    sys: &ReducedSystem,
    initial: PhasePoint2D,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord, DynamicsError> {
    cfg.validate()?;
    if !sys.contains(initial) {
        return Err(ModelError::OutsideDomain {
            q: initial.q,
            p: initial.p,
            margin: sys.domain_margin(initial),
        }
        .into());
    }

    let field = |y: &[f64; 2]| -> Option<[f64; 2]> {
        let state = PhasePoint2D::new(y[0], y[1]);
        let (dq, dp) = sys.reduced_vector_field(state).ok()?;
        Some([dq, dp])
    };

    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut energy = Vec::new();
    let mut margins = Vec::new();
    let mut exit = None;

    let mut y = [initial.q, initial.p];
    let mut t = 0.0;
    let record =
        |t: f64, y: &[f64; 2], times: &mut Vec<f64>, states: &mut Vec<[f64; 2]>, energy: &mut Vec<f64>, margins: &mut Vec<f64>| {
            let state = PhasePoint2D::new(y[0], y[1]);
            times.push(t);
            states.push(*y);
            energy.push(sys.reduced_h(state).unwrap_or(f64::NAN));
            margins.push(sys.domain_margin(state));
        };
    record(t, &y, &mut times, &mut states, &mut energy, &mut margins);

    let (n_steps, final_step) = step_plan(cfg);
    for step in 1..=n_steps {
        let dt = if step == n_steps && final_step > 0.0 {
            final_step
        } else {
            cfg.dt
        };
        let next = rk4_step(&field, &y, dt);
        let t_next = if step == n_steps { cfg.t_max } else { t + dt };
        match next {
            Some(y_next)
                if sys.contains(PhasePoint2D::new(y_next[0], y_next[1])) =>
            {
                y = y_next;
                t = t_next;
                if step % cfg.monitor_stride == 0 || step == n_steps {
                    record(t, &y, &mut times, &mut states, &mut energy, &mut margins);
                }
            }
            _ => {
                exit = Some(DomainExit { t: t_next });
                break;
            }
        }
    }

    Ok(TrajectoryRecord {
        times,
        states: States::Reduced(states),
        energy,
        domain_margin: Some(margins),
        constraint_residuals: None,
        exit,
    })
}

/// The full-space flow x' = {x, H}* with the bracket built from a finished
/// second-class constraint analysis. The four component fields are
/// precomputed exactly and compiled for numeric stepping.
pub struct FullSpaceFlow {
    components: [CompiledObservable; 4],
    hamiltonian: CompiledObservable,
    constraints: Vec<(String, CompiledObservable)>,
    singularity_cutoff: f64,
}

impl FullSpaceFlow {
    pub fn new(
        hamiltonian: &RationalObservable,
        report: &ConstraintChainReport,
        r: f64,
    ) -> Result<Self, DynamicsError> {
        Self::with_cutoff(hamiltonian, report, r, DEFAULT_SINGULARITY_CUTOFF)
    }

    pub fn with_cutoff(
        hamiltonian: &RationalObservable,
        report: &ConstraintChainReport,
        r: f64,
        singularity_cutoff: f64,
    ) -> Result<Self, DynamicsError> {
        let vars = [Var::Q1, Var::Q2, Var::P1, Var::P2];
        let mut components = Vec::with_capacity(4);
        for v in vars {
            let field = crate::constraint::dirac_bracket(
                &RationalObservable::var(v),
                hamiltonian,
                report,
            )
            .map_err(|_| DynamicsError::SingularBracket)?;
            components.push(field.compile(r));
        }
        let components: [CompiledObservable; 4] = components
            .try_into()
            .expect("exactly four chart variables");
        let constraints = report
            .constraints
            .iter()
            .map(|c| (c.label.clone(), c.expression.compile(r)))
            .collect();
        Ok(FullSpaceFlow {
            components,
            hamiltonian: hamiltonian.compile(r),
            constraints,
            singularity_cutoff,
        })
    }

    pub fn vector_field(&self, x: &PhasePoint4) -> Option<PhasePoint4> {
        if x[1].abs() < self.singularity_cutoff {
            return None;
        }
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = self.components[i].eval(x)?;
        }
        Some(out)
    }

    pub fn energy(&self, x: &PhasePoint4) -> f64 {
        self.hamiltonian.eval(x).unwrap_or(f64::NAN)
    }

    pub fn residuals(&self, x: &PhasePoint4) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|(_, c)| c.eval(x).map(f64::abs).unwrap_or(f64::NAN))
            .collect()
    }
}

/// Integrate the full-space bracket flow from an on-surface initial state.
pub fn integrate_full(
    flow: &FullSpaceFlow,
    initial: PhasePoint4,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord, DynamicsError> {
    cfg.validate()?;
    for (label, residual) in flow
        .constraints
        .iter()
        .map(|(l, c)| (l, c.eval(&initial).map(f64::abs).unwrap_or(f64::INFINITY)))
    {
        if residual >= INITIAL_RESIDUAL_TOL {
            return Err(DynamicsError::ConstraintViolated {
                label: label.clone(),
                residual,
            });
        }
    }
    if initial[1].abs() < flow.singularity_cutoff {
        return Err(DynamicsError::SingularityApproach { t: 0.0 });
    }

    let field = |y: &PhasePoint4| flow.vector_field(y);

    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut energy = Vec::new();
    let mut residuals = Vec::new();

    let mut y = initial;
    let mut t = 0.0;
    let record = |t: f64,
                  y: &PhasePoint4,
                  times: &mut Vec<f64>,
                  states: &mut Vec<PhasePoint4>,
                  energy: &mut Vec<f64>,
                  residuals: &mut Vec<Vec<f64>>| {
        times.push(t);
        states.push(*y);
        energy.push(flow.energy(y));
        residuals.push(flow.residuals(y));
    };
    record(t, &y, &mut times, &mut states, &mut energy, &mut residuals);

    let (n_steps, final_step) = step_plan(cfg);
    for step in 1..=n_steps {
        let dt = if step == n_steps && final_step > 0.0 {
            final_step
        } else {
            cfg.dt
        };
        let t_next = if step == n_steps { cfg.t_max } else { t + dt };
        let next = rk4_step(&field, &y, dt).ok_or(DynamicsError::SingularityApproach { t: t_next })?;
        if next[1].abs() < flow.singularity_cutoff {
            return Err(DynamicsError::SingularityApproach { t: t_next });
        }
        y = next;
        t = t_next;
        if step % cfg.monitor_stride == 0 || step == n_steps {
            record(t, &y, &mut times, &mut states, &mut energy, &mut residuals);
        }
    }

    Ok(TrajectoryRecord {
        times,
        states: States::Full(states),
        energy,
        domain_margin: None,
        constraint_residuals: Some(residuals),
        exit: None,
    })
}

/// Result of running the reduced and full-space integrations side by side.
#[derive(Debug, Clone)]
pub struct FlowComparison {
    pub reduced: TrajectoryRecord,
    pub full: TrajectoryRecord,
    /// Max pointwise distance between the (q1, p1) projections.
    pub max_divergence: f64,
    /// Max constraint residual seen along the full-space run.
    pub max_residual: f64,
}

/// Lift a reduced initial state to the surface, run both integrators with
/// the same configuration, and measure the projection distance.
pub fn compare_flows(
    sys: &ReducedSystem,
    flow: &FullSpaceFlow,
    initial: PhasePoint2D,
    cfg: &IntegratorConfig,
) -> Result<FlowComparison, DynamicsError> {
    let reduced = integrate_reduced(sys, initial, cfg)?;
    let lifted = sys.lift(initial)?;
    let full = integrate_full(flow, lifted, cfg)?;

    let n = reduced.len().min(full.len());
    let mut max_divergence: f64 = 0.0;
    if let (States::Reduced(r_states), States::Full(f_states)) = (&reduced.states, &full.states) {
        for i in 0..n {
            let dq = r_states[i][0] - f_states[i][0];
            let dp = r_states[i][1] - f_states[i][2];
            max_divergence = max_divergence.max(dq.hypot(dp));
        }
    }
    let max_residual = full
        .constraint_residuals
        .as_ref()
        .map(|rows| {
            rows.iter()
                .flat_map(|r| r.iter().copied())
                .fold(0.0_f64, f64::max)
        })
        .unwrap_or(f64::NAN);

    Ok(FlowComparison {
        reduced,
        full,
        max_divergence,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, reduce, BranchChoice, ModelId, ModelParams};

    fn reduced_a() -> (crate::model::SingularLagrangianModel, ReducedSystem) {
        let m = build_model(ModelParams::new(ModelId::A, 2.0).unwrap());
        let report = m.analyze(42).unwrap();
        let sys = reduce(&m, &report, BranchChoice::Plus).unwrap();
        (m, sys)
    }

    fn reduced_b() -> (crate::model::SingularLagrangianModel, ReducedSystem) {
        let m = build_model(ModelParams::new(ModelId::B, 2.0).unwrap());
        let report = m.analyze(42).unwrap();
        let sys = reduce(&m, &report, BranchChoice::Plus).unwrap();
        (m, sys)
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(1e-3, 1.0, 1).is_ok());
        assert!(IntegratorConfig::new(0.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(2.0, 1.0, 1).is_err());
        assert!(IntegratorConfig::new(1e-3, 1.0, 0).is_err());
        // Zero-horizon runs are allowed and produce one sample.
        assert!(IntegratorConfig::new(1e-3, 0.0, 1).is_ok());
    }

    #[test]
    fn full_period_returns_to_start() {
        let (_, sys) = reduced_a();
        let period = std::f64::consts::PI / 3.0_f64.sqrt();
        let cfg = IntegratorConfig::new(1e-3, period, 10).unwrap();
        let traj = integrate_reduced(&sys, PhasePoint2D::new(1.0, 0.0), &cfg).unwrap();
        assert!(traj.exit.is_none());
        let last = match &traj.states {
            States::Reduced(s) => *s.last().unwrap(),
            _ => unreachable!(),
        };
        assert!((last[0] - 1.0).abs() < 1e-6, "q error {}", last[0] - 1.0);
        assert!(last[1].abs() < 1e-6, "p error {}", last[1]);
        let t_last = *traj.times.last().unwrap();
        assert!((t_last - period).abs() < 1e-12);
    }

    #[test]
    fn model_b_period_return() {
        let (_, sys) = reduced_b();
        let period = 2.0 * std::f64::consts::PI / (2.0 * 5.0_f64.sqrt());
        let cfg = IntegratorConfig::new(1e-3, period, 10).unwrap();
        let traj = integrate_reduced(&sys, PhasePoint2D::new(3.0, 0.0), &cfg).unwrap();
        let last = match &traj.states {
            States::Reduced(s) => *s.last().unwrap(),
            _ => unreachable!(),
        };
        assert!((last[0] - 3.0).abs() < 1e-6);
        assert!(last[1].abs() < 1e-6);
    }

    #[test]
    fn fixed_point_stays_fixed() {
        let (_, sys) = reduced_a();
        let cfg = IntegratorConfig::new(1e-2, 1.0, 1).unwrap();
        let traj = integrate_reduced(&sys, PhasePoint2D::new(0.0, 0.0), &cfg).unwrap();
        if let States::Reduced(states) = &traj.states {
            for s in states {
                assert_eq!(*s, [0.0, 0.0]);
            }
        }
    }

    #[test]
    fn energy_and_radius_drift_are_tiny() {
        let (_, sys) = reduced_a();
        let period = std::f64::consts::PI / 3.0_f64.sqrt();
        let cfg = IntegratorConfig::new(1e-3, period, 1).unwrap();
        let traj = integrate_reduced(&sys, PhasePoint2D::new(1.0, 0.0), &cfg).unwrap();
        let h0 = traj.energy[0];
        let r0 = 1.0;
        if let States::Reduced(states) = &traj.states {
            for (i, s) in states.iter().enumerate() {
                let rr = s[0] * s[0] + s[1] * s[1];
                assert!((rr - r0).abs() < 1e-8, "radius drift {}", (rr - r0).abs());
                assert!(
                    (traj.energy[i] - h0).abs() < 1e-8 * h0.abs(),
                    "energy drift {}",
                    (traj.energy[i] - h0).abs()
                );
                assert!(rr < 4.0, "domain confinement violated");
            }
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let (_, sys) = reduced_a();
        let period = std::f64::consts::PI / 3.0_f64.sqrt();
        let initial = PhasePoint2D::new(1.0, 0.0);
        let exact = sys.analytic_solution(initial, period).unwrap();
        let mut errors = Vec::new();
        for dt in [4e-3, 2e-3, 1e-3] {
            let cfg = IntegratorConfig::new(dt, period, usize::MAX).unwrap();
            let traj = integrate_reduced(&sys, initial, &cfg).unwrap();
            let last = match &traj.states {
                States::Reduced(s) => *s.last().unwrap(),
                _ => unreachable!(),
            };
            let err = ((last[0] - exact.q).powi(2) + (last[1] - exact.p).powi(2)).sqrt();
            errors.push(err);
        }
        for w in errors.windows(2) {
            let factor = w[0] / w[1];
            assert!(
                (12.0..=20.0).contains(&factor),
                "convergence factor {factor} outside [12, 20] (errors {errors:?})"
            );
        }
    }

    #[test]
    fn rejects_outside_initial_state() {
        let (_, sys) = reduced_a();
        let cfg = IntegratorConfig::new(1e-3, 1.0, 1).unwrap();
        let err = integrate_reduced(&sys, PhasePoint2D::new(1.9, 0.9), &cfg);
        assert!(matches!(
            err,
            Err(DynamicsError::Model(ModelError::OutsideDomain { .. }))
        ));
    }

    #[test]
    fn oversized_steps_exit_the_domain_and_keep_partial_data() {
        // RK4 is unstable for step * frequency > ~2.8, so a huge step drives
        // the radius outward until the domain check trips.
        let (_, sys) = reduced_a();
        let cfg = IntegratorConfig::new(1.0, 50.0, 1).unwrap();
        let traj = integrate_reduced(&sys, PhasePoint2D::new(1.4, 0.0), &cfg).unwrap();
        let exit = traj.exit.expect("trajectory should leave the disc");
        assert!(exit.t > 0.0);
        assert!(!traj.is_empty());
        if let States::Reduced(states) = &traj.states {
            for s in states {
                assert!(s[0] * s[0] + s[1] * s[1] < 4.0);
            }
        }
    }

    #[test]
    fn full_flow_matches_reduced_projection() {
        let (m, sys) = reduced_a();
        let report = m.analyze(42).unwrap();
        let flow = FullSpaceFlow::new(&m.hamiltonian, &report, 2.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 5.0, 10).unwrap();
        let cmp = compare_flows(&sys, &flow, PhasePoint2D::new(1.0, 0.0), &cfg).unwrap();
        assert!(
            cmp.max_divergence < 1e-6,
            "divergence {}",
            cmp.max_divergence
        );
        assert!(cmp.max_residual < 1e-8, "residual {}", cmp.max_residual);
    }

    #[test]
    fn zero_horizon_comparison_is_exact() {
        let (m, sys) = reduced_a();
        let report = m.analyze(42).unwrap();
        let flow = FullSpaceFlow::new(&m.hamiltonian, &report, 2.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 0.0, 1).unwrap();
        let cmp = compare_flows(&sys, &flow, PhasePoint2D::new(1.0, 0.0), &cfg).unwrap();
        assert_eq!(cmp.max_divergence, 0.0);
        assert_eq!(cmp.reduced.len(), 1);
    }

    #[test]
    fn off_surface_initial_state_is_rejected() {
        let (m, _) = reduced_a();
        let report = m.analyze(42).unwrap();
        let flow = FullSpaceFlow::new(&m.hamiltonian, &report, 2.0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 1.0, 1).unwrap();
        // Violates the sphere constraint by 0.1.
        let bad = [1.0, (3.1_f64).sqrt(), 0.0, 0.0];
        assert!(matches!(
            integrate_full(&flow, bad, &cfg),
            Err(DynamicsError::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn csv_headers() {
        let (_, sys) = reduced_a();
        let cfg = IntegratorConfig::new(1e-2, 0.1, 1).unwrap();
        let traj = integrate_reduced(&sys, PhasePoint2D::new(1.0, 0.0), &cfg).unwrap();
        let csv = traj.to_csv();
        assert!(csv.starts_with("t,q,p,H,margin\n"));
        assert_eq!(csv.lines().count(), traj.len() + 1);
    }
}
