//! Time stepping: IMEX schemes for the PDE and classical RK4 for the
//! spatially homogeneous ODE used as an oracle.

use std::fmt;
use std::str::FromStr;

use crate::diagnostics::{record_diagnostics, TimeSeriesRecord};
use crate::dynamics::{node_rhs, PairState};
use crate::error::{Error, Result};
use crate::grid::{helmholtz_solve, laplacian_apply, Grid, ScalarField};
use crate::model::{
    compute_absorbing_constants, validate_parameters, DerivedConstants, Parameters,
};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_CHECK_INTERVAL: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Forward Euler reaction followed by a backward Euler diffusion solve. First order.
    ImexEuler,
    /// Half reaction step (RK4), Crank-Nicolson diffusion, half reaction step. Second order.
    ImexStrang,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImexEuler => "imex-euler",
            Scheme::ImexStrang => "imex-strang",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex-euler" => Ok(Scheme::ImexEuler),
            "imex-strang" => Ok(Scheme::ImexStrang),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme '{other}' (expected 'imex-euler' or 'imex-strang')"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Finiteness of the state is checked every this many steps.
    pub check_interval: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: DEFAULT_DT,
            scheme: Scheme::ImexStrang,
            check_interval: DEFAULT_CHECK_INTERVAL,
        }
    }
}

impl StepperConfig {
    pub fn new(dt: f64, scheme: Scheme) -> Self {
        StepperConfig {
            dt,
            scheme,
            ..Default::default()
        }
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.check_interval == 0 {
            return Err(Error::InvalidParameter(
                "check interval must be at least 1".into(),
            ));
        }
        Ok(self)
    }
}

/// Spatially homogeneous state of both neurons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdePoint {
    pub u1: f64,
    pub v1: f64,
    pub w1: f64,
    pub u2: f64,
    pub v2: f64,
    pub w2: f64,
}

impl OdePoint {
    pub fn from_array([u1, v1, w1, u2, v2, w2]: [f64; 6]) -> Self {
        OdePoint {
            u1,
            v1,
            w1,
            u2,
            v2,
            w2,
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.u1, self.v1, self.w1, self.u2, self.v2, self.w2]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

fn rk4_array(params: &Parameters, y: [f64; 6], dt: f64) -> [f64; 6] {
    let shift = |base: [f64; 6], k: [f64; 6], h: f64| std::array::from_fn(|i| base[i] + h * k[i]);
    let k1 = node_rhs(params, y);
    let k2 = node_rhs(params, shift(y, k1, 0.5 * dt));
    let k3 = node_rhs(params, shift(y, k2, 0.5 * dt));
    let k4 = node_rhs(params, shift(y, k3, dt));
    std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// One classical fourth-order Runge-Kutta step of the six-dimensional ODE
/// (reaction plus coupling, no diffusion).
pub fn rk4_ode_step(params: &Parameters, y: OdePoint, dt: f64) -> OdePoint {
    OdePoint::from_array(rk4_array(params, y.to_array(), dt))
}

/// Integrates the homogeneous ODE with fixed-step RK4, sampling every
/// `sample_every` steps (and at the final step).
pub fn integrate_ode(
    params: &Parameters,
    y0: OdePoint,
    horizon: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<(f64, OdePoint)>> {
    let steps = step_count(horizon, dt)?;
    let sample_every = sample_every.max(1);
    let mut y = y0;
    let mut out = vec![(0.0, y)];
    for step in 1..=steps {
        y = rk4_ode_step(params, y, dt);
        let t = step as f64 * dt;
        if !y.is_finite() {
            return Err(Error::NonFinite {
                step,
                last_finite_time: (step - 1) as f64 * dt,
            });
        }
        if step % sample_every as u64 == 0 || step == steps {
            out.push((t, y));
        }
    }
    Ok(out)
}

fn step_count(horizon: f64, dt: f64) -> Result<u64> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    Ok(((horizon / dt).round() as u64).max(1))
}

fn map_nodes(s: &PairState, f: impl Fn([f64; 6]) -> [f64; 6]) -> PairState {
    PairState::from_nodes(s.len(), |k| f(s.node(k)))
}

/// Advances the state by one step of the configured IMEX scheme.
pub fn imex_step(
    grid: &Grid,
    params: &Parameters,
    s: &PairState,
    stepper: &StepperConfig,
) -> Result<PairState> {
    s.check(grid)?;
    let dt = stepper.dt;
    match stepper.scheme {
        Scheme::ImexEuler => {
            let mut next = map_nodes(s, |y| {
                let rate = node_rhs(params, y);
                std::array::from_fn(|i| y[i] + dt * rate[i])
            });
            let gamma = dt * params.d;
            next.u1 = helmholtz_solve(grid, gamma, &next.u1)?;
            next.u2 = helmholtz_solve(grid, gamma, &next.u2)?;
            Ok(next)
        }
        Scheme::ImexStrang => {
            let half = 0.5 * dt;
            let mut mid = map_nodes(s, |y| rk4_array(params, y, half));
            let gamma = half * params.d;
            mid.u1 = crank_nicolson(grid, gamma, &mid.u1)?;
            mid.u2 = crank_nicolson(grid, gamma, &mid.u2)?;
            Ok(map_nodes(&mid, |y| rk4_array(params, y, half)))
        }
    }
}

/// `(I − γΔ)⁻¹ (I + γΔ) u`.
fn crank_nicolson(grid: &Grid, gamma: f64, u: &ScalarField) -> Result<ScalarField> {
    let explicit = u.axpy(gamma, &laplacian_apply(grid, u)?);
    helmholtz_solve(grid, gamma, &explicit)
}

/// Sampled diagnostics of one integration plus the state it ended in.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TimeSeriesRecord>,
    pub final_state: PairState,
    /// Global index of the last step taken; time is `final_step * dt`.
    pub final_step: u64,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

/// A grid, a parameter set and a stepper, ready to integrate initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    grid: Grid,
    params: Parameters,
    stepper: StepperConfig,
    constants: DerivedConstants,
}

impl Simulation {
    pub fn new(grid: Grid, params: Parameters, stepper: StepperConfig) -> Result<Self> {
        let params = validate_parameters(params)?;
        let stepper = stepper.validate()?;
        let constants = compute_absorbing_constants(&params, grid.area())?;
        Ok(Simulation {
            grid,
            params,
            stepper,
            constants,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn stepper(&self) -> &StepperConfig {
        &self.stepper
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.constants
    }

    pub fn step(&self, s: &PairState) -> Result<PairState> {
        imex_step(&self.grid, &self.params, s, &self.stepper)
    }

    pub fn record(&self, s: &PairState, t: f64) -> Result<TimeSeriesRecord> {
        record_diagnostics(&self.grid, &self.constants, s, t)
    }

    /// Integrates from `t = 0` over `horizon`, recording every `sample_every` steps.
    pub fn integrate(
        &self,
        s0: &PairState,
        horizon: f64,
        sample_every: usize,
    ) -> Result<Trajectory> {
        self.integrate_from(s0, 0, horizon, sample_every, |_, _| {})
    }

    /// Integrates starting at global step `start_step` (time `start_step * dt`).
    ///
    /// A record is taken at the start, every `sample_every` steps counted from
    /// the start, and at the final step. `observer` sees each record together
    /// with the state it was computed from.
    pub fn integrate_from(
        &self,
        s0: &PairState,
        start_step: u64,
        horizon: f64,
        sample_every: usize,
        mut observer: impl FnMut(&TimeSeriesRecord, &PairState),
    ) -> Result<Trajectory> {
        s0.check(&self.grid)?;
        let dt = self.stepper.dt;
        let steps = step_count(horizon, dt)?;
        let sample_every = sample_every.max(1) as u64;
        let check_every = self.stepper.check_interval as u64;
        let time = |k: u64| (start_step + k) as f64 * dt;

        if !s0.is_finite() {
            return Err(Error::NonFinite {
                step: start_step,
                last_finite_time: f64::NAN,
            });
        }
        let mut state = s0.clone();
        let first = self.record(&state, time(0))?;
        observer(&first, &state);
        let mut records = vec![first];
        let mut last_finite = time(0);

        for k in 1..=steps {
            state = self.step(&state)?;
            let sampled = k % sample_every == 0 || k == steps;
            if sampled || k % check_every == 0 {
                if !state.is_finite() {
                    return Err(Error::NonFinite {
                        step: start_step + k,
                        last_finite_time: last_finite,
                    });
                }
                last_finite = time(k);
            }
            if sampled {
                let rec = self.record(&state, time(k))?;
                observer(&rec, &state);
                records.push(rec);
            }
        }
        Ok(Trajectory {
            records,
            final_state: state,
            final_step: start_step + steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::full_rhs;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn smooth_state(grid: &Grid) -> PairState {
        PairState::from_fields([
            grid.field_from_fn(|x, _| 0.5 * (PI * x).cos()),
            grid.field_from_fn(|x, _| 0.2 * (2.0 * PI * x).cos()),
            grid.field_from_fn(|_, _| 0.1),
            grid.field_from_fn(|x, _| -0.3 * (PI * x).cos()),
            grid.field_from_fn(|_, _| 0.0),
            grid.field_from_fn(|x, _| 0.4 * (3.0 * PI * x).cos()),
        ])
    }

    #[test]
    fn scheme_names_parse() {
        for s in [Scheme::ImexEuler, Scheme::ImexStrang] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn step_is_consistent_to_first_order() {
        let g = make_grid(1, 41, 1.0).unwrap();
        let params = Parameters::test_set().with_coupling(2.0);
        let s = smooth_state(&g);
        let rate = full_rhs(&g, &params, &s).unwrap();
        for scheme in [Scheme::ImexEuler, Scheme::ImexStrang] {
            let defect = |dt: f64| {
                let next = imex_step(&g, &params, &s, &StepperConfig::new(dt, scheme)).unwrap();
                let euler = s.axpy(dt, &rate);
                next.axpy(-1.0, &euler).max_abs()
            };
            let ratio = defect(1e-3) / defect(5e-4);
            assert!((ratio - 4.0).abs() < 0.3, "{scheme}: {ratio}");
        }
    }

    #[test]
    fn constant_state_matches_explicit_ode_step() {
        let g = make_grid(1, 21, 1.0).unwrap();
        let params = Parameters::test_set().with_coupling(1.0);
        let y = [0.3, -0.2, 0.5, -0.4, 0.1, 0.0];
        let s = PairState::constant(&g, y);
        let dt = 1e-2;

        let euler = imex_step(&g, &params, &s, &StepperConfig::new(dt, Scheme::ImexEuler)).unwrap();
        let rate = node_rhs(&params, y);
        let expected: [f64; 6] = std::array::from_fn(|i| y[i] + dt * rate[i]);
        for k in 0..g.len() {
            for (a, b) in euler.node(k).iter().zip(expected) {
                assert!((a - b).abs() < 1e-14);
            }
        }

        let strang =
            imex_step(&g, &params, &s, &StepperConfig::new(dt, Scheme::ImexStrang)).unwrap();
        let half = rk4_array(&params, rk4_array(&params, y, dt / 2.0), dt / 2.0);
        for k in 0..g.len() {
            for (a, b) in strang.node(k).iter().zip(half) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn synchronized_state_stays_synchronized() {
        let g = make_grid(1, 31, 1.0).unwrap();
        let params = Parameters::test_set().with_coupling(3.0);
        let base = smooth_state(&g);
        let s = PairState::from_fields([
            base.u1.clone(),
            base.v1.clone(),
            base.w1.clone(),
            base.u1.clone(),
            base.v1.clone(),
            base.w1.clone(),
        ]);
        for scheme in [Scheme::ImexEuler, Scheme::ImexStrang] {
            let next = imex_step(&g, &params, &s, &StepperConfig::new(1e-2, scheme)).unwrap();
            assert_eq!(next.u1, next.u2);
            assert_eq!(next.v1, next.v2);
            assert_eq!(next.w1, next.w2);
        }
    }

    #[test]
    fn record_counting_and_semigroup() {
        let g = make_grid(1, 21, 1.0).unwrap();
        let sim = Simulation::new(
            g,
            Parameters::test_set().with_coupling(6.0),
            StepperConfig::default(),
        )
        .unwrap();
        let s0 = smooth_state(&g);
        let traj = sim.integrate(&s0, 10.0 * 1e-3, 1).unwrap();
        assert_eq!(traj.records.len(), 11);
        assert_eq!(traj.records[0].t, 0.0);

        let whole = sim.integrate(&s0, 0.05, 5).unwrap();
        let first = sim.integrate(&s0, 0.02, 5).unwrap();
        let second = sim
            .integrate_from(&first.final_state, first.final_step, 0.03, 5, |_, _| {})
            .unwrap();
        let mut joined = first.records.clone();
        joined.extend_from_slice(&second.records[1..]);
        assert_eq!(joined, whole.records);
        assert_eq!(second.final_state, whole.final_state);
    }

    #[test]
    fn non_finite_state_aborts() {
        let g = make_grid(1, 11, 1.0).unwrap();
        let sim = Simulation::new(
            g,
            Parameters::test_set(),
            StepperConfig::new(1.0, Scheme::ImexEuler),
        )
        .unwrap();
        // explicit cubic with a huge step blows up
        let s0 = PairState::constant(&g, [50.0, 0.0, 0.0, 50.0, 0.0, 0.0]);
        match sim.integrate(&s0, 200.0, 1000) {
            Err(Error::NonFinite { step, .. }) => assert!(step > 0),
            other => panic!("expected non-finite abort, got {other:?}"),
        }
    }

    #[test]
    fn rk4_zero_point_first_step() {
        let params = Parameters::typical();
        let dt = 1e-4;
        let y = rk4_ode_step(&params, OdePoint::from_array([0.0; 6]), dt);
        // u' = J + v − w at the origin, with v' = α and w' = −qc
        let expected = params.j * dt + (params.alpha + params.q * params.c) * dt * dt / 2.0;
        assert!((y.u1 - expected).abs() < 1e-6 * dt);
        assert!((y.v1 - params.alpha * dt).abs() < 1e-3 * dt);
        assert!((y.w1 + params.q * params.c * dt).abs() < 1e-3 * dt);
    }

    #[test]
    fn rk4_fourth_order() {
        let params = Parameters::test_set().with_coupling(0.5);
        let y0 = OdePoint::from_array([0.2, -0.1, 0.3, -0.5, 0.4, 0.0]);
        let end = |dt: f64| {
            integrate_ode(&params, y0, 10.0, dt, usize::MAX)
                .unwrap()
                .last()
                .unwrap()
                .1
        };
        let diff = |a: OdePoint, b: OdePoint| {
            a.to_array()
                .iter()
                .zip(b.to_array())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        let (a, b, c) = (end(0.04), end(0.02), end(0.01));
        let order = (diff(a, b) / diff(b, c)).log2();
        assert!((order - 4.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn ode_decoupled_identical_neurons_stay_identical() {
        let params = Parameters::test_set();
        let y0 = OdePoint::from_array([0.7, 0.1, -0.2, 0.7, 0.1, -0.2]);
        for (_, y) in integrate_ode(&params, y0, 5.0, 1e-2, 10).unwrap() {
            assert_eq!((y.u1, y.v1, y.w1), (y.u2, y.v2, y.w2));
        }
    }
}
