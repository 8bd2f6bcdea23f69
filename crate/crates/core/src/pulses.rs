// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! GRAPE synthesis of piecewise-constant pulses on a ladder-coupled qudit.
//!
//! The drift is zero (interaction frame) and every adjacent-level
//! transition `k <-> k+1` is driven by the two Hermitian controls
//! `|k><k+1| + h.c.` and `i(|k><k+1| - |k+1><k|)`.
//!
//! Slot derivatives are exact: each slot Hamiltonian is diagonalised and the
//! Fréchet derivative of `exp(-i dt H)` is taken in its eigenbasis
//! (Daleckii-Krein formula), so no first-order propagator approximation is
//! involved at any slot count.

use std::cell::RefCell;
use std::fmt::Write as _;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lindblad::{liouvillian, propagate, SuperOperator};
use crate::linalg::{CMatrix, I, ONE, ZERO};
use crate::operators::{NoiseModel, Operator};

/// Label stored in every [`GrapeResult`] naming how slot gradients were taken.
pub const GRADIENT_METHOD: &str = "exact-eigenbasis";

const SCHEDULE_HEADER: &str = "# quditfid pulse schedule v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ControlBasis {
    dim: usize,
    controls: Vec<Operator>,
    drift: Operator,
}

impl ControlBasis {
    /// The `2(d-1)` ladder controls, ordered `(X_1, Y_1, X_2, Y_2, ...)`.
    pub fn ladder(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!(
                "ladder controls need d >= 2, got {d}"
            )));
        }
        let mut controls = Vec::with_capacity(2 * (d - 1));
        for k in 0..d - 1 {
            let up = Operator::ket_bra(d, k, k + 1);
            let down = Operator::ket_bra(d, k + 1, k);
            controls.push(&up + &down);
            controls.push((&up - &down).scale(I));
        }
        Ok(Self {
            dim: d,
            controls,
            drift: Operator::zeros(d),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn controls(&self) -> &[Operator] {
        &self.controls
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn drift(&self) -> &Operator {
        &self.drift
    }

    /// `H_0 + sum_k u_k H_k`.
    pub fn hamiltonian(&self, amplitudes: &[f64]) -> Result<Operator> {
        if amplitudes.len() != self.controls.len() {
            return Err(Error::DimensionMismatch {
                expected: self.controls.len(),
                found: amplitudes.len(),
            });
        }
        let mut h = self.drift.matrix().clone();
        for (u, op) in amplitudes.iter().zip(&self.controls) {
            h += op.matrix() * Complex64::new(*u, 0.0);
        }
        Operator::new(h)
    }
}

/// Piecewise-constant control amplitudes, one row per time slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    slot_duration: f64,
    amplitudes: DMatrix<f64>,
}

impl PulseSchedule {
    pub fn new(slot_duration: f64, amplitudes: DMatrix<f64>) -> Result<Self> {
        if !(slot_duration > 0.0) || !slot_duration.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "slot duration must be positive, got {slot_duration}"
            )));
        }
        if amplitudes.nrows() == 0 {
            return Err(Error::InvalidParameter("schedule has no slots".into()));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self {
            slot_duration,
            amplitudes,
        })
    }

    pub fn zeros(n_slots: usize, n_controls: usize, total_time: f64) -> Result<Self> {
        if n_slots == 0 {
            return Err(Error::InvalidParameter("n_slots must be positive".into()));
        }
        Self::new(
            total_time / n_slots as f64,
            DMatrix::zeros(n_slots, n_controls),
        )
    }

    /// Build from slot-major flat amplitudes (`flat[j * n_controls + k]`).
    pub fn from_flat(
        slot_duration: f64,
        n_slots: usize,
        n_controls: usize,
        flat: &[f64],
    ) -> Result<Self> {
        if flat.len() != n_slots * n_controls {
            return Err(Error::DimensionMismatch {
                expected: n_slots * n_controls,
                found: flat.len(),
            });
        }
        Self::new(
            slot_duration,
            DMatrix::from_row_slice(n_slots, n_controls, flat),
        )
    }

    pub fn n_slots(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn n_controls(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }

    pub fn total_time(&self) -> f64 {
        self.slot_duration * self.n_slots() as f64
    }

    pub fn amplitudes(&self) -> &DMatrix<f64> {
        &self.amplitudes
    }

    pub fn slot(&self, j: usize) -> Vec<f64> {
        self.amplitudes.row(j).iter().copied().collect()
    }

    /// Slot-major flattening, the parameter layout used by [`GrapeObjective`].
    pub fn to_flat(&self) -> Vec<f64> {
        (0..self.n_slots()).flat_map(|j| self.slot(j)).collect()
    }

    /// Plain-text form:
    ///
    /// ```text
    /// # quditfid pulse schedule v1
    /// n_slots <N>
    /// n_controls <K>
    /// slot_duration <dt>
    /// <u_1 ... u_K>      (one whitespace-separated row per slot)
    /// ```
    ///
    /// Numbers are written in shortest round-trip form, so parsing the text
    /// back gives a bit-identical schedule. Lines starting with `#` after the
    /// header are ignored.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SCHEDULE_HEADER}");
        let _ = writeln!(out, "n_slots {}", self.n_slots());
        let _ = writeln!(out, "n_controls {}", self.n_controls());
        let _ = writeln!(out, "slot_duration {:e}", self.slot_duration);
        for j in 0..self.n_slots() {
            let row: Vec<String> = self
                .amplitudes
                .row(j)
                .iter()
                .map(|a| format!("{a:e}"))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty());
        if lines.next() != Some(SCHEDULE_HEADER) {
            return Err(Error::Parse("missing schedule header".into()));
        }
        let mut lines = lines.filter(|l| !l.starts_with('#'));
        let mut field = |name: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing `{name}` line")))?;
            match line.split_once(char::is_whitespace) {
                Some((key, value)) if key == name => Ok(value.trim().to_string()),
                _ => Err(Error::Parse(format!("expected `{name}`, found `{line}`"))),
            }
        };
        let parse_count = |s: String, name: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("{name}: {e}")))
        };
        let n_slots = parse_count(field("n_slots")?, "n_slots")?;
        let n_controls = parse_count(field("n_controls")?, "n_controls")?;
        let dt = field("slot_duration")?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("slot_duration: {e}")))?;
        let mut flat = Vec::with_capacity(n_slots * n_controls);
        let mut rows = 0;
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("slot {}: {e}", rows + 1)))?;
            if row.len() != n_controls {
                return Err(Error::Parse(format!(
                    "slot {} has {} amplitudes, expected {n_controls}",
                    rows + 1,
                    row.len()
                )));
            }
            flat.extend(row);
            rows += 1;
        }
        if rows != n_slots {
            return Err(Error::Parse(format!(
                "found {rows} slots, header says {n_slots}"
            )));
        }
        Self::from_flat(dt, n_slots, n_controls, &flat)
    }
}

/// Eigendecomposition-based slot propagator and its derivative kernel.
struct Slot {
    /// Eigenvectors of the slot Hamiltonian.
    w: CMatrix,
    /// `exp(-i dt H)`.
    u: CMatrix,
    /// `Gamma_ab` with `dU[K] = W (Gamma o W^dag K W) W^dag`.
    gamma: CMatrix,
}

/// `(e^z - 1) / z`, by its series near the origin.
fn phi(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        ONE + z * 0.5 + z * z / 6.0
    } else {
        (z.exp() - ONE) / z
    }
}

fn slot_from_hamiltonian(h: &CMatrix, dt: f64) -> Slot {
    let eig = SymmetricEigen::new(h.clone());
    let w = eig.eigenvectors;
    let lambda = eig.eigenvalues;
    let d = lambda.len();
    let phases: Vec<Complex64> = lambda.iter().map(|l| (-I * dt * *l).exp()).collect();
    let mut gamma = CMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            gamma[(a, b)] = -I * dt * phases[b] * phi(-I * dt * (lambda[a] - lambda[b]));
        }
    }
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases));
    let u = &w * diag * w.adjoint();
    Slot { w, u, gamma }
}

/// Gate-infidelity objective `1 - |Tr(U_target^dag V)|^2 / d^2` over the
/// slot-major flattened amplitudes.
#[derive(Debug, Clone)]
pub struct GrapeObjective {
    target_dag: CMatrix,
    basis: ControlBasis,
    n_slots: usize,
    slot_duration: f64,
}

impl GrapeObjective {
    pub fn new(
        target: &Operator,
        basis: &ControlBasis,
        n_slots: usize,
        total_time: f64,
    ) -> Result<Self> {
        target.require_unitary()?;
        if target.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: target.dim(),
            });
        }
        if n_slots == 0 {
            return Err(Error::InvalidParameter("n_slots must be positive".into()));
        }
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        Ok(Self {
            target_dag: target.matrix().adjoint(),
            basis: basis.clone(),
            n_slots,
            slot_duration: total_time / n_slots as f64,
        })
    }

    pub fn n_params(&self) -> usize {
        self.n_slots * self.basis.n_controls()
    }

    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                found: params.len(),
            });
        }
        Ok(())
    }

    fn slot_hamiltonian(&self, params: &[f64], j: usize) -> CMatrix {
        let k = self.basis.n_controls();
        let mut h = self.basis.drift().matrix().clone();
        for (u, op) in params[j * k..(j + 1) * k].iter().zip(self.basis.controls()) {
            h += op.matrix() * Complex64::new(*u, 0.0);
        }
        h
    }

    fn slots(&self, params: &[f64]) -> Vec<Slot> {
        (0..self.n_slots)
            .map(|j| slot_from_hamiltonian(&self.slot_hamiltonian(params, j), self.slot_duration))
            .collect()
    }

    /// Composed propagator `U_N ... U_1`.
    pub fn propagator(&self, params: &[f64]) -> Result<Operator> {
        self.check_len(params)?;
        let d = self.basis.dim();
        let v = self
            .slots(params)
            .iter()
            .fold(CMatrix::identity(d, d), |acc, s| &s.u * acc);
        Operator::new(v)
    }

    fn score(&self, v: &CMatrix) -> (Complex64, f64) {
        let d = self.basis.dim() as f64;
        let g = (&self.target_dag * v).trace();
        (g, 1.0 - g.norm_sqr() / (d * d))
    }

    pub fn cost(&self, params: &[f64]) -> Result<f64> {
        let v = self.propagator(params)?;
        Ok(self.score(v.matrix()).1)
    }

    pub fn cost_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_len(params)?;
        let d = self.basis.dim();
        let df = d as f64;
        let n_ctrl = self.basis.n_controls();
        let slots = self.slots(params);

        // forward[j] = U_j ... U_1, forward[0] = 1
        let mut forward = Vec::with_capacity(self.n_slots + 1);
        forward.push(CMatrix::identity(d, d));
        for s in &slots {
            let next = &s.u * forward.last().expect("non-empty");
            forward.push(next);
        }
        let (g, cost) = self.score(&forward[self.n_slots]);

        let mut grad = vec![0.0; self.n_params()];
        // back = U_N ... U_{j+1}
        let mut back = CMatrix::identity(d, d);
        for j in (0..self.n_slots).rev() {
            let s = &slots[j];
            // dg = Tr(P_{j-1} U_t^dag Q_j dU_j) = sum_ab Y_ba (Gamma o K~)_ab
            let x = &forward[j] * &self.target_dag * &back;
            let y = s.w.adjoint() * x * &s.w;
            for (k, op) in self.basis.controls().iter().enumerate() {
                let kt = s.w.adjoint() * op.matrix() * &s.w;
                let mut dg = ZERO;
                for a in 0..d {
                    for b in 0..d {
                        dg += y[(b, a)] * kt[(a, b)] * s.gamma[(a, b)];
                    }
                }
                grad[j * n_ctrl + k] = -2.0 * (g.conj() * dg).re / (df * df);
            }
            back = &back * &s.u;
        }
        Ok((cost, grad))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrapeOptions {
    pub n_slots: usize,
    pub total_time: f64,
    pub max_iters: u64,
    pub goal_infidelity: f64,
    pub seed: u64,
    /// Extra random restarts tried when a run ends above the goal.
    pub restarts: usize,
    /// Initial amplitudes are uniform in `[-a, a] / slot_duration`.
    pub init_scale: f64,
    pub lbfgs_memory: usize,
}

impl Default for GrapeOptions {
    fn default() -> Self {
        Self {
            n_slots: 32,
            total_time: 1.0,
            max_iters: 500,
            goal_infidelity: 1e-6,
            seed: 0,
            restarts: 2,
            init_scale: 0.1,
            lbfgs_memory: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrapeResult {
    pub schedule: PulseSchedule,
    pub infidelity: f64,
    pub converged: bool,
    /// Optimizer iterations summed over all attempts.
    pub iterations: u64,
    pub attempts: usize,
    pub gradient_method: &'static str,
}

/// Adapter exposing the objective to argmin, remembering the best point
/// seen so that a failing line search near machine precision loses nothing.
struct Problem<'a> {
    objective: &'a GrapeObjective,
    best: &'a RefCell<(f64, Vec<f64>)>,
}

impl Problem<'_> {
    fn record(&self, cost: f64, params: &[f64]) {
        let mut best = self.best.borrow_mut();
        if cost < best.0 {
            *best = (cost, params.to_vec());
        }
    }
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, params: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let cost = self
            .objective
            .cost(params)
            .map_err(argmin::core::Error::new)?;
        self.record(cost, params);
        Ok(cost)
    }
}

impl Gradient for Problem<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, params: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let (cost, grad) = self
            .objective
            .cost_and_gradient(params)
            .map_err(argmin::core::Error::new)?;
        self.record(cost, params);
        Ok(grad)
    }
}

fn run_lbfgs(
    objective: &GrapeObjective,
    init: Vec<f64>,
    opts: &GrapeOptions,
) -> Result<(f64, Vec<f64>, u64)> {
    let init_cost = objective.cost(&init)?;
    let best = RefCell::new((init_cost, init.clone()));
    let problem = Problem {
        objective,
        best: &best,
    };
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), opts.lbfgs_memory)
        .with_tolerance_grad(1e-15)
        .and_then(|s| s.with_tolerance_cost(0.0))
        .map_err(|e| Error::Optimizer(e.to_string()))?;
    let goal = opts.goal_infidelity;
    // A line-search failure close to machine precision is not fatal: the
    // best point seen so far is still returned.
    let iters = Executor::new(problem, solver)
        .configure(|state| state.param(init).max_iters(opts.max_iters).target_cost(goal))
        .run()
        .map(|res| res.state().get_iter())
        .unwrap_or(0);
    let (cost, params) = best.into_inner();
    Ok((cost, params, iters))
}

/// Optimise a ladder-control schedule towards `target` (global phase ignored).
pub fn grape_optimize(
    target: &Operator,
    basis: &ControlBasis,
    opts: &GrapeOptions,
) -> Result<GrapeResult> {
    if !(opts.goal_infidelity > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "goal infidelity must be positive, got {}",
            opts.goal_infidelity
        )));
    }
    let objective = GrapeObjective::new(target, basis, opts.n_slots, opts.total_time)?;
    let dt = objective.slot_duration();
    let n_ctrl = basis.n_controls();

    let zero = vec![0.0; objective.n_params()];
    let zero_cost = objective.cost(&zero)?;
    if zero_cost <= opts.goal_infidelity {
        return Ok(GrapeResult {
            schedule: PulseSchedule::from_flat(dt, opts.n_slots, n_ctrl, &zero)?,
            infidelity: zero_cost.max(0.0),
            converged: true,
            iterations: 0,
            attempts: 0,
            gradient_method: GRADIENT_METHOD,
        });
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut attempts = 0;
    for attempt in 0..=opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(attempt as u64);
        let bound = opts.init_scale / dt;
        let init: Vec<f64> = (0..objective.n_params())
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        attempts += 1;
        let (cost, params, iters) = run_lbfgs(&objective, init, opts)?;
        iterations += iters;
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, params));
        }
        if cost <= opts.goal_infidelity {
            break;
        }
    }
    let (_, params) = best.expect("at least one attempt");
    // Re-score the returned parameters so the reported value is exactly
    // what the schedule produces.
    let infidelity = objective.cost(&params)?;
    Ok(GrapeResult {
        schedule: PulseSchedule::from_flat(dt, opts.n_slots, n_ctrl, &params)?,
        infidelity,
        converged: infidelity <= opts.goal_infidelity,
        iterations,
        attempts,
        gradient_method: GRADIENT_METHOD,
    })
}

fn check_schedule(schedule: &PulseSchedule, basis: &ControlBasis) -> Result<()> {
    if schedule.n_controls() != basis.n_controls() {
        return Err(Error::DimensionMismatch {
            expected: basis.n_controls(),
            found: schedule.n_controls(),
        });
    }
    Ok(())
}

/// Noiseless composed unitary, computed exactly as in the optimizer.
pub fn schedule_unitary(schedule: &PulseSchedule, basis: &ControlBasis) -> Result<Operator> {
    check_schedule(schedule, basis)?;
    let d = basis.dim();
    let mut v = CMatrix::identity(d, d);
    for j in 0..schedule.n_slots() {
        let h = basis.hamiltonian(&schedule.slot(j))?;
        v = slot_from_hamiltonian(h.matrix(), schedule.slot_duration()).u * v;
    }
    Operator::new(v)
}

/// Gate infidelity `1 - |Tr(U^dag V)|^2 / d^2` of a schedule.
pub fn gate_infidelity(
    schedule: &PulseSchedule,
    basis: &ControlBasis,
    target: &Operator,
) -> Result<f64> {
    let v = schedule_unitary(schedule, basis)?;
    if v.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: target.dim(),
        });
    }
    let d = v.dim() as f64;
    let g = (target.matrix().adjoint() * v.matrix()).trace();
    Ok(1.0 - g.norm_sqr() / (d * d))
}

/// Noisy channel of the whole schedule: the ordered product of
/// `exp(L_j dt)` with `L_j` the Lindbladian of slot `j`.
pub fn schedule_to_propagator(
    schedule: &PulseSchedule,
    basis: &ControlBasis,
    noise: &NoiseModel,
) -> Result<SuperOperator> {
    check_schedule(schedule, basis)?;
    let d = basis.dim();
    if let Some(nd) = noise.dim() {
        if nd != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: nd,
            });
        }
    }
    let mut total = SuperOperator::identity(d);
    for j in 0..schedule.n_slots() {
        let h = basis.hamiltonian(&schedule.slot(j))?;
        let step = propagate(&liouvillian(&h, noise)?, schedule.slot_duration())?;
        total = step.compose(&total)?;
    }
    Ok(total)
}
