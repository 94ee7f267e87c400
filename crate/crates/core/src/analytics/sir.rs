use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::describe::CaseSeries;
use super::records::Day;
use super::AnalyticsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SirState {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl SirState {
    pub fn total(&self) -> f64 {
        self.s + self.i + self.r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirParams {
    pub beta: f64,
    pub gamma: f64,
    pub population: f64,
    pub s0: f64,
    pub i0: f64,
    pub r0: f64,
}

impl SirParams {
    /// Population `n` with `i0` initially infected and nobody removed.
    pub fn new(beta: f64, gamma: f64, n: f64, i0: f64) -> Result<Self, AnalyticsError> {
        let p = SirParams { beta, gamma, population: n, s0: n - i0, i0, r0: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AnalyticsError> {
        let finite = [self.beta, self.gamma, self.population, self.s0, self.i0, self.r0].iter().all(|x| x.is_finite());
        let ok = finite
            && self.beta >= 0.0
            && self.gamma >= 0.0
            && self.population > 0.0
            && self.s0 >= 0.0
            && self.i0 >= 0.0
            && self.r0 >= 0.0
            && libm::fabs(self.s0 + self.i0 + self.r0 - self.population) <= 1e-9 * self.population;
        if ok {
            Ok(())
        } else {
            Err(AnalyticsError::InvalidParams("SIR parameters"))
        }
    }

    pub fn initial(&self) -> SirState {
        SirState { s: self.s0, i: self.i0, r: self.r0 }
    }
}

/// One explicit Euler step. Flows are clamped so no compartment goes
/// negative when `dt` is large.
pub fn sir_step(params: &SirParams, state: SirState, dt: f64) -> Result<SirState, AnalyticsError> {
    if dt.is_nan() || dt < 0.0 || !dt.is_finite() {
        return Err(AnalyticsError::InvalidParams("dt must be non-negative"));
    }
    if state.s < 0.0 || state.i < 0.0 || state.r < 0.0 {
        return Err(AnalyticsError::InvalidParams("negative compartment"));
    }
    Ok(step(params.beta, params.gamma, params.population, state, dt).0)
}

/// Next state and the new infections during the step.
fn step(beta: f64, gamma: f64, n: f64, st: SirState, dt: f64) -> (SirState, f64) {
    let inf = (beta * st.s * st.i / n * dt).min(st.s);
    let rec = (gamma * st.i * dt).min(st.i + inf);
    let next = SirState { s: st.s - inf, i: st.i + inf - rec, r: st.r + rec };
    (next, inf)
}

/// States at t = 0, dt, 2dt, ..., steps·dt.
pub fn sir_trajectory(params: &SirParams, dt: f64, steps: usize) -> Result<Vec<SirState>, AnalyticsError> {
    params.validate()?;
    let mut out = Vec::with_capacity(steps + 1);
    let mut st = params.initial();
    out.push(st);
    for _ in 0..steps {
        st = sir_step(params, st, dt)?;
        out.push(st);
    }
    Ok(out)
}

/// Model new cases for each of `days` consecutive days, one Euler step per day.
pub fn daily_new_cases(params: &SirParams, days: usize) -> Vec<f64> {
    new_cases(params.beta, params.gamma, params.population, params.initial(), days)
}

fn new_cases(beta: f64, gamma: f64, n: f64, mut st: SirState, days: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(days);
    for _ in 0..days {
        let (next, inf) = step(beta, gamma, n, st, 1.0);
        out.push(inf);
        st = next;
    }
    out
}

/// Forecast of daily new cases for `horizon` days starting at `start`.
pub fn sir_forecast(params: &SirParams, start: Day, horizon: usize) -> Result<CaseSeries, AnalyticsError> {
    params.validate()?;
    let mut day = start;
    let mut counts = Vec::with_capacity(horizon);
    for c in daily_new_cases(params, horizon) {
        counts.push((day, c));
        day = day.next();
    }
    CaseSeries::new(None, counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirFitConfig {
    pub grid_step: f64,
    pub beta_max: f64,
    pub gamma_max: f64,
    pub refine_iterations: u32,
    /// Infected count on the first day of the series.
    pub initial_infected: f64,
}

impl Default for SirFitConfig {
    fn default() -> Self {
        SirFitConfig { grid_step: 0.01, beta_max: 1.0, gamma_max: 1.0, refine_iterations: 40, initial_infected: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SirFit {
    pub params: SirParams,
    pub sse: f64,
    pub degenerate: bool,
}

pub const MIN_SERIES_LEN: usize = 5;

/// Least-squares fit of (beta, gamma) to observed daily new cases: a grid
/// search followed by golden-section refinement along each axis.
pub fn sir_fit(series: &CaseSeries, population: f64, cfg: &SirFitConfig) -> Result<SirFit, AnalyticsError> {
    if series.len() < MIN_SERIES_LEN {
        return Err(AnalyticsError::SeriesTooShort(series.len()));
    }
    let ok_cfg = cfg.grid_step > 0.0
        && cfg.beta_max >= 0.0
        && cfg.gamma_max >= 0.0
        && cfg.initial_infected > 0.0
        && cfg.initial_infected <= population;
    if !ok_cfg {
        return Err(AnalyticsError::InvalidParams("fit configuration"));
    }
    let obs = series.values();
    let i0 = cfg.initial_infected;
    if obs.iter().all(|&c| c == 0.0) {
        let params = SirParams::new(0.0, 0.0, population, i0)?;
        let sse = sse(&obs, 0.0, 0.0, population, i0);
        return Ok(SirFit { params, sse, degenerate: true });
    }

    let steps = |max: f64| libm::floor(max / cfg.grid_step + 1e-9) as usize;
    let (mut best_b, mut best_g, mut best) = (0.0, 0.0, f64::INFINITY);
    // beta outer and strict improvement, so ties keep the smaller beta
    for bi in 0..=steps(cfg.beta_max) {
        let b = bi as f64 * cfg.grid_step;
        for gi in 0..=steps(cfg.gamma_max) {
            let g = gi as f64 * cfg.grid_step;
            let e = sse(&obs, b, g, population, i0);
            if e < best {
                (best_b, best_g, best) = (b, g, e);
            }
        }
    }

    let h = cfg.grid_step;
    let (b, e) =
        golden(|b| sse(&obs, b, best_g, population, i0), (best_b - h).max(0.0), best_b + h, cfg.refine_iterations);
    if e < best {
        (best_b, best) = (b, e);
    }
    let (g, e) =
        golden(|g| sse(&obs, best_b, g, population, i0), (best_g - h).max(0.0), best_g + h, cfg.refine_iterations);
    if e < best {
        (best_g, best) = (g, e);
    }
    Ok(SirFit { params: SirParams::new(best_b, best_g, population, i0)?, sse: best, degenerate: false })
}

/// Sum of squared errors between `obs` and model new cases.
pub fn sse(obs: &[f64], beta: f64, gamma: f64, n: f64, i0: f64) -> f64 {
    let st = SirState { s: n - i0, i: i0, r: 0.0 };
    new_cases(beta, gamma, n, st, obs.len()).iter().zip(obs).map(|(m, o)| (m - o) * (m - o)).sum()
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: u32) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
