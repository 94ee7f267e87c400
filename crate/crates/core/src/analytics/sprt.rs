use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observation {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Continue,
    AcceptH0,
    AcceptH1,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SprtConfig {
    pub p0: f64,
    pub p1: f64,
    pub alpha: f64,
    pub beta_err: f64,
}

impl Default for SprtConfig {
    fn default() -> Self {
        SprtConfig { p0: 0.1, p1: 0.3, alpha: 0.05, beta_err: 0.05 }
    }
}

/// Wald's test of positivity rate p0 against an elevated rate p1 on a
/// Bernoulli stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SprtState {
    pub config: SprtConfig,
    pub positives: u64,
    pub negatives: u64,
    pub log_lr: f64,
    pub decision: Decision,
}

impl SprtState {
    pub fn new(config: SprtConfig) -> Result<Self, AnalyticsError> {
        let SprtConfig { p0, p1, alpha, beta_err } = config;
        let ok = 0.0 < p0 && p0 < p1 && p1 < 1.0 && 0.0 < alpha && alpha < 0.5 && 0.0 < beta_err && beta_err < 0.5;
        if !ok {
            return Err(AnalyticsError::InvalidParams("SPRT configuration"));
        }
        Ok(SprtState { config, positives: 0, negatives: 0, log_lr: 0.0, decision: Decision::Continue })
    }

    pub fn upper(&self) -> f64 {
        libm::log((1.0 - self.config.beta_err) / self.config.alpha)
    }

    pub fn lower(&self) -> f64 {
        libm::log(self.config.beta_err / (1.0 - self.config.alpha))
    }

    pub fn steps(&self) -> u64 {
        self.positives + self.negatives
    }

    pub fn update(&mut self, obs: Observation) -> Result<Decision, AnalyticsError> {
        if self.decision != Decision::Continue {
            return Err(AnalyticsError::SprtFinished);
        }
        match obs {
            Observation::Positive => self.positives += 1,
            Observation::Negative => self.negatives += 1,
        }
        // recomputed from the counts so no rounding accumulates
        let SprtConfig { p0, p1, .. } = self.config;
        self.log_lr =
            self.positives as f64 * libm::log(p1 / p0) + self.negatives as f64 * libm::log((1.0 - p1) / (1.0 - p0));
        self.decision = if self.log_lr >= self.upper() {
            Decision::AcceptH1
        } else if self.log_lr <= self.lower() {
            Decision::AcceptH0
        } else {
            Decision::Continue
        };
        Ok(self.decision)
    }
}

/// Functional form of [`SprtState::update`].
pub fn sprt_update(state: SprtState, obs: Observation) -> Result<SprtState, AnalyticsError> {
    let mut s = state;
    s.update(obs)?;
    Ok(s)
}

/// Feeds `stream` until a decision is reached or the stream ends.
pub fn sprt_run(
    config: SprtConfig,
    stream: impl IntoIterator<Item = Observation>,
) -> Result<SprtState, AnalyticsError> {
    let mut s = SprtState::new(config)?;
    for obs in stream {
        if s.update(obs)? != Decision::Continue {
            break;
        }
    }
    Ok(s)
}
