//! Link stability, the comprehensive hop metric, and the adaptive weight and
//! switching-threshold updates.

use serde::{Deserialize, Serialize};

use crate::channel::{PRR_CEIL, PRR_FLOOR};
use crate::error::{Error, Result};

/// Resilience of a link to topology change, in [0, 1].
pub fn link_stability(v_rel: f64, d: f64, v_ref: f64, r_v: f64) -> f64 {
    let speed = (v_rel / v_ref).min(1.0);
    let dist = (d / r_v).min(1.0);
    (1.0 - 0.5 * speed - 0.5 * dist).clamp(0.0, 1.0)
}

/// Weights of the four metric terms plus the baselines they adapt from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma0: f64,
    pub delta0: f64,
}

impl MetricWeights {
    /// Weights whose baselines equal their initial values.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let w = Self {
            alpha,
            beta,
            gamma,
            delta,
            alpha0: alpha,
            beta0: beta,
            gamma0: gamma,
            delta0: delta,
        };
        if [alpha, beta, gamma, delta].iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::InvalidConfig("metric weights must be >= 0".into()));
        }
        if (w.sum() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "metric weights must sum to 1, got {}",
                w.sum()
            )));
        }
        Ok(w)
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }
}

impl Default for MetricWeights {
    fn default() -> Self {
        Self::new(0.4, 0.2, 0.2, 0.2).expect("default weights sum to 1")
    }
}

/// Weighted single-hop cost; lower is better.
pub fn hop_metric(
    prr: f64,
    next_load: f64,
    c_global: f64,
    stability: f64,
    w: &MetricWeights,
) -> Result<f64> {
    if !(PRR_FLOOR..=PRR_CEIL).contains(&prr) {
        return Err(Error::ContractViolation(format!(
            "prr {prr} outside [{PRR_FLOOR}, {PRR_CEIL}]"
        )));
    }
    Ok(w.alpha / prr + w.beta * next_load + w.gamma * c_global + w.delta * (1.0 - stability))
}

/// Congestion-driven reweighting. Every term starts from its baseline, so the
/// result does not depend on earlier adaptations.
pub fn adapt_weights(w: &MetricWeights, c_global: f64, own_load: f64) -> MetricWeights {
    let c = c_global.clamp(0.0, 1.0);
    let q = own_load.clamp(0.0, 1.0);
    let alpha = w.alpha0;
    let beta = w.beta0 * (1.0 + q);
    let gamma = w.gamma0 * (1.0 + c);
    let delta = w.delta0 * (1.0 - c);
    let total = alpha + beta + gamma + delta;
    MetricWeights {
        alpha: alpha / total,
        beta: beta / total,
        gamma: gamma / total,
        delta: delta / total,
        ..*w
    }
}

/// Switching threshold together with the counters of the current window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchState {
    pub c_th: f64,
    pub c_th_min: f64,
    pub c_th_max: f64,
    pub recent_disruptions: u32,
    pub recent_switches: u32,
    pub decisions_in_window: u32,
}

/// Bounds of the threshold update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub window: u32,
    pub disruption_hi: u32,
    pub switch_hi: u32,
    pub decrease: f64,
    pub increase: f64,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        Self {
            window: 20,
            disruption_hi: 3,
            switch_hi: 10,
            decrease: 0.9,
            increase: 1.1,
        }
    }
}

impl SwitchState {
    pub fn new(c_th: f64, c_th_min: f64, c_th_max: f64) -> Self {
        Self {
            c_th: c_th.clamp(c_th_min, c_th_max),
            c_th_min,
            c_th_max,
            recent_disruptions: 0,
            recent_switches: 0,
            decisions_in_window: 0,
        }
    }

    /// Counts one decision; closes the window and adapts when it is full.
    pub fn record(&mut self, disrupted: bool, switched: bool, policy: &ThresholdPolicy) {
        self.decisions_in_window += 1;
        self.recent_disruptions += disrupted as u32;
        self.recent_switches += switched as u32;
        if self.decisions_in_window >= policy.window {
            *self = adapt_threshold(
                self,
                (self.recent_disruptions, self.recent_switches),
                policy,
            );
            self.recent_disruptions = 0;
            self.recent_switches = 0;
            self.decisions_in_window = 0;
        }
    }
}

/// Lowers the threshold after a disruption burst, raises it after a switching
/// burst, otherwise leaves it alone.
pub fn adapt_threshold(
    st: &SwitchState,
    (disruptions, switches): (u32, u32),
    policy: &ThresholdPolicy,
) -> SwitchState {
    let mut out = *st;
    if disruptions > policy.disruption_hi {
        out.c_th = (st.c_th * policy.decrease).max(st.c_th_min);
    } else if switches > policy.switch_hi {
        out.c_th = (st.c_th * policy.increase).min(st.c_th_max);
    }
    out
}
