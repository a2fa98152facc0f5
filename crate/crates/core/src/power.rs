//! Femto downlink/uplink power budgets and power-control strategies.
//!
//! Link budgets are computed in the dB domain; the cognitive power-control rule
//! works on additive mW steps. Strategies are trait objects registered by name
//! so scenarios can select them at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::units::{dbm_to_mw, mw_to_dbm};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerPolicy {
    /// Femto BS transmit ceiling, 125 mW.
    pub p_max_femto_dbm: f64,
    pub p_ue_max_dbm: f64,
    /// Aggregate interference the macro BS tolerates from all femto users.
    pub p_interference_max_dbm: f64,
    pub cpc_threshold_m: f64,
    pub cpc_step_down_mw: f64,
    pub cpc_step_up_mw: f64,
    /// Times the cognitive rule is applied per snapshot.
    pub cpc_rounds: u32,
}

impl Default for PowerPolicy {
    fn default() -> Self {
        PowerPolicy {
            p_max_femto_dbm: mw_to_dbm(125.0),
            p_ue_max_dbm: 20.0,
            p_interference_max_dbm: -80.0,
            cpc_threshold_m: 200.0,
            cpc_step_down_mw: 25.0,
            cpc_step_up_mw: 20.0,
            cpc_rounds: 3,
        }
    }
}

impl PowerPolicy {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_max_femto_dbm", self.p_max_femto_dbm),
            ("p_ue_max_dbm", self.p_ue_max_dbm),
            ("p_interference_max_dbm", self.p_interference_max_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(self.cpc_threshold_m > 0.0 && self.cpc_threshold_m.is_finite()) {
            return Err(Error::invalid("cpc_threshold_m", "must be positive"));
        }
        if !(self.cpc_step_down_mw >= 0.0 && self.cpc_step_down_mw.is_finite()) {
            return Err(Error::invalid("cpc_step_down_mw", "must be nonnegative"));
        }
        if !(self.cpc_step_up_mw >= 0.0 && self.cpc_step_up_mw.is_finite()) {
            return Err(Error::invalid("cpc_step_up_mw", "must be nonnegative"));
        }
        Ok(())
    }

    pub fn p_max_femto_mw(&self) -> f64 {
        dbm_to_mw(self.p_max_femto_dbm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetInputs {
    pub p_macro_dbm: f64,
    /// `G(θ)` towards the femto user.
    pub antenna_gain_db: f64,
    /// Macro BS to femto BS.
    pub loss_macro_db: f64,
    /// Femto BS to femto user.
    pub loss_femto_db: f64,
    /// Femto user to macro BS.
    pub loss_macro_measured_db: f64,
    /// Femto cells in the considered sector.
    pub n_femto: usize,
}

/// `min(P_macro + G(θ) − L_macro(d) + L_femto(r), P_max)` in dBm.
pub fn femto_downlink_power(inputs: &LinkBudgetInputs, policy: &PowerPolicy) -> f64 {
    let budget = inputs.p_macro_dbm + inputs.antenna_gain_db - inputs.loss_macro_db + inputs.loss_femto_db;
    budget.min(policy.p_max_femto_dbm)
}

/// `min(P_interference,max − 10·log10(n_femto) + L_macro,measured, P_UE,max)` in dBm.
pub fn femto_uplink_power(inputs: &LinkBudgetInputs, policy: &PowerPolicy) -> Result<f64> {
    if inputs.n_femto == 0 {
        return Err(Error::invalid("n_femto", "must be at least 1"));
    }
    let share = policy.p_interference_max_dbm - 10.0 * (inputs.n_femto as f64).log10();
    Ok((share + inputs.loss_macro_measured_db).min(policy.p_ue_max_dbm))
}

/// One step of the cognitive rule: drop by the step-down amount when the femto
/// user is closer than the threshold to a macro user, otherwise raise by the
/// step-up amount. The result stays in `[0, P_max]`.
pub fn cpc_adjust(current_mw: f64, distance_to_macro_user_m: f64, policy: &PowerPolicy) -> Result<f64> {
    if !(current_mw >= 0.0) {
        return Err(Error::invalid("current_mw", "must be nonnegative"));
    }
    if !(distance_to_macro_user_m >= 0.0) {
        return Err(Error::invalid("distance_to_macro_user_m", "must be nonnegative"));
    }
    let p_max = policy.p_max_femto_mw();
    let next = if distance_to_macro_user_m < policy.cpc_threshold_m {
        (current_mw - policy.cpc_step_down_mw).max(0.0)
    } else {
        current_mw + policy.cpc_step_up_mw
    };
    Ok(next.min(p_max))
}

/// A transmit power-control strategy.
pub trait PowerControl: Send + Sync {
    fn name(&self) -> &'static str;

    /// Controlled transmit power in mW, given the nominal power and the distance
    /// from the transmitter's user to the nearest victim user.
    fn adjust(&self, nominal_mw: f64, victim_distance_m: f64, policy: &PowerPolicy) -> f64;
}

/// Keeps the nominal power.
#[derive(Debug, Default, Clone, Copy)]
pub struct FixedPower;

impl PowerControl for FixedPower {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn adjust(&self, nominal_mw: f64, _victim_distance_m: f64, _policy: &PowerPolicy) -> f64 {
        nominal_mw
    }
}

/// Distance-triggered step rule applied `cpc_rounds` times.
#[derive(Debug, Default, Clone, Copy)]
pub struct CognitivePower;

impl PowerControl for CognitivePower {
    fn name(&self) -> &'static str {
        "cpc"
    }

    fn adjust(&self, nominal_mw: f64, victim_distance_m: f64, policy: &PowerPolicy) -> f64 {
        let distance = victim_distance_m.max(0.0);
        let mut p = nominal_mw.max(0.0);
        for _ in 0..policy.cpc_rounds {
            // inputs are sanitized above, so the rule cannot fail
            p = cpc_adjust(p, distance, policy).unwrap_or(p);
        }
        p
    }
}

#[derive(Clone)]
pub struct PowerControlRegistry {
    strategies: BTreeMap<&'static str, Arc<dyn PowerControl>>,
}

impl Default for PowerControlRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PowerControlRegistry {
    pub fn empty() -> Self {
        PowerControlRegistry {
            strategies: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(FixedPower));
        reg.register(Arc::new(CognitivePower));
        reg
    }

    pub fn register(&mut self, strategy: Arc<dyn PowerControl>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn PowerControl>> {
        self.strategies.get(name).cloned().ok_or_else(|| Error::Unknown {
            kind: "power control strategy",
            name: name.to_string(),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inputs() -> LinkBudgetInputs {
        LinkBudgetInputs {
            p_macro_dbm: 43.0,
            antenna_gain_db: 0.0,
            loss_macro_db: 100.0,
            loss_femto_db: 50.0,
            loss_macro_measured_db: 90.0,
            n_femto: 1,
        }
    }

    #[test]
    fn downlink_examples() {
        let policy = PowerPolicy::default();
        let p = femto_downlink_power(&inputs(), &policy);
        assert!((p - -7.0).abs() < 1e-12);
        assert!((dbm_to_mw(p) - 0.1995).abs() < 1e-3);

        let near = LinkBudgetInputs { loss_macro_db: 0.0, ..inputs() };
        let clamped = femto_downlink_power(&near, &policy);
        assert_eq!(clamped, policy.p_max_femto_dbm);
        assert!((dbm_to_mw(clamped) - 125.0).abs() < 1e-9);
        assert!((clamped - 20.97).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn downlink_monotone_and_clamped(l1 in 0.0f64..200.0, dl in 0.0f64..50.0, lf in 0.0f64..120.0) {
            let policy = PowerPolicy::default();
            let a = femto_downlink_power(&LinkBudgetInputs { loss_macro_db: l1, loss_femto_db: lf, ..inputs() }, &policy);
            let b = femto_downlink_power(&LinkBudgetInputs { loss_macro_db: l1 + dl, loss_femto_db: lf, ..inputs() }, &policy);
            prop_assert!(b <= a);
            prop_assert!(a <= policy.p_max_femto_dbm);
            let budget = 43.0 - l1 + lf;
            prop_assert_eq!(a == policy.p_max_femto_dbm, budget >= policy.p_max_femto_dbm);
        }
    }

    #[test]
    fn uplink_examples() {
        let policy = PowerPolicy { p_ue_max_dbm: 60.0, ..Default::default() };
        let one = femto_uplink_power(&inputs(), &policy).unwrap();
        assert_eq!(one, -80.0 + 90.0);
        let ten = femto_uplink_power(&LinkBudgetInputs { n_femto: 10, ..inputs() }, &policy).unwrap();
        assert!((one - ten - 10.0).abs() < 1e-12);

        let tiny = PowerPolicy { p_ue_max_dbm: -30.0, ..Default::default() };
        assert_eq!(femto_uplink_power(&inputs(), &tiny).unwrap(), -30.0);
        assert!(femto_uplink_power(&LinkBudgetInputs { n_femto: 0, ..inputs() }, &policy).is_err());
    }

    proptest! {
        #[test]
        fn uplink_tenfold_is_ten_db(n in 1usize..1000, lm in 60.0f64..120.0) {
            let policy = PowerPolicy { p_ue_max_dbm: 200.0, ..Default::default() };
            let a = femto_uplink_power(&LinkBudgetInputs { n_femto: n, loss_macro_measured_db: lm, ..inputs() }, &policy).unwrap();
            let b = femto_uplink_power(&LinkBudgetInputs { n_femto: 10 * n, loss_macro_measured_db: lm, ..inputs() }, &policy).unwrap();
            prop_assert!((a - b - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cpc_examples() {
        let policy = PowerPolicy::default();
        assert_eq!(cpc_adjust(100.0, 150.0, &policy).unwrap(), 75.0);
        assert_eq!(cpc_adjust(10.0, 50.0, &policy).unwrap(), 0.0);
        assert!((cpc_adjust(120.0, 500.0, &policy).unwrap() - 125.0).abs() < 1e-9);
        assert!(cpc_adjust(100.0, -1.0, &policy).is_err());
        assert!(cpc_adjust(-1.0, 10.0, &policy).is_err());
        // threshold itself counts as "not closer"
        assert_eq!(cpc_adjust(50.0, 200.0, &policy).unwrap(), 70.0);
    }

    #[test]
    fn cpc_fuzz_stays_bounded() {
        let policy = PowerPolicy::default();
        let p_max = policy.p_max_femto_mw();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut p = 60.0;
        for _ in 0..10_000 {
            p = cpc_adjust(p, rng.random_range(0.0..600.0), &policy).unwrap();
            assert!((0.0..=p_max).contains(&p));
        }
    }

    #[test]
    fn registry_lookup() {
        let reg = PowerControlRegistry::builtin();
        assert_eq!(reg.names(), vec!["cpc", "fixed"]);
        let policy = PowerPolicy::default();
        let cpc = reg.get("cpc").unwrap();
        assert_eq!(cpc.adjust(100.0, 10.0, &policy), 25.0);
        assert!((cpc.adjust(100.0, 1000.0, &policy) - 125.0).abs() < 1e-9);
        assert_eq!(reg.get("fixed").unwrap().adjust(42.0, 10.0, &policy), 42.0);
        assert!(matches!(reg.get("greedy"), Err(Error::Unknown { .. })));
    }
}
