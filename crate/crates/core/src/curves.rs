//! Single-factor experience curves (Wright's law).
//!
//! Unit cost falls by a constant fraction, the learning rate, every time
//! cumulative installed capacity doubles:
//!
//! ```text
//! cost(x) = c0 * (x / x0)^b,    b = log2(1 - learning_rate)
//! ```
//!
//! Capacities are cumulative nameplate (kW, tCO2/yr). Costs are per unit of
//! that capacity, in base-year USD. Projection is forward-only: asking for a
//! capacity below the curve's anchor is an error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("learning rate {0} outside [0, 1)")]
    InvalidLearningRate(f64),
    #[error("initial cost {0} must be positive and finite")]
    NonPositiveCost(f64),
    #[error("capacity {0} must be positive and finite")]
    NonPositiveCapacity(f64),
    #[error("capacity regression: {to} is below {from}")]
    CapacityRegression { from: f64, to: f64 },
    #[error("target cost {target} unreachable from initial cost {initial}")]
    UnreachableTarget { target: f64, initial: f64 },
    #[error("zero learning rate: cost never falls below {0}")]
    ZeroLearning(f64),
}

/// A Wright's-law curve anchored at the current cost and cumulative capacity.
///
/// Construct with [`LearningCurve::new`]; deserialization runs the same checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct LearningCurve {
    initial_cost: f64,
    initial_capacity: f64,
    learning_rate: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    initial_cost: f64,
    initial_capacity: f64,
    learning_rate: f64,
}

impl TryFrom<RawCurve> for LearningCurve {
    type Error = CurveError;

    fn try_from(raw: RawCurve) -> Result<Self, Self::Error> {
        LearningCurve::new(raw.initial_cost, raw.initial_capacity, raw.learning_rate)
    }
}

impl LearningCurve {
    pub fn new(
        initial_cost: f64,
        initial_capacity: f64,
        learning_rate: f64,
    ) -> Result<Self, CurveError> {
        if !(learning_rate.is_finite() && (0.0..1.0).contains(&learning_rate)) {
            return Err(CurveError::InvalidLearningRate(learning_rate));
        }
        if !(initial_cost.is_finite() && initial_cost > 0.0) {
            return Err(CurveError::NonPositiveCost(initial_cost));
        }
        if !(initial_capacity.is_finite() && initial_capacity > 0.0) {
            return Err(CurveError::NonPositiveCapacity(initial_capacity));
        }
        Ok(Self {
            initial_cost,
            initial_capacity,
            learning_rate,
        })
    }

    pub fn initial_cost(&self) -> f64 {
        self.initial_cost
    }

    pub fn initial_capacity(&self) -> f64 {
        self.initial_capacity
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Same anchor, different learning rate.
    pub fn with_learning_rate(&self, learning_rate: f64) -> Result<Self, CurveError> {
        Self::new(self.initial_cost, self.initial_capacity, learning_rate)
    }

    /// Same curve with the cost axis multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, CurveError> {
        Self::new(
            self.initial_cost * factor,
            self.initial_capacity,
            self.learning_rate,
        )
    }

    /// Progress exponent `log2(1 - learning_rate)`; zero iff no learning.
    pub fn exponent(&self) -> f64 {
        (1.0 - self.learning_rate).log2()
    }

    fn check_forward(&self, from: f64, to: f64) -> Result<(), CurveError> {
        if !(to.is_finite() && to > 0.0) {
            return Err(CurveError::NonPositiveCapacity(to));
        }
        if to < from {
            return Err(CurveError::CapacityRegression { from, to });
        }
        Ok(())
    }

    /// Unit cost once cumulative capacity reaches `target_capacity`.
    pub fn project_cost(&self, target_capacity: f64) -> Result<f64, CurveError> {
        self.check_forward(self.initial_capacity, target_capacity)?;
        let ratio = target_capacity / self.initial_capacity;
        Ok(self.initial_cost * ratio.powf(self.exponent()))
    }

    /// Cumulative capacity at which the unit cost has fallen to `target_cost`.
    pub fn capacity_for_cost(&self, target_cost: f64) -> Result<f64, CurveError> {
        if !(target_cost.is_finite() && target_cost > 0.0 && target_cost <= self.initial_cost) {
            return Err(CurveError::UnreachableTarget {
                target: target_cost,
                initial: self.initial_cost,
            });
        }
        if target_cost == self.initial_cost {
            return Ok(self.initial_capacity);
        }
        if self.learning_rate == 0.0 {
            return Err(CurveError::ZeroLearning(self.initial_cost));
        }
        let ratio = target_cost / self.initial_cost;
        Ok(self.initial_capacity * ratio.powf(1.0 / self.exponent()))
    }

    /// Capital outlay to build out from `from_capacity` to `to_capacity`,
    /// paying the curve's unit cost for every increment.
    ///
    /// Integrates `cost(x)` in closed form; at a 50% learning rate the
    /// exponent is -1 and the antiderivative becomes logarithmic.
    pub fn cumulative_investment(
        &self,
        from_capacity: f64,
        to_capacity: f64,
    ) -> Result<f64, CurveError> {
        self.check_forward(self.initial_capacity, from_capacity)?;
        self.check_forward(from_capacity, to_capacity)?;
        if from_capacity == to_capacity {
            return Ok(0.0);
        }
        let b = self.exponent();
        let scale = self.initial_cost * self.initial_capacity;
        let lo = from_capacity / self.initial_capacity;
        let hi = to_capacity / self.initial_capacity;
        let p = b + 1.0;
        if p.abs() < 1e-12 {
            return Ok(scale * (hi / lo).ln());
        }
        // hi^p - lo^p = lo^p * expm1(p * ln(hi/lo)); stable for short intervals.
        let span = lo.powf(p) * (p * (hi / lo).ln()).exp_m1();
        Ok(scale / p * span)
    }

    /// Number of capacity doublings between the anchor and `target_capacity`.
    pub fn doublings(&self, target_capacity: f64) -> Result<f64, CurveError> {
        self.check_forward(self.initial_capacity, target_capacity)?;
        Ok((target_capacity / self.initial_capacity).log2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn curve(c0: f64, x0: f64, lr: f64) -> LearningCurve {
        LearningCurve::new(c0, x0, lr).unwrap()
    }

    /// Trapezoidal rule over `project_cost`, independent of the closed form.
    fn trapezoid(c: &LearningCurve, from: f64, to: f64, panels: usize) -> f64 {
        let h = (to - from) / panels as f64;
        let mut sum = 0.5 * (c.project_cost(from).unwrap() + c.project_cost(to).unwrap());
        for i in 1..panels {
            sum += c.project_cost(from + h * i as f64).unwrap();
        }
        sum * h
    }

    /// Bisection on `project_cost` in log-capacity space.
    fn bisect_capacity(c: &LearningCurve, target: f64) -> f64 {
        let (mut lo, mut hi) = (c.initial_capacity().ln(), c.initial_capacity().ln() + 200.0);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if c.project_cost(mid.exp()).unwrap() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    #[test]
    fn one_doubling_removes_learning_rate() {
        assert_relative_eq!(curve(100.0, 1.0, 0.2).project_cost(2.0).unwrap(), 80.0, max_relative = 1e-12);
        assert_relative_eq!(curve(100.0, 1.0, 0.2).project_cost(4.0).unwrap(), 64.0, max_relative = 1e-12);
    }

    #[test]
    fn identity_at_anchor() {
        for lr in [0.0, 0.1, 0.37, 0.9] {
            assert_eq!(curve(2600.0, 0.5e6, lr).project_cost(0.5e6).unwrap(), 2600.0);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert_eq!(LearningCurve::new(1.0, 1.0, 1.0), Err(CurveError::InvalidLearningRate(1.0)));
        assert_eq!(LearningCurve::new(1.0, 1.0, -0.1), Err(CurveError::InvalidLearningRate(-0.1)));
        assert_eq!(LearningCurve::new(0.0, 1.0, 0.1), Err(CurveError::NonPositiveCost(0.0)));
        assert_eq!(LearningCurve::new(1.0, 0.0, 0.1), Err(CurveError::NonPositiveCapacity(0.0)));
        assert!(LearningCurve::new(1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn exponent_sign() {
        assert_eq!(curve(1.0, 1.0, 0.0).exponent(), 0.0);
        assert!(curve(1.0, 1.0, 0.15).exponent() < 0.0);
        assert_relative_eq!(curve(1.0, 1.0, 0.5).exponent(), -1.0);
    }

    #[test]
    fn projection_errors() {
        let c = curve(100.0, 10.0, 0.2);
        assert_eq!(c.project_cost(0.0), Err(CurveError::NonPositiveCapacity(0.0)));
        assert_eq!(c.project_cost(-3.0), Err(CurveError::NonPositiveCapacity(-3.0)));
        assert_eq!(
            c.project_cost(5.0),
            Err(CurveError::CapacityRegression { from: 10.0, to: 5.0 })
        );
    }

    #[test]
    fn inverse_examples() {
        let c = curve(100.0, 1.0, 0.2);
        assert_relative_eq!(c.capacity_for_cost(64.0).unwrap(), 4.0, max_relative = 1e-12);
        assert_eq!(c.capacity_for_cost(100.0).unwrap(), 1.0);

        let big = curve(2600.0, 0.5e6, 0.15);
        let x = big.capacity_for_cost(1600.0).unwrap();
        assert!((big.project_cost(x).unwrap() - 1600.0).abs() < 1e-6);
        assert_relative_eq!(x, bisect_capacity(&big, 1600.0), max_relative = 1e-9);
    }

    #[test]
    fn inverse_errors() {
        let c = curve(100.0, 1.0, 0.2);
        assert!(matches!(c.capacity_for_cost(120.0), Err(CurveError::UnreachableTarget { .. })));
        assert!(matches!(c.capacity_for_cost(0.0), Err(CurveError::UnreachableTarget { .. })));
        let flat = curve(100.0, 1.0, 0.0);
        assert_eq!(flat.capacity_for_cost(90.0), Err(CurveError::ZeroLearning(100.0)));
        assert_eq!(flat.capacity_for_cost(100.0).unwrap(), 1.0);
    }

    #[test]
    fn investment_examples() {
        let c = curve(100.0, 1.0, 0.0);
        assert_relative_eq!(c.cumulative_investment(1.0, 3.0).unwrap(), 200.0, max_relative = 1e-12);
        assert_eq!(c.cumulative_investment(2.0, 2.0).unwrap(), 0.0);

        let dac = curve(2600.0, 0.5e6, 0.15);
        let closed = dac.cumulative_investment(0.5e6, 3.5e6).unwrap();
        let numeric = trapezoid(&dac, 0.5e6, 3.5e6, 1_000_000);
        assert_relative_eq!(closed, numeric, max_relative = 1e-6);
    }

    #[test]
    fn investment_at_half_learning_rate_is_logarithmic() {
        let c = curve(10.0, 2.0, 0.5);
        let got = c.cumulative_investment(2.0, 16.0).unwrap();
        assert_relative_eq!(got, 10.0 * 2.0 * 8f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(got, trapezoid(&c, 2.0, 16.0, 200_000), max_relative = 1e-6);
    }

    #[test]
    fn investment_rejects_backwards_interval() {
        let c = curve(10.0, 2.0, 0.2);
        assert!(matches!(c.cumulative_investment(4.0, 3.0), Err(CurveError::CapacityRegression { .. })));
        assert!(matches!(c.cumulative_investment(1.0, 3.0), Err(CurveError::CapacityRegression { .. })));
    }

    #[test]
    fn doubling_counts() {
        assert_eq!(curve(1.0, 1.0, 0.1).doublings(8.0).unwrap(), 3.0);
        assert_eq!(curve(1.0, 1.0, 0.1).doublings(1.0).unwrap(), 0.0);
        assert_relative_eq!(curve(1.0, 0.5e6, 0.1).doublings(3.5e6).unwrap(), 7f64.log2());
        assert!(curve(1.0, 2.0, 0.1).doublings(1.0).is_err());
    }

    #[test]
    fn deserialization_validates() {
        let ok: LearningCurve = serde_json::from_str(
            r#"{"initial_cost": 5.0, "initial_capacity": 1.0, "learning_rate": 0.1}"#,
        )
        .unwrap();
        assert_eq!(ok.learning_rate(), 0.1);
        let bad = serde_json::from_str::<LearningCurve>(
            r#"{"initial_cost": 5.0, "initial_capacity": 1.0, "learning_rate": 1.5}"#,
        );
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn cost_is_non_increasing_in_capacity(
            lr in 0.0f64..0.95, a in 1.0f64..1e4, b in 1.0f64..1e4,
        ) {
            let c = curve(1000.0, 1.0, lr);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(c.project_cost(hi).unwrap() <= c.project_cost(lo).unwrap());
        }

        #[test]
        fn cost_strictly_decreases_in_learning_rate(
            lr1 in 0.0f64..0.9, dlr in 1e-3f64..0.09, ratio in 1.01f64..1e5,
        ) {
            let slow = curve(1000.0, 3.0, lr1);
            let fast = curve(1000.0, 3.0, lr1 + dlr);
            prop_assert!(fast.project_cost(3.0 * ratio).unwrap() < slow.project_cost(3.0 * ratio).unwrap());
        }

        #[test]
        fn inverse_round_trips(lr in 1e-3f64..=0.5, log_ratio in 0.0f64..(1e6f64).ln(), c0 in 1.0f64..1e4) {
            let c = curve(c0, 7.0, lr);
            let x = 7.0 * log_ratio.exp();
            let back = c.capacity_for_cost(c.project_cost(x).unwrap()).unwrap();
            prop_assert!((back / x - 1.0).abs() <= 1e-9, "x={x} back={back}");
        }

        #[test]
        fn cost_scale_invariance(k in 0.01f64..100.0, lr in 0.0f64..0.9, ratio in 1.0f64..1e3) {
            let c = curve(50.0, 2.0, lr);
            let s = c.scaled(k).unwrap();
            let x = 2.0 * ratio;
            prop_assert!((s.project_cost(x).unwrap() / (k * c.project_cost(x).unwrap()) - 1.0).abs() <= 1e-12);
            let inv = c.cumulative_investment(2.0, x).unwrap();
            if inv > 0.0 {
                prop_assert!((s.cumulative_investment(2.0, x).unwrap() / (k * inv) - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn investment_is_additive(
            lr in 0.0f64..0.9, r1 in 1.0f64..1e3, r2 in 1.0f64..1e3, r3 in 1.0f64..1e3,
        ) {
            let c = curve(300.0, 1.5, lr);
            let mut pts = [1.5 * r1, 1.5 * r2, 1.5 * r3];
            pts.sort_by(f64::total_cmp);
            let [a, b, d] = pts;
            let whole = c.cumulative_investment(a, d).unwrap();
            let split = c.cumulative_investment(a, b).unwrap() + c.cumulative_investment(b, d).unwrap();
            prop_assert!((whole - split).abs() <= 1e-9 * whole.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn closed_form_matches_quadrature(
            lr in 0.0f64..0.6, c0 in 10.0f64..5000.0, ratio in 1.5f64..50.0,
        ) {
            let c = curve(c0, 1.0, lr);
            let closed = c.cumulative_investment(1.0, ratio).unwrap();
            let numeric = trapezoid(&c, 1.0, ratio, 20_000);
            prop_assert!((closed / numeric - 1.0).abs() <= 1e-6, "closed={closed} numeric={numeric}");
        }
    }
}
