//! A small discrete-time automatic transmission model.
//!
//! Each step lasts one second. The input letters combine throttle 0 or 100
//! with brake 0 or 325. The outputs are the velocity `v`, the engine speed
//! `w` and the gear `g`.

use std::collections::BTreeSet;

use super::{RawOutput, Sut, SutError};
use crate::formula::Valuation;

/// Input letters in order: no pedal, throttle, brake, both.
pub const TRANSMISSION_INPUTS: [&str; 4] = ["idle", "accel", "brake", "both"];

/// Throttle and brake values of each input letter.
pub const PEDALS: [(f64, f64); 4] = [(0.0, 0.0), (100.0, 0.0), (0.0, 325.0), (100.0, 325.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionParams {
    /// Velocity gain per step at full throttle.
    pub accel: f64,
    /// Velocity loss per step at full brake.
    pub brake: f64,
    /// Fraction of the velocity lost to drag per step.
    pub drag: f64,
    /// Gear ratios for gears 1 to 4.
    pub ratios: [f64; 4],
    /// Engine speed per unit of velocity and ratio.
    pub rpm_factor: f64,
    /// Engine speed at standstill.
    pub idle_rpm: f64,
    /// Shift up when the engine speed exceeds this.
    pub shift_up: f64,
    /// Shift down when the engine speed drops below this.
    pub shift_down: f64,
}

impl Default for TransmissionParams {
    fn default() -> Self {
        TransmissionParams {
            accel: 12.0,
            brake: 20.0,
            drag: 0.05,
            ratios: [4.0, 2.5, 1.6, 1.0],
            rpm_factor: 10.0,
            idle_rpm: 600.0,
            shift_up: 3000.0,
            shift_down: 1200.0,
        }
    }
}

impl TransmissionParams {
    /// Velocity under constant full throttle, where gain equals drag.
    pub fn top_speed(&self) -> f64 {
        self.accel / self.drag
    }
}

#[derive(Debug, Clone)]
pub struct TransmissionSim {
    params: TransmissionParams,
    inputs: Vec<String>,
    v: f64,
    gear: usize,
}

impl TransmissionSim {
    pub fn new(params: TransmissionParams) -> Self {
        TransmissionSim {
            params,
            inputs: TRANSMISSION_INPUTS.iter().map(|s| s.to_string()).collect(),
            v: 0.0,
            gear: 1,
        }
    }

    pub fn params(&self) -> &TransmissionParams {
        &self.params
    }

    fn rpm(&self) -> f64 {
        self.params.idle_rpm + self.v * self.params.ratios[self.gear - 1] * self.params.rpm_factor
    }
}

impl Sut for TransmissionSim {
    fn inputs(&self) -> &[String] {
        &self.inputs
    }

    fn propositions(&self) -> BTreeSet<String> {
        BTreeSet::new()
    }

    fn reset(&mut self) -> Result<(), SutError> {
        self.v = 0.0;
        self.gear = 1;
        Ok(())
    }

    fn step(&mut self, input: usize) -> Result<RawOutput, SutError> {
        let &(throttle, brake) = PEDALS.get(input).ok_or(SutError::UnknownInput(input))?;
        let p = &self.params;
        let v = self.v + p.accel * throttle / 100.0 - p.brake * brake / 325.0 - p.drag * self.v;
        self.v = v.max(0.0);
        if self.rpm() > self.params.shift_up && self.gear < 4 {
            self.gear += 1;
        } else if self.rpm() < self.params.shift_down && self.gear > 1 {
            self.gear -= 1;
        }
        let out: Valuation = [("v", self.v), ("w", self.rpm()), ("g", self.gear as f64)]
            .into_iter()
            .map(|(k, x)| (k.to_string(), x))
            .collect();
        Ok(RawOutput::Values(out))
    }
}
