//! A Mealy machine used as a black box.

use std::collections::BTreeSet;

use super::{RawOutput, Sut, SutError};
use crate::machine::MealyMachine;

#[derive(Debug, Clone)]
pub struct MealySut {
    machine: MealyMachine,
    location: usize,
}

impl MealySut {
    pub fn new(machine: MealyMachine) -> Self {
        let location = machine.initial();
        MealySut { machine, location }
    }

    pub fn machine(&self) -> &MealyMachine {
        &self.machine
    }
}

impl Sut for MealySut {
    fn inputs(&self) -> &[String] {
        self.machine.inputs()
    }

    fn propositions(&self) -> BTreeSet<String> {
        self.machine.propositions().clone()
    }

    fn reset(&mut self) -> Result<(), SutError> {
        self.location = self.machine.initial();
        Ok(())
    }

    fn step(&mut self, input: usize) -> Result<RawOutput, SutError> {
        if input >= self.machine.inputs().len() {
            return Err(SutError::UnknownInput(input));
        }
        let (t, out) = self.machine.step(self.location, input);
        self.location = t;
        Ok(RawOutput::Props(out.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::load_machine;

    const M: &str = "inputs: a b\npropositions: p\ninitial: s\ns --a/{p}--> t\ns --b/{}--> s\nt --a/{}--> s\nt --b/{p}--> t\n";

    fn steps(s: &mut MealySut, w: &[usize]) -> Vec<RawOutput> {
        w.iter().map(|&a| s.step(a).unwrap()).collect()
    }

    #[test]
    fn steps_follow_run() {
        let m = load_machine(M).unwrap();
        let mut s = MealySut::new(m.clone());
        let w = [0, 1, 1, 0, 0];
        let expected: Vec<RawOutput> = m
            .run(&w)
            .unwrap()
            .into_iter()
            .map(RawOutput::Props)
            .collect();
        assert_eq!(steps(&mut s, &w), expected);
    }

    #[test]
    fn reset_mid_word() {
        let mut s = MealySut::new(load_machine(M).unwrap());
        let first = steps(&mut s, &[0, 1]);
        s.step(0).unwrap();
        s.reset().unwrap();
        assert_eq!(steps(&mut s, &[0, 1]), first);
        assert_eq!(s.step(7), Err(SutError::UnknownInput(7)));
    }
}
