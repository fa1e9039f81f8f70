//! Simulation and cost model for surface-code magic state distillation.

pub mod circuits;
pub mod density;
pub mod factory;
pub mod gadgets;
pub mod noise;
pub mod pauli;
pub mod reference;
pub mod state;
