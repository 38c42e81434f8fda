//! The simulated black-box agent and the drift injector that manufactures
//! its previously known model.

pub mod drift;
pub mod sim;

pub use drift::{drift_capacity, inject_drift, DriftMethod, DriftSpec};
pub use sim::{
    answer_query, generate_trace, sample_random_states, sample_random_states_with, AgentSim, PlanningMode, Query,
    QueryResponse,
};
