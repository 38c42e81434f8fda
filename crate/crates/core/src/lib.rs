//! Differential assessment of a planning agent whose STRIPS action model has
//! drifted from a previously known model.

pub mod agent;
pub mod assess;
pub mod error;
pub mod experiment;
pub mod model;
pub mod pddl;
pub mod planner;

pub use error::{Error, Result};
pub use model::{BindingMode, DomainModel, Mode, PaValue, PalId, Vocabulary};
pub use planner::{ActionTriplet, ObservationTrace, State, Universe};
pub use agent::{AgentSim, DriftMethod, DriftSpec, Query, QueryResponse};
pub use assess::{aia_baseline, daaisy, AssessConfig, AssessmentReport};
