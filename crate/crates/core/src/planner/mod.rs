//! Grounding, closed-world execution, optimal breadth-first planning and trace checks.

pub mod exec;
pub mod search;
pub mod state;
pub mod trace;
pub mod universe;

pub use exec::{apply, ground, CompiledModel, GroundTask};
pub use search::{optimal_plan, reachable_states, shortest_path, shortest_paths, Plan};
pub use state::State;
pub use trace::{presence_tuple, triplet_consistent, validate_trace, ActionTriplet, ObservationTrace};
pub use universe::{AtomId, GroundAction, GroundActionId, GroundAtom, ObjId, Objects, Universe};
