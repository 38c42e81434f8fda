//! Pal-tuple representation of STRIPS action models.

pub mod domain;
pub mod mode;
pub mod vocab;

pub use domain::{differing_pals, is_abstraction, model_diff, DomainModel};
pub use mode::{
    consistent_pa_values, pre_only_pa_values, Location, Mode, PaValue, PaValueSet, Presence, PresenceTuple,
};
pub use vocab::{
    enumerate_pal_tuples, ActionId, ActionSignature, BindingMode, LiftedAtom, PaId, PalId, PalTuple,
    PredId, PredicateSignature, TypeHierarchy, TypeId, Vocabulary,
};
