//! Samplers of `(n, m)` orbit polygons and the verifiers built on them.

pub mod paradox;
pub mod sampler;
pub mod verify;

pub use paradox::{search_paradoxical, ParadoxBudget, ParadoxCandidate, ParadoxReport};
pub use sampler::{sample_detailed, sample_orbit_polygon, OrbitSampler, SampledPolygon};
pub use verify::{
    verify, verify_theorem_n3, verify_theorem_n4, verify_theorem_n52, verify_theorem_n62,
    ControlReport, Replay, TheoremId, VerifierReport, VerifyConfig,
};
