//! Partially randomized causal simulation.
//!
//! Causal DAGs with structural equations are described in a small text
//! language, partially fixed by the modeller and completed at random under a
//! guideline, then sampled deterministically through inverse CDFs of per-node
//! output distributions. Observational, interventional, counterfactual and
//! missing-data datasets all come out of the same sampler.

pub mod correction;
pub mod dist;
pub mod edge;
pub mod graph;
pub mod guideline;
pub mod io;
pub mod lingam;
pub mod missing;
pub mod pdl;
pub mod randomize;
pub mod seed;

pub use correction::{calibrate_offset, estimate_moments, node_correction, CorrectionError, NodeCorrection};
pub use dist::{icdf_sample, DistError, Distribution};
pub use edge::{apply_edge_correction, apply_edge_function, EdgeCorrection, EdgeFunction, EdgeFunctionKind};
pub use graph::{
    compute_theta, instantiate, intervene, sample, sample_with_errors, zeta, DataType, EdgeSpec, Graph,
    GraphError, Intervention, InterventionAction, NodeModel, NodeSpec, Parametric, SampleBatch, Table,
};
pub use guideline::{parse_guideline, Guideline, GuidelineError, IntervalUnion};
pub use pdl::{parse_description, serialize, serialize_graph, PartialGraph, PdlError};
pub use randomize::{randomize, replay, RandomizationTrace, RandomizeError};
pub use lingam::{lingam_model, lingam_preset, LingamConfig, LingamError, LingamModel, Phi};
pub use missing::{
    apply_missingness, build_mgraph, mechanism_mask, sample_mgraph, MGraph, MGraphConfig, MaskedDataset, Mechanism,
    MissingError, Preset, ZSource,
};
