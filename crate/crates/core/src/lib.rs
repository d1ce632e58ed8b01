//! Colour refinement on random regular graphs: sampling, refinement,
//! triangle-seeded canonical labelling, verification tools and experiments.

pub mod analysis;
pub mod canonical;
pub mod graph;
pub mod harness;
pub mod inequalities;
pub mod partition;
pub mod refinement;
pub mod rng;
pub mod sampler;

pub use canonical::{
    are_isomorphic, canonical_form, canonical_labelling, CanonicalForm, CanonicalLabelling, IsoOutcome, SeedStrategy,
};
pub use graph::{Diameter, Graph, GraphError, Vertex};
pub use partition::{PartitionError, VertexPartition};
pub use refinement::{refine_step, refine_to_stable, Colouring, RefinementTrace};
pub use rng::RngSeed;
pub use sampler::{sample_regular, sample_regular_with, DegreeSequence, SamplerError, SamplerMethod};
