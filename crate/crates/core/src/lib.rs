//! Unsupervised data-to-text generation: tables, key-value records and graph
//! triples in, paragraphs out.

pub mod canonical;
pub mod corpus;
pub mod discourse;
pub mod eval;
pub mod lm;
pub mod morph;
pub mod pipeline;
pub mod rank;
pub mod realize;
pub mod relation;
pub mod resources;
pub mod tags;
pub mod text;

pub use resources::{load_resources, ResourceBundle, ResourceError};
pub use tags::{NeTag, PennTag, Pos};
pub use canonical::{CanonicalTriple, EntityMention, EntityTypeMap};
pub use lm::NGramModel;
pub use pipeline::{generate, Generation, PipelineOptions};
pub use realize::{RealizerId, SentenceCandidate};
