pub mod error;
pub mod convert;
pub mod model;
pub mod perturb;
pub mod pipeline;
pub mod bench_gen;
pub mod synth;
pub mod harness;
pub mod metrics;
pub mod report;

pub use error::{Error, Result};

pub use convert::{convert_to, fixed_to_free, free_to_fixed_sfx, is_sfx};
pub use model::{detect_form, CobolLine, CobolUnit, LineClass, SourceForm, UnitKind};
pub use perturb::rng::{derive_seed, RngStream};
pub use perturb::{catalog, method, Category, MethodDescriptor, PerturbOutcome, RenameMap};
pub use pipeline::{perturb, perturb_layered, PerturbRequest, PerturbResult};
pub use bench_gen::{CorpusManifest, ExpandedBenchmark, ExpansionPlan, VariantRecord};
pub use harness::{CheckerSet, MetricValue, MetricVector, ResultTable, SystemAdapter};
pub use metrics::{ComparisonPolicy, Rate, RobustnessAggregate};
