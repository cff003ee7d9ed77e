//! Interpreter and batch simulator for a small object-based hybrid modeling
//! language: classes with continuous (`[=]`) and discrete (`=`) assignments,
//! simulated with a discrete fixpoint and explicit Euler integration.

pub mod check;
pub mod corpus;
pub mod engine;
pub mod scene;
pub mod syntax;
pub mod values;

pub use check::{check_model, Diagnostic};
pub use corpus::{load_corpus, CorpusEntry, Fidelity};
pub use engine::trace::{CsvTraceWriter, JsonlTraceWriter, TraceRecorder, VarFilter};
pub use engine::{simulate, EngineError, Model, ObjectStore, Observer, SimConfig, Simulation, TraceFrame};
pub use scene::{normalize_3d, SceneFrame, SceneRecorder, SceneWriter, ShapeRecord};
pub use syntax::{parse, pretty_print, ClassDef, Expr, Pos, SyntaxError};
pub use values::{ObjectId, Scalar, Value, ValueError};
