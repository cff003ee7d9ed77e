//! Benchmark workloads shared by the criterion benches.

use acumen_core::corpus::{load_corpus, load_entry, CorpusEntry};
use acumen_core::engine::{simulate, Model, RunStats, SimConfig};
use acumen_core::syntax::{parse, ClassDef};

/// A corpus model ready to run with its header arguments.
pub struct Workload {
    pub entry: CorpusEntry,
    pub model: Model,
}

impl Workload {
    pub fn load(name: &str) -> Workload {
        let entry = load_entry(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let model = entry.model().unwrap_or_else(|e| panic!("{name}: {e}"));
        Workload { entry, model }
    }

    /// Runs the default root without observers.
    pub fn run(&self, config: SimConfig) -> RunStats {
        let args = self.entry.root_args().expect("header arguments");
        simulate(&self.model, &self.entry.root, args, config, &mut []).expect("simulation").1
    }
}

pub fn config(time_step: f64, end_time: f64) -> SimConfig {
    SimConfig { time_step, end_time, ..SimConfig::default() }
}

/// Name and source text of every corpus file.
pub fn corpus_sources() -> Vec<(String, String)> {
    load_corpus().expect("corpus").into_iter().map(|e| (e.name.to_string(), e.source)).collect()
}

pub fn parse_all(sources: &[(String, String)]) -> Vec<Vec<ClassDef>> {
    sources.iter().map(|(_, s)| parse(s).expect("corpus parses")).collect()
}
