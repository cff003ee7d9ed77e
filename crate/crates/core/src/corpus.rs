//! Catalog of the bundled example models in `corpus/`, plus closed-form
//! oracles used to check them.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::engine::{eval_const, EngineError, Model};
use crate::syntax::{lex, parse, parse_expr_list, ClassDef, SyntaxError};
use crate::values::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fidelity {
    /// Transcribed exactly.
    Verbatim,
    /// Transcribed with a repair named in the entry note.
    Corrected,
    /// Written from a description; no listing exists.
    DerivedFromProse,
}

impl Fidelity {
    pub fn as_str(self) -> &'static str {
        match self {
            Fidelity::Verbatim => "verbatim",
            Fidelity::Corrected => "corrected",
            Fidelity::DerivedFromProse => "derived-from-prose",
        }
    }

    fn parse(s: &str) -> Option<Fidelity> {
        [Fidelity::Verbatim, Fidelity::Corrected, Fidelity::DerivedFromProse].into_iter().find(|f| f.as_str() == s)
    }
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Static description of one fixture.
struct Spec {
    name: &'static str,
    topic: &'static str,
    fidelity: Fidelity,
    symbols: &'static [(&'static str, &'static str)],
}

const SPECS: &[Spec] = &[
    Spec {
        name: "sphere",
        topic: "visualization",
        fidelity: Fidelity::Verbatim,
        symbols: &[("m", "m"), ("D", "D"), ("p", "p")],
    },
    Spec {
        name: "moving_sphere",
        topic: "visualization",
        fidelity: Fidelity::Verbatim,
        symbols: &[("m", "m"), ("D", "D"), ("t", "t"), ("p", "s.p")],
    },
    Spec {
        name: "display_bar",
        topic: "visualization",
        fidelity: Fidelity::Verbatim,
        symbols: &[("v", "v"), ("c", "c"), ("D", "D")],
    },
    Spec {
        name: "cylinder",
        topic: "vector and trigonometric calculation",
        fidelity: Fidelity::Verbatim,
        symbols: &[
            ("D", "D"),
            ("t", "t"),
            ("p", "c.p"),
            ("q", "c.q"),
            ("length", "c.length"),
            ("alpha", "c.alpha"),
            ("theta", "c.theta"),
        ],
    },
    Spec {
        name: "mass_1d",
        topic: "mechanics",
        fidelity: Fidelity::Verbatim,
        symbols: &[("m", "m"), ("D", "D"), ("p", "p"), ("f", "f"), ("e_k", "e_k")],
    },
    Spec {
        name: "mass",
        topic: "mechanics",
        fidelity: Fidelity::Verbatim,
        symbols: &[("m", "m"), ("D", "D"), ("p", "p"), ("f", "f"), ("e_k", "e_k")],
    },
    Spec {
        name: "spring",
        topic: "mechanics",
        fidelity: Fidelity::Verbatim,
        symbols: &[("D", "D"), ("k", "s.k"), ("l0", "s.l0"), ("dl", "s.dl"), ("e_p", "s.e_p")],
    },
    Spec {
        name: "spring_fixed",
        topic: "mechanics",
        fidelity: Fidelity::Corrected,
        symbols: &[("D", "D"), ("k", "s.k"), ("l0", "s.l0"), ("l", "s.l"), ("dl", "s.dl"), ("e_p", "s.e_p")],
    },
    Spec {
        name: "bouncing_ball",
        topic: "impacts and discrete assignment",
        fidelity: Fidelity::Corrected,
        symbols: &[
            ("D", "D"),
            ("m", "m.m"),
            ("p", "m.p"),
            ("f", "m.f"),
            ("e_k", "m.e_k"),
            ("bk", "bk"),
            ("bp", "bp"),
            ("bt", "bt"),
        ],
    },
    Spec {
        name: "example_3",
        topic: "composition",
        fidelity: Fidelity::Corrected,
        symbols: &[
            ("D", "D"),
            ("p", "m1.p"),
            ("f", "m1.f"),
            ("e_k", "m1.e_k"),
            ("k", "s1.k"),
            ("l0", "s1.l0"),
            ("dl", "s1.dl"),
            ("e_p", "s1.e_p"),
        ],
    },
    Spec {
        name: "controlled_example_3",
        topic: "control",
        fidelity: Fidelity::DerivedFromProse,
        symbols: &[
            ("D", "D"),
            ("k_p", "c.k_p"),
            ("k_d", "c.k_d"),
            ("g", "c.g"),
            ("v", "c.v"),
            ("s", "c.s"),
            ("f", "c.f"),
            ("l", "s1.l"),
        ],
    },
    Spec {
        name: "force_controller_p",
        topic: "control",
        fidelity: Fidelity::Verbatim,
        symbols: &[("k_p", "k_p"), ("g", "g"), ("v", "v"), ("f", "f")],
    },
    Spec {
        name: "force_controller_pd",
        topic: "control",
        fidelity: Fidelity::Verbatim,
        symbols: &[("k_p", "k_p"), ("k_d", "k_d"), ("g", "g"), ("v", "v"), ("s", "s"), ("f", "f")],
    },
    Spec {
        name: "force_controller_pid",
        topic: "control",
        fidelity: Fidelity::Verbatim,
        symbols: &[
            ("k_p", "k_p"),
            ("k_i", "k_i"),
            ("k_d", "k_d"),
            ("g", "g"),
            ("v", "v"),
            ("s", "s"),
            ("f", "f"),
            ("i", "i"),
        ],
    },
    Spec {
        name: "force_disturbance",
        topic: "disturbances",
        fidelity: Fidelity::Verbatim,
        symbols: &[("k", "k"), ("t", "t"), ("f", "f")],
    },
    Spec {
        name: "rod",
        topic: "rigid body dynamics",
        fidelity: Fidelity::Verbatim,
        symbols: &[
            ("D", "D"),
            ("m", "rod.m"),
            ("length", "rod.length"),
            ("p", "rod.p"),
            ("q", "rod.q"),
            ("sp", "rod.sp"),
            ("sq", "rod.sq"),
            ("axis", "rod.axis"),
            ("core", "rod.core"),
            ("fp", "rod.fp"),
            ("fq", "rod.fq"),
            ("fp_axis", "rod.fp_axis"),
            ("fp_orth", "rod.fp_orth"),
            ("fq_axis", "rod.fq_axis"),
            ("fq_orth", "rod.fq_orth"),
        ],
    },
    Spec {
        name: "dumbbell",
        topic: "rigid body dynamics",
        fidelity: Fidelity::DerivedFromProse,
        symbols: &[("D", "D"), ("p", "p"), ("q", "q")],
    },
    Spec {
        name: "force_controller_pid_d",
        topic: "discretization and quantization",
        fidelity: Fidelity::Verbatim,
        symbols: &[
            ("k_p", "k_p"),
            ("k_i", "k_i"),
            ("k_d", "k_d"),
            ("period", "period"),
            ("t", "t"),
            ("g", "g"),
            ("v", "v"),
            ("s", "s"),
            ("f", "f"),
            ("i", "i"),
        ],
    },
    Spec {
        name: "quantizer",
        topic: "discretization and quantization",
        fidelity: Fidelity::DerivedFromProse,
        symbols: &[("x", "x"), ("q", "q")],
    },
];

/// One fixture, read and parsed.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub path: PathBuf,
    pub topic: &'static str,
    pub fidelity: Fidelity,
    /// Deviation or addition named in the fixture header.
    pub note: Option<String>,
    /// Class to run by default: the last one in the file.
    pub root: String,
    /// Default root arguments, in expression syntax.
    pub args: String,
    /// Model symbols and the trace paths that hold them, relative to the root.
    pub symbols: &'static [(&'static str, &'static str)],
    pub source: String,
    pub classes: Vec<ClassDef>,
}

impl CorpusEntry {
    pub fn model(&self) -> Result<Model, EngineError> {
        Model::new(self.classes.clone())
    }

    /// The default root arguments as values.
    pub fn root_args(&self) -> Result<Vec<Value>, CorpusError> {
        parse_args(&self.args).map_err(|message| CorpusError::Header { path: self.path.clone(), message })
    }

    pub fn symbol(&self, name: &str) -> Option<&'static str> {
        self.symbols.iter().find(|(s, _)| *s == name).map(|(_, p)| *p)
    }
}

/// Evaluates a comma-separated list of constant expressions.
pub fn parse_args(text: &str) -> Result<Vec<Value>, String> {
    let tokens = lex(text).map_err(|e| e.to_string())?;
    let exprs = parse_expr_list(&tokens).map_err(|e| e.to_string())?;
    exprs.iter().map(|e| eval_const(e).map_err(|e| e.to_string())).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{source}", .path.display())]
    Parse { path: PathBuf, source: SyntaxError },
    #[error("{}: {message}", .path.display())]
    Header { path: PathBuf, message: String },
    #[error("unknown corpus entry `{0}`")]
    Unknown(String),
    #[error("{0}")]
    Domain(String),
}

/// Directory holding the bundled fixtures.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Names of all catalogued fixtures.
pub fn corpus_names() -> impl Iterator<Item = &'static str> {
    SPECS.iter().map(|s| s.name)
}

/// Reads and parses every bundled fixture.
pub fn load_corpus() -> Result<Vec<CorpusEntry>, CorpusError> {
    load_corpus_from(&corpus_dir())
}

/// Reads and parses every catalogued fixture from `dir`.
pub fn load_corpus_from(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    SPECS.iter().map(|spec| load_spec(dir, spec)).collect()
}

/// Reads and parses one bundled fixture.
pub fn load_entry(name: &str) -> Result<CorpusEntry, CorpusError> {
    let spec = SPECS.iter().find(|s| s.name == name).ok_or_else(|| CorpusError::Unknown(name.into()))?;
    load_spec(&corpus_dir(), spec)
}

fn load_spec(dir: &Path, spec: &Spec) -> Result<CorpusEntry, CorpusError> {
    let path = dir.join(format!("{}.acm", spec.name));
    let source = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
    let header = read_header(&source);
    let bad = |message: String| CorpusError::Header { path: path.clone(), message };
    match header.fidelity.as_deref().map(Fidelity::parse) {
        Some(Some(f)) if f == spec.fidelity => {}
        Some(Some(f)) => return Err(bad(format!("header says {f}, catalog says {}", spec.fidelity))),
        Some(None) | None => return Err(bad("missing or unknown fidelity line".into())),
    }
    if header.topic.as_deref() != Some(spec.topic) {
        return Err(bad(format!("header topic does not match `{}`", spec.topic)));
    }
    if spec.fidelity == Fidelity::Corrected && header.note.is_none() {
        return Err(bad("corrected fixture without a note".into()));
    }
    let classes = parse(&source).map_err(|source| CorpusError::Parse { path: path.clone(), source })?;
    let root = classes.last().map(|c| c.name.clone()).ok_or_else(|| bad("no classes".into()))?;
    Ok(CorpusEntry {
        name: spec.name,
        path,
        topic: spec.topic,
        fidelity: spec.fidelity,
        note: header.note,
        root,
        args: header.args.unwrap_or_default(),
        symbols: spec.symbols,
        source,
        classes,
    })
}

/// `// key: value` lines from the comment block that opens a model file.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ModelHeader {
    pub topic: Option<String>,
    pub fidelity: Option<String>,
    /// Default root arguments.
    pub args: Option<String>,
    pub note: Option<String>,
}

/// Reads the leading comment block of a model file. A note may continue over
/// the comment lines that follow it.
pub fn read_header(source: &str) -> ModelHeader {
    let mut h = ModelHeader::default();
    let mut in_note = false;
    for line in source.lines() {
        let Some(text) = line.trim().strip_prefix("//") else { break };
        let text = text.trim();
        let key = |k: &str, slot: &mut Option<String>| match text.strip_prefix(k) {
            Some(v) => {
                *slot = Some(v.trim().to_string());
                true
            }
            None => false,
        };
        if key("topic:", &mut h.topic) || key("fidelity:", &mut h.fidelity) || key("args:", &mut h.args) {
            in_note = false;
        } else if key("note:", &mut h.note) {
            in_note = true;
        } else if in_note {
            let note = h.note.get_or_insert_with(String::new);
            note.push(' ');
            note.push_str(text);
        }
    }
    h
}

type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn div(a: Vec3, k: f64) -> Vec3 {
    [a[0] / k, a[1] / k, a[2] / k]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Accelerations of the rod's core and axis under end forces `fp` and `fq`:
///
/// ```text
/// f_axis = dot(f, axis) * axis / norm(axis),  f_orth = f - f_axis
/// core'' = (fp + fq) / m
/// axis'' = 2 * (fp_orth - fq_orth) / (m * length)
/// ```
pub fn rod_reference(fp: Vec3, fq: Vec3, m: f64, axis: Vec3, length: f64) -> Result<(Vec3, Vec3), CorpusError> {
    if m == 0.0 {
        return Err(CorpusError::Domain("rod mass must be nonzero".into()));
    }
    if length == 0.0 {
        return Err(CorpusError::Domain("rod length must be nonzero".into()));
    }
    let n = dot(axis, axis).sqrt();
    if n == 0.0 {
        return Err(CorpusError::Domain("rod axis must be nonzero".into()));
    }
    let orth = |f: Vec3| sub(f, div(scale(axis, dot(f, axis)), n));
    let core = div(add(fp, fq), m);
    let axis_acc = div(scale(sub(orth(fp), orth(fq)), 2.0), m * length);
    Ok((core, axis_acc))
}

/// The largest multiple of `quantum` not above `v`.
pub fn quantize(v: f64, quantum: f64) -> Result<f64, CorpusError> {
    if quantum.is_nan() || quantum <= 0.0 {
        return Err(CorpusError::Domain(format!("quantum must be positive, got {quantum}")));
    }
    Ok((v / quantum).floor() * quantum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rod_cases() {
        let (c, a) = rod_reference([0., 0., 1.], [0., 0., 1.], 2.0, [1., 0., 0.], 1.0).unwrap();
        assert_eq!((c, a), ([0., 0., 1.], [0., 0., 0.]));
        let (c, a) = rod_reference([0., 0., 1.], [0., 0., -1.], 2.0, [1., 0., 0.], 1.0).unwrap();
        assert_eq!((c, a), ([0., 0., 0.], [0., 0., 2.]));
        let (c, a) = rod_reference([0.; 3], [0.; 3], 2.0, [0., 1., 0.], 1.0).unwrap();
        assert_eq!((c, a), ([0.; 3], [0.; 3]));
        assert!(rod_reference([0.; 3], [0.; 3], 0.0, [1., 0., 0.], 1.0).is_err());
        assert!(rod_reference([0.; 3], [0.; 3], 1.0, [1., 0., 0.], 0.0).is_err());
    }

    #[test]
    fn quantize_floors() {
        assert_eq!(quantize(1.26, 0.5).unwrap(), 1.0);
        assert_eq!(quantize(-0.1, 0.5).unwrap(), -0.5);
        assert!(quantize(1.0, 0.0).is_err());
        assert!(quantize(1.0, -1.0).is_err());
    }

    #[test]
    fn header_note_spans_lines() {
        let h = read_header(
            "// x: y\n// topic: t\n// fidelity: corrected\n// note: a\n// b\n// args: 1, 2\nclass c () end\n// note: z",
        );
        assert_eq!(h.topic.as_deref(), Some("t"));
        assert_eq!(h.args.as_deref(), Some("1, 2"));
        assert_eq!(h.fidelity.as_deref(), Some("corrected"));
        assert_eq!(h.note.as_deref(), Some("a b"));
    }
}
