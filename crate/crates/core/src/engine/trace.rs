//! Per-step variable traces in CSV and JSON Lines form.

use std::collections::BTreeSet;
use std::io::Write;

use super::sim::{Observer, ObserverError};
use super::store::ObjectStore;
use crate::values::{flatten_into, Scalar, Value};

/// Scalarized values of every live variable at one instant, sorted by path.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFrame {
    pub time: f64,
    pub vars: Vec<(String, Scalar)>,
}

impl TraceFrame {
    /// Snapshot of `store`. Object references are omitted; the fields of the
    /// referenced objects appear under their own paths.
    pub fn capture(time: f64, store: &ObjectStore) -> TraceFrame {
        let mut vars = Vec::new();
        for id in store.traverse() {
            let Ok(obj) = store.get(id) else { continue };
            let prefix = store.path_of(id);
            for (field, value) in &obj.fields {
                if matches!(value, Value::Obj(_)) {
                    continue;
                }
                let path = if prefix.is_empty() { field.to_string() } else { format!("{prefix}.{field}") };
                flatten_into(value, &path, &mut vars);
            }
        }
        vars.sort_by(|a, b| a.0.cmp(&b.0));
        TraceFrame { time, vars }
    }

    pub fn get(&self, path: &str) -> Option<&Scalar> {
        self.vars.binary_search_by(|(p, _)| p.as_str().cmp(path)).ok().map(|i| &self.vars[i].1)
    }

    pub fn real(&self, path: &str) -> Option<f64> {
        match self.get(path)? {
            Scalar::Real(x) => Some(*x),
            _ => None,
        }
    }

    fn retain(&mut self, filter: &VarFilter) {
        self.vars.retain(|(p, _)| filter.matches(p));
    }
}

/// Formats a real with 17 significant digits in the style of C's `%.17g`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Selects trace paths with shell-style patterns: `*` matches any run of
/// characters and `?` exactly one. Nothing else is special.
#[derive(Debug, Clone, Default)]
pub struct VarFilter {
    patterns: Vec<String>,
}

impl VarFilter {
    /// Comma-separated patterns. An empty list matches everything.
    pub fn parse(spec: &str) -> VarFilter {
        VarFilter { patterns: spec.split(',').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect() }
    }

    pub fn matches(&self, path: &str) -> bool {
        self.patterns.is_empty() || self.patterns.iter().any(|p| glob(p.as_bytes(), path.as_bytes()))
    }
}

fn glob(pattern: &[u8], text: &[u8]) -> bool {
    let (mut p, mut t) = (0, 0);
    let mut backtrack: Option<(usize, usize)> = None;
    while t < text.len() {
        match pattern.get(p) {
            Some(b'*') => {
                backtrack = Some((p, t));
                p += 1;
            }
            Some(&c) if c == b'?' || c == text[t] => {
                p += 1;
                t += 1;
            }
            _ => match backtrack {
                Some((bp, bt)) => {
                    p = bp + 1;
                    t = bt + 1;
                    backtrack = Some((bp, bt + 1));
                }
                None => return false,
            },
        }
    }
    pattern[p..].iter().all(|&c| c == b'*')
}

/// Keeps every frame in memory.
#[derive(Debug, Default)]
pub struct TraceRecorder {
    pub frames: Vec<TraceFrame>,
    filter: VarFilter,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_filter(filter: VarFilter) -> Self {
        TraceRecorder { frames: Vec::new(), filter }
    }

    /// Values of one path across all frames that contain it.
    pub fn series(&self, path: &str) -> Vec<(f64, f64)> {
        self.frames.iter().filter_map(|f| Some((f.time, f.real(path)?))).collect()
    }
}

impl Observer for TraceRecorder {
    fn observe(&mut self, time: f64, store: &ObjectStore) -> Result<(), ObserverError> {
        let mut frame = TraceFrame::capture(time, store);
        frame.retain(&self.filter);
        self.frames.push(frame);
        Ok(())
    }
}

/// CSV trace. The header is the union of all paths seen during the run, so
/// frames are buffered until [`Observer::finish`]. Cells of variables that do
/// not exist at a given time are empty.
pub struct CsvTraceWriter<W: Write> {
    out: W,
    recorder: TraceRecorder,
}

impl<W: Write> CsvTraceWriter<W> {
    pub fn new(out: W, filter: VarFilter) -> Self {
        CsvTraceWriter { out, recorder: TraceRecorder::with_filter(filter) }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Writes `frames` as CSV with a `time` column first.
pub fn write_csv<W: Write>(out: W, frames: &[TraceFrame]) -> Result<(), csv::Error> {
    let columns: BTreeSet<&str> = frames.iter().flat_map(|f| f.vars.iter().map(|(p, _)| p.as_str())).collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("time").chain(columns.iter().copied()))?;
    for frame in frames {
        let mut row = Vec::with_capacity(columns.len() + 1);
        row.push(format_real(frame.time));
        let mut vars = frame.vars.iter().peekable();
        for col in &columns {
            let cell = match vars.peek() {
                Some((p, v)) if p == col => {
                    let cell = scalar_cell(v);
                    vars.next();
                    cell
                }
                _ => String::new(),
            };
            row.push(cell);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn scalar_cell(v: &Scalar) -> String {
    match v {
        Scalar::Real(x) => format_real(*x),
        Scalar::Str(s) => s.clone(),
        Scalar::Bool(b) => b.to_string(),
    }
}

impl<W: Write> Observer for CsvTraceWriter<W> {
    fn observe(&mut self, time: f64, store: &ObjectStore) -> Result<(), ObserverError> {
        self.recorder.observe(time, store)
    }

    fn finish(&mut self) -> Result<(), ObserverError> {
        write_csv(&mut self.out, &self.recorder.frames)?;
        self.recorder.frames.clear();
        Ok(())
    }
}

/// JSON Lines trace: one `{"time": t, "vars": {path: value}}` object per
/// frame, keys sorted. Non-finite reals are written as `null`.
pub struct JsonlTraceWriter<W: Write> {
    out: W,
    filter: VarFilter,
}

impl<W: Write> JsonlTraceWriter<W> {
    pub fn new(out: W, filter: VarFilter) -> Self {
        JsonlTraceWriter { out, filter }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// One frame as a JSON object.
pub fn frame_to_json(frame: &TraceFrame) -> serde_json::Value {
    let vars: serde_json::Map<String, serde_json::Value> = frame
        .vars
        .iter()
        .map(|(p, v)| {
            let v = match v {
                Scalar::Real(x) => serde_json::Value::from(*x),
                Scalar::Str(s) => serde_json::Value::from(s.clone()),
                Scalar::Bool(b) => serde_json::Value::from(*b),
            };
            (p.clone(), v)
        })
        .collect();
    serde_json::json!({ "time": frame.time, "vars": vars })
}

impl<W: Write> Observer for JsonlTraceWriter<W> {
    fn observe(&mut self, time: f64, store: &ObjectStore) -> Result<(), ObserverError> {
        let mut frame = TraceFrame::capture(time, store);
        frame.retain(&self.filter);
        serde_json::to_writer(&mut self.out, &frame_to_json(&frame))?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    fn finish(&mut self) -> Result<(), ObserverError> {
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_real(0.1), "0.10000000000000001");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-2.5), "-2.5");
        assert_eq!(format_real(1e20), "1e+20");
        assert_eq!(format_real(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(format_real(0.0001), "0.0001");
        assert_eq!(format_real(123456.0), "123456");
        for x in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 9.81] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn globs() {
        let f = VarFilter::parse("m.p*, s?.l");
        assert!(f.matches("m.p"));
        assert!(f.matches("m.p'[2]"));
        assert!(f.matches("s1.l"));
        assert!(!f.matches("s12.l"));
        assert!(!f.matches("m.f"));
        assert!(VarFilter::parse("").matches("anything"));
        assert!(VarFilter::parse("*[0]").matches("a.b[0]"));
        assert!(!VarFilter::parse("*[0]").matches("a.b[1]"));
    }
}
