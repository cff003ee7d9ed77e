use acumen_core::check::check_model;
use acumen_core::corpus::{load_corpus, load_entry, quantize, Fidelity};
use acumen_core::engine::trace::TraceRecorder;
use acumen_core::engine::{instantiate_root, simulate, SimConfig};
use acumen_core::scene::SceneRecorder;
use acumen_core::syntax::{parse, pretty_print};
use acumen_core::Value;

fn one_second() -> SimConfig {
    SimConfig { end_time: 1.0, ..SimConfig::default() }
}

#[test]
fn catalog_is_complete() {
    let names: Vec<_> = load_corpus().unwrap().iter().map(|e| e.name).collect();
    for required in [
        "sphere",
        "moving_sphere",
        "display_bar",
        "cylinder",
        "mass_1d",
        "mass",
        "spring",
        "spring_fixed",
        "bouncing_ball",
        "example_3",
        "controlled_example_3",
        "force_controller_p",
        "force_controller_pd",
        "force_controller_pid",
        "force_disturbance",
        "rod",
        "dumbbell",
        "force_controller_pid_d",
        "quantizer",
    ] {
        assert!(names.contains(&required), "missing {required}");
    }
}

#[test]
fn corrected_entries_carry_notes() {
    for e in load_corpus().unwrap() {
        if e.fidelity == Fidelity::Corrected {
            assert!(e.note.as_deref().is_some_and(|n| !n.is_empty()), "{}", e.name);
        }
    }
    let ball = load_entry("bouncing_ball").unwrap();
    assert_eq!(ball.fidelity, Fidelity::Corrected);
    assert_eq!(load_entry("spring").unwrap().fidelity, Fidelity::Verbatim);
    assert_eq!(load_entry("rod").unwrap().symbol("fp_orth"), Some("rod.fp_orth"));
}

#[test]
fn every_entry_round_trips() {
    for e in load_corpus().unwrap() {
        let printed = pretty_print(&e.classes);
        let reparsed = parse(&printed).unwrap_or_else(|err| panic!("{}: {err}\n{printed}", e.name));
        assert_eq!(reparsed, e.classes, "{}", e.name);
    }
}

#[test]
fn every_entry_checks_clean() {
    for e in load_corpus().unwrap() {
        let diags = check_model(&e.classes);
        assert!(diags.is_empty(), "{}: {diags:?}", e.name);
    }
}

#[test]
fn every_entry_simulates_one_second() {
    for e in load_corpus().unwrap() {
        let model = e.model().unwrap();
        let mut trace = TraceRecorder::new();
        let mut scene = SceneRecorder::default();
        let (_, stats) = simulate(&model, &e.root, e.root_args().unwrap(), one_second(), &mut [&mut trace, &mut scene])
            .unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert_eq!(stats.frames, 65, "{}", e.name);
        assert_eq!(trace.frames.len(), scene.frames.len());
    }
}

#[test]
fn symbols_resolve_to_trace_paths() {
    for e in load_corpus().unwrap() {
        let model = e.model().unwrap();
        let store = instantiate_root(&model, &e.root, e.root_args().unwrap()).unwrap();
        for (sym, path) in e.symbols {
            assert!(store.lookup(path).is_some(), "{}: {sym} -> {path}", e.name);
        }
    }
}

#[test]
fn mass_1d_instance() {
    let e = load_entry("mass_1d").unwrap();
    let model = e.model().unwrap();
    let store = instantiate_root(&model, "mass_1d", e.root_args().unwrap()).unwrap();
    assert_eq!(store.len(), 2);
    for (path, v) in [("p", 3.0), ("p'", 0.0), ("p''", 0.0), ("f", 0.0), ("e_k", 0.0)] {
        assert_eq!(store.lookup(path), Some(Value::Real(v)), "{path}");
    }
    assert!(store.lookup("s._3D").is_some());
}

#[test]
fn bouncing_ball_instance() {
    let e = load_entry("bouncing_ball").unwrap();
    let model = e.model().unwrap();
    let store = instantiate_root(&model, "bouncing_ball", e.root_args().unwrap()).unwrap();
    let root = store.get(store.root()).unwrap();
    let classes: Vec<_> = root.children.iter().map(|&c| store.get(c).unwrap().class.as_str()).collect();
    assert_eq!(classes, ["mass_1d", "display_bar", "display_bar", "display_bar"]);
    assert_eq!(store.len(), 6);
}

#[test]
fn moving_sphere_clock_is_exact() {
    let e = load_entry("moving_sphere").unwrap();
    let model = e.model().unwrap();
    let (store, _) = simulate(&model, "moving_sphere", e.root_args().unwrap(), one_second(), &mut []).unwrap();
    assert_eq!(store.lookup_real("t"), Some(5.0));
}

#[test]
fn disturbance_is_bounded() {
    let e = load_entry("force_disturbance").unwrap();
    let model = e.model().unwrap();
    for k in [1.0, -2.5] {
        let mut trace = TraceRecorder::new();
        let config = SimConfig { end_time: 10.0, ..SimConfig::default() };
        simulate(&model, "force_disturbance", vec![Value::Real(k)], config, &mut [&mut trace]).unwrap();
        for f in &trace.frames {
            let n: f64 = (0..3).map(|i| f.real(&format!("f[{i}]")).unwrap().powi(2)).sum::<f64>().sqrt();
            assert!(n <= k.abs() * 3f64.sqrt(), "t={} |f|={n}", f.time);
        }
    }
}

#[test]
fn quantizer_changes_only_at_boundaries() {
    let e = load_entry("quantizer").unwrap();
    let model = e.model().unwrap();
    let quantum = 0.3;
    let mut trace = TraceRecorder::new();
    let config = SimConfig { end_time: 3.0, ..SimConfig::default() };
    simulate(&model, "quantizer", vec![Value::Real(quantum), Value::Real(1.0)], config, &mut [&mut trace]).unwrap();
    let mut changes = 0;
    for pair in trace.frames.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (qa, qb) = (a.real("q").unwrap(), b.real("q").unwrap());
        let x = b.real("x").unwrap();
        assert_eq!(qb, quantize(x, quantum).unwrap(), "t={}", b.time);
        let crossed = quantize(a.real("x").unwrap(), quantum).unwrap() != quantize(x, quantum).unwrap();
        assert_eq!(qa != qb, crossed, "t={}", b.time);
        changes += usize::from(qa != qb);
    }
    assert_eq!(changes, 10);
}
