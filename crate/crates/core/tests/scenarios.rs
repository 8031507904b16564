use siri_core::diagnostics::monitor_invariants;
use siri_core::integrator::{hermite, integrate};
use siri_core::scenario::{
    execute, run_scenario, HistorySpec, Preset, RunSummary, ScenarioConfig, CSV_HEADER,
};
use siri_core::{HistoryFunction, KernelFamily};

fn preset(p: Preset, step: f64, t_end: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(p);
    cfg.run.step = step;
    cfg.run.t_end = t_end;
    cfg
}

#[test]
fn reruns_are_bit_identical() {
    let cfg = preset(Preset::Fig2, 0.05, 20.0);
    let a = execute(&cfg).unwrap();
    let b = execute(&cfg).unwrap();
    assert_eq!(a.trajectory.len(), b.trajectory.len());
    for (x, y) in a.trajectory.samples().iter().zip(b.trajectory.samples()) {
        assert_eq!(x.state.s.to_bits(), y.state.s.to_bits());
        assert_eq!(x.state.i.to_bits(), y.state.i.to_bits());
        assert_eq!(x.state.r.to_bits(), y.state.r.to_bits());
    }
    assert_eq!(a.summary, b.summary);
}

#[test]
fn written_files_match_schema() {
    let dir = tempfile::tempdir().unwrap();
    for (p, w_filled) in [(Preset::Fig1, true), (Preset::Fig2, false)] {
        let cfg = preset(p, 0.05, 10.0);
        let (run, out) = run_scenario(&cfg, Some(dir.path())).unwrap();
        let out = out.unwrap();

        let mut rdr = csv::Reader::from_path(&out.trajectory_csv).unwrap();
        let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, CSV_HEADER);
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), (10.0f64 / 0.05).floor() as usize + 1);
        for row in &rows {
            assert_eq!(!row[5].is_empty(), w_filled);
            assert_eq!(row[6].is_empty(), w_filled);
            let n: f64 = row[4].parse().unwrap();
            let total: f64 = (1..4).map(|k| row[k].parse::<f64>().unwrap()).sum();
            assert!((n - total).abs() <= 1e-12 * n);
        }

        let text = std::fs::read_to_string(&out.summary).unwrap();
        let back = RunSummary::parse(&text).unwrap();
        assert_eq!(back, run.summary);
        assert_eq!(back.exit_code(), 0);
    }
}

#[test]
fn config_survives_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::preset(Preset::Fig2);
    cfg.kernel.family = KernelFamily::Uniform;
    cfg.incidence.family = "saturated".into();
    cfg.incidence.saturation = 0.125;
    let path = dir.path().join("run.conf");
    std::fs::write(&path, cfg.to_text()).unwrap();
    assert_eq!(ScenarioConfig::load(&path).unwrap(), cfg);
}

#[test]
fn dfe_functional_decreases_across_checkpoints() {
    let run = execute(&preset(Preset::Fig1, 0.05, 200.0)).unwrap();
    let certs = run.certificates.unwrap();
    let w = certs.w_values.unwrap();
    let at = |t: f64| w[run.trajectory.index_of(t).unwrap()].unwrap();
    let checkpoints: Vec<f64> = [0.0, 50.0, 100.0, 150.0, 200.0].iter().map(|&t| at(t)).collect();
    assert!(checkpoints.windows(2).all(|p| p[1] <= p[0]), "{checkpoints:?}");
    assert!(checkpoints.iter().all(|&v| v >= 0.0));
}

#[test]
fn swapped_initial_histories_reach_the_same_limits() {
    let mut low = preset(Preset::Fig1, 0.05, 200.0);
    low.history = HistorySpec::Preset(Preset::Fig2);
    let run = execute(&low).unwrap();
    let end = run.trajectory.final_state();
    assert!(run.report.endemic.is_none());
    assert!((end.s - run.report.e0.s).abs() < 1e-3 * run.report.e0.s);
    assert!(end.i < 1e-3 && end.r < 1e-3);
    assert!(run.summary.certificate_monotone.unwrap());

    let mut high = preset(Preset::Fig2, 0.05, 200.0);
    high.history = HistorySpec::Preset(Preset::Fig1);
    let run = execute(&high).unwrap();
    let end = run.trajectory.final_state();
    let e = run.report.endemic.unwrap();
    for (got, want) in [(end.s, e.s), (end.i, e.i), (end.r, e.r)] {
        assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
    }
    assert!(run.summary.certificate_monotone.unwrap());
}

#[test]
fn saturated_uniform_variant_keeps_certificate_and_invariants() {
    let mut cfg = preset(Preset::Fig2, 0.05, 60.0);
    cfg.kernel.family = KernelFamily::Uniform;
    cfg.incidence.family = "saturated".into();
    cfg.incidence.saturation = 0.2;
    let run = execute(&cfg).unwrap();
    assert!(run.report.endemic.is_some());
    assert!(run.violations.is_empty());
    assert!(run.summary.certificate_monotone.unwrap());
    assert_eq!(run.summary.exit_code(), 0);
}

#[test]
fn coarse_runs_stay_positive_and_bounded() {
    for p in [Preset::Fig1, Preset::Fig2] {
        let mut cfg = preset(p, 0.05, 100.0);
        cfg.checks.certificates = false;
        let run = execute(&cfg).unwrap();
        assert!(monitor_invariants(&cfg.params, &run.trajectory).is_empty());
        assert_eq!(run.trajectory.clamp_events(), 0);
        assert!(run.trajectory.samples().iter().all(|x| x.state.is_non_negative()));
    }
}

#[test]
fn interpolation_uses_history_before_start() {
    let cfg = preset(Preset::Fig1, 0.05, 5.0);
    let model = cfg.build_model().unwrap();
    let hist = HistoryFunction::fig1();
    let traj = integrate(&model, &hist, 5.0, 0.05).unwrap();

    let t = traj.t_start() - model.kernel.h() / 2.0;
    let got = traj.interpolate(&hist, t).unwrap();
    assert_eq!(got.s, hist.s(t));
    assert_eq!(got.i, hist.i(t));
    assert_eq!(got.i, (-10.0f64).sin() + 20.0);

    let (a, b) = (&traj.samples()[7], &traj.samples()[8]);
    let mid = traj.interpolate(&hist, (a.state.t + b.state.t) / 2.0).unwrap();
    let want = (a.state.i + b.state.i) / 2.0 + 0.05 * (a.deriv.di - b.deriv.di) / 8.0;
    assert!((mid.i - want).abs() < 1e-13);
    assert!((hermite(a.state.i, a.deriv.di, b.state.i, b.deriv.di, 0.05, 0.5) - want).abs() < 1e-13);
    assert!(traj.interpolate(&hist, 5.5).is_err());
}

#[test]
fn solver_is_second_order_on_a_second_configuration() {
    let mut cfg = preset(Preset::Fig1, 0.05, 10.0);
    cfg.kernel.family = KernelFamily::Uniform;
    cfg.incidence.family = "saturated".into();
    cfg.incidence.saturation = 0.3;
    let hist = HistoryFunction::fig2();
    let final_at = |step: f64| {
        let mut c = cfg.clone();
        c.run.step = step;
        integrate(&c.build_model().unwrap(), &hist, 10.0, step).unwrap().final_state()
    };
    let reference = final_at(0.003125);
    let err = |step: f64| {
        let x = final_at(step);
        [x.s - reference.s, x.i - reference.i, x.r - reference.r]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()))
    };
    let order = (err(0.05) / err(0.025)).log2();
    assert!(order >= 1.9, "observed order {order}");
}
