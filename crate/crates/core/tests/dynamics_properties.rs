use reachflow::dynamics::{max_stable_tau, projected_step, sample_initial, InitialSpec};
use reachflow::experiments::{csv, figure_scenarios, Figure};
use reachflow::geometry::sample_bean_boundary;
use reachflow::wasserstein::w2_assignment;
use reachflow::{run, Domain, ParticleState, Point, Potential, Scheme, SchemeConfig, StepSize, Stopping};

fn circle() -> Domain {
    Domain::circle(Point::new2(0.0, 0.0), 1.0).unwrap()
}

fn on_circle(n: usize, seed: u64) -> ParticleState {
    let spec = InitialSpec::ProjectedPerturbedGrid {
        lower: vec![-1.0, -1.0],
        upper: vec![1.0, 1.0],
        counts: vec![n, 2],
        jitter: 0.2,
    };
    sample_initial(&spec, &circle(), seed).unwrap()
}

#[test]
fn projected_runs_stay_on_the_domain() {
    let bean = Domain::polyline(sample_bean_boundary(1024, 0.04).unwrap());
    let cases = [
        (circle(), Potential::Quadratic, on_circle(10, 1)),
        (
            bean.clone(),
            Potential::InverseQuadratic { sign: -1.0, scale: 1.0 },
            figure_scenarios(Figure::Fig5)[0].prepare().unwrap().1,
        ),
    ];
    for (domain, w, start) in cases {
        let cfg = SchemeConfig {
            scheme: Scheme::Projected,
            stopping: Stopping::FixedTime { t: 2.0 },
            ..SchemeConfig::default()
        };
        let trace = run(&cfg, &domain, &w, &start).unwrap();
        assert!(trace.termination.is_success());
        let worst = trace.records.iter().map(|r| r.mean_sq_dist).fold(0.0, f64::max);
        assert!(worst <= 1e-18, "{worst}");
    }
}

#[test]
fn one_step_local_error_bound() {
    let domain = circle();
    let w = Potential::Quadratic;
    let tau = max_stable_tau(&domain, &w);
    let start = on_circle(12, 3);
    let coarse = projected_step(&start, &w, &domain, tau).unwrap();
    let mut fine = start.clone();
    for _ in 0..128 {
        fine = projected_step(&fine, &w, &domain, tau / 128.0).unwrap();
    }
    let error = w2_assignment(&coarse.positions, &fine.positions).unwrap();
    let r = 4.0;
    let (g, h) = (w.grad_bound(r), w.hessian_bound(r));
    let bound = 2.0 * h * g * tau * tau * (6.0 * g * tau / domain.reach()).exp();
    assert!(error > 0.0 && error <= bound, "{error} vs {bound}");
}

#[test]
fn penalised_runs_decrease_the_energy() {
    for scenario in figure_scenarios(Figure::Fig2) {
        let trace = scenario.run().unwrap().trace;
        assert!(trace.records.windows(2).all(|w| w[1].energy <= w[0].energy + 1e-12));
        assert_eq!(trace.energy_increases, 0);
    }
}

#[test]
fn traces_do_not_depend_on_thread_count() {
    let mut scenario = figure_scenarios(Figure::Fig5).remove(0);
    scenario.config.stopping = Stopping::FixedTime { t: 1.0 };
    let traces: Vec<String> = [1, 4, 3]
        .iter()
        .map(|&workers| {
            scenario.config.workers = workers;
            let trace = scenario.run().unwrap().trace;
            csv::trace_csv(&trace.records) + &csv::snapshots_csv(&trace.snapshots)
        })
        .collect();
    assert_eq!(traces[0], traces[1]);
    assert_eq!(traces[0], traces[2]);
}

#[test]
fn auto_step_respects_the_reach_bound() {
    let bean = Domain::region(sample_bean_boundary(1024, 0.05).unwrap()).unwrap();
    let w = Potential::InverseQuadratic { sign: 1.0, scale: 1.0 };
    let start = figure_scenarios(Figure::Fig4)[0].prepare().unwrap().1;
    let cfg = SchemeConfig {
        scheme: Scheme::Projected,
        tau: StepSize::Auto,
        stopping: Stopping::FixedTime { t: 0.1 },
        ..SchemeConfig::default()
    };
    let trace = run(&cfg, &bean, &w, &start).unwrap();
    assert!(trace.tau <= max_stable_tau(&bean, &w));
    assert!((max_stable_tau(&bean, &w) - 9.62e-3).abs() < 1e-5);
}
