use pathtrace::tasks::{evaluate, tmss_entanglement, tmss_target_state};
use pathtrace::tracer::{detect_critical_time, multi_path_frontier, trace_paths, uniform_grid};
use pathtrace::{
    propagate_protocol, symplectic_eigenvalues, thermal_state, MomentMatrix, Protocol, SearchConfig, TaskKind,
    TaskSpec,
};

#[test]
fn stored_protocol_reproduces_its_error() {
    let task = TaskSpec::swap2(5);
    let grid = uniform_grid(0.4, 0.3, 3);
    let config = SearchConfig { max_iterations: 300, ..SearchConfig::default() };
    let paths: Vec<_> = trace_paths(&task, &grid, &config, 2).into_iter().map(|p| p.unwrap()).collect();
    let frontier = multi_path_frontier(&paths).unwrap();
    let best = &frontier.points[0];

    let json = serde_json::to_string(&task.protocol(&best.params, best.duration).unwrap()).unwrap();
    let back: Protocol = serde_json::from_str(&json).unwrap();
    let (c, _) = propagate_protocol(task.initial_state(), &back, task.network(), false).unwrap();
    assert_eq!(task.error(&c).unwrap(), best.error);
    assert_eq!(evaluate(&task, back.as_parameter_vector(), back.duration()).unwrap(), best.error);
    assert!(detect_critical_time(&frontier, 1.0).is_some());
}

#[test]
fn zero_protocol_leaves_thermal_spectrum_alone() {
    for kind in [TaskKind::Swap2, TaskKind::Transfer3, TaskKind::Tmss3] {
        let network = kind.default_network();
        let occupations = kind.initial_occupations();
        let c0 = thermal_state(&network, &occupations).unwrap();
        let protocol = Protocol::zeros(1.0, network.n_controls(), kind.default_segments()).unwrap();
        let (c, trajectory) = propagate_protocol(&c0, &protocol, &network, true).unwrap();
        assert_eq!(trajectory.unwrap().len(), kind.default_segments() + 1);
        let nu = symplectic_eigenvalues(&c).unwrap();
        let mut expected: Vec<f64> = occupations.iter().map(|n| n + 0.5).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in nu.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn free_evolution_over_whole_periods_is_identity() {
    let task = TaskSpec::transfer3(10);
    let protocol = Protocol::zeros(3.0, 2, 10).unwrap();
    let (c, _) = propagate_protocol(task.initial_state(), &protocol, task.network(), false).unwrap();
    let diff = (c.entries() - task.initial_state().entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12, "{diff}");
}

#[test]
fn tmss_target_and_entanglement() {
    let target = tmss_target_state(2.0);
    let task = TaskSpec::tmss3(2.0, 10).unwrap();
    let padded = MomentMatrix::two_mode_squeezed(3, 0, 2, 2.0);
    assert_eq!(padded.n_modes(), 3);
    assert_eq!(task.squeezing(), Some(2.0));
    assert!(target.commutator_defect() < 1e-12);
    assert!((tmss_entanglement(2.0).unwrap() - 5.2).abs() < 0.05);
}
