from pcodesync.phase import TWO_PI
from pcodesync.plots import plot_deltas, plot_index, plot_phases, render_report_figures
from pcodesync.runner import run_scenario
from pcodesync.scenario import PhaseGenerator, ScenarioConfig, StopCondition


def small_run(seed=0, n=5):
    config = ScenarioConfig(
        n=n,
        l=0.85,
        omega=TWO_PI,
        initial_phases=PhaseGenerator(name="uniform_random"),
        seed=seed,
        stop=StopCondition(max_events=200 * n, p_threshold=1e-6),
    )
    return run_scenario(config)


def test_individual_figures(tmp_path):
    result = small_run()
    for plot, name in [
        (plot_phases, "phases.png"),
        (plot_deltas, "deltas.png"),
        (plot_index, "index.png"),
    ]:
        path = tmp_path / name
        plot(result, path)
        assert path.stat().st_size > 0


def test_render_report_figures(tmp_path):
    result = small_run(seed=3)
    paths = render_report_figures(result, tmp_path / "figs")
    assert [p.name for p in paths] == ["phases.png", "deltas.png", "index.png"]
    assert all(p.exists() for p in paths)


def test_handles_collision_traces(tmp_path):
    config = ScenarioConfig(
        n=3,
        l=0.85,
        omega=TWO_PI,
        initial_phases=PhaseGenerator(name="all_equal", value=1.5),
        seed=1,
        stop=StopCondition(max_events=2000, p_threshold=1e-3),
    )
    result = run_scenario(config)
    paths = render_report_figures(result, tmp_path)
    assert all(p.stat().st_size > 0 for p in paths)
