import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from padeadi.adi import BoundarySpec, SourceSpec
from padeadi.errors import ConfigurationError, NumericalDivergence
from padeadi.grid import Grid3D, WaveState
from padeadi.harness import (ConvergenceReport, ConvergenceRow, convergence_order,
                             convergence_study, max_norm_error, run_simulation, step_count)
from padeadi.problems import ProblemCase, builtin_example

PI = math.pi


def test_convergence_order_examples():
    assert convergence_order(16, 1, 0.2, 0.1) == pytest.approx(4.0, abs=1e-14)
    # ln(4.3196e-4 / 5.4662e-5) / ln(1.6)
    assert convergence_order(4.3196e-04, 5.4662e-05, PI / 10, PI / 16) == pytest.approx(4.39819, abs=1e-5)
    # halving rows of the simultaneous-refinement table: 19.6094 -> 4.2934
    assert convergence_order(4.0768e-04, 2.0790e-05, PI / 10, PI / 20) == pytest.approx(4.2934, abs=1e-4)
    assert convergence_order(2.5, 2.5, 0.3, 0.1) == 0.0


@pytest.mark.parametrize("args", [(0, 1, 0.2, 0.1), (1, -1, 0.2, 0.1), (1, 1, 0, 0.1), (1, 2, 0.1, 0.1)])
def test_convergence_order_rejects_bad_input(args):
    with pytest.raises(ValueError):
        convergence_order(*args)


@given(st.floats(1e-12, 1e3), st.floats(1e-12, 1e3), st.floats(1e-6, 1e6),
       st.floats(1e-3, 1.0), st.floats(1.1, 4.0))
def test_convergence_order_scale_invariant(e1, e2, k, h2, r):
    base = convergence_order(e1, e2, h2 * r, h2)
    assert convergence_order(k * e1, k * e2, h2 * r, h2) == pytest.approx(base, abs=1e-12)


def test_max_norm_error_identity_and_offset():
    g = Grid3D(5, 6, 7, 0.25, 0.25, 0.25)
    exact = lambda x, y, z, t: np.sin(x + y) * np.cos(z) + t  # noqa: E731
    from padeadi.grid import sample
    u = sample(exact, g, 0.5)
    s = WaveState(g, u, u.copy(), 2, 0.25)
    assert max_norm_error(s, exact) == 0.0
    s.u_curr[0, 0, 0] += 1e-3  # boundary node counts
    assert max_norm_error(s, exact, 0.5) == pytest.approx(1e-3, rel=1e-9)
    s.u_curr = u + 0.125
    assert max_norm_error(s, exact) == pytest.approx(0.125, rel=1e-12)


def zero_case(T=0.5):
    zero = lambda x, y, z: 0 * x  # noqa: E731
    return ProblemCase("zero", (0, 1) * 3, lambda x, y, z: 1 + 0 * x, SourceSpec.none(),
                       BoundarySpec.zero(), zero, zero, lambda x, y, z, t: 0 * x, T=T)


@pytest.mark.parametrize("scheme", ["adi4", "explicit2"])
def test_zero_problem_runs_to_zero(scheme):
    res = run_simulation(zero_case(), 0.125, 0.025, scheme)
    assert res.steps == 20 and res.error == 0.0 and not res.diverged
    assert not np.any(res.state.u_curr) and res.state.t == pytest.approx(0.5)
    assert res.wall_time >= 0


def test_mesh_and_period_preconditions():
    with pytest.raises(ConfigurationError, match="integer multiple"):
        run_simulation(zero_case(), 0.3, 0.025)
    with pytest.raises(ConfigurationError, match="divide"):
        run_simulation(zero_case(), 0.125, 0.03)
    with pytest.raises(ConfigurationError):
        run_simulation(zero_case(), 0.125, 0.025, scheme="rk4")
    assert step_count(1.0, 1 / 3) == 3


def test_cfl_violation_needs_override():
    case = builtin_example(2)
    with pytest.raises(ConfigurationError, match="CFL"):
        run_simulation(case, PI / 16, 0.2)


def test_override_reports_divergence_instead_of_raising():
    case = dataclasses.replace(builtin_example(1), T=5.0)
    with pytest.raises(ConfigurationError):
        run_simulation(case, PI / 10, 0.25)
    res = run_simulation(case, PI / 10, 0.25, override=True)
    assert res.diverged and math.isinf(res.error) and "diverged" in res.note
    assert res.steps < 20


def test_runaway_solution_without_override_raises():
    # a tiny guard turns an ordinary run into a "runaway" one
    with pytest.raises(NumericalDivergence):
        run_simulation(builtin_example(1), PI / 10, 0.0625, guard=1e-6)


def test_example1_reference_configuration_fast_row():
    res = run_simulation(builtin_example(1), PI / 10, 1 / 16)
    assert res.error == pytest.approx(4.0768e-04, rel=0.5)


def test_callback_sees_every_step():
    seen = []
    run_simulation(zero_case(0.1), 0.125, 0.025, callback=lambda s: seen.append(s.step))
    assert seen == [1, 2, 3, 4]


def test_convergence_study_rows_and_rendering():
    case = builtin_example(1)
    rep = convergence_study(case, [(PI / 20, 1 / 32), (PI / 10, 1 / 16)])
    assert [r.h for r in rep.rows] == [PI / 10, PI / 20]
    assert rep.rows[0].ratio is None and rep.rows[0].order is None
    assert rep.rows[1].ratio == pytest.approx(rep.rows[0].error / rep.rows[1].error)
    text = rep.to_text()
    assert "(pi/10, 1/16)" in text and "Conv. Order" in text
    lines = rep.to_csv().splitlines()
    assert lines[0] == "h,tau,error,ratio,order,wall_time,note" and len(lines) == 3


def test_single_row_study_has_no_ratio():
    rep = convergence_study(builtin_example(1), [(PI / 10, 1 / 16)])
    assert len(rep.rows) == 1 and rep.rows[0].ratio is None
    assert rep.to_csv().splitlines()[1].split(",")[3:5] == ["", ""]


def test_failing_run_annotates_row():
    case = builtin_example(2)
    rep = convergence_study(case, [(PI / 16, 1 / 20), (PI / 16, 0.2)])
    bad = [r for r in rep.rows if r.tau == 0.2][0]
    assert math.isinf(bad.error) and "CFL" in bad.note
    assert "note" in rep.to_text()


def test_report_text_fallback_formats():
    rep = ConvergenceReport([ConvergenceRow(0.3, 0.07, 1e-3), ConvergenceRow(0.15, 0.035, math.inf)])
    text = rep.to_text()
    assert "0.3" in text and "inf" in text
