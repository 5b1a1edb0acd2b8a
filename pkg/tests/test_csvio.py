import numpy as np

from lindbladkit.csvio import fmt, history_csv, matrix_csv, populations_csv, summary_csv, trajectory_csv
from lindbladkit.optimize import FreeParameter, minimize_recorded
from lindbladkit.propagation import IntegratorConfig, Trajectory
from lindbladkit.states import DensityMatrix


def test_fmt_17_significant_digits():
    assert fmt(1 / 3) == "0.33333333333333331"
    assert fmt(1.0) == "1"
    assert fmt(6.283185307179586) == "6.2831853071795862"


def simple_trajectory():
    states = [
        DensityMatrix(np.diag([1.0, 0.0])),
        DensityMatrix([[0.5, 0.25j], [-0.25j, 0.5]]),
    ]
    return Trajectory.from_states([0.0, 2.0], states)


def test_trajectory_csv_layout():
    text = trajectory_csv(simple_trajectory(), IntegratorConfig(), time_unit=2.0)
    lines = text.splitlines()
    assert lines[0].startswith("# time unit: 2")
    assert lines[1].startswith("# validation: trace_tol=")
    assert lines[2] == (
        "t,re_rho_11,im_rho_11,re_rho_12,im_rho_12,re_rho_21,im_rho_21,"
        "re_rho_22,im_rho_22,purity_deficit,renyi_entropy"
    )
    first = lines[3].split(",")
    assert first[0] == "0"
    assert first[1] == "1"
    # second sample at t = 2 reported in units of the period
    assert lines[4].split(",")[0] == "1"
    assert lines[4].split(",")[4] == "0.25"  # im rho_12
    assert text.endswith("\n")


def test_populations_csv_layout():
    text = populations_csv(simple_trajectory(), IntegratorConfig(), labels=(1, 2))
    lines = text.splitlines()
    assert lines[2] == "t,pop_1,pop_2,purity_deficit,renyi_entropy"
    assert lines[3].split(",")[1] == "1"


def test_history_csv_matches_recorded_evaluations():
    result = minimize_recorded(
        lambda p: (p["area"] - 0.5) ** 2, [FreeParameter("area", 0.0, 1.0)], budget=7
    )
    lines = history_csv(result).splitlines()
    assert lines[0] == "evaluation,area,objective"
    assert len(lines) == result.evaluations + 1
    assert lines[1].startswith("1,")


def test_matrix_csv_cells():
    text = matrix_csv(np.array([[1.0, -1.0j], [0.0, 0.5 + 0.5j]]), "L")
    lines = text.splitlines()
    assert lines[0] == "# L: 2x2 complex, cells re|im"
    assert lines[1] == "1|0,0|-1"
    assert lines[2] == "0|0,0.5|0.5"


def test_summary_csv_flattens_nested_values():
    text = summary_csv({"best_value": 0.25, "best_params": {"area": 1.5}, "final_populations": [0.5, 0.5]})
    header, row = text.splitlines()
    assert header == "best_value,best_params_area,final_populations_1,final_populations_2"
    assert row == "0.25,1.5,0.5,0.5"
