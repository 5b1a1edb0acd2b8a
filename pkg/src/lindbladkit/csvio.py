"""Deterministic CSV rendering for trajectories, optimizer histories and matrices.

All numbers are written with 17 significant digits and "\n" line endings so
identical runs produce byte-identical files on any platform.
"""

from __future__ import annotations

import numpy as np

from .optimize import OptResult
from .propagation import IntegratorConfig, Trajectory


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _validation_header(integ: IntegratorConfig) -> str:
    return (
        f"# validation: trace_tol={fmt(integ.trace_tol)}, "
        f"herm_tol={fmt(integ.herm_tol)}, positivity_tol={fmt(integ.positivity_tol)}\n"
    )


def trajectory_csv(traj: Trajectory, integ: IntegratorConfig, time_unit: float = 1.0) -> str:
    """Full-state trajectory: t, re/im of every entry (row-major), purity, entropy."""
    n = traj.states[0].dim
    cols = ["t"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            cols.append(f"re_rho_{i}{j}")
            cols.append(f"im_rho_{i}{j}")
    cols += ["purity_deficit", "renyi_entropy"]
    lines = [f"# time unit: {fmt(time_unit)}\n", _validation_header(integ), ",".join(cols) + "\n"]
    for k, t in enumerate(traj.times):
        flat = traj.states[k].entries.reshape(-1)
        row = [fmt(t / time_unit)]
        for z in flat:
            row.append(fmt(z.real))
            row.append(fmt(z.imag))
        row.append(fmt(traj.purity_deficits[k]))
        row.append(fmt(traj.renyi_entropies[k]))
        lines.append(",".join(row) + "\n")
    return "".join(lines)


def populations_csv(
    traj: Trajectory, integ: IntegratorConfig, labels, time_unit: float = 1.0
) -> str:
    """Population/entropy trajectory, one column per level label."""
    cols = ["t"] + [f"pop_{lab}" for lab in labels] + ["purity_deficit", "renyi_entropy"]
    lines = [f"# time unit: {fmt(time_unit)}\n", _validation_header(integ), ",".join(cols) + "\n"]
    for k, t in enumerate(traj.times):
        row = [fmt(t / time_unit)]
        row += [fmt(p) for p in traj.populations[k]]
        row.append(fmt(traj.purity_deficits[k]))
        row.append(fmt(traj.renyi_entropies[k]))
        lines.append(",".join(row) + "\n")
    return "".join(lines)


def history_csv(result: OptResult) -> str:
    """Complete optimizer evaluation history."""
    names = list(result.history[0][0]) if result.history else []
    lines = ["evaluation," + ",".join(names) + ",objective\n"]
    for k, (params, value) in enumerate(result.history, start=1):
        row = [str(k)] + [fmt(params[name]) for name in names] + [fmt(value)]
        lines.append(",".join(row) + "\n")
    return "".join(lines)


def summary_csv(summary: dict) -> str:
    """One-row record of scalar summary values (nested entries flattened)."""
    flat: dict[str, float | int | bool | str] = {}
    for key, value in summary.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                flat[f"{key}_{sub}"] = v
        elif isinstance(value, list):
            for i, v in enumerate(value, start=1):
                flat[f"{key}_{i}"] = v
        else:
            flat[key] = value
    cells = [fmt(v) if isinstance(v, float) else str(v) for v in flat.values()]
    return ",".join(flat) + "\n" + ",".join(cells) + "\n"


def matrix_csv(mat: np.ndarray, name: str) -> str:
    """Dense complex matrix as re/im pairs, for superoperator inspection."""
    mat = np.asarray(mat, dtype=complex)
    lines = [f"# {name}: {mat.shape[0]}x{mat.shape[1]} complex, cells re|im\n"]
    for row in mat:
        cells = [f"{fmt(z.real)}|{fmt(z.imag)}" for z in row]
        lines.append(",".join(cells) + "\n")
    return "".join(lines)
