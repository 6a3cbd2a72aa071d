"""Trace CSV serialization (bit-exact contract) and re-ingestion."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .slag_curves import CurveTrace

TN_COLUMNS = ("t", "r", "theta", "phi", "psi", "re_u", "im_u", "re_z", "im_z",
              "omega_res", "imOmega_res", "mu")
AH_COLUMNS = ("t", "k", "theta", "phi", "psi", "re_U", "im_U", "re_Z", "im_Z",
              "omega_res", "imOmega_res", "mu")


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def trace_to_csv(trace: CurveTrace, manifold: str) -> str:
    """Render a verified trace; floats carry 17 significant digits."""
    if trace.residuals is None:
        raise DomainError("trace_to_csv needs a verified trace (residuals set)")
    res = trace.residuals
    params = ";".join(f"{k}={v:.17g}" for k, v in sorted(trace.params.items()))
    header = f"# slag-forge v1, manifold={manifold}, params={params}"
    m = len(trace.t)
    if manifold == "tn":
        cols = TN_COLUMNS
        u = res.get("u")
        z = res.get("z")
        re_u = np.real(u) if u is not None else np.full(m, math.nan)
        im_u = np.imag(u) if u is not None else np.full(m, math.nan)
        re_z = np.real(z) if z is not None else np.zeros(m)
        im_z = np.imag(z) if z is not None else np.zeros(m)
        table = [trace.t, trace.cols["r"], trace.cols["theta"], trace.cols["phi"],
                 trace.cols["psi"], re_u, im_u, re_z, im_z,
                 res["omega"], res["im_omega"], res["mu"]]
    elif manifold == "ah":
        cols = AH_COLUMNS
        U, Z = res["U"], res["Z"]
        table = [trace.t, trace.cols["k"], trace.cols["theta"], trace.cols["phi"],
                 trace.cols["psi"], np.real(U), np.imag(U), np.real(Z), np.imag(Z),
                 res["omega"], res["im_omega"], res["mu"]]
    else:
        raise DomainError(f"manifold must be 'tn' or 'ah', got {manifold!r}")
    lines = [header, ",".join(cols)]
    for i in range(m):
        lines.append(",".join(_fmt(float(col[i])) for col in table))
    return "\n".join(lines) + "\n"


def write_trace_csv(path: str | Path, trace: CurveTrace, manifold: str) -> None:
    Path(path).write_text(trace_to_csv(trace, manifold))


def read_trace_csv(path: str | Path) -> tuple[CurveTrace, str]:
    """Rebuild a CurveTrace (chart columns and params) from a written CSV."""
    lines = Path(path).read_text().strip().split("\n")
    head = lines[0]
    if not head.startswith("# slag-forge v1, manifold="):
        raise DomainError(f"not a slag-forge trace CSV: {head!r}")
    manifold = head.split("manifold=")[1].split(",")[0]
    params = {}
    pstr = head.split("params=", 1)[1]
    if pstr:
        for item in pstr.split(";"):
            key, val = item.split("=")
            params[key] = float(val)
    names = lines[1].split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[2:]])
    cols = {name: data[:, i] for i, name in enumerate(names)}
    chart_keys = ("r", "theta", "phi", "psi") if manifold == "tn" \
        else ("k", "theta", "phi", "psi")
    action = "u1" if manifold == "tn" and ("c2" in params or "c" in params) else "so2"
    trace = CurveTrace(
        chart="tn-spherical" if manifold == "tn" else "ah-spherical",
        action=action, t=cols["t"],
        cols={k: cols[k] for k in chart_keys}, params=params, tag="reingested")
    return trace, manifold
