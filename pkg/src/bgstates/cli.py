"""Batch command-line front end.

    bgstates SUBCOMMAND key=value [key=value ...]

Subcommands:
    state-single     q=0.9|classical alpha=0.8 k=1 N=50
    state-bipartite  q=0.9 a1=0.3 a2=0.5 k1=1 k2=1 delta=1 N=50
                     [N2=...] [perturb=0.01 seed=7]
    verify-moments   mode=classical|q [q=0.95] k=1 nmax=3
    sweep-q          from=0.999 to=0.5 steps=12 a1=0.3 a2=0.5 k1=1 k2=1
                     delta=1 N=50
    g-oracle         q=0.7 a1=0.3 a2=0.5 k1=1 k2=1 delta=0.9 nmax=12

Common keys: out=FILE (default stdout), format=json|csv (default json).
Floats are serialized with 17 significant digits, lowercase scientific;
complex numbers as [re, im] pairs.  Exit codes: 0 success, 2 invalid
configuration (the diagnostic names the violated precondition), 3 numerical
failure (the diagnostic names the failing series).
"""

from __future__ import annotations

import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bipartite as bp
from . import costate as cs
from . import measure as me
from .errors import DomainError, SeriesConvergenceError, TruncationError
from .qspecial import CLASSICAL, QParam
from .repalg import DeformationMap, LadderOperator, apply_ladder

__all__ = ["main", "RunConfig", "run", "load_state_json"]

_COMMANDS = ("state-single", "state-bipartite", "verify-moments", "sweep-q", "g-oracle")


def _fmt(x: float) -> str:
    return f"{float(x):.16e}"


def _jf(x) -> float:
    # floats round-trip exactly through repr; keep native float in JSON
    return float(x)


def _jc(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class RunConfig:
    command: str
    params: dict
    out: Optional[str] = None
    fmt: str = "json"
    seed: int = 0


def _parse_argv(argv) -> RunConfig:
    if not argv:
        raise DomainError("missing subcommand; expected one of " + ", ".join(_COMMANDS))
    command = argv[0]
    if command in ("-h", "--help", "help"):
        print(__doc__)
        raise SystemExit(0)
    if command not in _COMMANDS:
        raise DomainError(f"unknown subcommand {command!r}; expected one of "
                          + ", ".join(_COMMANDS))
    params = {}
    for tok in argv[1:]:
        if "=" not in tok:
            raise DomainError(f"arguments must be key=value pairs, got {tok!r}")
        key, _, val = tok.partition("=")
        params[key.strip()] = val.strip()
    out = params.pop("out", None)
    fmt = params.pop("format", "json")
    if fmt not in ("json", "csv"):
        raise DomainError(f"format must be json or csv, got {fmt!r}")
    seed = int(params.pop("seed", "0"))
    return RunConfig(command=command, params=params, out=out, fmt=fmt, seed=seed)


def _need(params: dict, key: str) -> str:
    if key not in params:
        raise DomainError(f"missing required parameter {key}=")
    return params[key]


def _as_complex(s: str) -> complex:
    try:
        return complex(s)
    except ValueError:
        raise DomainError(f"cannot parse complex number from {s!r}")


def _as_q(s: str) -> QParam:
    if s == "classical":
        return CLASSICAL
    q = float(s)
    return QParam(q) if q < 1.0 else QParam.for_crossing(q)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _run_state_single(cfg: RunConfig) -> dict:
    p = cfg.params
    q = _as_q(_need(p, "q"))
    alpha = _as_complex(_need(p, "alpha"))
    k = float(_need(p, "k"))
    n = int(_need(p, "N"))
    if q.is_classical:
        state = cs.build_f_coherent(alpha, k, DeformationMap.classical(), n)
    else:
        state = cs.build_q_coherent(alpha, k, q, n)
    km = LadderOperator("K-", state.deformation, k, n)
    lowered = apply_ladder(km, state).coeffs
    if alpha == 0:
        residual = float(np.linalg.norm(lowered))
    else:
        residual = float(np.linalg.norm(lowered - alpha * state.coeffs)) / abs(alpha)
    return {
        "command": "state-single",
        "params": {"q": None if q.is_classical else q.value,
                   "alpha": _jc(alpha), "k": k, "N": n},
        "coefficients": [_jc(c) for c in state.coeffs],
        "residual": _jf(residual),
        "norm_before_truncation": _jf(state.norm_before_truncation),
    }


def _bipartite_from_params(p: dict):
    q = _as_q(_need(p, "q"))
    a1 = _as_complex(_need(p, "a1"))
    a2 = _as_complex(_need(p, "a2"))
    k1 = float(_need(p, "k1"))
    k2 = float(_need(p, "k2"))
    n1 = int(_need(p, "N"))
    n2 = int(p.get("N2", n1))
    delta = float(p.get("delta", "1"))
    return q, a1, a2, k1, k2, n1, n2, delta


def _state_bipartite_payload(M, params_block: dict) -> dict:
    spec = bp.schmidt_entropy(M)
    interior, edge = bp.eigen_residual_parts(M)
    return {
        "command": "state-bipartite",
        "params": params_block,
        "coefficients": [[_jc(z) for z in row] for row in np.asarray(M.coeffs)],
        "schmidt": {
            "singular_values": [_jf(s) for s in spec.singular_values],
            "entropy": _jf(spec.entropy),
            "rank_eps": spec.rank_eps,
        },
        "residual_interior": _jf(interior),
        "residual_edge": _jf(edge),
    }


def _run_state_bipartite(cfg: RunConfig) -> dict:
    q, a1, a2, k1, k2, n1, n2, delta = _bipartite_from_params(cfg.params)
    if q.is_classical:
        M = bp.classical_bipartite(a1, a2, k1, k2, n1, n2)
    else:
        params = bp.BipartiteParams(a1, a2, k1, k2, q)
        M = bp.build_q_bipartite(params, bp.BoundarySequence.geometric(delta), n1, n2)
    payload = _state_bipartite_payload(M, {
        "q": None if q.is_classical else q.value,
        "a1": _jc(a1), "a2": _jc(a2), "k1": k1, "k2": k2,
        "delta": delta, "N1": n1, "N2": n2,
    })
    if not q.is_classical:
        ns = bp.norm_series(M.params if q.value < 1 else M.params.swapped_inverse_q(),
                            delta)
        raw = _raw_double_sum(M.params, M.boundary, n1, n2)
        payload["norm_series_value"] = _jf(ns)
        payload["norm_double_sum"] = _jf(raw)
        payload["norm_rel_err"] = _jf(abs(ns - raw) / abs(raw))
    if "perturb" in cfg.params:
        eps = float(cfg.params["perturb"])
        rng = np.random.default_rng(cfg.seed)
        noise = rng.standard_normal(M.coeffs.shape) + 1j * rng.standard_normal(M.coeffs.shape)
        noisy = M.coeffs + eps * noise / np.linalg.norm(noise)
        noisy /= np.linalg.norm(noisy)
        M2 = bp.BipartiteMatrix(coeffs=noisy, params=M.params, boundary=M.boundary,
                                normalized=True)
        payload["perturbed_residual"] = _jf(bp.eigen_residual(M2))
        payload["perturb"] = eps
        payload["seed"] = cfg.seed
    return payload


def _raw_double_sum(params, boundary, n1, n2) -> float:
    """Unnormalized sum of |c|^2 on a block large enough to be converged."""
    from .bipartite import _single_node_prefactors, solve_g_recurrence
    if params.q.value > 1.0:
        params, boundary = bp.crossing_transform(params, boundary)
        n1, n2 = n2, n1
    g = solve_g_recurrence(boundary, params, n1, n2)
    p1 = _single_node_prefactors(params.alpha1, params.k1, params.q, n1)
    p2 = _single_node_prefactors(params.alpha2, params.k2, params.q, n2)
    c = p1[:, None] * p2[None, :] * g
    return float(np.sum(np.abs(c) ** 2))


def _run_verify_moments(cfg: RunConfig) -> dict:
    p = cfg.params
    mode = _need(p, "mode")
    k = float(_need(p, "k"))
    nmax = int(_need(p, "nmax"))
    if mode == "classical":
        report = me.moment_check(nmax, k, "classical")
    elif mode == "q":
        report = me.moment_check(nmax, k, QParam(float(_need(p, "q"))))
    else:
        raise DomainError(f"mode must be classical or q, got {mode!r}")
    return {
        "command": "verify-moments",
        "params": {"mode": report.mode, "k": report.k, "q": report.q, "nmax": nmax},
        "records": [{"n": r.n, "lhs": _jf(r.lhs), "rhs": _jf(r.rhs),
                     "rel_err": _jf(r.rel_err)} for r in report.records],
        "lower_cutoff": _jf(report.lower_cutoff),
        "upper_cutoff": _jf(report.upper_cutoff),
        "node_count": report.node_count,
        "tail_estimate": _jf(report.tail_estimate),
        "tail_bound_residual": _jf(report.tail_bound_residual),
        "max_rel_err": _jf(report.max_rel_err),
    }


def _run_sweep_q(cfg: RunConfig) -> dict:
    p = cfg.params
    q_from = float(_need(p, "from"))
    q_to = float(_need(p, "to"))
    steps = int(p.get("steps", "12"))
    a1 = _as_complex(_need(p, "a1"))
    a2 = _as_complex(_need(p, "a2"))
    k1 = float(_need(p, "k1"))
    k2 = float(_need(p, "k2"))
    n = int(_need(p, "N"))
    delta_spec = p.get("delta", "1")
    classical = bp.classical_bipartite(a1, a2, k1, k2, n, n)
    rows = []
    for q in np.linspace(q_from, q_to, steps):
        qv = float(q)
        params = bp.BipartiteParams(a1, a2, k1, k2, QParam(qv))
        delta = qv ** float(delta_spec[2:]) if delta_spec.startswith("q^") \
            else float(delta_spec)
        M = bp.build_q_bipartite(params, bp.BoundarySequence.geometric(delta), n, n)
        spec = bp.schmidt_entropy(M)
        rows.append({
            "q": qv,
            "delta": delta,
            "entropy": _jf(spec.entropy),
            "sigma2": _jf(spec.singular_values[1]),
            "fidelity_classical": _jf(bp.fidelity(classical, M)),
            "residual_interior": _jf(bp.eigen_residual(M)),
        })
    return {
        "command": "sweep-q",
        "params": {"from": q_from, "to": q_to, "steps": steps, "a1": _jc(a1),
                   "a2": _jc(a2), "k1": k1, "k2": k2, "delta": delta_spec, "N": n},
        "rows": rows,
    }


def _run_g_oracle(cfg: RunConfig) -> dict:
    p = cfg.params
    q = QParam(float(_need(p, "q")))
    a1 = _as_complex(_need(p, "a1"))
    a2 = _as_complex(_need(p, "a2"))
    k1 = float(_need(p, "k1"))
    k2 = float(_need(p, "k2"))
    delta = float(p.get("delta", "1"))
    nmax = int(p.get("nmax", "12"))
    params = bp.BipartiteParams(a1, a2, k1, k2, q)
    boundary = bp.BoundarySequence.geometric(delta)
    g = bp.solve_g_recurrence(boundary, params, nmax, nmax)
    rows = []
    worst_ansatz = 0.0
    worst_closed = 0.0
    for nn in range(nmax + 1):
        for mm in range(nmax + 1):
            ga = bp.g_ansatz_eval(nn, mm, boundary, params)
            gc = bp.g_closed_geometric(nn, mm, delta, params)
            ref = abs(g[nn, mm])
            ra = abs(ga - g[nn, mm]) / ref
            rc = abs(gc - g[nn, mm]) / ref
            worst_ansatz = max(worst_ansatz, ra)
            worst_closed = max(worst_closed, rc)
            rows.append({"n": nn, "m": mm, "g": _jc(g[nn, mm]),
                         "rel_ansatz": _jf(ra), "rel_closed": _jf(rc)})
    return {
        "command": "g-oracle",
        "params": {"q": q.value, "a1": _jc(a1), "a2": _jc(a2), "k1": k1,
                   "k2": k2, "delta": delta, "nmax": nmax},
        "max_rel_recurrence_vs_ansatz": _jf(worst_ansatz),
        "max_rel_recurrence_vs_closed": _jf(worst_closed),
        "rows": rows,
    }


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def _to_csv(payload: dict) -> str:
    buf = io.StringIO()
    rows = payload.get("rows") or payload.get("records")
    if rows:
        cols = list(rows[0].keys())
        buf.write(",".join(cols) + "\n")
        for row in rows:
            cells = []
            for col in cols:
                v = row[col]
                if isinstance(v, float):
                    cells.append(_fmt(v))
                elif isinstance(v, list):
                    cells.append(_fmt(v[0]) + "+" + _fmt(v[1]) + "j")
                else:
                    cells.append(str(v))
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()
    if "coefficients" in payload:
        # state payloads: the coefficient table is the data; JSON carries the
        # full metadata
        coeffs = payload["coefficients"]
        if coeffs and isinstance(coeffs[0][0], list):     # bipartite matrix
            buf.write("n1,n2,re,im\n")
            for n1, row in enumerate(coeffs):
                for n2, (re, im) in enumerate(row):
                    buf.write(f"{n1},{n2},{_fmt(re)},{_fmt(im)}\n")
        else:
            buf.write("n,re,im\n")
            for n, (re, im) in enumerate(coeffs):
                buf.write(f"{n},{_fmt(re)},{_fmt(im)}\n")
        return buf.getvalue()
    # scalar payloads: two-column key,value dump in fixed insertion order
    buf.write("key,value\n")
    for key, val in payload.items():
        if isinstance(val, (dict, list)):
            continue
        buf.write(f"{key},{_fmt(val) if isinstance(val, float) else val}\n")
    return buf.getvalue()


def _emit(payload: dict, cfg: RunConfig) -> None:
    if cfg.fmt == "json":
        text = json.dumps(payload, indent=2)
    else:
        text = _to_csv(payload)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def load_state_json(path: str):
    """Rebuild a BipartiteMatrix from a state-bipartite JSON artifact."""
    with open(path) as fh:
        data = json.load(fh)
    if data.get("command") != "state-bipartite":
        raise DomainError(f"{path} is not a state-bipartite artifact")
    p = data["params"]
    coeffs = np.array([[complex(re, im) for re, im in row]
                       for row in data["coefficients"]])
    qv = p["q"]
    q = CLASSICAL if qv is None else (QParam(qv) if qv < 1 else QParam.for_crossing(qv))
    params = bp.BipartiteParams(complex(*p["a1"]), complex(*p["a2"]),
                                p["k1"], p["k2"], q)
    boundary = bp.BoundarySequence.geometric(p["delta"])
    return bp.BipartiteMatrix(coeffs=coeffs, params=params, boundary=boundary,
                              normalized=True), data


_RUNNERS = {
    "state-single": _run_state_single,
    "state-bipartite": _run_state_bipartite,
    "verify-moments": _run_verify_moments,
    "sweep-q": _run_sweep_q,
    "g-oracle": _run_g_oracle,
}


def run(cfg: RunConfig) -> dict:
    """Execute a parsed configuration and return the payload dict."""
    return _RUNNERS[cfg.command](cfg)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = _parse_argv(argv)
        payload = run(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DomainError, TruncationError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (SeriesConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    _emit(payload, cfg)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
