"""Single-node Barut-Girardello coherent states.

A state |alpha, k>_f is the K- eigenstate with eigenvalue alpha, expanded
over the truncated carrier basis.  Three constructions are provided and
cross-checked in the tests: the coefficient recurrence

    c_{n+1} = alpha / (f(n+k+1) sqrt((n+1)(n+2k))) * c_n,

the explicit q-factorial form, and the operator exponential

    c_0 exp(alpha f(K0)^{-2} K+ (K0+k)^{-1}) |0,k>.

Normalization is the direct partial sum of the coefficient series; for the
classical and q kinds the Bessel closed forms |alpha|^{2k-1} / I_{2k-1} and
its q-analog are evaluated as well and must agree, which turns the
normalization constant into a test surface rather than a trusted input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .qspecial import (CLASSICAL, DEFAULT_CONTROL, QParam, SeriesControl,
                       _bessel_i_series, q_factorial, q_number)
from .repalg import DeformationMap, check_bargmann, lowering_elements

__all__ = [
    "LadderState",
    "build_f_coherent",
    "build_q_coherent",
    "build_by_operator_series",
    "normalization_series",
    "TAIL_MASS_LIMIT",
]

# dropped tail mass must stay below this fraction of the total
TAIL_MASS_LIMIT = 1e-14


@dataclass(frozen=True)
class LadderState:
    """Truncated coefficient vector over |n,k>, n = 0..N.

    ``norm_before_truncation`` is the partial sum of |c_n|^2 in the raw
    c_0 = 1 scale, i.e. the normalization series of the construction;
    ``truncation_loss`` is the squared weight most recently dropped past the
    top level (zero for freshly built states).
    """

    coeffs: np.ndarray
    k: float
    alpha: complex
    deformation: DeformationMap
    norm_before_truncation: float
    truncation_loss: float = 0.0

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def normalization_series(rho, k: float, deformation: DeformationMap,
                         control: SeriesControl = DEFAULT_CONTROL):
    """The normalization sum  S(rho^2) = sum_n rho^{2n} / (([f(n+k)]!)^2 n! Gamma(n+2k)).

    This is N_f^{-2} up to convergence of the infinite sum; the completeness
    quadratures consume exactly this function so that measure checks exercise
    the same series the state construction uses.  Vectorised over rho >= 0.
    """
    k = check_bargmann(k)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("normalization_series requires rho >= 0")
    term = np.full_like(rho, 1.0 / math.gamma(2 * k))
    total = term.copy()
    rho2 = rho * rho
    below = 0
    for n in range(control.max_terms):
        denom = (n + 1) * (n + 2 * k) * deformation.value(n + 1 + k, k) ** 2
        term = term * rho2 / denom
        total += term
        if np.all(term <= control.rel_tol * total):
            below += 1
            if below >= 2:
                return total
        else:
            below = 0
    raise TruncationError("normalization series did not converge")


def _ratio_denominators(deformation: DeformationMap, k: float, N: int) -> np.ndarray:
    """e[n] = f(n+k) sqrt(n(n+2k-1)) for n = 1..N+1 (the recurrence divisors)."""
    return lowering_elements(deformation, k, N + 2)


def _check_tail(coeffs: np.ndarray, alpha: complex, e_next: float, total: float):
    """Ratio-test bound on the dropped tail mass: with r = |alpha|/e[N+1] the
    dropped sum is below |c_N|^2 r^2/(1-r^2) provided the ratios keep
    shrinking (they do for the classical and q maps)."""
    if alpha == 0:
        return 0.0
    r = abs(alpha) / e_next
    tail = math.inf if r >= 1.0 else abs(coeffs[-1]) ** 2 * r * r / (1.0 - r * r)
    if not tail <= TAIL_MASS_LIMIT * total:
        raise TruncationError(
            f"truncation insufficient: estimated tail mass {tail:.3e} exceeds "
            f"{TAIL_MASS_LIMIT:.0e} of the total {total:.3e}; increase N")
    return tail


def _finish(raw: np.ndarray, k, alpha, deformation, e_next) -> LadderState:
    total = float(math.fsum(np.abs(raw) ** 2))
    _check_tail(raw, alpha, e_next, total)
    return LadderState(
        coeffs=raw / math.sqrt(total),
        k=float(k),
        alpha=complex(alpha),
        deformation=deformation,
        norm_before_truncation=total,
    )


def _crosscheck_bessel_norm(state: LadderState, control: SeriesControl):
    """Normalization redundancy: partial sum vs Bessel closed form."""
    alpha, k = state.alpha, state.k
    if alpha == 0:
        return
    rho = abs(alpha)
    dmap = state.deformation
    nu = 2 * k - 1
    closed = None
    if float(nu).is_integer():
        if dmap.kind == "classical":
            closed = math.gamma(2 * k) * rho ** -nu * float(
                _bessel_i_series(int(nu), rho, CLASSICAL, control))
        elif dmap.kind == "q":
            closed = q_factorial(int(nu), dmap.q) * rho ** -nu * float(
                _bessel_i_series(int(nu), rho, dmap.q, control))
    if closed is not None:
        if abs(closed - state.norm_before_truncation) > 1e-8 * abs(closed):
            raise ArithmeticError(
                "normalization series and Bessel closed form disagree: "
                f"{state.norm_before_truncation!r} vs {closed!r}")


def build_f_coherent(alpha: complex, k: float, f: DeformationMap, N: int,
                     control: SeriesControl = DEFAULT_CONTROL) -> LadderState:
    """K- eigenstate for the deformation map f, by the coefficient recurrence.

    Raises TruncationError unless the estimated dropped tail mass is below
    TAIL_MASS_LIMIT of the total.
    """
    k = check_bargmann(k)
    if N < 1:
        raise DomainError("truncation N must be >= 1")
    e = _ratio_denominators(f, k, N)
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    for n in range(N):
        c[n + 1] = alpha / e[n + 1] * c[n]
    state = _finish(c, k, alpha, f, e[N + 1])
    _crosscheck_bessel_norm(state, control)
    return state


def build_q_coherent(alpha: complex, k: float, q, N: int,
                     control: SeriesControl = DEFAULT_CONTROL) -> LadderState:
    """q-deformed state with c_n proportional to alpha^n / sqrt([n]_q! [n+2k-1]_q!).

    Equivalent to :func:`build_f_coherent` with the Curtright-Zachos map;
    built here through the q-number ratios directly.
    """
    k = check_bargmann(k)
    if N < 1:
        raise DomainError("truncation N must be >= 1")
    qp = q if isinstance(q, QParam) else QParam(q)
    if qp.is_classical:
        return build_f_coherent(alpha, k, DeformationMap.classical(), N, control)
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    for n in range(N):
        c[n + 1] = alpha / math.sqrt(q_number(n + 1, qp) * q_number(n + 2 * k, qp)) * c[n]
    e_next = math.sqrt(q_number(N + 1, qp) * q_number(N + 2 * k, qp))
    state = _finish(c, k, alpha, DeformationMap.q_deformed(qp), e_next)
    _crosscheck_bessel_norm(state, control)
    return state


def build_by_operator_series(alpha: complex, k: float, f: DeformationMap, N: int,
                             control: SeriesControl = DEFAULT_CONTROL) -> LadderState:
    """The operator-exponential construction

        c_0 exp(alpha f(K0)^{-2} K+ (K0+k)^{-1}) |0,k>,

    truncated at order N; each application of the operator raises exactly one
    level, so order N is exact within the truncation.  Cross-validates the
    hypergeometric form of the state against the recurrence construction.
    """
    k = check_bargmann(k)
    if N < 1:
        raise DomainError("truncation N must be >= 1")
    e = _ratio_denominators(f, k, N)
    levels = np.arange(N + 1, dtype=float)
    inv_k0_plus_k = 1.0 / (levels + 2 * k)          # (K0 + k)^{-1} on |n>
    f_sq = np.ones(N + 1)
    for n in range(1, N + 1):
        f_sq[n] = f.value(n + k, k) ** 2            # f(K0)^2 at level n

    def apply_a(vec):
        # (K0+k)^{-1}, then deformed K+, then f(K0)^{-2} at the raised level
        tmp = vec * inv_k0_plus_k
        out = np.zeros_like(vec)
        out[1:] = e[1:N + 1] * tmp[:-1]
        out[1:] /= f_sq[1:]
        return out

    term = np.zeros(N + 1, dtype=complex)
    term[0] = 1.0
    total = term.copy()
    for j in range(1, N + 1):
        term = (alpha / j) * apply_a(term)
        total += term
    return _finish(total, k, alpha, f, e[N + 1])
