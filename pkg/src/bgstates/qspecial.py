"""q-special functions with pinned analytic-continuation conventions.

Everything here uses the *symmetric* q-number

    [x]_q = (q^x - q^{-x}) / (q - q^{-1}),

which reduces to x as q -> 1 and is invariant under q -> 1/q.  The symmetric
q-factorial is continued off the integers by

    [z]_q! = q^{-z(z-1)/2} * Gamma_{q^2}(z+1),

where Gamma_Q is the standard base-Q q-Gamma function; the normalization is
validated against the plain product on integers 0..20 the first time each q
is used (see :func:`q_factorial_cont`).

The modified Bessel function of the second kind is evaluated from its
ascending log-series, which cancels by ~e^{4 rho}; terms are therefore
carried in compensated double-double pairs (:mod:`._dd`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _dd
from .errors import DomainError, PoleError, SeriesConvergenceError

__all__ = [
    "QParam",
    "CLASSICAL",
    "SeriesControl",
    "DEFAULT_CONTROL",
    "q_number",
    "q_factorial",
    "q_factorial_cont",
    "q_pochhammer",
    "q_binomial",
    "q_gamma",
    "q_digamma",
    "bessel_i_q",
    "bessel_k",
]


@dataclass(frozen=True)
class SeriesControl:
    """Stopping policy for infinite series and products.

    Evaluation stops once two consecutive terms fall below ``rel_tol`` times
    the partial sum; hitting ``max_terms`` first raises
    :class:`SeriesConvergenceError`.
    """

    rel_tol: float = 1e-16
    max_terms: int = 4_000_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("SeriesControl.rel_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("SeriesControl.max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


class QParam:
    """Real deformation parameter with the classical case as a distinct tag.

    ``QParam(q)`` requires 0 < q < 1 (the convergence domain of every series
    evaluated here).  ``QParam.classical()`` marks the undeformed algebra and
    is never represented as a float near 1.  ``QParam.for_crossing(q)`` admits
    q > 1; such values are only meaningful to the bipartite crossing
    transform, and the series functions reject them.
    """

    __slots__ = ("value", "is_classical")

    def __init__(self, value: float):
        value = float(value)
        if not 0.0 < value < 1.0:
            raise DomainError(
                f"deformation parameter must satisfy 0 < q < 1, got {value!r}; "
                "use QParam.classical() for q = 1 or QParam.for_crossing() for q > 1"
            )
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "is_classical", False)

    @classmethod
    def classical(cls) -> "QParam":
        obj = object.__new__(cls)
        object.__setattr__(obj, "value", None)
        object.__setattr__(obj, "is_classical", True)
        return obj

    @classmethod
    def for_crossing(cls, value: float) -> "QParam":
        value = float(value)
        if not value > 1.0:
            raise DomainError(f"for_crossing expects q > 1, got {value!r}")
        obj = object.__new__(cls)
        object.__setattr__(obj, "value", value)
        object.__setattr__(obj, "is_classical", False)
        return obj

    def __setattr__(self, *_):
        raise AttributeError("QParam is immutable")

    def __repr__(self):
        return "QParam.classical()" if self.is_classical else f"QParam({self.value})"

    def __eq__(self, other):
        if not isinstance(other, QParam):
            return NotImplemented
        return (self.is_classical, self.value) == (other.is_classical, other.value)

    def __hash__(self):
        return hash((self.is_classical, self.value))


CLASSICAL = QParam.classical()


def _series_value(q, *, where: str) -> float:
    """Extract a float q usable in series work (0 < q < 1)."""
    if isinstance(q, QParam):
        if q.is_classical:
            raise DomainError(f"{where}: classical tag has no series form; "
                              "call the classical counterpart instead")
        q = q.value
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"{where}: series evaluation requires 0 < q < 1, got {q!r}")
    return q


def q_number(x: float, q) -> float:
    """Symmetric q-number [x]_q = (q^x - q^{-x})/(q - q^{-1}).

    Odd in x, invariant under q -> 1/q, and equal to x for the classical tag.
    """
    if isinstance(q, QParam):
        if q.is_classical:
            return float(x)
        q = q.value
    q = float(q)
    if q <= 0.0 or q == 1.0:
        raise DomainError(f"q_number requires q > 0, q != 1, got {q!r}")
    return (q ** x - q ** (-x)) / (q - 1.0 / q)


def q_factorial(n: int, q) -> float:
    """[n]_q! = prod_{j=1..n} [j]_q, with the empty product equal to 1."""
    if n != int(n) or n < 0:
        raise DomainError(f"q_factorial requires a nonnegative integer, got {n!r}")
    n = int(n)
    if isinstance(q, QParam) and q.is_classical:
        return float(math.factorial(n))
    out = 1.0
    for j in range(1, n + 1):
        out *= q_number(j, q)
    return out


# q values whose continuation normalization has been checked on integers
_CONT_VALIDATED: set[float] = set()


def q_factorial_cont(z: float, q, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Analytic continuation of the symmetric q-factorial.

    Convention: [z]_q! = q^{-z(z-1)/2} Gamma_{q^2}(z+1).  On first use with a
    given q this is checked to reproduce :func:`q_factorial` on the integers
    0..20 to 1e-11 relative, which pins the normalization.
    """
    if isinstance(q, QParam) and q.is_classical:
        return math.gamma(z + 1.0)
    qv = _series_value(q, where="q_factorial_cont")
    if z <= -1.0:
        raise DomainError(f"q_factorial_cont requires z > -1, got {z!r}")

    def cont(zz: float) -> float:
        return qv ** (-zz * (zz - 1.0) / 2.0) * q_gamma(zz + 1.0, qv * qv, control)

    if qv not in _CONT_VALIDATED:
        for n in range(21):
            ref = q_factorial(n, qv)
            got = cont(float(n))
            if abs(got - ref) > 1e-11 * abs(ref):
                raise ArithmeticError(
                    f"q-factorial continuation failed its integer check at n={n}, q={qv}"
                )
        _CONT_VALIDATED.add(qv)
    return cont(float(z))


def q_pochhammer(a: float, q, n=None, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """(a; q)_n = prod_{j=1..n} (1 - a q^{j-1}); n=None or math.inf for the
    convergent infinite product (requires 0 < q < 1)."""
    if n is None or n == math.inf:
        qv = _series_value(q, where="q_pochhammer infinite product")
        out = 1.0
        factor = float(a)
        below = 0
        for _ in range(control.max_terms):
            out *= 1.0 - factor
            factor *= qv
            if abs(factor) < control.rel_tol:
                below += 1
                if below >= 2:
                    return out
            else:
                below = 0
        raise SeriesConvergenceError("q_pochhammer infinite product",
                                     f"a={a}, q={qv}, max_terms={control.max_terms}")
    if n != int(n) or n < 0:
        raise DomainError(f"q_pochhammer requires nonnegative integer n, got {n!r}")
    if isinstance(q, QParam):
        if q.is_classical:
            raise DomainError("q_pochhammer: classical tag is not meaningful here")
        q = q.value
    out = 1.0
    for j in range(int(n)):
        out *= 1.0 - a * q ** j
    return out


def q_binomial(n: int, k: int, base: float) -> float:
    """Gaussian binomial coefficient in the given base.

    Returns 0 outside 0 <= k <= n; at base exactly 1 it is the ordinary
    binomial coefficient.  Computed as the factor-by-factor product
    prod_{j=1..k} (1 - base^{n-k+j})/(1 - base^j), which has no cancellation.
    """
    if n != int(n) or n < 0:
        raise DomainError(f"q_binomial requires nonnegative integer n, got {n!r}")
    n, k = int(n), int(k)
    if k < 0 or k > n:
        return 0.0
    if base == 1.0:
        return float(math.comb(n, k))
    if base <= 0.0:
        raise DomainError(f"q_binomial requires base > 0, got {base!r}")
    lnb = math.log(base)
    out = 1.0
    for j in range(1, k + 1):
        out *= math.expm1((n - k + j) * lnb) / math.expm1(j * lnb)
    return out


def q_gamma(z: float, q, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Gamma_q(z) = (1-q)^{1-z} (q; q)_inf / (q^z; q)_inf for 0 < q < 1.

    The two infinite products are accumulated factor-by-factor as a single
    ratio prod_j (1-q^{1+j})/(1-q^{z+j}): separately they underflow for q
    near 1 while the ratio stays O(1).  Raises :class:`PoleError` if a
    denominator factor vanishes to machine precision (z at a nonpositive
    integer).
    """
    qv = _series_value(q, where="q_gamma")
    # pole scan: (q^z; q)_inf factors are 1 - q^{z+j}, j >= 0
    if z <= 0.0:
        j_near = round(-z)
        if abs(1.0 - qv ** (z + j_near)) < 1e-13:
            raise PoleError(f"q_gamma pole at z={z} (q={qv})")
    lnq = math.log(qv)
    log_ratio = 0.0
    sign = 1.0
    block = 8192
    j0 = 0
    while j0 < control.max_terms:
        jj = np.arange(j0, j0 + block, dtype=float)
        f_num = -np.expm1((1.0 + jj) * lnq)   # 1 - q^{1+j}
        f_den = -np.expm1((z + jj) * lnq)     # 1 - q^{z+j}
        if np.any(np.abs(f_den) < 1e-280):
            raise PoleError(f"q_gamma pole at z={z} (q={qv})")
        ratio = f_num / f_den
        sign *= 1.0 if (np.count_nonzero(ratio < 0) % 2 == 0) else -1.0
        log_ratio += math.fsum(np.log(np.abs(ratio)).tolist())
        j0 += block
        # |ln| of the dropped tail is below |q - q^z| q^{j0} / (1-q)
        if abs(qv - qv ** z) * math.exp(j0 * lnq) / (1.0 - qv) < control.rel_tol:
            return (1.0 - qv) ** (1.0 - z) * sign * math.exp(log_ratio)
    raise SeriesConvergenceError("q_gamma product", f"z={z}, q={qv}")


def q_digamma(z: float, q, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """psi_q(z) = d/dz ln Gamma_q(z), via the series

        psi_q(z) = -ln(1-q) + ln(q) * sum_{n>=1} q^{nz} / (1 - q^n).

    The series form avoids the cancellation a finite difference of
    ln Gamma_q would suffer.
    """
    qv = _series_value(q, where="q_digamma")
    if z <= 0.0:
        raise DomainError(f"q_digamma requires z > 0, got {z!r}")
    lnq = math.log(qv)
    total = 0.0
    block = 4096
    n0 = 1
    for _ in range(control.max_terms // block + 1):
        n = np.arange(n0, n0 + block, dtype=float)
        qnz = np.exp(n * (z * lnq))
        terms = qnz / (1.0 - np.exp(n * lnq))
        total += float(math.fsum(terms.tolist()))
        if terms[-1] < control.rel_tol * max(abs(total), 1e-300) and \
           terms[-2] < control.rel_tol * max(abs(total), 1e-300):
            return -math.log1p(-qv) + lnq * total
        n0 += block
    raise SeriesConvergenceError("q_digamma", f"z={z}, q={qv}")


# --------------------------------------------------------------------------
# modified Bessel functions
# --------------------------------------------------------------------------

def _bessel_i_series(m: int, z, q, control: SeriesControl = DEFAULT_CONTROL):
    """sum_n z^{m+2n} / ([n]! [m+n]!)  (classical factorials for the classical
    tag).  Vectorised over z (>= 0); all terms positive."""
    z = np.asarray(z, dtype=float)
    classical = isinstance(q, QParam) and q.is_classical
    if not classical:
        qv = _series_value(q, where="bessel_i_q")
    if m < 0 or m != int(m):
        raise DomainError(f"bessel index must be a nonnegative integer, got {m!r}")
    m = int(m)
    with np.errstate(divide="ignore"):
        term = np.where(z > 0, z ** m, 1.0 if m == 0 else 0.0) / (
            math.factorial(m) if classical else q_factorial(m, qv))
    total = term.copy()
    z2 = z * z
    below = 0
    for n in range(1, control.max_terms):
        denom = (n * (m + n)) if classical else q_number(n, qv) * q_number(m + n, qv)
        term = term * z2 / denom
        total += term
        if np.all(term <= control.rel_tol * total):
            below += 1
            if below >= 2:
                return total
        else:
            below = 0
    raise SeriesConvergenceError("bessel_i series", f"m={m}")


def bessel_i_q(m: int, two_z: float, q, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Modified Bessel function of the first kind, I_m(2z), or its q-deformed
    analog  I_m^{(q)}(2z) = sum_n z^{m+2n}/([n]_q! [m+n]_q!).

    Pass ``CLASSICAL`` (or any classical tag) for the undeformed series.
    """
    if two_z < 0:
        raise DomainError(f"bessel_i_q requires 2z >= 0, got {two_z!r}")
    return float(_bessel_i_series(m, two_z / 2.0, q, control))


def _bessel_k_dd(nu: int, two_rho, control: SeriesControl = DEFAULT_CONTROL):
    """K_nu(2 rho) from the ascending series, in double-double arithmetic.

    Vectorised over rho.  Returns ``(value_dd, noise)`` where ``noise`` is the
    estimated absolute roundoff floor (largest term magnitude times dd ulp);
    callers decide whether the cancellation left anything meaningful.

        K_nu(2r) = 1/2 sum_{l<nu} (-1)^l (nu-l-1)!/l! r^{2l-nu}
                   + (-1)^{nu+1} sum_{l>=0} [ln r - psi(l+1)/2 - psi(l+nu+1)/2]
                     r^{2l+nu} / (l! (l+nu)!)

    with psi(m+1) = -EulerGamma + H_m, so the log bracket is assembled as
    (ln r + EulerGamma) - (H_l + H_{l+nu})/2 with harmonic numbers kept in dd.
    """
    if nu < 0 or nu != int(nu):
        raise DomainError(f"bessel_k requires nonnegative integer order, got {nu!r}")
    nu = int(nu)
    rho = np.asarray(two_rho, dtype=float) / 2.0
    if np.any(rho <= 0.0):
        raise DomainError("bessel_k requires rho > 0")

    rho_dd = (rho, np.zeros_like(rho))
    total = _dd.dd(np.zeros_like(rho))
    # finite part: 1/2 sum_{l=0}^{nu-1} (-1)^l (nu-l-1)!/l! rho^{2l-nu}
    if nu > 0:
        t = _dd.pow_int(rho_dd, -nu)
        rho2 = _dd.sqr(rho_dd)
        for l in range(nu):
            coeff = 0.5 * (-1) ** l * math.factorial(nu - l - 1) / math.factorial(l)
            total = _dd.add(total, _dd.mul_d(t, coeff))
            t = _dd.mul(t, rho2)

    # log part
    lbase = _dd.add(_dd.log(rho_dd), _dd.EULER_GAMMA)  # ln(rho) + gamma
    sign = float((-1) ** (nu + 1))
    t = _dd.div_d(_dd.pow_int(rho_dd, nu), float(math.factorial(nu)))
    rho2 = _dd.sqr(rho_dd)
    h_l = _dd.dd(0.0)
    h_lnu = _dd.dd(0.0)
    for j in range(1, nu + 1):
        h_lnu = _dd.add(h_lnu, _dd.div_d(_dd.dd(1.0), float(j)))
    max_opmag = np.zeros_like(rho)
    l = 0
    while True:
        bracket = _dd.sub(lbase, _dd.mul_d(_dd.add(h_l, h_lnu), 0.5))
        term = _dd.mul(t, bracket)
        total = _dd.add(total, _dd.mul_d(term, sign))
        # roundoff floor scales with the *uncancelled* operand size, not with
        # |t * bracket| (the bracket nearly vanishes where t peaks)
        np.maximum(max_opmag,
                   np.abs(t[0]) * (np.abs(lbase[0]) + h_lnu[0] + 1.0),
                   out=max_opmag)
        l += 1
        if l >= control.max_terms:
            raise SeriesConvergenceError("bessel_k series", f"nu={nu}")
        h_l = _dd.add(h_l, _dd.div_d(_dd.dd(1.0), float(l)))
        h_lnu = _dd.add(h_lnu, _dd.div_d(_dd.dd(1.0), float(l + nu)))
        t = _dd.div_d(_dd.mul(t, rho2), float(l * (l + nu)))
        if l > 4 and np.all(t[0] * (np.abs(lbase[0]) + h_lnu[0] + 1.0)
                            <= 1e-34 * max_opmag):
            break
    noise = max_opmag * 2.0 ** -98
    return total, noise


def bessel_k(nu: int, two_rho: float, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Modified Bessel function of the second kind K_nu(2 rho), rho > 0.

    Evaluated from the two-part ascending series (finite sum plus log series).
    Raises :class:`SeriesConvergenceError` once the e^{4 rho} cancellation
    exhausts even compensated precision (rho beyond roughly 18).
    """
    value, noise = _bessel_k_dd(nu, two_rho, control)
    out = float(_dd.to_float(value))
    if not float(noise) < 0.03 * abs(out):
        raise SeriesConvergenceError(
            "bessel_k",
            f"cancellation floor reached at 2rho={two_rho} (noise {float(noise):.2e})",
        )
    return out
