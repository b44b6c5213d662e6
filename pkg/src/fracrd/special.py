"""Gamma and one-parameter Mittag-Leffler evaluation.

``ml_eval`` is the workhorse: it evaluates E_alpha(z) = sum_m z^m/Gamma(alpha*m+1)
to double precision by switching between three regimes,

* plain double-precision series for nonnegative z and mildly negative z,
* an extended-precision series (bounded working precision, at most ~41
  digits) where alternating-series cancellation would destroy doubles, and
* the algebraic large-argument expansion
      E_alpha(-x) ~ sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(1 - alpha*k)
  summed adaptively to its optimal truncation for strongly negative z.

The crossover is fixed by the cancellation exponent x**(1/alpha): above
``_ASYM_MIN_NATS`` the expansion's optimal-truncation floor exp(-x**(1/alpha))
is negligible at double precision, below it the guarded series is cheap.
Relative accuracy is 1e-10 or better for alpha in [0.25, 1] and z in
[-50, 5]; on the extended negative range (z down to ``_Z_MIN``) the
asymptotic branch only gains accuracy as |z| grows.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from importlib import resources

import mpmath as mp

from .errors import DomainError, UnsupportedParameterError

# mpmath's working precision is process-global state; the guarded-precision
# branch takes this lock so ml_eval stays safe under concurrent callers.
_MP_LOCK = threading.Lock()

# Validated parameter box.
_ALPHA_MIN = 0.25
_Z_MAX = 5.0
# The solver evaluates decay envelopes at z = -lambda1 * t^alpha, far below
# the calibrated box; the asymptotic branch handles this with accuracy that
# improves as z -> -inf, so the supported range extends accordingly.
_Z_MIN = -1.0e12

# Branch thresholds on the cancellation exponent x**(1/alpha), x = -z.
_F64_MAX_NATS = 3.0
_ASYM_MIN_NATS = 36.0

# Series truncation: stop once the current term is below this fraction of the
# partial sum (and the tail is provably geometric).
_SERIES_RTOL = 1e-16

_ENVELOPE_RESOURCE = "ml_envelope_calibration.txt"


@dataclass(frozen=True)
class MLParams:
    """Arguments of the one-parameter Mittag-Leffler function E_alpha(z)."""

    alpha: float
    z: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must be in (0, 1], got {self.alpha}")
        if not math.isfinite(self.z):
            raise DomainError(f"z must be finite, got {self.z}")


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments.

    Raises DomainError for x <= 0; non-positive arguments are never needed
    by the solvers and refusing them catches sign bugs early.
    """
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def _tail_ratio_bound(alpha: float, x: float, m: int) -> float:
    """Wendel bound on every term ratio past index m; decreasing in m."""
    u = alpha * m + 1.0
    return (x / u**alpha) * (1.0 + alpha / u)


def _series_f64(alpha: float, z: float) -> float:
    """Direct series in doubles; valid while cancellation is mild."""
    if z == 0.0:
        return 1.0
    x = abs(z)
    logx = math.log(x)
    sign0 = -1.0 if z < 0 else 1.0
    total = 1.0  # m = 0 term
    m = 1
    while True:
        term = math.exp(m * logx - math.lgamma(alpha * m + 1.0)) * sign0**m
        total += term
        r = _tail_ratio_bound(alpha, x, m)
        if r < 1.0 and abs(term) * r / (1.0 - r) < _SERIES_RTOL * max(abs(total), 1e-300):
            return total
        m += 1
        if m > 1_000_000:  # pragma: no cover - cannot trigger inside the box
            raise UnsupportedParameterError(f"series stalled for alpha={alpha}, z={z}")


def _series_mp(alpha: float, z: float, nats: float) -> float:
    """Guarded-precision series for the cancellation-dominated middle regime."""
    dps = 25 + int(math.ceil(nats / math.log(10.0)))
    x = abs(z)
    with _MP_LOCK, mp.workdps(dps):
        zz = mp.mpf(z)
        aa = mp.mpf(alpha)  # keep the gamma argument at working precision
        total = mp.mpf(1)
        m = 1
        while True:
            term = zz**m / mp.gamma(aa * m + 1)
            total += term
            r = _tail_ratio_bound(alpha, x, m)
            if r < 1.0 and abs(term) * r / (1.0 - r) < _SERIES_RTOL * max(
                abs(total), mp.mpf("1e-300")
            ):
                break
            m += 1
        return float(total)


def _asymptotic(alpha: float, z: float) -> float:
    """Algebraic expansion at large negative z, optimally truncated.

    The term magnitudes x^(-k)/|Gamma(1-alpha*k)| bottom out near
    k* = x**(1/alpha)/alpha at the scale exp(-x**(1/alpha)), which is
    negligible whenever this branch is selected.  Individual magnitudes
    oscillate on the way down (the reflection sine modulates the Gamma
    factors), so the loop runs to k* (or until terms are negligible) rather
    than stopping at the first local increase.
    """
    x = -z
    nats = x ** (1.0 / alpha)
    k_opt = min(500, max(8, int(nats / alpha)))
    log_x = math.log(x)
    total = 0.0
    inv = 1.0 / x
    powx = 1.0
    for k in range(1, k_opt + 1):
        powx *= inv
        term = powx * _rgamma(1.0 - alpha * k)
        if k % 2 == 0:
            term = -term
        total += term
        # Sound early exit: |1/Gamma(1-alpha*k')| <= Gamma(alpha*k')/pi, so
        # once the envelope x^-k Gamma(alpha*k)/pi is tiny and still shrinking
        # by at least half per term, the remaining tail is negligible.
        if (alpha * (k + 1)) ** alpha <= 0.5 * x:
            log_env = -k * log_x + math.lgamma(alpha * k) - math.log(math.pi)
            if log_env < math.log(5e-18 * abs(total) + 1e-300):
                break
    return total


def _rgamma(x: float) -> float:
    """1/Gamma(x) for real x, zero at the poles."""
    if x > 0:
        return 1.0 / math.gamma(x)
    if x == math.floor(x):
        return 0.0
    # Reflection: 1/Gamma(x) = Gamma(1-x) * sin(pi*x) / pi.
    return math.gamma(1.0 - x) * math.sin(math.pi * x) / math.pi


def ml_eval(params: MLParams) -> float:
    """Evaluate E_alpha(z) for the validated parameter box.

    Raises UnsupportedParameterError outside alpha in [0.25, 1] or
    z in [_Z_MIN, 5].
    """
    alpha, z = params.alpha, params.z
    if alpha < _ALPHA_MIN:
        raise UnsupportedParameterError(
            f"alpha={alpha} below validated minimum {_ALPHA_MIN}"
        )
    if z > _Z_MAX or z < _Z_MIN:
        raise UnsupportedParameterError(f"z={z} outside validated range [{_Z_MIN}, {_Z_MAX}]")
    if alpha == 1.0:
        return math.exp(z)
    if z >= 0.0:
        return _series_f64(alpha, z)
    nats = (-z) ** (1.0 / alpha)
    if nats <= _F64_MAX_NATS:
        return _series_f64(alpha, z)
    if nats >= _ASYM_MIN_NATS:
        return _asymptotic(alpha, z)
    return _series_mp(alpha, z, nats)


# --- decay envelope -------------------------------------------------------

_envelope_table: list[tuple[float, float]] | None = None


def _load_envelope_table() -> list[tuple[float, float]]:
    global _envelope_table
    if _envelope_table is None:
        text = (
            resources.files("fracrd").joinpath("data").joinpath(_ENVELOPE_RESOURCE).read_text()
        )
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a_str, c_str = line.split(",")
            rows.append((float(a_str), float(c_str)))
        rows.sort()
        _envelope_table = rows
    return _envelope_table


def envelope_constant(alpha: float) -> float:
    """Calibrated constant C_alpha such that E_alpha(-z) <= C_alpha/(1+z)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"envelope requires alpha in (0, 1), got {alpha}")
    table = _load_envelope_table()
    lo = None
    hi = None
    for a, c in table:
        if a <= alpha:
            lo = c
        if a >= alpha and hi is None:
            hi = c
    candidates = [c for c in (lo, hi) if c is not None]
    return max(candidates)


def ml_decay_envelope(alpha: float, z: float) -> float:
    """Upper envelope C_alpha / (1 + z) dominating E_alpha(-z) for z >= 0."""
    if z < 0:
        raise DomainError(f"envelope requires z >= 0, got {z}")
    return envelope_constant(alpha) / (1.0 + z)


def write_envelope_calibration(path, alphas=None, z_grid=None, safety: float = 1e-9) -> None:
    """Recalibrate C_alpha against the extended-precision reference and write
    the plain-text table (one ``alpha, C_alpha`` pair per line).

    Maintenance entry point (hidden CLI flag / scripts); not needed at
    runtime since the calibrated table ships with the package.
    """
    from . import mlref

    if alphas is None:
        alphas = [round(0.05 * k, 2) for k in range(1, 20)] + [0.99]
    if z_grid is None:
        # Covers the validated box [0, 50] with log spacing toward 0.
        z_grid = [0.0] + [10.0 ** (-3 + (3 + math.log10(50.0)) * j / 47) for j in range(48)]
    lines = ["# alpha, C_alpha  (calibrated so C/(1+z) dominates E_alpha(-z))"]
    for a in alphas:
        peak = max((1.0 + z) * float(mlref.ml_reference(a, -z, digits=20)) for z in z_grid)
        c = peak * (1.0 + safety)
        lines.append(f"{a:.6g}, {c:.12g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
