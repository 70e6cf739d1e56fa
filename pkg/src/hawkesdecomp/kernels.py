"""Self-triggering kernels: four base families, one-level compositions,
and closed-form stationarity norms.

The four base families are

* ``Exp(alpha, beta)``   -- decaying exponential ``alpha * exp(-beta*t)``
* ``Pwl(k, c, p)``       -- power law ``k / (c + t)**p`` with ``p > 1``
* ``Sqr(b, l)``          -- rectangular pulse of height ``b`` on ``[0, l]``
* ``Sns(a, omega)``      -- sinusoidal half-wave ``a*sin(omega*t)`` on
  ``[0, pi/omega]``

A composite kernel is either a single base kernel, the sum of two base
kernels, or the product of two base kernels.  All kernel objects are
immutable values; every function in this module is pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import mpmath
import numpy as np

__all__ = [
    "Exp",
    "Pwl",
    "Sqr",
    "Sns",
    "Sum",
    "Product",
    "BaseKernel",
    "Kernel",
    "StationarityVerdict",
    "SupportMismatchError",
    "evaluate",
    "support_end",
    "effective_support",
    "sup_after",
    "stationarity_norm",
    "reduce_intraclass_product",
    "IntraclassReduction",
    "interclass_product_upper_bound",
    "InterclassBound",
    "kernel_to_dict",
    "kernel_from_dict",
    "kernel_to_json",
    "kernel_from_json",
]


class SupportMismatchError(ValueError):
    """Raised when a product of discontinuous kernels does not share its
    support endpoint (the closed forms assume L = pi/omega)."""


def _require_positive(name: str, value: float) -> None:
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be strictly positive and finite, got {value!r}")


@dataclass(frozen=True)
class Exp:
    """Exponential kernel ``alpha * exp(-beta * t)``."""

    alpha: float
    beta: float

    def __post_init__(self):
        _require_positive("alpha", self.alpha)
        _require_positive("beta", self.beta)


@dataclass(frozen=True)
class Pwl:
    """Power-law kernel ``k / (c + t)**p`` with ``p > 1``."""

    k: float
    c: float
    p: float

    def __post_init__(self):
        _require_positive("k", self.k)
        _require_positive("c", self.c)
        if not (np.isfinite(self.p) and self.p > 1):
            raise ValueError(f"p must be > 1, got {self.p!r}")


@dataclass(frozen=True)
class Sqr:
    """Pulse kernel of height ``b`` supported on ``[0, l]``."""

    b: float
    l: float

    def __post_init__(self):
        _require_positive("b", self.b)
        _require_positive("l", self.l)


@dataclass(frozen=True)
class Sns:
    """Half-wave sinusoid ``a * sin(omega * t)`` supported on ``[0, pi/omega]``."""

    a: float
    omega: float

    def __post_init__(self):
        _require_positive("a", self.a)
        _require_positive("omega", self.omega)


BaseKernel = Union[Exp, Pwl, Sqr, Sns]

FAMILIES = (Exp, Pwl, Sqr, Sns)
FAMILY_NAMES = {Exp: "EXP", Pwl: "PWL", Sqr: "SQR", Sns: "SNS"}
# Fixed tie-break order used wherever two candidates have equal residue.
FAMILY_ORDER = {Exp: 0, Pwl: 1, Sqr: 2, Sns: 3}


@dataclass(frozen=True)
class Sum:
    """Pointwise sum of two base kernels."""

    left: BaseKernel
    right: BaseKernel


@dataclass(frozen=True)
class Product:
    """Pointwise product of two base kernels; support is the intersection of
    the factor supports."""

    left: BaseKernel
    right: BaseKernel


Kernel = Union[BaseKernel, Sum, Product]


@dataclass(frozen=True)
class StationarityVerdict:
    """Closed-form value of the kernel norm (or its upper bound).

    ``stationary`` is true exactly when ``norm_value`` lies in ``[0, 1)``;
    the boundary value 1 is rejected because the steady arrival rate
    ``mu / (1 - norm)`` diverges there.
    """

    norm_value: float
    is_bound: bool
    stationary: bool


def _verdict(norm_value: float, is_bound: bool = False) -> StationarityVerdict:
    return StationarityVerdict(
        norm_value=float(norm_value),
        is_bound=is_bound,
        stationary=bool(0.0 <= norm_value < 1.0),
    )


# ---------------------------------------------------------------------------
# evaluation


def _evaluate_base(kernel: BaseKernel, t: np.ndarray) -> np.ndarray:
    if isinstance(kernel, Exp):
        return np.where(t >= 0, kernel.alpha * np.exp(-kernel.beta * np.maximum(t, 0.0)), 0.0)
    if isinstance(kernel, Pwl):
        return np.where(t >= 0, kernel.k / (kernel.c + np.maximum(t, 0.0)) ** kernel.p, 0.0)
    if isinstance(kernel, Sqr):
        return np.where((t >= 0) & (t <= kernel.l), kernel.b, 0.0)
    if isinstance(kernel, Sns):
        inside = (t >= 0) & (t <= math.pi / kernel.omega)
        return np.where(inside, kernel.a * np.sin(kernel.omega * np.where(inside, t, 0.0)), 0.0)
    raise TypeError(f"not a base kernel: {kernel!r}")


def evaluate(kernel: Kernel, t):
    """Evaluate the kernel at time(s) ``t``.

    Returns 0 for negative ``t`` and outside the kernel support.  Accepts a
    scalar or an array; the result matches the input shape.
    """
    arr = np.asarray(t, dtype=float)
    if isinstance(kernel, Sum):
        out = _evaluate_base(kernel.left, arr) + _evaluate_base(kernel.right, arr)
    elif isinstance(kernel, Product):
        out = _evaluate_base(kernel.left, arr) * _evaluate_base(kernel.right, arr)
    else:
        out = _evaluate_base(kernel, arr)
    if np.isscalar(t) or arr.ndim == 0:
        return float(out)
    return out


def support_end(kernel: Kernel) -> float:
    """Right endpoint of the kernel support (``inf`` for EXP/PWL)."""
    if isinstance(kernel, Exp) or isinstance(kernel, Pwl):
        return math.inf
    if isinstance(kernel, Sqr):
        return kernel.l
    if isinstance(kernel, Sns):
        return math.pi / kernel.omega
    if isinstance(kernel, Sum):
        return max(support_end(kernel.left), support_end(kernel.right))
    if isinstance(kernel, Product):
        return min(support_end(kernel.left), support_end(kernel.right))
    raise TypeError(f"not a kernel: {kernel!r}")


def effective_support(kernel: Kernel, eps: float = 1e-12) -> float:
    """Lag beyond which the kernel contributes less than ``eps``.

    Exact support end for SQR/SNS; for EXP and PWL the point where the tail
    drops below ``eps``.  Used for history truncation in simulation and
    likelihood evaluation.
    """
    if isinstance(kernel, Exp):
        if kernel.alpha <= eps:
            return 0.0
        return math.log(kernel.alpha / eps) / kernel.beta
    if isinstance(kernel, Pwl):
        edge = (kernel.k / eps) ** (1.0 / kernel.p) - kernel.c
        return max(edge, 0.0)
    if isinstance(kernel, (Sqr, Sns)):
        return support_end(kernel)
    if isinstance(kernel, Sum):
        return max(effective_support(kernel.left, eps), effective_support(kernel.right, eps))
    if isinstance(kernel, Product):
        return min(effective_support(kernel.left, eps), effective_support(kernel.right, eps))
    raise TypeError(f"not a kernel: {kernel!r}")


def _sup_after_base(kernel: BaseKernel, s: np.ndarray) -> np.ndarray:
    s = np.maximum(s, 0.0)
    if isinstance(kernel, Exp):
        return kernel.alpha * np.exp(-kernel.beta * s)
    if isinstance(kernel, Pwl):
        return kernel.k / (kernel.c + s) ** kernel.p
    if isinstance(kernel, Sqr):
        return np.where(s <= kernel.l, kernel.b, 0.0)
    if isinstance(kernel, Sns):
        peak = math.pi / (2.0 * kernel.omega)
        falling = np.where(
            s <= math.pi / kernel.omega, kernel.a * np.sin(kernel.omega * s), 0.0
        )
        return np.where(s <= peak, kernel.a, falling)
    raise TypeError(f"not a base kernel: {kernel!r}")


def sup_after(kernel: Kernel, s):
    """Upper bound on ``evaluate(kernel, u)`` over all ``u >= s``.

    Exact for base kernels; for sums and products the bound composes the
    factor suprema, which dominates the true supremum.  Nonincreasing in
    ``s``, which is what the thinning sampler needs.  Accepts a scalar or
    an array of elapsed times.
    """
    arr = np.asarray(s, dtype=float)
    if isinstance(kernel, Sum):
        out = _sup_after_base(kernel.left, arr) + _sup_after_base(kernel.right, arr)
    elif isinstance(kernel, Product):
        out = _sup_after_base(kernel.left, arr) * _sup_after_base(kernel.right, arr)
    else:
        out = _sup_after_base(kernel, arr)
    if np.isscalar(s) or arr.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# stationarity norms


def _norm_single(kernel: BaseKernel) -> float:
    if isinstance(kernel, Exp):
        return kernel.alpha / kernel.beta
    if isinstance(kernel, Pwl):
        return kernel.k * kernel.c ** (1.0 - kernel.p) / (kernel.p - 1.0)
    if isinstance(kernel, Sqr):
        return kernel.b * kernel.l
    if isinstance(kernel, Sns):
        return 2.0 * kernel.a / kernel.omega
    raise TypeError(f"not a base kernel: {kernel!r}")


def _exp_pwl_norm(e: Exp, w: Pwl) -> float:
    # alpha*K*beta^(p-1)*exp(beta*c)*Gamma(1-p, beta*c); the incomplete gamma
    # has a negative first argument, so evaluate through mpmath.
    x = mpmath.mpf(e.beta) * mpmath.mpf(w.c)
    val = (
        mpmath.mpf(e.alpha)
        * mpmath.mpf(w.k)
        * mpmath.power(e.beta, w.p - 1.0)
        * mpmath.exp(x)
        * mpmath.gammainc(1.0 - w.p, x)
    )
    return float(val)


def _check_shared_support(end1: float, end2: float, tol: float) -> None:
    ref = max(abs(end1), abs(end2))
    if abs(end1 - end2) > tol * ref:
        raise SupportMismatchError(
            f"discontinuous-kernel product requires matching support endpoints "
            f"(got {end1:g} and {end2:g}, tolerance {tol:.0%})"
        )


def _norm_product(a: BaseKernel, b: BaseKernel, support_tol: float):
    """Closed-form norm (or upper bound) of a two-factor product.

    Returns ``(value, is_bound)``.  Dispatch is on the unordered type pair.
    """
    # canonical order: EXP < PWL < SQR < SNS
    if FAMILY_ORDER[type(a)] > FAMILY_ORDER[type(b)]:
        a, b = b, a
    if isinstance(a, Exp) and isinstance(b, Exp):
        return a.alpha * b.alpha / (a.beta + b.beta), False
    if isinstance(a, Exp) and isinstance(b, Pwl):
        return _exp_pwl_norm(a, b), False
    if isinstance(a, Exp) and isinstance(b, Sqr):
        return a.alpha * b.b * (1.0 - math.exp(-a.beta * b.l)) / a.beta, False
    if isinstance(a, Exp) and isinstance(b, Sns):
        w, bt = b.omega, a.beta
        return b.a * a.alpha * w * (1.0 + math.exp(-bt * math.pi / w)) / (w * w + bt * bt), False
    if isinstance(a, Pwl) and isinstance(b, Pwl):
        q = a.p + b.p - 1.0
        return a.k * b.k / (q * min(a.c, b.c) ** q), True
    if isinstance(a, Pwl) and isinstance(b, Sqr):
        q = a.p - 1.0
        return a.k * b.b * (a.c ** -q - (a.c + b.l) ** -q) / q, False
    if isinstance(a, Pwl) and isinstance(b, Sns):
        q = 1.0 - a.p
        return a.k * b.a * ((a.c + math.pi / b.omega) ** q - a.c ** q) / q, True
    if isinstance(a, Sqr) and isinstance(b, Sqr):
        return a.b * b.b * min(a.l, b.l), False
    if isinstance(a, Sqr) and isinstance(b, Sns):
        _check_shared_support(a.l, math.pi / b.omega, support_tol)
        return 2.0 * b.a * a.b / b.omega, False
    if isinstance(a, Sns) and isinstance(b, Sns):
        _check_shared_support(math.pi / a.omega, math.pi / b.omega, support_tol)
        return math.pi * a.a * b.a / (2.0 * a.omega), False
    raise TypeError(f"not base kernels: {a!r}, {b!r}")


def stationarity_norm(kernel: Kernel, support_tol: float = 0.05) -> StationarityVerdict:
    """Closed-form stationarity norm of a composite kernel.

    Singles use the per-family closed forms, sums add them (exact), and
    products use the pairwise closed forms; the PWLxPWL and PWLxSNS rows are
    upper bounds and are flagged ``is_bound``.  Products of two discontinuous
    kernels (SQRxSNS, SNSxSNS) assume a shared support endpoint and raise
    :class:`SupportMismatchError` when the endpoints differ by more than
    ``support_tol`` relative.
    """
    if isinstance(kernel, Sum):
        value = _norm_single(kernel.left) + _norm_single(kernel.right)
        return _verdict(value)
    if isinstance(kernel, Product):
        value, is_bound = _norm_product(kernel.left, kernel.right, support_tol)
        return _verdict(value, is_bound)
    return _verdict(_norm_single(kernel))


# ---------------------------------------------------------------------------
# higher-order product reductions


@dataclass(frozen=True)
class IntraclassReduction:
    """Result of collapsing a same-family kernel product.

    ``kernel`` is the reduced single kernel when one exists (EXP and SQR
    exactly, PWL as a flagged lower bound); for SNS no single-family
    reduction exists and only the product amplitude is reported.
    """

    kernel: BaseKernel | None
    exact: bool
    amplitude: float | None
    note: str


def reduce_intraclass_product(factors: Sequence[BaseKernel]) -> IntraclassReduction:
    """Collapse a product of >=1 same-family base kernels.

    EXP and SQR products reduce exactly to a single kernel of the same
    family; a PWL product is reported as a lower-bounding PWL; an SNS
    product keeps the sinusoidal character but is spikier than any single
    half-wave, so only its amplitude is reported.
    """
    if len(factors) == 0:
        raise ValueError("empty factor list")
    fam = type(factors[0])
    if any(type(f) is not fam for f in factors):
        raise ValueError("intraclass reduction requires factors of a single family")
    if len(factors) == 1:
        return IntraclassReduction(kernel=factors[0], exact=True, amplitude=None, note="identity")
    if fam is Exp:
        alpha = math.prod(f.alpha for f in factors)
        beta = sum(f.beta for f in factors)
        return IntraclassReduction(Exp(alpha, beta), exact=True, amplitude=None, note="exact")
    if fam is Sqr:
        b = math.prod(f.b for f in factors)
        l = min(f.l for f in factors)
        return IntraclassReduction(Sqr(b, l), exact=True, amplitude=None, note="exact")
    if fam is Pwl:
        k = math.prod(f.k for f in factors)
        c = max(f.c for f in factors)
        p = sum(f.p for f in factors)
        return IntraclassReduction(Pwl(k, c, p), exact=False, amplitude=None, note="lower bound")
    if fam is Sns:
        a = math.prod(f.a for f in factors)
        return IntraclassReduction(
            kernel=None, exact=False, amplitude=a, note="spikier, not reducible"
        )
    raise TypeError(f"not base kernels: {factors!r}")


@dataclass(frozen=True)
class InterclassBound:
    """Dominating function ``amplitude * exp(-beta*x) / (x + c)**p`` on
    ``[0, support_end_]``, zero elsewhere."""

    amplitude: float
    beta: float
    c: float
    p: float
    support_end_: float

    def evaluate(self, t):
        arr = np.asarray(t, dtype=float)
        inside = (arr >= 0) & (arr <= self.support_end_)
        x = np.where(inside, arr, 0.0)
        out = np.where(
            inside,
            self.amplitude * np.exp(-self.beta * x) / (x + self.c) ** self.p,
            0.0,
        )
        if np.isscalar(t) or arr.ndim == 0:
            return float(out)
        return out


def interclass_product_upper_bound(factors: Sequence[BaseKernel]) -> InterclassBound:
    """Dominating closed form for an arbitrary mixed product of base kernels.

    The factors of each family are first collapsed by the intraclass
    reductions; the sinusoid is bounded by its amplitude and the pulse by
    its height, leaving ``alpha*B*K*A * exp(-beta*x) / (x + c)**p``
    supported on ``[0, min(L, pi/omega)]``.  The power-law offset is the
    smallest ``c`` among the PWL factors: any larger choice fails to
    dominate the true product near the origin.
    """
    if len(factors) == 0:
        raise ValueError("empty product")
    exps = [f for f in factors if isinstance(f, Exp)]
    pwls = [f for f in factors if isinstance(f, Pwl)]
    sqrs = [f for f in factors if isinstance(f, Sqr)]
    snss = [f for f in factors if isinstance(f, Sns)]

    amplitude = 1.0
    beta = 0.0
    c = 1.0
    p = 0.0
    end = math.inf
    if exps:
        amplitude *= math.prod(f.alpha for f in exps)
        beta = sum(f.beta for f in exps)
    if pwls:
        amplitude *= math.prod(f.k for f in pwls)
        c = min(f.c for f in pwls)
        p = sum(f.p for f in pwls)
    if sqrs:
        amplitude *= math.prod(f.b for f in sqrs)
        end = min(end, min(f.l for f in sqrs))
    if snss:
        amplitude *= math.prod(f.a for f in snss)
        end = min(end, min(math.pi / f.omega for f in snss))
    return InterclassBound(amplitude=amplitude, beta=beta, c=c, p=p, support_end_=end)


# ---------------------------------------------------------------------------
# JSON (de)serialization


_FIELDS = {Exp: ("alpha", "beta"), Pwl: ("k", "c", "p"), Sqr: ("b", "l"), Sns: ("a", "omega")}
_BY_NAME = {"EXP": Exp, "PWL": Pwl, "SQR": Sqr, "SNS": Sns}


def kernel_to_dict(kernel: Kernel) -> dict:
    if isinstance(kernel, Sum):
        return {"op": "sum", "left": kernel_to_dict(kernel.left), "right": kernel_to_dict(kernel.right)}
    if isinstance(kernel, Product):
        return {
            "op": "product",
            "left": kernel_to_dict(kernel.left),
            "right": kernel_to_dict(kernel.right),
        }
    fields = _FIELDS[type(kernel)]
    d = {"type": FAMILY_NAMES[type(kernel)]}
    for name in fields:
        d[name] = getattr(kernel, name)
    return d


def kernel_from_dict(d: dict) -> Kernel:
    if "op" in d:
        left = kernel_from_dict(d["left"])
        right = kernel_from_dict(d["right"])
        if d["op"] == "sum":
            return Sum(left, right)
        if d["op"] == "product":
            return Product(left, right)
        raise ValueError(f"unknown op {d['op']!r}")
    try:
        cls = _BY_NAME[d["type"]]
    except KeyError:
        raise ValueError(f"unknown kernel type {d.get('type')!r}") from None
    return cls(*[float(d[name]) for name in _FIELDS[cls]])


def kernel_to_json(kernel: Kernel) -> str:
    return json.dumps(kernel_to_dict(kernel), sort_keys=True)


def kernel_from_json(text: str) -> Kernel:
    return kernel_from_dict(json.loads(text))
