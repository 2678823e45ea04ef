"""Special functions and quadrature rules consumed by every other module.

Hermite and Legendre polynomials are evaluated by their three-term
recurrences, which are stable in the desk-scale regime (degree below ~60,
arguments of modest size, possibly complex).  Gauss rules come from the
Golub-Welsch eigenvalue method.  Generalized factorials are carried in log
space and exponentiated only at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

GAUSS_HERMITE = "gauss_hermite"
GAUSS_LAGUERRE = "gauss_laguerre"
UNIFORM_ANGLE = "uniform_angle"

__all__ = [
    "GAUSS_HERMITE",
    "GAUSS_LAGUERRE",
    "UNIFORM_ANGLE",
    "QuadratureRule",
    "make_rule",
    "hermite_eval",
    "hermite_values",
    "legendre_eval",
    "legendre_coefficients",
    "alpha_factorial",
    "log_alpha_factorial",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a one-dimensional integration rule.

    Attributes
    ----------
    kind : str
        One of ``"gauss_hermite"``, ``"gauss_laguerre"``,
        ``"uniform_angle"``.
    order : int
        Number of nodes.
    nodes : numpy.ndarray
        Strictly increasing for the Gauss kinds, equally spaced on
        ``[0, 2*pi)`` for the angle rule.
    weights : numpy.ndarray
        Strictly positive.  Gauss-Hermite weights sum to ``sqrt(pi)``,
        Gauss-Laguerre weights to 1, angle weights to ``2*pi``.
    """

    kind: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def compensated_weights(self) -> np.ndarray:
        """Weights with the rule's weight function divided back out.

        Multiplying a plain integrand f by these and summing approximates
        the unweighted integral of f over the rule's native interval.
        Values stay O(1) relative to the node count for orders up to a
        few hundred; beyond that exp(x**2) overflows double precision.
        """
        if self.kind == GAUSS_HERMITE:
            return self.weights * np.exp(self.nodes**2)
        if self.kind == GAUSS_LAGUERRE:
            return self.weights * np.exp(self.nodes)
        return self.weights.copy()


def make_rule(kind: str, order: int) -> QuadratureRule:
    """Construct a quadrature rule of the given kind and order.

    Parameters
    ----------
    kind : str
        ``"gauss_hermite"`` (weight exp(-x**2) on the real line),
        ``"gauss_laguerre"`` (weight exp(-t) on [0, inf)), or
        ``"uniform_angle"`` (trapezoidal on the periodic circle).
    order : int
        Node count, at least 1.

    Returns
    -------
    QuadratureRule

    Notes
    -----
    The Gauss rules take their nodes from the eigenvalues of the
    symmetric Jacobi matrix (Golub-Welsch, with a Newton polish) and
    their weights from the stable derivative formula; raw squared
    eigenvector components lose all relative accuracy in the tail
    weights, which matters because downstream code multiplies those
    weights by large compensation factors.
    """
    if order < 1:
        raise ValueError("order must be a positive integer, got %r" % (order,))
    if kind == UNIFORM_ANGLE:
        nodes = 2.0 * np.pi * np.arange(order) / order
        weights = np.full(order, 2.0 * np.pi / order)
    elif kind == GAUSS_HERMITE:
        nodes, weights = special.roots_hermite(order)
        # enforce the exact symmetry the weight function guarantees
        nodes = (nodes - nodes[::-1]) / 2.0
        weights = (weights + weights[::-1]) / 2.0
    elif kind == GAUSS_LAGUERRE:
        nodes, weights = special.roots_laguerre(order)
    else:
        raise ValueError("unknown quadrature kind %r" % (kind,))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(kind=kind, order=order, nodes=nodes, weights=weights)


def hermite_eval(n: int, z):
    """Physicists' Hermite polynomial H_n(z) for real or complex z.

    Uses H_{k+1}(z) = 2 z H_k(z) - 2 k H_{k-1}(z); z may be a scalar or
    an ndarray.
    """
    if n < 0:
        raise ValueError("Hermite degree must be nonnegative")
    z = np.asarray(z)
    hkm1 = np.zeros_like(z, dtype=np.result_type(z.dtype, float))
    hk = np.ones_like(hkm1)
    for k in range(n):
        hkm1, hk = hk, 2.0 * z * hk - 2.0 * k * hkm1
    return hk[()] if hk.ndim == 0 else hk


def hermite_values(n_max: int, z, normalized: bool = False):
    """All Hermite values H_0(z) .. H_{n_max}(z) stacked on a leading axis.

    With ``normalized=True`` returns H_k(z)/sqrt(2**k k!) instead, the
    combination that stays O(1) once a Gaussian factor is attached.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    z = np.atleast_1d(np.asarray(z))
    out = np.zeros((n_max + 1,) + z.shape, dtype=np.result_type(z.dtype, float))
    out[0] = 1.0
    if normalized:
        if n_max >= 1:
            out[1] = z * math.sqrt(2.0)
        for k in range(1, n_max):
            out[k + 1] = z * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1.0)) * out[k - 1]
    else:
        if n_max >= 1:
            out[1] = 2.0 * z
        for k in range(1, n_max):
            out[k + 1] = 2.0 * z * out[k] - 2.0 * k * out[k - 1]
    return out


def legendre_eval(n: int, x):
    """Legendre polynomial P_n(x) by the Bonnet recurrence.

    The argument may exceed 1 (the norm formulas evaluate at
    1/cos(2 nu) >= 1); scalars and arrays are both accepted.
    """
    if n < 0:
        raise ValueError("Legendre degree must be nonnegative")
    x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
    pkm1 = np.zeros_like(x, dtype=np.result_type(x.dtype, float))
    pk = np.ones_like(pkm1)
    for k in range(n):
        pkm1, pk = pk, ((2.0 * k + 1.0) * x * pk - k * pkm1) / (k + 1.0)
    return pk[()] if pk.ndim == 0 else pk


def legendre_coefficients(n: int) -> np.ndarray:
    """Monomial coefficients of P_n, index k holding the x**k coefficient.

    Exact in double precision for the desk-scale degrees used here.
    """
    if n < 0:
        raise ValueError("Legendre degree must be nonnegative")
    pkm1 = np.zeros(n + 1)
    pk = np.zeros(n + 1)
    pkm1[0] = 1.0
    if n == 0:
        return pkm1
    pk[1] = 1.0
    for k in range(1, n):
        nxt = np.zeros(n + 1)
        nxt[1:] = (2.0 * k + 1.0) / (k + 1.0) * pk[:-1]
        nxt -= k / (k + 1.0) * pkm1
        pkm1, pk = pk, nxt
    return pk


def _alpha_of(seq):
    alpha = getattr(seq, "alpha", None)
    if alpha is None and callable(seq):
        return seq
    if alpha is None:
        raise TypeError("sequence object must expose alpha(n) or be callable")
    return alpha


def log_alpha_factorial(seq, k: int) -> float:
    """log of the generalized factorial alpha_1 * alpha_2 * ... * alpha_k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    alpha = _alpha_of(seq)
    total = 0.0
    for i in range(1, k + 1):
        a = float(alpha(i))
        if a <= 0.0:
            raise DomainError("alpha(%d) = %g is not positive; the sequence must be strictly increasing from alpha_0 = 0" % (i, a))
        total += math.log(a)
    return total


def alpha_factorial(seq, k: int) -> float:
    """Generalized factorial alpha_k! = alpha_1 alpha_2 ... alpha_k.

    The empty product (k = 0) is 1.  Computed in log space so large k
    cannot overflow intermediate products.

    Parameters
    ----------
    seq : object
        Anything exposing ``alpha(n)``, or a bare callable n -> alpha_n.
    k : int
        Nonnegative number of factors.
    """
    return math.exp(log_alpha_factorial(seq, k))
