"""L2 inner products, biorthogonality Gram tests, and closed-form norms.

All integrals reduce to tensorized one-dimensional Gauss-Hermite sums
with the weight function compensated at the nodes.  Because every field
is a finite superposition over a Hermite-Gaussian product family, the
two-dimensional quadrature factorizes exactly into per-mode overlap
matrices; the factorized evaluation below is the same finite sum as the
naive tensor-grid one, just regrouped.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .fockmatrix import ModelParams
from .specfun import GAUSS_HERMITE, QuadratureRule, legendre_coefficients, legendre_eval, make_rule
from .wavefun import WaveField, _mode_values, phi_constant, phi_field, psi_constant, psi_field

__all__ = [
    "GramReport",
    "GrowthBound",
    "default_rule_order",
    "mode_overlap_matrix",
    "inner",
    "gram_biorthogonality",
    "norm_closed_form",
    "norm_quadrature",
    "prudnikov_oracle",
    "norm_growth_bound",
]


class GramReport(NamedTuple):
    """Summary of a biorthogonality Gram computation."""

    n_max: int
    max_offdiag: float
    max_diag_defect: float
    rule_order: int
    under_resolved: bool


class GrowthBound(NamedTuple):
    """Norm growth data: the bound itself, the base r_nu, degeneracy flag."""

    bound: float
    r_nu: float
    degenerate: bool


def default_rule_order(n_max: int) -> int:
    """Rule order heuristic: Hermite degree exactness plus phase headroom."""
    return max(80, 4 * n_max + 20)


@lru_cache(maxsize=128)
def _cached_rule(order: int) -> QuadratureRule:
    return make_rule(GAUSS_HERMITE, order)


@lru_cache(maxsize=256)
def _overlap_cached(mu_bra: complex, mu_ket: complex, n_bra: int, n_ket: int, order: int):
    rule = _cached_rule(order)
    # substitute x = u/sqrt(t) with t the pair's real Gaussian decay rate,
    # so the weight-compensated integrand carries no residual growth; for
    # equal scales it becomes a plain polynomial and the rule is exact
    pair_rate = (np.conj(cmath.exp(2j * mu_bra)) + cmath.exp(2j * mu_ket)) / 2.0
    t = pair_rate.real
    if t <= 0.0:
        raise DomainError("mode pair has nonpositive joint decay rate %.3g" % t)
    x = rule.nodes.astype(complex) / math.sqrt(t)
    cw = rule.compensated_weights() / math.sqrt(t)
    vb = _mode_values(n_bra, mu_bra, x)
    vk = _mode_values(n_ket, mu_ket, x)
    out = (vb.conj() * cw) @ vk.T
    out.setflags(write=False)
    return out


def mode_overlap_matrix(
    mu_bra: complex, mu_ket: complex, n_bra: int, n_ket: int, rule: QuadratureRule
) -> np.ndarray:
    """1D overlaps O[k, l] = integral of conj(m_k^bra) m_l^ket.

    Modes m are the normalized Hermite-Gaussian factors at the given
    family scales; the integral is the compensated Gauss-Hermite sum of
    the rule with nodes scaled to the pair's joint decay rate.  Shape
    (n_bra+1, n_ket+1).
    """
    if rule.kind != GAUSS_HERMITE:
        raise ValueError("mode overlaps need a gauss_hermite rule, got %r" % rule.kind)
    return _overlap_cached(complex(mu_bra), complex(mu_ket), int(n_bra), int(n_ket), rule.order)


def _require_decay(field: WaveField, role: str) -> None:
    if field.gaussian_rate.real <= 0.0:
        raise DomainError(
            "%s field has Gaussian rate with nonpositive real part (%.3g); "
            "its modes do not decay and the integral diverges"
            % (role, field.gaussian_rate.real)
        )


def inner(f: WaveField, g: WaveField, rule: QuadratureRule) -> complex:
    """Sesquilinear inner product <f, g>, conjugate-linear in f.

    Tensorized compensated Gauss-Hermite quadrature over the plane,
    evaluated through the exact per-mode factorization.
    """
    if rule.kind != GAUSS_HERMITE:
        raise ValueError("inner products need a gauss_hermite rule, got %r" % rule.kind)
    _require_decay(f, "bra")
    _require_decay(g, "ket")
    cf = f.coefficient_matrix()
    cg = g.coefficient_matrix()
    n_bra = max(cf.shape) - 1
    n_ket = max(cg.shape) - 1
    O = mode_overlap_matrix(f.scale, g.scale, n_bra, n_ket, rule)
    o1 = O[: cf.shape[0], : cg.shape[0]]
    o2 = O[: cf.shape[1], : cg.shape[1]]
    val = np.sum(cf.conj() * (o1 @ cg @ o2.T))
    return complex(np.conj(f.norm_constant) * g.norm_constant * val)


def gram_biorthogonality(
    params: ModelParams, n_max: int, rule: QuadratureRule | None = None
) -> GramReport:
    """Gram matrix <phi_n, psi_m> over all indices up to n_max, summarized.

    Reports the largest off-diagonal magnitude and the largest deviation
    of a diagonal entry from 1.  A rule of order below 4*n_max is
    accepted but flagged under-resolved rather than rejected.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if rule is None:
        rule = _cached_rule(default_rule_order(n_max))
    mu_phi = complex(params.nu)
    mu_psi = -np.conj(complex(params.nu))
    O = mode_overlap_matrix(mu_phi, mu_psi, n_max, n_max, rule)
    scalar = np.conj(phi_constant(params)) * psi_constant(params)
    gram = scalar * np.kron(O, O)
    dim = (n_max + 1) ** 2
    diag = np.diagonal(gram)
    off = gram - np.diag(diag)
    return GramReport(
        n_max=n_max,
        max_offdiag=float(np.abs(off).max()) if dim > 1 else 0.0,
        max_diag_defect=float(np.abs(diag - 1.0).max()),
        rule_order=rule.order,
        under_resolved=rule.order < 4 * n_max,
    )


def norm_closed_form(params: ModelParams, idx, family: str = "phi") -> float:
    """Squared L2 norm of phi_{n1,n2} (or psi) in closed form.

    ||phi_n||^2 = pi |N1|^2 / (exp(-2 nu_im) cos(2 nu_re))
                  * P_{n1}(1/cos(2 nu_re)) * P_{n2}(1/cos(2 nu_re)),

    with the Legendre polynomial P.  The psi family obeys the same
    formula with |N2|^2 in place of |N1|^2; the exp(-2 nu_im) factor is
    shared because both families' Gaussians have the same modulus.
    """
    n1, n2 = idx
    if n1 < 0 or n2 < 0:
        raise ValueError("index components must be nonnegative")
    if family == "phi":
        const = phi_constant(params)
    elif family == "psi":
        const = psi_constant(params)
    else:
        raise ValueError("family must be 'phi' or 'psi', got %r" % (family,))
    decay = math.exp(-2.0 * params.nu_im) * math.cos(2.0 * params.nu_re)
    arg = 1.0 / math.cos(2.0 * params.nu_re)
    pref = math.pi * abs(const) ** 2 / decay
    return float(pref * legendre_eval(n1, arg) * legendre_eval(n2, arg))


def norm_quadrature(
    params: ModelParams, idx, rule: QuadratureRule | None = None, family: str = "phi"
) -> float:
    """Squared L2 norm by tensor quadrature, the oracle for the closed form."""
    if rule is None:
        rule = _cached_rule(default_rule_order(max(idx)))
    fld = phi_field(params, idx) if family == "phi" else psi_field(params, idx)
    return float(inner(fld, fld, rule).real)


def _hermite_pair_half_line(p: complex, a: complex, b: complex, n: int) -> complex:
    # integral over [0, inf) of exp(-p x^2) H_n(a x) H_n(b x) dx in the
    # branch-safe polynomial form: only sqrt(p) carries a fractional power.
    s = a * a + b * b - p
    coeffs = legendre_coefficients(n)
    ab = a * b
    total = 0.0 + 0.0j
    for k in range(n % 2, n + 1, 2):
        j = (n - k) // 2
        total += coeffs[k] * ab**k * s**j * p ** (-(n + k) // 2)
    return 2.0 ** (n - 1) * math.sqrt(math.pi) * math.factorial(n) * total / cmath.sqrt(p)


def prudnikov_oracle(p: complex, a: complex, b: complex, c: complex, f: complex, n1: int, n2: int) -> complex:
    """Closed form of the quarter-plane Hermite-Gaussian double integral

        int_0^inf int_0^inf exp(-p (x^2 + y^2))
            H_{n1}(a x) H_{n1}(b x) H_{n2}(c y) H_{n2}(f y) dx dy.

    The integrand separates, and each half-line factor evaluates to

        2^(n-1) sqrt(pi) n! (p s)^(n/2) p^(-n-1/2) P_n(a b / sqrt(p s)),

    s = a^2 + b^2 - p, expanded here over the monomial coefficients of
    P_n so that no fractional power of a complex quantity other than
    sqrt(p) appears.  Serves as the independent oracle behind
    ``norm_closed_form``.
    """
    if complex(p).real <= 0.0:
        raise DomainError("prudnikov_oracle requires Re(p) > 0, got %s" % (p,))
    if n1 < 0 or n2 < 0:
        raise ValueError("Hermite degrees must be nonnegative")
    return complex(
        _hermite_pair_half_line(complex(p), complex(a), complex(b), n1)
        * _hermite_pair_half_line(complex(p), complex(c), complex(f), n2)
    )


_GROWTH_REFERENCE_INDICES = 10  # versioned: the A_nu maximization grid is 0..10 squared


def norm_growth_bound(params: ModelParams, idx) -> GrowthBound:
    """Exponential bound ||phi_{n1,n2}|| <= A_nu * r_nu^(n1+n2).

    r_nu = sqrt(1/cos(2 nu) + sqrt(1/cos(2 nu)^2 - 1)); A_nu is computed,
    not asserted, as the max of ||phi_n|| / r_nu^(n1+n2) over a fixed
    reference index grid.  Only derived for real nu; nu = 0 collapses to
    r = 1 and is flagged degenerate.
    """
    if params.nu_im != 0.0:
        raise DomainError("the growth bound is derived for real nu; use norm_closed_form at complex nu")
    n1, n2 = idx
    if n1 < 0 or n2 < 0:
        raise ValueError("index components must be nonnegative")
    x = 1.0 / math.cos(2.0 * params.nu_re)
    r = math.sqrt(x + math.sqrt(max(x * x - 1.0, 0.0)))
    amp = 0.0
    for k1 in range(_GROWTH_REFERENCE_INDICES + 1):
        for k2 in range(_GROWTH_REFERENCE_INDICES + 1):
            amp = max(amp, math.sqrt(norm_closed_form(params, (k1, k2))) / r ** (k1 + k2))
    return GrowthBound(bound=amp * r ** (n1 + n2), r_nu=r, degenerate=(params.nu_re == 0.0))
