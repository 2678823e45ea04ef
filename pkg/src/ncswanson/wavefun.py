"""Closed-form wavefunctions, analytic ladder action, and the finite
difference Hamiltonian.

Every field handled here is a finite superposition over one product
family of Hermite-Gaussian modes,

    f(x1, x2) = kappa * sum_n c_n * m_{n1}(x1) * m_{n2}(x2),
    m_k(x) = H_k(c x) exp(-c**2 x**2 / 2) / sqrt(2**k k!),  c = exp(i*mu),

so ladder operators, dilations, and linear combinations all stay inside
the family and evaluation reduces to two mode-value matrices.  The phi
family has mu = nu, the psi family mu = -conj(nu), the oscillator family
mu = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import DomainError
from .fockmatrix import ModelParams, MultiIndex
from .specfun import hermite_values

__all__ = [
    "WaveField",
    "GridSpec",
    "phi_constant",
    "psi_constant",
    "phi_field",
    "psi_field",
    "oscillator_field",
    "superposition",
    "combine",
    "rescaled",
    "eval_field",
    "eval_grid",
    "eval_phi",
    "eval_psi",
    "apply_ladder_analytic",
    "apply_hamiltonian_fd",
    "grid_norm",
    "grid_inner",
    "field_to_csv",
    "LADDER_TOKENS",
]

_INV_SQRT_PI = math.pi**-0.5

# (alpha coefficient, derivative sign) per operator token; the operator is
# (exp(i*alpha) x_j + s exp(-i*alpha) d_j)/sqrt(2) acting in mode j.
LADDER_TOKENS = ("A1", "A2", "B1", "B2", "A1dag", "A2dag", "B1dag", "B2dag")


def phi_constant(params: ModelParams) -> complex:
    """Overall constant of the phi family, pi**-0.5 for every nu."""
    return complex(_INV_SQRT_PI)


def psi_constant(params: ModelParams) -> complex:
    """Overall constant of the psi family.

    Fixed to exp(-2i*conj(nu))/sqrt(pi), the unique choice (given the phi
    constant) that makes the two families biorthonormal; see the package
    tests for the quadrature verification.
    """
    return cmath.exp(-2.0j * np.conj(complex(params.nu))) * _INV_SQRT_PI


@dataclass(frozen=True, eq=False)
class WaveField:
    """Finite superposition over one Hermite-Gaussian product family.

    Attributes
    ----------
    kind : str
        ``"phi"``, ``"psi"``, ``"oscillator"`` or ``"superposition"``;
        a label only, the numerics depend on ``scale`` and the table.
    params : ModelParams
        Model parameters; ladder operators applied to this field take
        their nu from here.
    scale : complex
        The mode argument factor mu (modes use c = exp(i*mu)).
    norm_constant : complex
        Constant kappa multiplying the whole superposition.
    coeffs : mapping
        Finite table MultiIndex -> complex coefficient.
    """

    kind: str
    params: ModelParams
    scale: complex
    norm_constant: complex
    coeffs: Mapping

    @property
    def gaussian_rate(self) -> complex:
        """exp(2i*mu); its real part must be positive for decay."""
        return cmath.exp(2.0j * complex(self.scale))

    def degree(self) -> MultiIndex:
        """Largest mode index appearing in each slot."""
        if not self.coeffs:
            return MultiIndex(0, 0)
        return MultiIndex(
            max(k[0] for k in self.coeffs), max(k[1] for k in self.coeffs)
        )

    def coefficient_matrix(self) -> np.ndarray:
        d = self.degree()
        c = np.zeros((d.n1 + 1, d.n2 + 1), dtype=complex)
        for (k1, k2), v in self.coeffs.items():
            c[k1, k2] = v
        return c

    def is_zero(self) -> bool:
        return not any(v != 0 for v in self.coeffs.values())


def _basis(kind, params, idx, scale, constant) -> WaveField:
    idx = MultiIndex.checked(*idx)
    return WaveField(
        kind=kind,
        params=params,
        scale=complex(scale),
        norm_constant=complex(constant),
        coeffs={idx: 1.0 + 0.0j},
    )


def phi_field(params: ModelParams, idx) -> WaveField:
    """Eigenfunction phi_{n1,n2} of the model Hamiltonian."""
    return _basis("phi", params, idx, complex(params.nu), phi_constant(params))


def psi_field(params: ModelParams, idx) -> WaveField:
    """Eigenfunction psi_{n1,n2} of the adjoint Hamiltonian.

    Obtained from the phi family by nu -> -conj(nu) together with the
    biorthonormalizing constant.
    """
    return _basis("psi", params, idx, -np.conj(complex(params.nu)), psi_constant(params))


def oscillator_field(params: ModelParams, idx) -> WaveField:
    """Orthonormal harmonic oscillator basis function e_{n1,n2}."""
    return _basis("oscillator", params, idx, 0.0, _INV_SQRT_PI)


def superposition(template: WaveField, coeffs: Mapping) -> WaveField:
    """A new field over the same family as ``template`` with the given table."""
    table = {MultiIndex.checked(*k): complex(v) for k, v in coeffs.items() if v != 0}
    return replace(template, kind="superposition", coeffs=table)


def combine(fields, weights) -> WaveField:
    """Linear combination of fields from one family.

    All fields must share scale, norm constant, and params; the result
    carries the merged coefficient table.
    """
    fields = list(fields)
    weights = list(weights)
    if not fields or len(fields) != len(weights):
        raise ValueError("need equally many fields and weights, at least one each")
    first = fields[0]
    table = {}
    for f, wgt in zip(fields, weights):
        if (
            f.params != first.params
            or complex(f.scale) != complex(first.scale)
            or complex(f.norm_constant) != complex(first.norm_constant)
        ):
            raise ValueError("fields live in different families; cannot combine")
        for k, v in f.coeffs.items():
            table[k] = table.get(k, 0.0) + wgt * v
    return superposition(first, table)


def rescaled(field: WaveField, eta: complex, phase_powers: int = 1) -> WaveField:
    """The field x -> exp(i*eta*phase_powers) * field(exp(i*eta) x).

    Argument rescaling shifts the family scale by eta; each application
    of the two-mode dilation contributes one power of exp(i*eta) to the
    front constant (phase_powers counts them).
    """
    eta = complex(eta)
    return replace(
        field,
        kind="superposition" if field.kind == "superposition" else field.kind,
        scale=complex(field.scale) + eta,
        norm_constant=complex(field.norm_constant) * cmath.exp(1j * eta * phase_powers),
    )


def _mode_values(n_top: int, scale: complex, x: np.ndarray) -> np.ndarray:
    # rows 0..n_top of m_k(x) = Htilde_k(c x) exp(-c^2 x^2/2), c = exp(i*mu)
    c = cmath.exp(1j * complex(scale))
    u = c * x
    vals = hermite_values(n_top, u, normalized=True)
    return vals * np.exp(-0.5 * u * u)


def eval_field(field: WaveField, x1, x2):
    """Evaluate the field at (possibly complex, possibly array) points."""
    x1a, x2a = np.broadcast_arrays(np.asarray(x1), np.asarray(x2))
    shape = x1a.shape
    c = field.coefficient_matrix()
    v1 = _mode_values(c.shape[0] - 1, field.scale, x1a.ravel().astype(complex))
    v2 = _mode_values(c.shape[1] - 1, field.scale, x2a.ravel().astype(complex))
    out = field.norm_constant * np.einsum("ap,ab,bp->p", v1, c, v2)
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def eval_phi(params: ModelParams, idx, x1, x2):
    """phi_{n1,n2}(x1, x2) in closed form."""
    return eval_field(phi_field(params, idx), x1, x2)


def eval_psi(params: ModelParams, idx, x1, x2):
    """psi_{n1,n2}(x1, x2) in closed form."""
    return eval_field(psi_field(params, idx), x1, x2)


@dataclass(frozen=True)
class GridSpec:
    """Uniform square grid [-L, L]^2 for finite difference work.

    half_width L and spacing h must tile exactly (L/h integral); the
    stencil order is 2 or 4.
    """

    half_width: float
    spacing: float
    stencil_order: int = 4

    def __post_init__(self):
        if self.half_width <= 0 or self.spacing <= 0:
            raise ValueError("half_width and spacing must be positive")
        steps = self.half_width / self.spacing
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("half_width must be an integer multiple of spacing")
        if self.stencil_order not in (2, 4):
            raise ValueError("stencil_order must be 2 or 4")

    @property
    def steps(self) -> int:
        return int(round(self.half_width / self.spacing))

    def axis(self) -> np.ndarray:
        return np.arange(-self.steps, self.steps + 1) * self.spacing


def eval_grid(field: WaveField, grid: GridSpec) -> np.ndarray:
    """Field values on the grid, indexed [i, j] for (x1_i, x2_j)."""
    ax = grid.axis().astype(complex)
    c = field.coefficient_matrix()
    v1 = _mode_values(c.shape[0] - 1, field.scale, ax)
    v2 = _mode_values(c.shape[1] - 1, field.scale, ax)
    return field.norm_constant * (v1.T @ c @ v2)


_OP_TABLE = {
    # token -> (alpha as multiple of (nu, conj_nu), derivative sign s)
    "A1": ("nu", +1.0, 1),
    "A2": ("nu", +1.0, 2),
    "B1": ("nu", -1.0, 1),
    "B2": ("nu", -1.0, 2),
    "A1dag": ("mconj", -1.0, 1),
    "A2dag": ("mconj", -1.0, 2),
    "B1dag": ("mconj", +1.0, 1),
    "B2dag": ("mconj", +1.0, 2),
}


def apply_ladder_analytic(which: str, field: WaveField) -> WaveField:
    """Apply a ladder operator in closed form.

    ``which`` is one of A1, A2, B1, B2 or their adjoints A1dag .. B2dag.
    The operator (exp(i*alpha) x_j + s exp(-i*alpha) d_j)/sqrt(2), with
    alpha = nu for A/B and alpha = -conj(nu) for the adjoints, maps the
    mode family with scale mu to itself:

        O m_k = u sqrt(k+1) m_{k+1} + d sqrt(k) m_{k-1},
        u = (e^{i d'} - s e^{-i d'})/2,  d = (e^{i d'} + s e^{-i d'})/2,

    where d' = alpha - mu.  When d' = 0 one of u, d vanishes exactly, so
    eigenfamily relations like A1 phi_{0,0} = 0 hold without roundoff.
    """
    try:
        kind_a, sign, mode = _OP_TABLE[which]
    except KeyError:
        raise ValueError("unknown ladder token %r; expected one of %s" % (which, ", ".join(LADDER_TOKENS)))
    nu = complex(field.params.nu)
    alpha = nu if kind_a == "nu" else -np.conj(nu)
    return _apply_shifted_ladder(field, alpha, sign, mode)


def _apply_shifted_ladder(field: WaveField, alpha: complex, sign: float, mode: int) -> WaveField:
    # (exp(i*alpha) x_j + sign exp(-i*alpha) d_j)/sqrt(2) on mode j; alpha = 0
    # gives the plain oscillator ladders
    delta = complex(alpha) - complex(field.scale)
    e_plus = cmath.exp(1j * delta)
    e_minus = cmath.exp(-1j * delta)
    up = (e_plus - sign * e_minus) / 2.0
    down = (e_plus + sign * e_minus) / 2.0
    table = {}
    for (k1, k2), v in field.coeffs.items():
        k = (k1, k2)[mode - 1]
        if up != 0.0:
            tgt = (k1 + 1, k2) if mode == 1 else (k1, k2 + 1)
            table[tgt] = table.get(tgt, 0.0) + up * math.sqrt(k + 1) * v
        if down != 0.0 and k > 0:
            tgt = (k1 - 1, k2) if mode == 1 else (k1, k2 - 1)
            table[tgt] = table.get(tgt, 0.0) + down * math.sqrt(k) * v
    return superposition(field, table)


def _d1(f: np.ndarray, h: float, order: int, axis: int) -> np.ndarray:
    # zero padding outside the grid; the decay gate keeps this honest
    if axis == 1:
        return _d1(f.T, h, order, 0).T
    if order == 2:
        p = np.pad(f, ((1, 1), (0, 0)))
        return (p[2:] - p[:-2]) / (2.0 * h)
    p = np.pad(f, ((2, 2), (0, 0)))
    return (-p[4:] + 8.0 * p[3:-1] - 8.0 * p[1:-3] + p[:-4]) / (12.0 * h)


def _d2(f: np.ndarray, h: float, order: int, axis: int) -> np.ndarray:
    if axis == 1:
        return _d2(f.T, h, order, 0).T
    if order == 2:
        p = np.pad(f, ((1, 1), (0, 0)))
        return (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (h * h)
    p = np.pad(f, ((2, 2), (0, 0)))
    return (-p[4:] + 16.0 * p[3:-1] - 30.0 * p[2:-2] + 16.0 * p[1:-3] - p[:-4]) / (12.0 * h * h)


def boundary_ratio(values: np.ndarray) -> float:
    """max |f| on the outermost grid frame over max |f| on the grid."""
    mags = np.abs(values)
    peak = float(mags.max())
    if peak == 0.0:
        return 0.0
    frame = max(
        float(mags[0].max()),
        float(mags[-1].max()),
        float(mags[:, 0].max()),
        float(mags[:, -1].max()),
    )
    return frame / peak


def apply_hamiltonian_fd(
    params: ModelParams,
    field: WaveField,
    grid: GridSpec,
    boundary_tol: float = 1e-4,
) -> np.ndarray:
    """Apply the full noncommutative Hamiltonian by finite differences.

    The operator is assembled from its momentum, position, and angular
    cross terms after the Bopp shift, with commuting variables x_j and
    d_j = d/dx_j (braces below are divided by 2 cos(2 nu)):

        Tp = -(e^{-2i nu} + (theta^2/4) e^{2i nu}) (d1^2 + d2^2)
        Tx = e^{2i nu} [x1^2 + x2^2 + i theta (x1 d2 - x2 d1)
                        - (theta^2/4)(d1^2 + d2^2)]
        Tc = theta e^{2i nu} [-i (x1 d2 - x2 d1) + (theta/2)(d1^2 + d2^2)]

    The theta-dependent pieces cancel at runtime, which is the testable
    content of the Bopp shift.  Derivatives use central stencils of the
    grid's order with zero padding, guarded by a relative boundary-decay
    gate: the field's boundary-frame magnitude must not exceed
    ``boundary_tol`` times its grid peak.

    Returns
    -------
    numpy.ndarray
        The gridded image, indexed like ``eval_grid`` output.

    Raises
    ------
    DomainError
        When the field has not decayed at the grid boundary; enlarge
        ``half_width`` (or reduce nu) and retry.
    """
    F = eval_grid(field, grid)
    ratio = boundary_ratio(F)
    if ratio > boundary_tol:
        raise DomainError(
            "field boundary/peak ratio %.3g exceeds %.3g on half_width %g; "
            "zero-padded stencils would be polluted, increase half_width"
            % (ratio, boundary_tol, grid.half_width)
        )
    h = grid.spacing
    order = grid.stencil_order
    ax = grid.axis()
    X1 = ax[:, None]
    X2 = ax[None, :]
    nu = complex(params.nu)
    theta = float(params.theta)
    e2 = cmath.exp(2j * nu)
    em2 = cmath.exp(-2j * nu)
    D1 = _d1(F, h, order, axis=0)
    D2 = _d1(F, h, order, axis=1)
    lap = _d2(F, h, order, axis=0) + _d2(F, h, order, axis=1)
    angular = X1 * D2 - X2 * D1
    tp = -(em2 + theta**2 / 4.0 * e2) * lap
    tx = e2 * ((X1**2 + X2**2) * F + 1j * theta * angular - theta**2 / 4.0 * lap)
    tc = theta * e2 * (-1j * angular + theta / 2.0 * lap)
    return (tp + tx + tc) / (2.0 * params.cos_2nu)


def grid_norm(values: np.ndarray, grid: GridSpec) -> float:
    """Discrete L2 norm, h * sqrt(sum |f|^2)."""
    return float(grid.spacing * np.linalg.norm(values))


def grid_inner(f_values: np.ndarray, g_values: np.ndarray, grid: GridSpec) -> complex:
    """Discrete L2 inner product, conjugate-linear in the first slot."""
    return complex(grid.spacing**2 * np.vdot(f_values, g_values))


def field_to_csv(values: np.ndarray, grid: GridSpec, path) -> None:
    """Write gridded values as CSV rows (x1, x2, re, im)."""
    ax = grid.axis()
    lines = []
    for i, x1 in enumerate(ax):
        for j, x2 in enumerate(ax):
            v = values[i, j]
            lines.append("%.17g,%.17g,%.17g,%.17g" % (x1, x2, v.real, v.imag))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
