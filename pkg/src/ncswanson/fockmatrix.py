"""Truncated matrix realizations of the pseudo-bosonic ladder algebra.

The two-mode ladder operators act on the tensor basis labeled by
(n1, n2) with 0 <= n_j <= n_max, flattened row-major with n2 fastest.
Truncation necessarily breaks the commutation rules at the top level, so
every algebraic identity is asserted on an interior sub-block only.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import DomainError, TruncationWarning

__all__ = [
    "ModelParams",
    "MultiIndex",
    "TruncatedOperator",
    "ladder_matrices",
    "commutator_defect",
    "hamiltonian_matrix",
    "adjoint_hamiltonian_matrix",
    "displacement_matrix",
    "bch_defect",
    "operator_to_csv",
]

_QUARTER_PI = math.pi / 4.0


@dataclass(frozen=True)
class ModelParams:
    """Model parameters (nu, theta).

    nu may be complex; its real part must lie in (-pi/4, pi/4) so that
    cos(2 nu_re) stays positive.  theta is the noncommutativity strength
    and may be any real number, zero included.
    """

    nu: complex
    theta: float = 0.0

    def __post_init__(self):
        nu = complex(self.nu)
        if not (math.isfinite(nu.real) and math.isfinite(nu.imag)):
            raise DomainError("nu must be finite")
        if not -_QUARTER_PI < nu.real < _QUARTER_PI:
            raise DomainError(
                "nu_re must lie in (-pi/4, pi/4), got nu_re = %g (pi/4 = %g)"
                % (nu.real, _QUARTER_PI)
            )
        if not math.isfinite(float(self.theta)):
            raise DomainError("theta must be finite")

    @property
    def nu_re(self) -> float:
        return complex(self.nu).real

    @property
    def nu_im(self) -> float:
        return complex(self.nu).imag

    @property
    def cos_2nu(self) -> complex:
        return cmath.cos(2.0 * complex(self.nu))

    def eigenvalue(self, idx) -> complex:
        """(n1 + n2 + 1)/cos(2 nu) for the given multi-index."""
        n1, n2 = idx
        return (n1 + n2 + 1) / self.cos_2nu


class MultiIndex(NamedTuple):
    """Label (n1, n2) of a two-mode excitation."""

    n1: int
    n2: int

    @staticmethod
    def checked(n1: int, n2: int) -> "MultiIndex":
        if n1 < 0 or n2 < 0:
            raise ValueError("multi-index components must be nonnegative")
        return MultiIndex(int(n1), int(n2))


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense operator on the truncated two-mode basis.

    entries[i, j] is the matrix element between flattened indices i and
    j, where (n1, n2) flattens to n1*(n_max+1) + n2.
    """

    dim_per_mode: int
    entries: np.ndarray

    @property
    def n_max(self) -> int:
        return self.dim_per_mode - 1

    @property
    def dim(self) -> int:
        return self.dim_per_mode**2

    def flat_index(self, idx) -> int:
        n1, n2 = idx
        if not (0 <= n1 < self.dim_per_mode and 0 <= n2 < self.dim_per_mode):
            raise ValueError("index %r outside truncation %d" % ((n1, n2), self.n_max))
        return n1 * self.dim_per_mode + n2

    def adjoint(self) -> "TruncatedOperator":
        return TruncatedOperator(self.dim_per_mode, self.entries.conj().T.copy())


def _mode_ladders(n_max: int):
    # 1D lowering a and raising b on a single (n_max+1)-dimensional mode
    k = np.arange(1, n_max + 1, dtype=float)
    a = np.zeros((n_max + 1, n_max + 1))
    a[np.arange(n_max), np.arange(1, n_max + 1)] = np.sqrt(k)
    return a, a.T.copy()


def _two_mode(m: np.ndarray, mode: int, n_max: int) -> np.ndarray:
    eye = np.eye(n_max + 1)
    return np.kron(m, eye) if mode == 1 else np.kron(eye, m)


def ladder_matrices(n_max: int):
    """Truncated matrices (A1, A2, B1, B2) of the two-mode ladder algebra.

    A_j sends (n1, n2) to sqrt(n_j) times the index lowered in mode j;
    B_j raises with sqrt(n_j + 1), losing the top level to truncation.

    Parameters
    ----------
    n_max : int
        Per-mode truncation, at least 1.

    Returns
    -------
    tuple of TruncatedOperator
        (A1, A2, B1, B2), each of dimension (n_max+1)**2.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1; n_max = 0 leaves no room for ladder action")
    a, b = _mode_ladders(n_max)
    dim = n_max + 1
    mk = lambda m, mode: TruncatedOperator(dim, _two_mode(m, mode, n_max).astype(complex))
    return mk(a, 1), mk(a, 2), mk(b, 1), mk(b, 2)


def _sparse_ladders(n_max: int):
    k = np.arange(1, n_max + 1, dtype=float)
    a = sp.diags(np.sqrt(k), 1, format="csr")
    b = sp.diags(np.sqrt(k), -1, format="csr")
    eye = sp.identity(n_max + 1, format="csr")
    out = []
    for m in (a, b):
        out.append(sp.kron(m, eye, format="csr"))
        out.append(sp.kron(eye, m, format="csr"))
    return out  # A1, A2, B1, B2


def commutator_defect(n_max: int, restrict: bool = True) -> float:
    """Largest violation of the pseudo-bosonic commutation rules.

    Checks [A_j, B_k] - delta_jk and [A_1, A_2], [B_1, B_2] on the
    truncated basis.  With ``restrict`` (the default) the defect is
    measured on the sub-block n1, n2 <= n_max - 1, where the rules hold
    exactly; without it the truncation edge contributes n_max + 1.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    A1, A2, B1, B2 = _sparse_ladders(n_max)
    dim = (n_max + 1) ** 2
    eye = sp.identity(dim, format="csr", dtype=float)
    cands = [
        A1 @ B1 - B1 @ A1 - eye,
        A2 @ B2 - B2 @ A2 - eye,
        A1 @ B2 - B2 @ A1,
        A2 @ B1 - B1 @ A2,
        A1 @ A2 - A2 @ A1,
        B1 @ B2 - B2 @ B1,
    ]
    if restrict:
        n1 = np.arange(dim) // (n_max + 1)
        n2 = np.arange(dim) % (n_max + 1)
        keep = np.flatnonzero((n1 <= n_max - 1) & (n2 <= n_max - 1))
    defect = 0.0
    for c in cands:
        if restrict:
            c = c[keep][:, keep]
        if c.nnz:
            defect = max(defect, float(np.abs(c.data).max()))
    return defect


def hamiltonian_matrix(params: ModelParams, n_max: int) -> TruncatedOperator:
    """(B1 A1 + B2 A2 + 1)/cos(2 nu) on the truncated basis.

    The product form is computed literally and comes out exactly
    diagonal, entry (n1 + n2 + 1)/cos(2 nu), truncation edge included.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    A1, A2, B1, B2 = _sparse_ladders(n_max)
    dim = (n_max + 1) ** 2
    h = (B1 @ A1 + B2 @ A2 + sp.identity(dim)) / params.cos_2nu
    return TruncatedOperator(n_max + 1, h.toarray().astype(complex))


def adjoint_hamiltonian_matrix(params: ModelParams, n_max: int) -> TruncatedOperator:
    """Adjoint of the truncated Hamiltonian.

    Conjugate transpose of ``hamiltonian_matrix``; diagonal with entries
    (n1 + n2 + 1)/cos(2 conj(nu)).  For real nu it coincides with the
    Hamiltonian itself.
    """
    return hamiltonian_matrix(params, n_max).adjoint()


def _mode_exp(coeff_raise: complex, coeff_lower: complex, n_max: int) -> np.ndarray:
    a, b = _mode_ladders(n_max)
    return expm(coeff_raise * b + coeff_lower * a)


def displacement_matrix(z: complex, w: complex, n_max: int):
    """Displacement operators (U, V) at label (z, w).

    U = exp(z B1 - conj(z) A1) exp(w B2 - conj(w) A2); V is built the
    same way from the matrix adjoints of the ladder operators,
    V = exp(z A1* - conj(z) B1*) exp(w A2* - conj(w) B2*).  Each mode
    exponential is a dense scaling-and-squaring matrix exponential; the
    two-mode result is their Kronecker product.

    A TruncationWarning is issued when |z|**2 + |w|**2 > n_max/4, where
    the displaced state no longer fits comfortably below the truncation.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if abs(z) ** 2 + abs(w) ** 2 > n_max / 4.0:
        warnings.warn(
            "label (|z|^2 + |w|^2 = %.3g) exceeds n_max/4 = %.3g; truncation error is not negligible"
            % (abs(z) ** 2 + abs(w) ** 2, n_max / 4.0),
            TruncationWarning,
            stacklevel=2,
        )
    a, b = _mode_ladders(n_max)
    ad, bd = a.conj().T, b.conj().T
    u1 = expm(z * b - np.conj(z) * a)
    u2 = expm(w * b - np.conj(w) * a)
    v1 = expm(z * ad - np.conj(z) * bd)
    v2 = expm(w * ad - np.conj(w) * bd)
    dim = n_max + 1
    U = TruncatedOperator(dim, np.kron(u1, u2).astype(complex))
    V = TruncatedOperator(dim, np.kron(v1, v2).astype(complex))
    return U, V


def _interior_mask(n_max: int, top: int) -> np.ndarray:
    dim = (n_max + 1) ** 2
    n1 = np.arange(dim) // (n_max + 1)
    n2 = np.arange(dim) % (n_max + 1)
    return np.flatnonzero((n1 <= top) & (n2 <= top))


def bch_defect(z: complex, w: complex, n_max: int) -> float:
    """Disagreement between the direct and factored displacement forms.

    Each mode exponential exp(z B - conj(z) A) is recomputed from its two
    centrally-ordered factorizations,

        exp(-|z|^2/2) exp(z B) exp(-conj(z) A)   and
        exp(+|z|^2/2) exp(-conj(z) A) exp(z B),

    and likewise for V from the adjoint generators.  Returns the largest
    entrywise difference against the direct form on the sub-block
    n1, n2 <= n_max/2.  Exact in infinite dimension; at finite n_max the
    value measures the truncation tail and decreases as n_max grows.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    a, b = _mode_ladders(n_max)
    keep = _interior_mask(n_max, n_max // 2)

    def forms(gen_raise, gen_lower, lam):
        # lam scales the raise part, -conj(lam) the lower part
        direct = expm(lam * gen_raise - np.conj(lam) * gen_lower)
        er = expm(lam * gen_raise)
        el = expm(-np.conj(lam) * gen_lower)
        half = abs(lam) ** 2 / 2.0
        return direct, math.exp(-half) * (er @ el), math.exp(half) * (el @ er)

    defect = 0.0
    for raise_m, lower_m in ((b, a), (a.conj().T, b.conj().T)):
        d1, f1a, f1b = forms(raise_m, lower_m, z)
        d2, f2a, f2b = forms(raise_m, lower_m, w)
        direct = np.kron(d1, d2)[np.ix_(keep, keep)]
        for m1, m2 in ((f1a, f2a), (f1b, f2b)):
            alt = np.kron(m1, m2)[np.ix_(keep, keep)]
            defect = max(defect, float(np.abs(alt - direct).max()))
    return defect


def operator_to_csv(op: TruncatedOperator, path) -> None:
    """Write a truncated operator as CSV, one matrix row per line.

    Entries appear row-major as alternating real and imaginary parts,
    formatted with 17 significant digits for bit-stable round trips.
    """
    rows = []
    for row in op.entries:
        cells = []
        for v in row:
            cells.append("%.17g" % v.real)
            cells.append("%.17g" % v.imag)
        rows.append(",".join(cells))
    text = "\n".join(rows) + "\n"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
