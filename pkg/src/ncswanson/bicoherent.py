"""Bicoherent states and the resolution of the identity.

Two layers live here.  The generic layer works with abstract positive
sequences (``SequenceSpec``), norm-bound data (``BoundSpec``) and radial
measures (``RadialMeasure``): convergence radius, normalization sums,
and the moment side of the measure problem.  The Swanson layer
specializes everything to the sqrt-index sequence, where the states are
finite superpositions over the phi or psi eigenfamilies,

    state(z, w) = N(z, w) * sum_n z**n1 w**n2 / sqrt(n1! n2!) * member_n,

and the identity-resolution integral over both labels can be checked
against plain inner products.

The single-mode theory is deliberately not a separate code path: freeze
the second label at w = 0 and the second mode stays in its ground slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .errors import DomainError, TruncationError, UnsupportedSequenceError
from .fockmatrix import ModelParams, MultiIndex
from .innerprod import default_rule_order, inner, mode_overlap_matrix, norm_closed_form
from .specfun import (
    GAUSS_HERMITE,
    GAUSS_LAGUERRE,
    UNIFORM_ANGLE,
    QuadratureRule,
    alpha_factorial,
    log_alpha_factorial,
    make_rule,
)
from .wavefun import (
    WaveField,
    apply_ladder_analytic,
    combine,
    phi_field,
    psi_field,
    superposition,
)

__all__ = [
    "SequenceSpec",
    "BoundSpec",
    "CoherentLabel",
    "RadialMeasure",
    "swanson_sequence",
    "swanson_bounds",
    "radius",
    "normalization",
    "coherent_tail_bound",
    "coherent_state",
    "eigen_residual",
    "moment_measure",
    "resolution_residual",
]

_TWO_PI = 2.0 * math.pi

# probe indices used to sanity-check declared limits; heuristic by nature,
# the contract only promises detection of gross mismatches
_SEQ_PROBE_DENSE = tuple(range(41))
_SEQ_PROBE_MID = 400
_SEQ_PROBE_FAR = 6400


@dataclass(frozen=True)
class SequenceSpec:
    """A positive strictly increasing sequence with a declared limit.

    Parameters
    ----------
    name : str
        Identifier used in error messages and measure routing.
    evaluator : callable
        Maps a nonnegative integer n to alpha_n.
    limit : float
        Declared limit of alpha_n, finite or ``math.inf``.

    Notes
    -----
    Construction probes the evaluator: alpha_0 must vanish, the values
    must strictly increase on a dense probe range, and the declared
    limit must be plausible on far probes.  The limit check is a
    heuristic (finite limits must be approached to within a factor two,
    infinite limits must still be growing between the mid and far
    probes); sequences crawling toward infinity slower than n**(1/4)
    are rejected even though they are formally admissible.
    """

    name: str
    evaluator: Callable[[int], float]
    limit: float

    def __post_init__(self):
        if not self.limit > 0.0:
            raise DomainError("sequence limit must be positive, got %s" % (self.limit,))
        vals = [float(self.evaluator(n)) for n in _SEQ_PROBE_DENSE]
        if abs(vals[0]) > 1e-12:
            raise DomainError(
                "sequence %r must start at zero, got alpha_0 = %g" % (self.name, vals[0])
            )
        for n in range(len(vals) - 1):
            if not vals[n] < vals[n + 1]:
                raise DomainError(
                    "sequence %r is not strictly increasing at n = %d (%g -> %g)"
                    % (self.name, n, vals[n], vals[n + 1])
                )
        mid = float(self.evaluator(_SEQ_PROBE_MID))
        far = float(self.evaluator(_SEQ_PROBE_FAR))
        if math.isinf(self.limit):
            if not far >= 2.0 * mid:
                raise DomainError(
                    "sequence %r declares an infinite limit but has stalled "
                    "(alpha_%d = %g, alpha_%d = %g)"
                    % (self.name, _SEQ_PROBE_MID, mid, _SEQ_PROBE_FAR, far)
                )
        else:
            top = max(max(vals), mid, far)
            if top > self.limit * (1.0 + 1e-9):
                raise DomainError(
                    "sequence %r exceeds its declared limit %g (reached %g)"
                    % (self.name, self.limit, top)
                )
            if far < 0.5 * self.limit:
                raise DomainError(
                    "sequence %r has not approached its declared limit %g "
                    "(alpha_%d = %g)" % (self.name, self.limit, _SEQ_PROBE_FAR, far)
                )

    def alpha(self, n: int) -> float:
        """alpha_n; the entry point ``alpha_factorial`` duck-types on."""
        if n < 0:
            raise DomainError("sequence index must be nonnegative, got %d" % n)
        return float(self.evaluator(n))


@dataclass(frozen=True)
class BoundSpec:
    """Norm-bound data ||member_n|| <= amplitude * ratio**n * M_n.

    ``m_evaluator`` supplies M_n and ``m_limit`` the declared limit of
    M_n / M_{n+1} (infinity allowed).  All quantities must be positive;
    the declared ratio limit is probe-checked loosely.
    """

    amplitude: float
    ratio: float
    m_evaluator: Callable[[int], float]
    m_limit: float

    def __post_init__(self):
        if not self.amplitude > 0.0:
            raise DomainError("bound amplitude must be positive, got %g" % self.amplitude)
        if not self.ratio > 0.0:
            raise DomainError("bound ratio must be positive, got %g" % self.ratio)
        if not self.m_limit > 0.0:
            raise DomainError("declared M_n/M_{n+1} limit must be positive")
        for n in (0, 1, 2, 5, 50, 200, 800):
            if not float(self.m_evaluator(n)) > 0.0:
                raise DomainError("M_%d is not positive" % n)
        q_near = float(self.m_evaluator(50)) / float(self.m_evaluator(51))
        q_far = float(self.m_evaluator(800)) / float(self.m_evaluator(801))
        if math.isinf(self.m_limit):
            if not q_far >= 2.0 * min(q_near, 1.0):
                raise DomainError(
                    "M_n/M_{n+1} declares limit infinity but is not growing "
                    "(%g at n=50, %g at n=800)" % (q_near, q_far)
                )
        elif abs(q_far - self.m_limit) > 0.5 * max(1.0, self.m_limit):
            raise DomainError(
                "M_n/M_{n+1} at n=800 is %g, far from the declared limit %g"
                % (q_far, self.m_limit)
            )

    def m(self, n: int) -> float:
        return float(self.m_evaluator(n))


class CoherentLabel(NamedTuple):
    """Label pair (z, w) of a two-mode coherent state."""

    z: complex
    w: complex

    @staticmethod
    def of(label) -> "CoherentLabel":
        if isinstance(label, CoherentLabel):
            return label
        z, w = label
        return CoherentLabel(complex(z), complex(w))


@dataclass(frozen=True)
class RadialMeasure:
    """Radial density lambda'(r) on [0, inf) with a quadrature strategy.

    strategy ``"laguerre_square"`` substitutes t = r**2 onto a
    Gauss-Laguerre rule (tailored to densities with exp(-r**2) decay,
    exact for the Swanson density); ``"adaptive"`` integrates r directly
    with an adaptive routine and handles slower decay or mild endpoint
    singularities.
    """

    density: Callable[[float], float]
    strategy: str
    name: str = ""

    def __post_init__(self):
        if self.strategy not in ("laguerre_square", "adaptive"):
            raise DomainError("unknown radial quadrature strategy %r" % (self.strategy,))

    def moment(self, k: int, order: int | None = None) -> float:
        """The moment integral of r**(2k) against the density."""
        if k < 0:
            raise DomainError("moment order must be nonnegative, got %d" % k)
        if self.strategy == "laguerre_square":
            rule = make_rule(GAUSS_LAGUERRE, order or max(40, k + 10))
            t = rule.nodes
            dens = np.array([float(self.density(r)) for r in np.sqrt(t)])
            # dr = dt / (2 sqrt(t)); the rule weight already carries e^-t
            vals = rule.weights * t**k * dens * np.exp(t) / (2.0 * np.sqrt(t))
            return float(np.sum(vals))
        val, _err = integrate.quad(
            lambda r: r ** (2 * k) * float(self.density(r)),
            0.0,
            np.inf,
            limit=300,
            epsabs=1e-14,
            epsrel=1e-11,
        )
        return float(val)


def swanson_sequence() -> SequenceSpec:
    """The sqrt-index sequence driving both modes of the model."""
    return SequenceSpec(name="sqrt_index", evaluator=math.sqrt, limit=math.inf)


def _growth_ratio(params: ModelParams) -> float:
    x = 1.0 / math.cos(2.0 * params.nu_re)
    return math.sqrt(x + math.sqrt(x * x - 1.0))


def swanson_bounds(params: ModelParams, family: str = "phi") -> BoundSpec:
    """Norm bounds for one eigenfamily: ||member_n|| <= A * r**(n1+n2).

    A is the ground-state norm and r the per-quantum growth ratio; the
    mild sequence M_n is identically one.
    """
    a0 = math.sqrt(norm_closed_form(params, MultiIndex(0, 0), family=family))
    return BoundSpec(
        amplitude=a0, ratio=_growth_ratio(params), m_evaluator=lambda n: 1.0, m_limit=1.0
    )


def radius(seq: SequenceSpec, bphi: BoundSpec, bpsi: BoundSpec) -> float:
    """Common convergence radius of the coherent series for one mode.

    rho = limit(alpha) * min(1, M(phi)/r(phi), M(psi)/r(psi)), with the
    usual convention that infinity times a positive number is infinity.
    """
    margin = min(1.0, bphi.m_limit / bphi.ratio, bpsi.m_limit / bpsi.ratio)
    return seq.limit * margin


def _log_series_sum(modulus: float, seq: SequenceSpec, cutoff: int) -> float:
    # log of sum_{k<=cutoff} modulus^(2k) / (alpha_k!)^2
    if modulus == 0.0:
        return 0.0
    lm = math.log(modulus)
    logs = [2.0 * k * lm - 2.0 * log_alpha_factorial(seq, k) for k in range(cutoff + 1)]
    top = max(logs)
    return top + math.log(sum(math.exp(v - top) for v in logs))


def normalization(
    seq_a: SequenceSpec, seq_b: SequenceSpec, label, cutoff: int
) -> float:
    """Truncated normalization N(z, w) of the two-mode coherent state.

    N = (sum_k |z|^2k/(alpha_k!)^2)^(-1/2) (same in w with the second
    sequence), summed through the cutoff in log space.  The dropped tail
    is controlled by the next-term geometric estimate; labels at or
    beyond a finite sequence limit make the partial sums divergent and
    are rejected.
    """
    if cutoff < 1:
        raise DomainError("normalization needs cutoff >= 1, got %d" % cutoff)
    lab = CoherentLabel.of(label)
    for modulus, seq, slot in ((abs(lab.z), seq_a, "z"), (abs(lab.w), seq_b, "w")):
        if modulus >= seq.limit:
            raise DomainError(
                "|%s| = %g sits at or beyond the convergence radius %g of "
                "sequence %r; the normalization series diverges"
                % (slot, modulus, seq.limit, seq.name)
            )
    log_n = -0.5 * (
        _log_series_sum(abs(lab.z), seq_a, cutoff)
        + _log_series_sum(abs(lab.w), seq_b, cutoff)
    )
    return math.exp(log_n)


def _mode_partial_and_tail(scaled: float, cutoff: int):
    # S = sum_{n<=cutoff} scaled^n/sqrt(n!), T >= sum_{n>cutoff} of the same
    logs = [n * (math.log(scaled) if scaled > 0 else -math.inf) - 0.5 * math.lgamma(n + 1.0)
            for n in range(cutoff + 1)]
    if scaled == 0.0:
        return 1.0, 0.0
    top = max(logs)
    s = math.exp(top) * sum(math.exp(v - top) for v in logs)
    first = math.exp((cutoff + 1) * math.log(scaled) - 0.5 * math.lgamma(cutoff + 2.0))
    q = scaled / math.sqrt(cutoff + 2.0)
    t = math.inf if q >= 1.0 else first / (1.0 - q)
    return s, t


def coherent_tail_bound(params: ModelParams, family: str, label, cutoff: int) -> float:
    """Norm bound on the modes a cutoff drops from the coherent series.

    Combines the family norm bound with per-mode geometric tails; the
    result is infinite when the kept range has not yet cleared the
    series' growth peak, in which case no finite certificate exists at
    this cutoff.
    """
    lab = CoherentLabel.of(label)
    bound = swanson_bounds(params, family)
    n_trunc = normalization(swanson_sequence(), swanson_sequence(), lab, cutoff)
    sz, tz = _mode_partial_and_tail(abs(lab.z) * bound.ratio, cutoff)
    sw, tw = _mode_partial_and_tail(abs(lab.w) * bound.ratio, cutoff)
    return n_trunc * bound.amplitude * (tz * (sw + tw) + sz * tw)


def coherent_state(
    family: str, params: ModelParams, label, cutoff: int, tol: float | None = 1e-8
) -> WaveField:
    """Truncated bicoherent state over the phi or psi family.

    Coefficient of member (n1, n2) is N(z,w) z^n1 w^n2 / sqrt(n1! n2!).
    With ``tol`` set, the truncation tail bound must certify that
    accuracy; otherwise a TruncationError carrying the achievable
    tolerance is raised.  ``tol=None`` skips the gate (used by the
    residual studies, which measure truncation instead of bounding it).
    """
    if family not in ("phi", "psi"):
        raise ValueError("family must be 'phi' or 'psi', got %r" % (family,))
    if cutoff < 1:
        raise DomainError("coherent_state needs cutoff >= 1, got %d" % cutoff)
    lab = CoherentLabel.of(label)
    if tol is not None:
        bound = coherent_tail_bound(params, family, lab, cutoff)
        if not bound <= tol:
            raise TruncationError(
                "cutoff %d leaves a truncation tail bound of %.3e at label "
                "(|z| = %.3g, |w| = %.3g), above the requested tolerance %.3e"
                % (cutoff, bound, abs(lab.z), abs(lab.w), tol),
                achievable=bound,
            )
    n_const = normalization(swanson_sequence(), swanson_sequence(), lab, cutoff)
    n = np.arange(cutoff + 1)
    root_fact = np.exp([0.5 * math.lgamma(k + 1.0) for k in n])
    vz = np.asarray(complex(lab.z) ** n, dtype=complex) / root_fact
    vw = np.asarray(complex(lab.w) ** n, dtype=complex) / root_fact
    c = n_const * np.outer(vz, vw)
    template = phi_field(params, (0, 0)) if family == "phi" else psi_field(params, (0, 0))
    table = {(i, j): c[i, j] for i in range(cutoff + 1) for j in range(cutoff + 1)}
    return superposition(template, table)


_EIGEN_TOKENS = {
    "A1": ("phi", "z"),
    "A2": ("phi", "w"),
    "B1dag": ("psi", "z"),
    "B2dag": ("psi", "w"),
}


def eigen_residual(
    which: str, params: ModelParams, label, cutoff: int, rule: QuadratureRule | None = None
) -> float:
    """Relative eigen-relation defect of a truncated coherent state.

    ||Op state - eigenvalue state|| / ||state|| with the analytic ladder
    action; A_j pairs with the phi states (eigenvalue z for mode 1 and w
    for mode 2), the daggered B_j with the psi states.  All of the
    defect comes from the dropped modes, so the value decreases as the
    cutoff grows.
    """
    if which not in _EIGEN_TOKENS:
        raise ValueError(
            "which must be one of %s, got %r" % (sorted(_EIGEN_TOKENS), which)
        )
    family, slot = _EIGEN_TOKENS[which]
    lab = CoherentLabel.of(label)
    state = coherent_state(family, params, lab, cutoff, tol=None)
    moved = apply_ladder_analytic(which, state)
    eigenvalue = lab.z if slot == "z" else lab.w
    defect = combine((moved, state), (1.0, -eigenvalue))
    if rule is None:
        rule = make_rule(GAUSS_HERMITE, default_rule_order(cutoff + 1))
    num = inner(defect, defect, rule).real
    den = inner(state, state, rule).real
    return math.sqrt(max(num, 0.0) / den)


def _is_sqrt_sequence(seq: SequenceSpec) -> bool:
    return all(abs(seq.alpha(k) - math.sqrt(k)) <= 1e-12 * (1.0 + math.sqrt(k)) for k in range(26))


def moment_measure(
    seq: SequenceSpec,
    density: Callable[[float], float] | None = None,
    strategy: str = "adaptive",
    verify_orders: int = 9,
    verify_rtol: float = 1e-9,
) -> RadialMeasure:
    """Radial measure whose moments solve the resolution requirement.

    The k-th moment of the returned measure equals (alpha_k!)^2/(2 pi).
    For the sqrt-index sequence the density is known in closed form,
    lambda'(r) = r exp(-r**2) / pi, and is verified internally against
    the factorial moments.  Any other sequence needs a caller-supplied
    density, which is verified against its own factorial moments before
    acceptance; without one the general moment problem is not solved
    here and the sequence is rejected.
    """
    if density is None:
        if not _is_sqrt_sequence(seq):
            raise UnsupportedSequenceError(
                "no closed-form radial density is known for sequence %r; "
                "supply density= (and a quadrature strategy) to use it" % seq.name
            )
        measure = RadialMeasure(
            density=lambda r: r * math.exp(-r * r) / math.pi,
            strategy="laguerre_square",
            name="swanson_radial",
        )
        for k in range(11):
            target = math.exp(math.lgamma(k + 1.0)) / _TWO_PI
            got = measure.moment(k)
            if abs(got - target) > 1e-9 * target:
                raise RuntimeError(
                    "internal moment verification failed at k = %d: %r vs %r"
                    % (k, got, target)
                )
        return measure
    measure = RadialMeasure(density=density, strategy=strategy, name="user:%s" % seq.name)
    for k in range(verify_orders):
        target = alpha_factorial(seq, k) ** 2 / _TWO_PI
        got = measure.moment(k)
        if abs(got - target) > verify_rtol * abs(target):
            raise DomainError(
                "supplied density does not reproduce the required moment at "
                "k = %d: got %.12g, need %.12g" % (k, got, target)
            )
    return measure


def _check_oscillator_span(field: WaveField, role: str, cutoff: int) -> None:
    if complex(field.scale) != 0.0:
        raise DomainError(
            "%s field must lie in the oscillator span (family scale 0), "
            "got scale %s" % (role, field.scale)
        )
    deg = field.degree()
    if max(deg.n1, deg.n2) > cutoff / 2:
        raise DomainError(
            "%s field reaches oscillator index %d, beyond the resolvable "
            "range cutoff/2 = %g" % (role, max(deg.n1, deg.n2), cutoff / 2)
        )


def _family_scale_and_constant(params: ModelParams, family: str):
    probe = phi_field(params, (0, 0)) if family == "phi" else psi_field(params, (0, 0))
    return complex(probe.scale), complex(probe.norm_constant)


def _bra_frame(field: WaveField, params, family, cutoff, rule):
    # F[k, l] = <field, member_{k,l}>
    mu, kappa = _family_scale_and_constant(params, family)
    c = field.coefficient_matrix()
    o1 = mode_overlap_matrix(field.scale, mu, c.shape[0] - 1, cutoff, rule)
    o2 = mode_overlap_matrix(field.scale, mu, c.shape[1] - 1, cutoff, rule)
    return np.conj(field.norm_constant) * kappa * (o1.T @ c.conj() @ o2)


def _ket_frame(field: WaveField, params, family, cutoff, rule):
    # Q[k, l] = <member_{k,l}, field>
    mu, kappa = _family_scale_and_constant(params, family)
    c = field.coefficient_matrix()
    o1 = mode_overlap_matrix(mu, field.scale, cutoff, c.shape[0] - 1, rule)
    o2 = mode_overlap_matrix(mu, field.scale, cutoff, c.shape[1] - 1, rule)
    return np.conj(kappa) * field.norm_constant * (o1 @ c @ o2.T)


def resolution_residual(
    f: WaveField,
    g: WaveField,
    params: ModelParams,
    radial_order: int,
    angular_order: int,
    cutoff: int,
    swapped: bool = False,
) -> complex:
    """Defect of the bicoherent resolution of the identity on (f, g).

    Evaluates the double-label integral of

        N(z,w)^(-2) <f, psi(z,w)> <phi(z,w), g>

    with Gauss-Laguerre radii (through t = r**2, where the model's
    radial density contributes the constant 1/(2 pi)) and uniform-angle
    rules, then subtracts <f, g>.  The quadrature sum is evaluated in
    exactly regrouped form: the angle rules contribute circulant
    selector factors sum_j w_j e^{i (l-k) theta_j} and the radius rules
    moment factors, which is the same finite sum reorganized so the
    node-dependent normalization (which cancels against N^(-2)) never
    has to be materialized.  ``swapped=True`` exchanges the family roles
    of the two inner products.  Both fields must lie in the oscillator
    span with indices at most cutoff/2.
    """
    _check_oscillator_span(f, "bra", cutoff)
    _check_oscillator_span(g, "ket", cutoff)
    if radial_order < 1 or angular_order < 1:
        raise DomainError("radial and angular orders must be positive")
    seq = swanson_sequence()
    hermite = make_rule(GAUSS_HERMITE, default_rule_order(cutoff))

    rad = make_rule(GAUSS_LAGUERRE, radial_order)
    ang = make_rule(UNIFORM_ANGLE, angular_order)
    kk = np.arange(cutoff + 1)
    phases = np.exp(1j * np.outer(ang.nodes, kk))
    selector = (phases * ang.weights[:, None]).T @ phases.conj()
    half_powers = np.arange(2 * cutoff + 1) / 2.0
    radial_moments = rad.weights @ np.power.outer(rad.nodes, half_powers) / _TWO_PI
    m = selector * radial_moments[kk[:, None] + kk[None, :]]

    bra_family, ket_family = ("phi", "psi") if swapped else ("psi", "phi")
    fac = np.exp([log_alpha_factorial(seq, int(k)) for k in kk])
    pm = _bra_frame(f, params, bra_family, cutoff, hermite) / np.outer(fac, fac)
    qm = _ket_frame(g, params, ket_family, cutoff, hermite) / np.outer(fac, fac)
    total = np.sum((m.T @ pm @ m) * qm)
    return complex(total - inner(f, g, hermite))
