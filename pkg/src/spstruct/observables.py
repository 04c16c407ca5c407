"""Observables as state transformations, mean values, and similarity-preserving maps.

An observable is a family of distinct bounded eigenvalues attached to
pairwise orthogonal eigensubspaces that together span the model.  On a
linear model it acts as ``r(a) = A a / |A a|`` with ``A = sum_j lambda_j P_j``
(``r(a) = a`` when ``A a`` vanishes); on a classical model that is the
identity.  Matrix models get the state singled out by the transition rule,
found by search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np

from .core import (
    AxiomViolation,
    NotHermitian,
    NotOrthogonal,
    SchemaError,
    SPError,
    SPModel,
    Tolerances,
    states_equivalent,
)
from .geometry import Subspace, as_subspace, extend_to_basis, is_ortho_set, project, same_subspace
from .models import HilbertModel, _complex_list, _parse_json, _real
from .phases import CONTINUITY_COEFFICIENT, phase_context, quantities


class Observable:
    """Eigenvalues ``lambdas[j]`` on eigensubspaces ``subspaces[j]``.

    Construction checks that eigenvalues are distinct, that eigensubspaces
    are non-empty and mutually orthogonal, and that together they span the
    model.  Eigenvalues are stored exactly as given.
    """

    def __init__(self, model: SPModel, parts: Sequence[tuple[float, Any]], check: bool = True):
        self.model = model
        self.parts = tuple((float(lam), as_subspace(model, X)) for lam, X in parts)
        if check:
            self._validate()
        self.bound = max((abs(lam) for lam in self.lambdas), default=0.0)
        self.operator = None
        if model.is_linear:
            A = sum(lam * X.projector for lam, X in self.parts)
            A.flags.writeable = False
            self.operator = A

    @property
    def lambdas(self) -> tuple:
        return tuple(lam for lam, _ in self.parts)

    @property
    def subspaces(self) -> tuple:
        return tuple(X for _, X in self.parts)

    def eigenbasis(self) -> list:
        """``(state, lambda)`` for every basis state of every eigensubspace."""
        return [(b, lam) for lam, X in self.parts for b in X.basis]

    def _validate(self):
        m, tol = self.model, self.model.tol
        if not self.parts:
            raise ValueError("an observable needs at least one eigensubspace")
        lams = sorted(self.lambdas)
        if any(b - a <= 0.0 for a, b in zip(lams, lams[1:])):
            raise ValueError(f"eigenvalues must be pairwise different, got {self.lambdas}")
        if any(X.dim == 0 for X in self.subspaces):
            raise ValueError("eigensubspaces must be non-empty")
        union = [b for X in self.subspaces for b in X.basis]
        for i, X in enumerate(self.subspaces):
            for Y in self.subspaces[i + 1:]:
                for a in X.basis:
                    for b in Y.basis:
                        if m._similarity(a, b) > tol.tol_orth:
                            raise NotOrthogonal("eigensubspaces must be mutually orthogonal")
        full = Subspace(m, union, check=False)
        missing = [c for c in m.canonical_states() if not full.contains(c)]
        if missing:
            raise ValueError("eigensubspaces do not span the whole model")

    def weights(self, x) -> np.ndarray:
        return np.array([X.weight(x) for X in self.subspaces])

    def scaled(self, c: float) -> "Observable":
        if c == 0:
            raise ValueError("eigenvalues are only defined up to a non-zero factor")
        return Observable(self.model, [(c * lam, X) for lam, X in self.parts], check=False)

    def __call__(self, a):
        return apply(self, a)

    def __repr__(self):
        dims = [X.dim for X in self.subspaces]
        return f"Observable(lambdas={list(self.lambdas)}, dims={dims})"


def apply(r: Observable, a: Any) -> Any:
    """The state ``r(a)`` after the transformation."""
    m = r.model
    a = m.check_state(a)
    if m.is_linear:
        v = r.operator @ m.embed(a)
        if _annihilated(r, float(np.vdot(v, v).real)):
            return a
        return m.unembed(v)
    return _apply_search(r, a)


def _apply_search(r: Observable, a):
    m = r.model
    best, best_defect = None, math.inf
    for y in m.canonical_states():
        defect = max((abs(m._similarity(y, b) - p) for b, p in _item3_targets(r, a)), default=0.0)
        if defect <= m.tol.tol_eq:
            return y
        if defect < best_defect:
            best, best_defect = y, defect
    raise AxiomViolation("ObservableLaws", {
        "a": m.state_to_json(a),
        "reason": "no state realizes the transition rule",
        "closest": m.state_to_json(best),
        "best_defect": best_defect,
    })


def _annihilated(r: Observable, s: float) -> bool:
    # |A a|^2 = s; a counts as a kernel vector once its weight outside the
    # kernel is below tol_orth, matching is_eigenvector
    return s <= r.model.tol.tol_orth * r.bound ** 2


def _denominator(r: Observable, a) -> float:
    return float(sum(lam ** 2 * w for lam, w in zip(r.lambdas, r.weights(a))))


def transition_probability(r: Observable, a, i: int, b) -> float:
    """``p(r(a), b)`` for ``b`` in eigensubspace ``i``, as the transition rule prescribes."""
    m = r.model
    s = _denominator(r, a)
    p_ab = m.similarity(a, b)
    if _annihilated(r, s):
        return p_ab
    return r.lambdas[i] ** 2 * p_ab / s


def _item3_targets(r: Observable, a):
    return [(b, transition_probability(r, a, i, b))
            for i, X in enumerate(r.subspaces) for b in X.basis]


def transition_defect(r: Observable, a, ra=None, probes: Optional[Sequence] = None) -> float:
    """Largest deviation of ``p(r(a), b)`` from the transition rule.

    ``probes`` are extra ``(i, b)`` pairs with ``b`` in eigensubspace ``i``;
    the basis states of every eigensubspace are always included.
    """
    m = r.model
    ra = apply(r, a) if ra is None else ra
    pairs = [(i, b) for i, X in enumerate(r.subspaces) for b in X.basis]
    pairs += list(probes or [])
    return max(abs(m.similarity(ra, b) - transition_probability(r, a, i, b)) for i, b in pairs)


class OmegaCheck(NamedTuple):
    verdict: str  # "pass", "fail" or "skipped"
    expected_sign: int
    before: Optional[float]
    after: Optional[float]
    defect: float


def check_omega_signs(r: Observable, a, b, j: int, k: int,
                      atol: float = 1e-7, min_rho: float = 1e-6) -> OmegaCheck:
    """``omega`` on eigensubspaces ``j, k`` is kept by ``r`` for same-sign
    eigenvalues and negated for opposite signs.

    Skipped when either omega is undefined, when an eigenvalue is zero, or
    when either ``rho`` is below ``min_rho`` (omega is then too poorly
    conditioned to compare at ``atol``).
    """
    lj, lk = r.lambdas[j], r.lambdas[k]
    sign = int(np.sign(lj * lk))
    if sign == 0:
        return OmegaCheck("skipped", 0, None, None, 0.0)
    ctx = phase_context(r.model, r.subspaces[j], r.subspaces[k])
    try:
        before = quantities(ctx, a, b)
        after = quantities(ctx, apply(r, a), b)
    except SPError:
        return OmegaCheck("skipped", sign, None, None, 0.0)
    if before.omega is None or after.omega is None or min(before.rho, after.rho) < min_rho:
        return OmegaCheck("skipped", sign, before.omega, after.omega, 0.0)
    defect = abs(after.omega - sign * before.omega)
    return OmegaCheck("pass" if defect <= atol else "fail", sign, before.omega, after.omega, defect)


def is_eigenvector(r: Observable, a) -> bool:
    tol = r.model.tol.tol_eq
    return any(w >= 1.0 - tol for w in r.weights(a))


def fixed_point_check(r: Observable, a) -> bool:
    """Whether ``r(a)`` is equivalent to ``a``; this holds exactly for eigenvectors."""
    return states_equivalent(r.model, apply(r, a), a)


def mean_value(r: Observable, x) -> float:
    """``sum_j lambda_j p(x, X_j)``."""
    return float(np.dot(r.lambdas, r.weights(x)))


def mean_value_from_basis(r: Observable, x, basis: Optional[Sequence] = None) -> float:
    """``sum_i mean(b_i) p(x, b_i)`` over an eigenvector basis (default: the stored one)."""
    m = r.model
    basis = [b for b, _ in r.eigenbasis()] if basis is None else basis
    return float(sum(mean_value(r, b) * m.similarity(x, b) for b in basis))


def mean_continuity_slack(r: Observable, x, y, coefficient: float = CONTINUITY_COEFFICIENT,
                          absolute: bool = False) -> float:
    """``(sum lambda) (c sqrt(1 - p) + (1 - p)) - (mean(x) - mean(y))``.

    ``absolute=True`` sums ``|lambda|`` instead; with signed sums the bound
    is void as soon as eigenvalues of both signs occur.  See
    :func:`spstruct.phases.continuity_bound` for the coefficient.
    """
    m = r.model
    q = max(0.0, 1.0 - m.similarity(x, y))
    total = sum(abs(lam) for lam in r.lambdas) if absolute else sum(r.lambdas)
    bound = total * (coefficient * math.sqrt(q) + q)
    return bound - (mean_value(r, x) - mean_value(r, y))


# -- constructors -----------------------------------------------------------

def _cluster(pairs, tol_eig):
    pairs = sorted(pairs, key=lambda p: p[0])
    groups = []
    for lam, vec in pairs:
        if groups and lam - groups[-1][-1][0] <= tol_eig:
            groups[-1].append((lam, vec))
        else:
            groups.append([(lam, vec)])
    return groups


def hermitian_to_observable(H, model: Optional[SPModel] = None,
                            tol: Optional[Tolerances] = None) -> Observable:
    """Observable of a Hermitian matrix.

    Eigenvalues closer than ``tol_eig`` are merged into one eigensubspace
    (at their mean), so numerically split degenerate spectra still give
    pairwise different eigenvalues.  Eigenvalues within ``tol_eig`` of zero
    are set to exactly zero.  With a sectored model the matrix must
    not couple different sectors.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitian(f"need a square matrix, got shape {H.shape}")
    model = model if model is not None else HilbertModel(H.shape[0], tol)
    if not model.is_linear or model.dimension != H.shape[0]:
        raise ValueError("matrix size does not match the model")
    t = model.tol
    skew = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    if skew > t.tol_eq:
        raise NotHermitian(f"max |H - H^dagger| = {skew:.3g}")
    H = (H + H.conj().T) / 2
    pairs = []
    covered = np.zeros_like(H, dtype=bool)
    for k in range(len(model.block_dims)):
        sl = model.block_slice(k)
        covered[sl, sl] = True
        vals, vecs = np.linalg.eigh(H[sl, sl])
        for j, lam in enumerate(vals):
            v = np.zeros(model.dimension, dtype=complex)
            v[sl] = vecs[:, j]
            pairs.append((float(lam), model.unembed(v)))
    if H.size and np.max(np.abs(H[~covered]), initial=0.0) > t.tol_eq:
        raise ValueError("operator couples different sectors")
    parts = []
    for group in _cluster(pairs, t.tol_eig):
        lam = float(np.mean([g[0] for g in group]))
        if abs(lam) <= t.tol_eig:
            lam = 0.0
        parts.append((lam, Subspace(model, [g[1] for g in group], check=False)))
    return Observable(model, parts)


def observable_from_values(model: SPModel, values: Sequence[float]) -> Observable:
    """Observable that takes ``values[i]`` on the i-th canonical state.

    Canonical states with equal values share an eigensubspace.  On a
    classical model this is an arbitrary bounded function on states.
    """
    states = model.canonical_states()
    if len(values) != len(states):
        raise ValueError(f"need {len(states)} values, got {len(values)}")
    groups: dict[float, list] = {}
    for s, v in zip(states, values):
        groups.setdefault(float(v), []).append(s)
    return Observable(model, [(lam, Subspace(model, ss, check=False)) for lam, ss in sorted(groups.items())])


def load_observable(data: bytes | str, tol: Optional[Tolerances] = None) -> Observable:
    """Parse a Hermitian or spectral observable fixture.

    ``{"kind": "hermitian", "dim": d, "matrix": [[[re, im], ...], ...]}`` or
    ``{"kind": "spectral", "parts": [{"lambda": x, "basis": [[[re, im], ...], ...]}, ...]}``.
    """
    doc = _parse_json(data)
    kind = doc.get("kind")
    if kind == "hermitian":
        dim = doc.get("dim")
        rows = doc.get("matrix")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise SchemaError("dim must be a positive integer")
        if not isinstance(rows, list) or len(rows) != dim:
            raise SchemaError(f"matrix must have {dim} rows")
        H = np.array([_complex_list(row, "matrix row") for row in rows])
        if H.shape != (dim, dim):
            raise SchemaError(f"matrix must be {dim}x{dim}")
        return hermitian_to_observable(H, HilbertModel(dim, tol))
    if kind == "spectral":
        parts = doc.get("parts")
        if not isinstance(parts, list) or not parts:
            raise SchemaError("parts must be a non-empty list")
        decoded = []
        for part in parts:
            if not isinstance(part, dict) or "lambda" not in part or "basis" not in part:
                raise SchemaError("each part needs 'lambda' and 'basis'")
            basis = part["basis"]
            if not isinstance(basis, list):
                raise SchemaError("basis must be a list of vectors")
            decoded.append((_real(part["lambda"]), [_complex_list(v, "basis vector") for v in basis]))
        dims = {len(v) for _, basis in decoded for v in basis}
        if len(dims) != 1:
            raise SchemaError("all basis vectors must have the same length")
        model = HilbertModel(dims.pop(), tol)
        return Observable(model, [(lam, Subspace(model, [model.state(v) for v in basis]))
                                  for lam, basis in decoded])
    raise SchemaError(f"unknown observable kind {kind!r}")


# -- morphisms --------------------------------------------------------------

class Morphism:
    """A map of a model into itself, meant to preserve similarity."""

    def __init__(self, model: SPModel, func: Callable[[Any], Any], matrix: Optional[np.ndarray] = None):
        self.model = model
        self.func = func
        self.matrix = matrix

    @classmethod
    def unitary(cls, model: SPModel, U) -> "Morphism":
        """Map realized by a unitary acting on embedded amplitudes."""
        if not model.is_linear:
            raise ValueError("unitary morphisms need a linear model")
        U = np.asarray(U, dtype=complex)
        U.flags.writeable = False
        return cls(model, lambda x: model.unembed(U @ model.embed(x)), U)

    @classmethod
    def identity(cls, model: SPModel) -> "Morphism":
        return cls(model, lambda x: x)

    def __call__(self, x):
        return self.model.check_state(self.func(self.model.check_state(x)))


@dataclass
class MorphismVerdict:
    ok: bool
    similarity_defect: float
    injective: bool
    witness: dict = field(default_factory=dict)


def check_morphism(f: Morphism, samples: Sequence) -> MorphismVerdict:
    """Similarity preservation and injectivity up to equivalence over all sample pairs."""
    m = f.model
    tol = m.tol.tol_eq
    images = [f(s) for s in samples]
    worst, witness, injective = 0.0, {}, True
    for i, (a, fa) in enumerate(zip(samples, images)):
        for b, fb in zip(samples[i:], images[i:]):
            p, q = m.similarity(a, b), m.similarity(fa, fb)
            if abs(p - q) > worst:
                worst = abs(p - q)
                witness = {"a": m.state_to_json(a), "b": m.state_to_json(b), "p": p, "p_image": q}
            if q >= 1.0 - tol and p < 1.0 - tol:
                injective = False
                witness = {"a": m.state_to_json(a), "b": m.state_to_json(b), "reason": "not injective"}
    return MorphismVerdict(worst <= tol and injective, worst, injective, witness)


@dataclass
class InvariantBasisVerdict:
    applicable: bool
    ok: bool
    weight_defect: float = 0.0
    maps_into: bool = True
    projection_commutes: bool = True
    witness: dict = field(default_factory=dict)


def check_invariant_basis(f: Morphism, B: Sequence, A: Sequence, samples: Sequence,
                          members: Sequence = ()) -> InvariantBasisVerdict:
    """Consequences of fixing every state of the basis ``B``, for ``X`` spanned by ``A``.

    Checks on ``samples`` that ``p(x, X) = p(f(x), X)`` and that
    ``t(f(x), X)`` is equivalent to ``f(t(x, X))``, and on ``members``
    (states of ``X``) that ``f`` keeps them in ``X``.  Not applicable when
    some ``f(b)`` is not equivalent to ``b``.
    """
    m = f.model
    tol = m.tol
    if not all(states_equivalent(m, f(b), b) for b in B):
        return InvariantBasisVerdict(applicable=False, ok=True)
    if not all(any(states_equivalent(m, a, b) for b in B) for a in A):
        raise ValueError("A must be a subset of B")
    X = Subspace(m, A)
    worst, witness = 0.0, {}
    commutes = True
    for x in samples:
        fx = f(x)
        d = abs(X.weight(x) - X.weight(fx))
        if d > worst:
            worst, witness = d, {"x": m.state_to_json(x), "defect": d}
        if X.weight(x) > tol.rho_floor:
            if not states_equivalent(m, project(m, fx, X), f(project(m, x, X))):
                commutes = False
                witness = {"x": m.state_to_json(x), "reason": "projection does not commute"}
    maps_into = all(X.contains(f(z)) for z in members)
    ok = worst <= tol.tol_eq and maps_into and commutes
    return InvariantBasisVerdict(True, ok, worst, maps_into, commutes, witness)


def image_is_basis(f: Morphism, B: Sequence) -> bool:
    """Whether ``f`` maps the basis ``B`` onto a basis of the model."""
    m = f.model
    image = [f(b) for b in B]
    if not is_ortho_set(m, image).ok:
        return False
    full = extend_to_basis(m, [])
    return same_subspace(m, full, image) and len(image) == len(full)
