"""Ortho-sets, subspaces, o-projections and the subspace lattice.

Linear models (Hilbert, sectored, classical) are handled with projector
algebra on the embedded vectors.  Matrix models only know ``p``, so every
existential step is an exhaustive search over their finite set of states.
"""

from __future__ import annotations

from typing import Any, Iterator, NamedTuple, Sequence

import numpy as np

from .core import (
    AlreadyInSubspace,
    AxiomViolation,
    NotOrthogonal,
    NotOrthoSet,
    OrthogonalToSubspace,
    SPModel,
    similarity_to_set,
    worst_overlap,
)


class OrthoCheck(NamedTuple):
    ok: bool
    worst: float


def is_ortho_set(model: SPModel, A: Sequence) -> OrthoCheck:
    """Whether all distinct members of ``A`` are orthogonal, with the worst overlap."""
    worst = worst_overlap(model, A)
    return OrthoCheck(worst <= model.tol.tol_orth, worst)


def _require_ortho(model: SPModel, A: Sequence) -> tuple:
    A = tuple(model.check_state(a) for a in A)
    worst = worst_overlap(model, A)
    if worst > model.tol.tol_orth:
        raise NotOrthoSet(f"members overlap with p = {worst:.3g}")
    return A


def _vectors(model, states) -> np.ndarray:
    if not states:
        return np.zeros((model.dimension, 0), dtype=complex)
    return np.column_stack([model.embed(s) for s in states])


def _remove_span(V: np.ndarray, w: np.ndarray) -> np.ndarray:
    # two passes keep the residual orthogonal to working precision
    for _ in range(2):
        w = w - V @ (V.conj().T @ w)
    return w


class Subspace:
    """The subspace generated by an ortho-set.

    ``basis`` is the generating ortho-set.  For linear models ``vectors``
    holds the embedded basis as columns and ``projector`` the orthogonal
    projector onto their span; both are computed once.
    """

    __slots__ = ("model", "basis", "vectors", "projector")

    def __init__(self, model: SPModel, basis: Sequence, check: bool = True):
        basis = _require_ortho(model, basis) if check else tuple(basis)
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "basis", basis)
        if model.is_linear:
            V = _vectors(model, basis)
            P = V @ V.conj().T
            V.flags.writeable = False
            P.flags.writeable = False
            object.__setattr__(self, "vectors", V)
            object.__setattr__(self, "projector", P)
        else:
            object.__setattr__(self, "vectors", None)
            object.__setattr__(self, "projector", None)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def weight(self, x: Any) -> float:
        """``p(x, X)``."""
        m = self.model
        if getattr(m, "exact_overlap", False):
            c = self.vectors.conj().T @ m.embed(m.check_state(x))
            return float(np.vdot(c, c).real)
        return similarity_to_set(m, x, self.basis, check=False)

    def contains(self, x: Any) -> bool:
        return self.weight(x) >= 1.0 - self.model.tol.tol_eq

    def __contains__(self, x):
        return self.contains(x)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, model={self.model.kind})"


def span(model: SPModel, A: Sequence) -> Subspace:
    return Subspace(model, A)


def as_subspace(model: SPModel, X) -> Subspace:
    return X if isinstance(X, Subspace) else Subspace(model, X)


# -- finite-model search helpers -------------------------------------------

def _orthogonal(model, i, j) -> bool:
    t = model.tol.tol_orth
    return model._similarity(i, j) <= t and model._similarity(j, i) <= t


def ortho_sets(model: SPModel, max_size: int | None = None) -> Iterator[tuple]:
    """Every ortho-set of a finite model as a sorted index tuple, ``()`` first."""
    states = model.canonical_states()
    n = len(states)
    adj = [[i != j and _orthogonal(model, states[i], states[j]) for j in range(n)] for i in range(n)]
    limit = n if max_size is None else max_size

    def grow(current, start):
        yield tuple(states[i] for i in current)
        if len(current) >= limit:
            return
        for k in range(start, n):
            if all(adj[k][c] for c in current):
                yield from grow(current + [k], k + 1)

    yield from grow([], 0)


def _search_o_projection(model, x, A, pxA):
    tol = model.tol
    best_defect = np.inf
    for y in model.canonical_states():
        perp = similarity_to_set(model, y, A, check=False)
        eq = abs(pxA + model._similarity(x, y) - 1.0)
        if perp <= tol.tol_orth and eq <= tol.tol_eq:
            return y, 0.0
        best_defect = min(best_defect, max(perp, eq))
    return None, best_defect


# -- operations -------------------------------------------------------------

def o_project(model: SPModel, x: Any, A: Sequence) -> Any:
    """The state ``y`` orthogonal to ``A`` with ``p(x, A) + p(x, y) = 1``.

    Raises :class:`AlreadyInSubspace` when ``p(x, A) >= 1 - tol_eq``.  On a
    matrix model with no such state, raises :class:`AxiomViolation`.
    """
    x = model.check_state(x)
    A = _require_ortho(model, A)
    pxA = similarity_to_set(model, x, A, check=False)
    if pxA >= 1.0 - model.tol.tol_eq:
        raise AlreadyInSubspace(f"p(x, A) = {pxA:.12g}")
    if model.is_linear:
        w = _remove_span(_vectors(model, A), model.embed(x))
        return model.unembed(w)
    y, defect = _search_o_projection(model, x, A, pxA)
    if y is None:
        raise AxiomViolation("OProjection", {
            "x": model.state_to_json(x),
            "A": [model.state_to_json(a) for a in A],
            "best_defect": defect,
        })
    return y


def project(model: SPModel, x: Any, X) -> Any:
    """``t(x, X)``: the state of ``X`` closest to ``x``.

    Unique up to equivalence.  Raises :class:`OrthogonalToSubspace` when
    ``p(x, X) <= rho_floor``.
    """
    X = as_subspace(model, X)
    x = model.check_state(x)
    pxX = X.weight(x)
    if pxX <= model.tol.rho_floor:
        raise OrthogonalToSubspace(f"p(x, X) = {pxX:.3g}")
    if model.is_linear:
        V = X.vectors
        w = V @ (V.conj().T @ model.embed(x))
        if np.vdot(w, w).real <= model.tol.rho_floor:
            raise OrthogonalToSubspace("x has no component inside X")
        return model.unembed(w)
    tol = model.tol
    for z in model.canonical_states():
        if X.weight(z) >= 1.0 - tol.tol_eq and abs(model._similarity(x, z) - pxX) <= tol.tol_eq:
            return z
    raise AxiomViolation("OProjection", {
        "x": model.state_to_json(x),
        "X": [model.state_to_json(a) for a in X.basis],
        "reason": "no state of X reaches p(x, X)",
    })


def extend_to_basis(model: SPModel, A: Sequence, within=None) -> list:
    """Complete the ortho-set ``A`` to a basis of the model, or of ``within``.

    Linear models run Gram-Schmidt over the canonical vectors (projected
    into ``within`` when given), always taking the largest residual and
    breaking ties by index; residuals with squared norm at most ``tol_orth``
    count as zero.  Matrix models follow the greedy o-projection chain.
    """
    A = list(_require_ortho(model, A))
    X = as_subspace(model, within) if within is not None else None
    if X is not None:
        outside = [a for a in A if not X.contains(a)]
        if outside:
            raise ValueError("A is not contained in the subspace to complete within")
    if model.is_linear:
        return _extend_linear(model, A, X)
    return _extend_search(model, A, X)


def _extend_linear(model, A, X):
    D = model.dimension
    target = D if X is None else X.dim
    C = np.eye(D, dtype=complex) if X is None else X.projector.copy()
    out = list(A)
    Q = _vectors(model, out)
    while len(out) < target:
        R = C
        for _ in range(2):
            R = R - Q @ (Q.conj().T @ R)
        norms = np.sum(np.abs(R) ** 2, axis=0)
        top = norms.max()
        if top <= model.tol.tol_orth:
            break
        i = int(np.flatnonzero(norms >= top - 1e-12)[0])
        q = R[:, i] / np.sqrt(norms[i])
        out.append(model.unembed(q))
        Q = np.column_stack([Q, model.embed(out[-1])])
    return out


def _extend_search(model, A, X):
    tol = model.tol
    out = list(A)
    for _ in range(model.dimension + 1):
        candidates = model.canonical_states()
        if X is not None:
            candidates = [c for c in candidates if X.contains(c)]
        missing = [c for c in candidates
                   if similarity_to_set(model, c, out, check=False) < 1.0 - tol.tol_eq]
        if not missing:
            return out
        y = o_project(model, missing[0], out)
        if X is not None and not X.contains(y):
            raise AxiomViolation("OProjection", {
                "x": model.state_to_json(missing[0]),
                "A": [model.state_to_json(a) for a in out],
                "reason": "o-projection left the subspace",
            })
        out.append(y)
    raise AxiomViolation("Boundedness", {
        "A": [model.state_to_json(a) for a in out],
        "reason": "basis completion did not terminate",
    })


def full_space(model: SPModel) -> Subspace:
    return Subspace(model, extend_to_basis(model, []), check=False)


def zero_subspace(model: SPModel) -> Subspace:
    return Subspace(model, [], check=False)


def subspace_leq(model: SPModel, A, B) -> bool:
    """Whether the subspace generated by ``A`` lies inside the one generated by ``B``."""
    A = A.basis if isinstance(A, Subspace) else A
    B = as_subspace(model, B)
    return all(B.contains(a) for a in A)


def same_subspace(model: SPModel, A, B) -> bool:
    return subspace_leq(model, A, B) and subspace_leq(model, B, A)


def dimension_check(model: SPModel, A: Sequence, B: Sequence) -> bool:
    """Two bases of one subspace have the same size.

    Returns False when ``A`` and ``B`` do not generate the same subspace.
    """
    A = A.basis if isinstance(A, Subspace) else A
    B = B.basis if isinstance(B, Subspace) else B
    return same_subspace(model, A, B) and len(A) == len(B)


def complement(model: SPModel, X) -> Subspace:
    """``X^perp``, spanned by the states that complete a basis of ``X`` to a full basis."""
    X = as_subspace(model, X)
    B = extend_to_basis(model, X.basis)
    return Subspace(model, B[len(X.basis):], check=False)


def ortho_sum(model: SPModel, X, Y) -> Subspace:
    X, Y = as_subspace(model, X), as_subspace(model, Y)
    worst = 0.0
    for a in X.basis:
        for b in Y.basis:
            worst = max(worst, model._similarity(a, b), model._similarity(b, a))
    if worst > model.tol.tol_orth:
        raise NotOrthogonal(f"bases overlap with p = {worst:.3g}")
    return Subspace(model, X.basis + Y.basis, check=False)


def intersection(model: SPModel, X, Y) -> Subspace:
    """``X ∩ Y``.

    Linear models: eigenvectors of ``P_X P_Y P_X`` with eigenvalue at least
    ``1 - tol_eig``, computed block by block so that no basis vector mixes
    sectors.  Matrix models: the greedy o-projection chain inside ``X ∩ Y``.
    """
    X, Y = as_subspace(model, X), as_subspace(model, Y)
    if model.is_linear:
        basis = []
        for k in range(len(model.block_dims)):
            sl = model.block_slice(k)
            PX, PY = X.projector[sl, sl], Y.projector[sl, sl]
            M = PX @ PY @ PX
            vals, vecs = np.linalg.eigh((M + M.conj().T) / 2)
            for j in np.flatnonzero(vals >= 1.0 - model.tol.tol_eig):
                v = np.zeros(model.dimension, dtype=complex)
                v[sl] = vecs[:, j]
                basis.append(model.unembed(v))
        return Subspace(model, basis, check=False)
    tol = model.tol
    basis = []
    for _ in range(model.dimension + 1):
        pending = [c for c in model.canonical_states()
                   if X.contains(c) and Y.contains(c)
                   and similarity_to_set(model, c, basis, check=False) < 1.0 - tol.tol_eq]
        if not pending:
            break
        y = o_project(model, pending[0], basis)
        if not (X.contains(y) and Y.contains(y)):
            raise AxiomViolation("OProjection", {
                "x": model.state_to_json(pending[0]),
                "A": [model.state_to_json(a) for a in basis],
                "reason": "o-projection left the intersection",
            })
        basis.append(y)
    return Subspace(model, basis, check=False)


def cascade_o_project(model: SPModel, x: Any, A: Sequence) -> Any:
    """O-projection computed as a chain of single-state o-projections, in list order."""
    x = model.check_state(x)
    A = _require_ortho(model, A)
    pxA = similarity_to_set(model, x, A, check=False)
    if pxA >= 1.0 - model.tol.tol_eq:
        raise AlreadyInSubspace(f"p(x, A) = {pxA:.12g}")
    y = x
    for a in A:
        y = o_project(model, y, [a])
    return y
