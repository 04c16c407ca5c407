"""Similarity-projection model interface, tolerances and the similarity primitives."""

from __future__ import annotations

import abc
from dataclasses import dataclass, fields, replace
from typing import Any, Iterable, Sequence

import numpy as np


class SPError(Exception):
    """Base class for every error raised by this package."""


class InvalidState(SPError, ValueError):
    pass


class EmptyModel(SPError, ValueError):
    pass


class NotOrthoSet(SPError, ValueError):
    pass


class NotOrthogonal(SPError, ValueError):
    pass


class AlreadyInSubspace(SPError, ValueError):
    pass


class OrthogonalToSubspace(SPError, ValueError):
    pass


class PhaseUndefined(SPError, ValueError):
    pass


class NotHermitian(SPError, ValueError):
    pass


class ParseError(SPError, ValueError):
    pass


class SchemaError(SPError, ValueError):
    pass


class AxiomViolation(SPError):
    """A model failed to provide a state that one of the axioms promises.

    ``axiom`` names the property and ``witness`` holds the offending inputs,
    already in JSON-friendly form.
    """

    def __init__(self, axiom: str, witness: dict, message: str = ""):
        self.axiom = axiom
        self.witness = witness
        super().__init__(message or f"{axiom} violated: {witness}")


@dataclass(frozen=True)
class Tolerances:
    """Absolute slacks used wherever an exact equality of reals is tested.

    tol_eq
        probability equality.
    tol_orth
        orthogonality, ``p(x, y) <= tol_orth`` means ``x`` and ``y`` are orthogonal.
    rho_floor
        interference magnitudes at or below this are treated as zero.
    tol_eig
        eigenvalue clustering.
    """

    tol_eq: float = 1e-9
    tol_orth: float = 1e-9
    rho_floor: float = 1e-12
    tol_eig: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (0.0 < v < 1e-3):
                raise ValueError(f"{f.name} must lie in (0, 1e-3), got {v!r}")

    def with_eq(self, tol: float) -> "Tolerances":
        """Same tolerances with both equality and orthogonality slack set to ``tol``."""
        return replace(self, tol_eq=tol, tol_orth=tol)


DEFAULT_TOL = Tolerances()


class SPModel(abc.ABC):
    """A finite-dimensional set of states with a similarity function ``p``.

    Subclasses provide state validation and the raw similarity; everything
    else in the package is written against this interface.  Models are
    immutable once built.
    """

    kind: str = "abstract"
    #: True when states embed as unit vectors of C^D and subspaces carry projectors.
    is_linear: bool = False

    def __init__(self, tol: Tolerances | None = None):
        self.tol = tol or DEFAULT_TOL

    # -- interface -------------------------------------------------------

    @abc.abstractmethod
    def check_state(self, x: Any) -> Any:
        """Return ``x`` in canonical form or raise :class:`InvalidState`."""

    @abc.abstractmethod
    def _similarity(self, x: Any, y: Any) -> float:
        """Similarity of two already validated states."""

    @abc.abstractmethod
    def canonical_states(self) -> list:
        """A deterministic list of states that contains a basis of the model."""

    @abc.abstractmethod
    def random_state(self, rng: np.random.Generator) -> Any:
        """A random state (Haar within each block for linear models)."""

    @property
    @abc.abstractmethod
    def dimension(self) -> int:
        """Size of any basis of the whole model."""

    @abc.abstractmethod
    def describe(self) -> dict:
        """JSON-friendly descriptor of the model."""

    @abc.abstractmethod
    def state_to_json(self, x: Any) -> Any:
        """JSON-friendly form of a state, used for witnesses."""

    def with_tolerances(self, tol: Tolerances) -> "SPModel":
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.tol = tol
        return clone

    # -- derived ---------------------------------------------------------

    def similarity(self, x: Any, y: Any) -> float:
        return self._similarity(self.check_state(x), self.check_state(y))

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


def similarity(model: SPModel, x: Any, y: Any) -> float:
    """Transition probability ``p(x, y)`` in ``model``."""
    return model.similarity(x, y)


def similarity_to_set(model: SPModel, x: Any, A: Sequence, check: bool = True) -> float:
    """``p(x, A)``, the sum of ``p(x, a)`` over an ortho-set ``A``.

    Raises :class:`NotOrthoSet` when ``check`` is set and two members of ``A``
    are not orthogonal.
    """
    if check:
        worst = worst_overlap(model, A)
        if worst > model.tol.tol_orth:
            raise NotOrthoSet(f"members overlap with p = {worst:.3g}")
    x = model.check_state(x)
    return float(sum(model._similarity(x, model.check_state(a)) for a in A))


def worst_overlap(model: SPModel, A: Sequence) -> float:
    """Largest ``p`` between two distinct members of ``A`` (0 for fewer than two)."""
    states = [model.check_state(a) for a in A]
    worst = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            worst = max(worst,
                        model._similarity(states[i], states[j]),
                        model._similarity(states[j], states[i]))
    return worst


def states_equivalent(model: SPModel, x: Any, y: Any) -> bool:
    """True iff ``p(x, y) >= 1 - tol_eq``; this is equality of states up to phase."""
    return model.similarity(x, y) >= 1.0 - model.tol.tol_eq


def as_complex_vector(values: Iterable) -> np.ndarray:
    """Amplitudes given as complex numbers or ``[re, im]`` pairs -> complex array."""
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise InvalidState(f"complex entries are [re, im] pairs, got {v!r}")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(v))
    return np.asarray(out, dtype=complex)


def complex_to_json(vec: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=complex).ravel()]
