"""Concrete models: classical, complex Hilbert, sectored direct sums and finite matrices.

Classical, Hilbert and sectored models share one linear realization: a state
embeds as a unit vector of C^D whose support lies inside a single block of a
fixed block decomposition of C^D.  The Hilbert model is one block of size d,
the sectored model has one block per superselection sector and the classical
model has n blocks of size one.  Matrix models are finite and purely
extensional; geometry on them is done by exhaustive search.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, NamedTuple, Sequence

import numpy as np
from scipy.stats import unitary_group

from .core import (
    EmptyModel,
    InvalidState,
    ParseError,
    SchemaError,
    SPModel,
    Tolerances,
    as_complex_vector,
    complex_to_json,
)


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized vector of independent standard complex Gaussians."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=complex)
    return unitary_group.rvs(dim, random_state=rng)


class LinearModel(SPModel):
    """Shared machinery for models realized by block-supported unit vectors."""

    is_linear = True
    #: p is the plain squared overlap, so p(x, A) may be read off projectors.
    exact_overlap = True

    def __init__(self, block_dims: Sequence[int], tol: Tolerances | None = None):
        super().__init__(tol)
        self.block_dims = tuple(int(d) for d in block_dims)
        if not self.block_dims or any(d < 1 for d in self.block_dims):
            raise EmptyModel(f"every block needs dimension >= 1, got {self.block_dims}")
        self.offsets = tuple(int(o) for o in np.concatenate([[0], np.cumsum(self.block_dims)[:-1]]))
        self.total_dim = int(sum(self.block_dims))

    @property
    def dimension(self) -> int:
        return self.total_dim

    def block_slice(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k] + self.block_dims[k])

    # embed/unembed are the only places that know how states are stored

    def embed(self, x: Any) -> np.ndarray:
        raise NotImplementedError

    def unembed(self, v: np.ndarray) -> Any:
        """State whose embedding is ``v / |v|``.

        Raises :class:`InvalidState` when ``v`` has weight in more than one
        block: such a vector is not a state under superselection.
        """
        v = np.asarray(v, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise InvalidState("zero vector is not a state")
        v = v / norm
        if len(self.block_dims) == 1:
            return self._from_block(0, v)
        weights = [float(np.vdot(v[self.block_slice(k)], v[self.block_slice(k)]).real)
                   for k in range(len(self.block_dims))]
        k = int(np.argmax(weights))
        if 1.0 - weights[k] > self.tol.tol_orth:
            raise InvalidState(f"vector spreads over several sectors (weights {weights})")
        local = v[self.block_slice(k)]
        return self._from_block(k, local / np.linalg.norm(local))

    def _from_block(self, k: int, local: np.ndarray) -> Any:
        raise NotImplementedError

    def block_of(self, x: Any) -> int:
        raise NotImplementedError

    def _similarity(self, x, y) -> float:
        return float(abs(np.vdot(self.embed(x), self.embed(y))) ** 2)

    def canonical_states(self) -> list:
        eye = np.eye(self.total_dim, dtype=complex)
        return [self.unembed(eye[i]) for i in range(self.total_dim)]

    def random_state(self, rng: np.random.Generator) -> Any:
        k = int(rng.integers(len(self.block_dims)))
        return self._from_block(k, haar_vector(self.block_dims[k], rng))

    def random_frame(self, rng: np.random.Generator) -> list:
        """A full orthonormal frame: Haar unitary columns in every block, shuffled."""
        frame = []
        for k, d in enumerate(self.block_dims):
            U = haar_unitary(d, rng)
            frame.extend(self._from_block(k, U[:, j]) for j in range(d))
        order = rng.permutation(len(frame))
        return [frame[i] for i in order]

    def random_state_in(self, states: Sequence, rng: np.random.Generator) -> Any:
        """Random unit combination of ``states`` restricted to one block."""
        if not states:
            raise InvalidState("cannot draw a state from an empty span")
        blocks = sorted({self.block_of(s) for s in states})
        k = blocks[int(rng.integers(len(blocks)))]
        members = [s for s in states if self.block_of(s) == k]
        coeffs = haar_vector(len(members), rng)
        v = sum(c * self.embed(s) for c, s in zip(coeffs, members))
        return self.unembed(v)


class HilbertModel(LinearModel):
    """Unit vectors of C^d with ``p(x, y) = |<x, y>|^2``."""

    kind = "hilbert"

    def __init__(self, d: int, tol: Tolerances | None = None):
        if int(d) < 1:
            raise EmptyModel("Hilbert dimension must be >= 1")
        super().__init__([int(d)], tol)
        self.d = int(d)

    def state(self, amplitudes, normalize: bool = True) -> np.ndarray:
        v = as_complex_vector(amplitudes) if not isinstance(amplitudes, np.ndarray) \
            else np.asarray(amplitudes, dtype=complex)
        if normalize:
            n = np.linalg.norm(v)
            if n == 0.0:
                raise InvalidState("zero vector is not a state")
            v = v / n
        return self.check_state(v)

    def check_state(self, x) -> np.ndarray:
        v = np.asarray(x, dtype=complex)
        if v.shape != (self.d,):
            raise InvalidState(f"expected {self.d} amplitudes, got shape {v.shape}")
        if abs(np.vdot(v, v).real - 1.0) > self.tol.tol_eq:
            raise InvalidState("amplitudes are not a unit vector")
        return v

    def embed(self, x) -> np.ndarray:
        return np.asarray(x, dtype=complex)

    def _from_block(self, k, local):
        v = np.array(local, dtype=complex)
        v.flags.writeable = False
        return v

    def block_of(self, x) -> int:
        return 0

    def _similarity(self, x, y) -> float:
        return float(abs(np.vdot(x, y)) ** 2)

    def describe(self) -> dict:
        return {"kind": "hilbert", "dim": self.d}

    def state_to_json(self, x):
        return complex_to_json(x)


class PerturbedHilbertModel(HilbertModel):
    """Hilbert model whose similarity sees each argument through a small fixed noise.

    Every argument is perturbed by complex Gaussian noise of size ``noise``
    (renormalized afterwards) before the inner product is taken.  The noise
    is a deterministic function of the state, the argument slot and ``seed``,
    so ``p`` is a well-defined function, just not an exact SP-structure.
    Geometry is still computed exactly on the unperturbed vectors.
    """

    kind = "hilbert"
    exact_overlap = False

    def __init__(self, d: int, noise: float = 1e-6, seed: int = 0, tol: Tolerances | None = None):
        super().__init__(d, tol)
        self.noise = float(noise)
        self.seed = int(seed)

    def _perturb(self, x: np.ndarray, slot: int) -> np.ndarray:
        digest = hashlib.blake2b(np.ascontiguousarray(x).tobytes(), digest_size=8).digest()
        rng = np.random.default_rng([self.seed, slot, int.from_bytes(digest, "little")])
        v = x + self.noise * (rng.standard_normal(self.d) + 1j * rng.standard_normal(self.d))
        return v / np.linalg.norm(v)

    def _similarity(self, x, y) -> float:
        return float(abs(np.vdot(self._perturb(x, 0), self._perturb(y, 1))) ** 2)

    def describe(self) -> dict:
        return {"kind": "hilbert", "dim": self.d, "perturbation": self.noise, "noise_seed": self.seed}


class SectorState(NamedTuple):
    sector: int
    amplitudes: np.ndarray


@dataclass(frozen=True)
class SectorDescriptor:
    sector_dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.sector_dims)
        if not dims or any(d < 1 for d in dims):
            raise EmptyModel(f"sector dimensions must all be >= 1, got {self.sector_dims!r}")
        object.__setattr__(self, "sector_dims", dims)


class SectoredModel(LinearModel):
    """Direct sum of Hilbert sectors; states never superpose across sectors."""

    kind = "sectored"

    def __init__(self, descriptor: SectorDescriptor | Sequence[int], tol: Tolerances | None = None):
        if not isinstance(descriptor, SectorDescriptor):
            descriptor = SectorDescriptor(tuple(descriptor))
        super().__init__(descriptor.sector_dims, tol)
        self.descriptor = descriptor

    def state(self, sector: int, amplitudes, normalize: bool = True) -> SectorState:
        v = as_complex_vector(amplitudes) if not isinstance(amplitudes, np.ndarray) \
            else np.asarray(amplitudes, dtype=complex)
        if normalize and np.linalg.norm(v) > 0:
            v = v / np.linalg.norm(v)
        return self.check_state(SectorState(int(sector), v))

    def check_state(self, x) -> SectorState:
        try:
            sector, amps = x
        except (TypeError, ValueError):
            raise InvalidState(f"sectored states are (sector, amplitudes), got {x!r}") from None
        sector = int(sector)
        if not 0 <= sector < len(self.block_dims):
            raise InvalidState(f"sector {sector} out of range")
        v = np.asarray(amps, dtype=complex)
        if v.shape != (self.block_dims[sector],):
            raise InvalidState(f"sector {sector} has dimension {self.block_dims[sector]}, got {v.shape}")
        if abs(float(np.vdot(v, v).real) - 1.0) > self.tol.tol_eq:
            raise InvalidState("amplitudes are not a unit vector")
        return x if isinstance(x, SectorState) else SectorState(sector, v)

    def embed(self, x) -> np.ndarray:
        out = np.zeros(self.total_dim, dtype=complex)
        out[self.block_slice(x[0])] = x[1]
        return out

    def _from_block(self, k, local):
        v = np.array(local, dtype=complex)
        v.flags.writeable = False
        return SectorState(int(k), v)

    def block_of(self, x) -> int:
        return int(x[0])

    def _similarity(self, x, y) -> float:
        if x[0] != y[0]:
            return 0.0
        return float(abs(np.vdot(x[1], y[1])) ** 2)

    def describe(self) -> dict:
        return {"kind": "sectored", "dims": list(self.block_dims)}

    def state_to_json(self, x):
        return {"sector": int(x[0]), "amplitudes": complex_to_json(x[1])}


class ClassicalModel(LinearModel):
    """States ``0..n-1`` with Kronecker-delta similarity."""

    kind = "classical"

    def __init__(self, n: int, tol: Tolerances | None = None):
        if int(n) < 1:
            raise EmptyModel("a classical model needs at least one state")
        super().__init__([1] * int(n), tol)
        self.n = int(n)

    def check_state(self, x) -> int:
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise InvalidState(f"classical states are integer indices, got {x!r}")
        if not 0 <= int(x) < self.n:
            raise InvalidState(f"index {x} out of range for {self.n} states")
        return int(x)

    def embed(self, x) -> np.ndarray:
        out = np.zeros(self.n, dtype=complex)
        out[x] = 1.0
        return out

    def _from_block(self, k, local):
        return int(k)

    def block_of(self, x) -> int:
        return int(x)

    def _similarity(self, x, y) -> float:
        return 1.0 if x == y else 0.0

    def canonical_states(self) -> list:
        return list(range(self.n))

    def random_state(self, rng):
        return int(rng.integers(self.n))

    def describe(self) -> dict:
        return {"kind": "classical", "n": self.n}

    def state_to_json(self, x):
        return int(x)


class MatrixModel(SPModel):
    """Finite model given extensionally by its similarity matrix.

    Nothing is assumed about ``P``: asymmetric or otherwise defective
    matrices load fine and are for the checker to judge.
    """

    kind = "matrix"
    is_linear = False

    def __init__(self, P, tol: Tolerances | None = None):
        super().__init__(tol)
        P = np.array(P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise SchemaError(f"p must be a non-empty square matrix, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise SchemaError("p entries must be finite reals")
        P.flags.writeable = False
        self.P = P
        self.n = P.shape[0]

    @property
    def dimension(self) -> int:
        # upper bound on the size of any ortho-set; the true dimension is
        # only meaningful when the axioms hold
        return self.n

    def check_state(self, x) -> int:
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise InvalidState(f"matrix-model states are integer indices, got {x!r}")
        if not 0 <= int(x) < self.n:
            raise InvalidState(f"index {x} out of range for {self.n} states")
        return int(x)

    def _similarity(self, x, y) -> float:
        return float(self.P[x, y])

    def canonical_states(self) -> list:
        return list(range(self.n))

    def random_state(self, rng):
        return int(rng.integers(self.n))

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.P - self.P.T)))

    def describe(self) -> dict:
        return {"kind": "matrix", "n": self.n, "p": self.P.tolist()}

    def state_to_json(self, x):
        return int(x)


def make_classical(n: int, tol: Tolerances | None = None) -> ClassicalModel:
    return ClassicalModel(n, tol)


def make_hilbert(d: int, tol: Tolerances | None = None) -> HilbertModel:
    return HilbertModel(d, tol)


def make_sectored(s: SectorDescriptor | Sequence[int], tol: Tolerances | None = None) -> SectoredModel:
    return SectoredModel(s, tol)


def make_perturbed_hilbert(d: int, noise: float = 1e-6, seed: int = 0,
                           tol: Tolerances | None = None) -> PerturbedHilbertModel:
    return PerturbedHilbertModel(d, noise, seed, tol)


# -- JSON fixtures ---------------------------------------------------------

def _parse_json(data: bytes | str) -> dict:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")
    return doc


def _expect_kind(doc: dict, kind: str):
    if doc.get("kind") != kind:
        raise SchemaError(f"expected kind {kind!r}, got {doc.get('kind')!r}")


def _real(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"expected a number, got {v!r}")
    return float(v)


def _natural(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SchemaError(f"{name} must be a natural number, got {v!r}")
    return v


def _complex_list(values, name: str) -> np.ndarray:
    if not isinstance(values, list):
        raise SchemaError(f"{name} must be a list of [re, im] pairs")
    out = []
    for z in values:
        if not (isinstance(z, list) and len(z) == 2):
            raise SchemaError(f"{name} entries must be [re, im] pairs, got {z!r}")
        out.append(complex(_real(z[0]), _real(z[1])))
    return np.asarray(out, dtype=complex)


def _matrix_from_doc(doc: dict, tol) -> MatrixModel:
    n = _natural(doc.get("n"), "n")
    rows = doc.get("p")
    if not isinstance(rows, list) or len(rows) != n:
        raise SchemaError(f"p must be a list of {n} rows")
    P = []
    for row in rows:
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"every row of p must have {n} entries")
        P.append([_real(v) for v in row])
    return MatrixModel(P, tol)


def load_matrix_model(data: bytes | str, tol: Tolerances | None = None) -> MatrixModel:
    """Parse ``{"kind": "matrix", "n": <int>, "p": [[...], ...]}``."""
    doc = _parse_json(data)
    _expect_kind(doc, "matrix")
    return _matrix_from_doc(doc, tol)


def load_sectored(data: bytes | str, tol: Tolerances | None = None) -> SectoredModel:
    """Parse ``{"kind": "sectored", "dims": [<int>, ...]}``."""
    doc = _parse_json(data)
    _expect_kind(doc, "sectored")
    dims = doc.get("dims")
    if not isinstance(dims, list):
        raise SchemaError("dims must be a list of naturals")
    return SectoredModel([_natural(d, "dims entry") for d in dims], tol)


def load_hilbert_state(data: bytes | str, tol: Tolerances | None = None) -> tuple[HilbertModel, np.ndarray]:
    """Parse ``{"kind": "hilbert_state", "dim": d, "amplitudes": [[re, im], ...]}``.

    Returns the model of that dimension together with the state; the
    amplitudes must already be a unit vector.
    """
    doc = _parse_json(data)
    _expect_kind(doc, "hilbert_state")
    dim = _natural(doc.get("dim"), "dim")
    amps = _complex_list(doc.get("amplitudes"), "amplitudes")
    if len(amps) != dim:
        raise SchemaError(f"expected {dim} amplitudes, got {len(amps)}")
    model = HilbertModel(dim, tol)
    return model, model.check_state(amps)


def load_model(data: bytes | str, tol: Tolerances | None = None) -> SPModel:
    """Load any model fixture, dispatching on its ``kind``.

    Besides the matrix and sectored formats, ``{"kind": "classical", "n": n}``
    and ``{"kind": "hilbert", "dim": d}`` are accepted.
    """
    doc = _parse_json(data)
    kind = doc.get("kind")
    if kind == "matrix":
        return _matrix_from_doc(doc, tol)
    if kind == "sectored":
        return load_sectored(data, tol)
    if kind == "classical":
        return ClassicalModel(_natural(doc.get("n"), "n"), tol)
    if kind == "hilbert":
        return HilbertModel(_natural(doc.get("dim"), "dim"), tol)
    raise SchemaError(f"unknown model kind {kind!r}")
