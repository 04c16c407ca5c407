"""Axiom verdicts for a model: seeded sampling on linear models, exhaustive search on matrix models.

Every axiom family is evaluated in fixed-size batches.  Batch ``k`` of axiom
``i`` draws from ``SeedSequence(seed, spawn_key=(i, k))``, so a batch can be
rerun on its own and the result does not depend on how batches are
scheduled.  Each check yields a margin, a tolerance and a witness; the
family's report keeps the check with the smallest ``margin + tolerance``
(ties go to the earliest batch and draw), which is an associative and
commutative merge.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import OrthogonalToSubspace, SPError, SPModel, Tolerances
from .geometry import Subspace, o_project, ortho_sets, project, _search_o_projection
from .models import HilbertModel, LinearModel, haar_unitary, haar_vector
from .observables import (
    Morphism,
    Observable,
    apply,
    check_invariant_basis,
    check_morphism,
    check_omega_signs,
    fixed_point_check,
    hermitian_to_observable,
    image_is_basis,
    is_eigenvector,
    mean_value,
    mean_value_from_basis,
    transition_defect,
)
from .phases import (
    CONTINUITY_COEFFICIENT,
    check_inequality,
    continuity_bound,
    continuity_family,
    phase_context,
    quantities,
)

log = logging.getLogger(__name__)

AXIOMS = (
    "Symmetry",
    "NonNegativity",
    "Boundedness",
    "OProjection",
    "Factorization",
    "Inequality",
    "Continuity",
    "ObservableLaws",
    "MorphismLaws",
)

#: The axioms that make up an SP-structure, plus the continuity bound.
STRUCTURE_AXIOMS = AXIOMS[:7]

OMEGA_ATOL = 1e-7


@dataclass(frozen=True)
class CheckConfig:
    """Sampling budget and tolerances for one suite run.

    samples
        draws per axiom family (ignored for exhaustive matrix checks).
    tol
        tolerances to judge with; None keeps the model's own.
    near_fraction
        share of draws built to be nearly degenerate: nearly equal states,
        states almost inside a subspace.
    continuity_coefficient
        coefficient of the square-root term of the continuity bound.
    adversarial
        add targeted searches (worst-case ``z`` for continuity, the
        two-level tightness family).
    exhaustive_limit
        cap on the number of checks of one exhaustive family.
    """

    samples: int = 1000
    seed: int = 0
    tol: Optional[Tolerances] = None
    near_fraction: float = 0.25
    batch_size: int = 100
    workers: int = 1
    continuity_coefficient: float = CONTINUITY_COEFFICIENT
    adversarial: bool = False
    axioms: tuple = AXIOMS
    exhaustive_limit: int = 200_000

    def __post_init__(self):
        if self.samples < 0 or self.batch_size < 1 or self.workers < 1:
            raise ValueError("samples must be >= 0, batch_size and workers >= 1")
        if not 0.0 <= self.near_fraction <= 1.0:
            raise ValueError("near_fraction must lie in [0, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit natural number")
        unknown = set(self.axioms) - set(AXIOMS)
        if unknown:
            raise ValueError(f"unknown axioms {sorted(unknown)}")

    def to_json(self, model: SPModel) -> dict:
        # workers is left out on purpose: it cannot change the result
        tol = self.tol or model.tol
        return {
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": asdict(tol),
            "near_fraction": self.near_fraction,
            "batch_size": self.batch_size,
            "continuity_coefficient": self.continuity_coefficient,
            "adversarial": self.adversarial,
            "axioms": list(self.axioms),
        }


@dataclass
class AxiomReport:
    axiom: str
    verdict: str  # "pass", "fail" or "not-applicable"
    worst_margin: Optional[float]
    tolerance: Optional[float]
    witness: dict
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "verdict": self.verdict,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "witness": self.witness,
            "samples": self.samples,
            "seed": self.seed,
        }

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"


class Sample(NamedTuple):
    margin: float
    tol: float
    witness: dict


class _Best(NamedTuple):
    key: tuple
    sample: Sample
    batch: int
    draw: int


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _states(m: SPModel, xs) -> list:
    return [m.state_to_json(x) for x in xs]


def _error_sample(exc: Exception, **context) -> Sample:
    return Sample(-1.0, 0.0, {"error": f"{type(exc).__name__}: {exc}", **context})


# -- random building blocks for linear models ---------------------------------

def _near(m: LinearModel, x, rng: np.random.Generator, scale: Optional[float] = None):
    """A state close to ``x`` in the same block; relative distance 1e-4 .. 0.3."""
    k = m.block_of(x)
    sl = m.block_slice(k)
    s = 10 ** rng.uniform(-4, -0.5) if scale is None else scale
    v = m.embed(x).copy()
    v[sl] += s * haar_vector(m.block_dims[k], rng)
    return m.unembed(v)


def _with_phase(m: LinearModel, x, rng):
    return m.unembed(np.exp(2j * np.pi * rng.random()) * m.embed(x))


def _pair(m: LinearModel, rng, cfg: CheckConfig):
    x = m.random_state(rng)
    if rng.random() < cfg.near_fraction:
        return x, _near(m, x, rng)
    return x, m.random_state(rng)


def _split_frame(m: LinearModel, rng, proper: bool):
    F = m.random_frame(rng)
    D = len(F)
    k = int(rng.integers(1, D)) if proper else int(rng.integers(1, D + 1))
    return F[:k], F[k:]


def _state_near_subspace(m: LinearModel, A, rng):
    return _near(m, m.random_state_in(A, rng), rng)


def _block_unitary(m: LinearModel, rng, permute: bool = True) -> np.ndarray:
    """Unitary that maps blocks onto blocks of equal size, Haar inside each."""
    D = m.dimension
    U = np.zeros((D, D), dtype=complex)
    targets = list(range(len(m.block_dims)))
    if permute:
        for size in sorted(set(m.block_dims)):
            same = [k for k, d in enumerate(m.block_dims) if d == size]
            shuffled = [same[i] for i in rng.permutation(len(same))]
            for k, t in zip(same, shuffled):
                targets[k] = t
    for k, t in enumerate(targets):
        U[m.block_slice(t), m.block_slice(k)] = haar_unitary(m.block_dims[k], rng)
    return U


def random_observable(m: LinearModel, rng: np.random.Generator) -> Observable:
    """Observable of a random block-diagonal Hermitian operator.

    Half the time eigenvalues come from a small integer pool (degenerate
    eigensubspaces, zero and negative eigenvalues); otherwise they are
    standard normal.
    """
    D = m.dimension
    H = np.zeros((D, D), dtype=complex)
    integer = rng.random() < 0.5
    for k, d in enumerate(m.block_dims):
        if integer:
            lam = rng.integers(-2, 4, size=d).astype(float)
        else:
            lam = rng.standard_normal(d)
        U = haar_unitary(d, rng)
        sl = m.block_slice(k)
        H[sl, sl] = (U * lam) @ U.conj().T
    return hermitian_to_observable((H + H.conj().T) / 2, m)


# -- linear-model families -----------------------------------------------------
# each takes (model, rng, config, draws, observable) and returns a list of
# (draw index, Sample)

def _lin_symmetry(m, rng, cfg, n, obs):
    out = []
    for i in range(n):
        x, y = _pair(m, rng, cfg)
        d = abs(m.similarity(x, y) - m.similarity(y, x))
        out.append((i, Sample(-d, m.tol.tol_eq, {"x": m.state_to_json(x), "y": m.state_to_json(y)})))
    return out


def _lin_nonnegativity(m, rng, cfg, n, obs):
    out = []
    for i in range(n):
        x, y = _pair(m, rng, cfg)
        out.append((i, Sample(m.similarity(x, y), m.tol.tol_eq,
                              {"x": m.state_to_json(x), "y": m.state_to_json(y)})))
    return out


def _lin_boundedness(m, rng, cfg, n, obs):
    out = []
    for i in range(n):
        A, _ = _split_frame(m, rng, proper=False)
        near = rng.random() < cfg.near_fraction
        x = _state_near_subspace(m, A, rng) if near else m.random_state(rng)
        p = Subspace(m, A, check=False).weight(x)
        out.append((i, Sample(1.0 - p, m.tol.tol_eq, {"x": m.state_to_json(x), "A": _states(m, A), "p_xA": p})))
    return out


def _lin_oprojection(m, rng, cfg, n, obs):
    out = []
    if m.dimension < 2:
        return out
    for i in range(n):
        A, _ = _split_frame(m, rng, proper=True)
        near = rng.random() < cfg.near_fraction
        x = _state_near_subspace(m, A, rng) if near else m.random_state(rng)
        X = Subspace(m, A, check=False)
        pxA = X.weight(x)
        if pxA >= 1.0 - m.tol.tol_eq:
            continue
        wit = {"x": m.state_to_json(x), "A": _states(m, A)}
        try:
            y = o_project(m, x, A)
        except SPError as exc:
            out.append((i, _error_sample(exc, **wit)))
            continue
        defect = max(X.weight(y), abs(pxA + m.similarity(x, y) - 1.0))
        out.append((i, Sample(-defect, m.tol.tol_eq, {**wit, "y": m.state_to_json(y)})))
    return out


def _lin_factorization(m, rng, cfg, n, obs):
    out = []
    for i in range(n):
        A, rest = _split_frame(m, rng, proper=False)
        X = Subspace(m, A, check=False)
        u = rng.random()
        if u < cfg.near_fraction / 2 and rest:
            x = m.random_state_in(rest, rng)
        elif u < cfg.near_fraction:
            x = _state_near_subspace(m, A, rng)
        else:
            x = m.random_state(rng)
        pxA = X.weight(x)
        try:
            y = _with_phase(m, project(m, x, X), rng)
        except OrthogonalToSubspace:
            y = m.random_state_in(A, rng)
        z = m.random_state_in(A, rng)
        d = max(abs(m.similarity(x, z) - m.similarity(x, y) * m.similarity(y, z)),
                abs(m.similarity(x, y) - pxA))
        out.append((i, Sample(-d, m.tol.tol_eq, {
            "x": m.state_to_json(x), "y": m.state_to_json(y), "z": m.state_to_json(z), "A": _states(m, A)})))
    return out


def _inequality_sample(m, ctx, a, b, **extra) -> Sample:
    margin = check_inequality(ctx, a, b)
    wit = {"a": m.state_to_json(a), "b": m.state_to_json(b),
           "X": _states(m, ctx.X.basis), "Y": _states(m, ctx.Y.basis), **extra}
    if margin != 0.0 or ctx.Z.weight(a) > m.tol.rho_floor:
        try:
            q = quantities(ctx, a, b)
            wit.update(alpha=q.alpha, rho=q.rho)
        except SPError:
            pass
    return Sample(margin, m.tol.tol_eq, wit)


def _lin_inequality(m, rng, cfg, n, obs):
    out = []
    D = m.dimension
    for i in range(n):
        F = m.random_frame(rng)
        kx = 1 if D == 1 else int(rng.integers(1, D))
        ky = int(rng.integers(1, D - kx + 1)) if D > kx else 0
        ctx = phase_context(m, F[:kx], F[kx:kx + ky])
        Z = list(ctx.Z.basis)
        b = m.random_state_in(Z, rng)
        u = rng.random()
        if u < cfg.near_fraction:
            a = _near(m, b, rng)
        elif u < cfg.near_fraction + 0.25 * (1 - cfg.near_fraction):
            a = m.random_state(rng)
        else:
            a = m.random_state_in(Z, rng)
        try:
            out.append((i, _inequality_sample(m, ctx, a, b, general=not ctx.Z.contains(a))))
        except SPError as exc:
            out.append((i, _error_sample(exc, a=m.state_to_json(a), b=m.state_to_json(b))))
    return out


def _worst_z(m: LinearModel, x, y):
    # maximizer of p(x, z) - p(y, z): top eigenvector of |x><x| - |y><y|
    vx, vy = m.embed(x), m.embed(y)
    M = np.outer(vx, vx.conj()) - np.outer(vy, vy.conj())
    vals, vecs = np.linalg.eigh(M)
    return m.unembed(vecs[:, -1])


def _lin_continuity(m, rng, cfg, n, obs):
    out = []
    c = cfg.continuity_coefficient
    family = cfg.adversarial and isinstance(m, HilbertModel) and m.d >= 2
    for i in range(n):
        extra = {}
        u = rng.random()
        if family and u < 0.2:
            r = float(rng.uniform(0.1, 0.9))
            eps = float(rng.choice([0.0, 1e-3, 1e-2]))
            delta = float(rng.choice([0.0, 1e-3, 1e-2]))
            if eps == 0.0 and delta == 0.0:
                eps = 1e-3
            fam = continuity_family(r, eps, delta)
            # place the two-level family on a random plane of C^d
            U = haar_unitary(m.d, rng)[:, :2]
            x, y, z = (m.state(U @ v) for v in (fam.x, fam.y, fam.u))
            extra = {"family": {"r": r, "eps": eps, "delta": delta}}
        else:
            x, y = _pair(m, rng, cfg)
            if cfg.adversarial and rng.random() < 0.5:
                z = _worst_z(m, x, y)
            elif rng.random() < cfg.near_fraction:
                plane = [x]
                if m.similarity(x, y) < 1.0 - m.tol.tol_eq and m.block_of(x) == m.block_of(y):
                    plane.append(o_project(m, y, [x]))
                z = m.random_state_in(plane, rng)
            else:
                z = m.random_state(rng)
        margin = continuity_bound(m, x, y, z, c)
        out.append((i, Sample(margin, m.tol.tol_eq, {
            "x": m.state_to_json(x), "y": m.state_to_json(y), "z": m.state_to_json(z),
            "p_xy": m.similarity(x, y), "coefficient": c, **extra})))
    return out


def _observable_checks(m: SPModel, r: Observable, a, b, rng) -> list:
    """(name, margin, tolerance, extra witness) for one state pair."""
    tol = m.tol
    checks = []
    ra = apply(r, a)
    probes = []
    if m.is_linear:
        probes = [(i, m.random_state_in(list(X.basis), rng)) for i, X in enumerate(r.subspaces)]
    checks.append(("transition", -transition_defect(r, a, ra, probes), tol.tol_eq, {}))

    wa, wr = r.weights(a), r.weights(ra)
    S = float(np.dot(np.square(r.lambdas), wa))
    expect = wa if S <= tol.tol_orth * r.bound ** 2 else np.square(r.lambdas) * wa / S
    checks.append(("weights", -float(np.max(np.abs(wr - expect))), tol.tol_eq, {}))

    worst = 0.0
    for X, w in zip(r.subspaces, wr):
        if w > 1e-6 and X.weight(a) > 1e-6:
            worst = max(worst, 1.0 - m.similarity(project(m, ra, X), project(m, a, X)))
    checks.append(("projection", -worst, tol.tol_eq, {}))

    # r moves a state with outside weight w by about w (lambda ratio - 1)^2,
    # so eigenvector status is only compared away from the tolerance edge
    if max(wa) >= 1.0 - 1e-12:
        checks.append(("fixed_point", 0.0 if fixed_point_check(r, a) else -1.0, 0.0, {}))
    elif not is_eigenvector(r, a):
        lams = sorted(r.lambdas)
        gap = min((y - x for x, y in zip(lams, lams[1:])), default=math.inf)
        if max(wa) < 0.99 and gap >= 0.5:
            checks.append(("not_fixed", -1.0 if fixed_point_check(r, a) else 0.0, 0.0, {}))

    if len(r.parts) >= 2:
        j, k = (int(v) for v in rng.choice(len(r.parts), size=2, replace=False))
        oc = check_omega_signs(r, a, b, j, k, atol=OMEGA_ATOL)
        if oc.verdict != "skipped":
            checks.append(("omega", -oc.defect, OMEGA_ATOL, {
                "j": j, "k": k, "sign": oc.expected_sign, "omega": oc.before, "omega_after": oc.after}))

    d = abs(mean_value(r, a) - mean_value_from_basis(r, a))
    checks.append(("mean_basis", -d, tol.tol_eq, {}))

    c = float(rng.choice([-1.0, 1.0])) * 10 ** rng.uniform(-1, 1)
    rc = r.scaled(c)
    d = max(1.0 - m.similarity(apply(rc, a), ra), abs(mean_value(rc, a) - c * mean_value(r, a)) / abs(c))
    checks.append(("rescale", -d, tol.tol_eq, {"c": c}))
    return checks


def _observable_samples(m, r, a, b, rng, draw):
    wit = {"a": m.state_to_json(a), "b": m.state_to_json(b), "lambdas": list(r.lambdas)}
    try:
        checks = _observable_checks(m, r, a, b, rng)
    except SPError as exc:
        return [(draw, _error_sample(exc, **wit))]
    return [(draw, Sample(mg, t, {"check": name, **wit, **extra})) for name, mg, t, extra in checks]


def _lin_observables(m, rng, cfg, n, obs):
    out = []
    r = obs if obs is not None else random_observable(m, rng)
    for i in range(n):
        u = rng.random()
        X = r.subspaces[int(rng.integers(len(r.parts)))]
        if u < 0.2:
            a = m.random_state_in(list(X.basis), rng)
        elif u < 0.2 + cfg.near_fraction * 0.8:
            a = _state_near_subspace(m, list(X.basis), rng)
        else:
            a = m.random_state(rng)
        b = m.random_state(rng)
        out.extend(_observable_samples(m, r, a, b, rng, i))
    return out


def _lin_morphisms(m, rng, cfg, n, obs):
    out = []
    f = Morphism.unitary(m, _block_unitary(m, rng))
    # fixes every canonical state up to phase
    g = Morphism.unitary(m, np.diag(np.exp(2j * np.pi * rng.random(m.dimension))))
    canon = m.canonical_states()
    for i in range(n):
        x, y = _pair(m, rng, cfg)
        xs = [x, y, _with_phase(m, x, rng)]
        v = check_morphism(f, xs)
        wit = {"states": _states(m, xs)}
        out.append((i, Sample(-v.similarity_defect if v.injective else -1.0, m.tol.tol_eq,
                              {"check": "preserves", **wit, **v.witness})))
        frame = m.random_frame(rng)
        ok = image_is_basis(f, frame)
        out.append((i, Sample(0.0 if ok else -1.0, 0.0, {"check": "basis_image", "B": _states(m, frame)})))
        k = int(rng.integers(1, len(canon) + 1))
        A = [canon[j] for j in sorted(rng.choice(len(canon), size=k, replace=False))]
        member = m.random_state_in(A, rng)
        iv = check_invariant_basis(g, canon, A, [x], members=[member])
        margin = -iv.weight_defect if (iv.maps_into and iv.projection_commutes) else -1.0
        out.append((i, Sample(margin, m.tol.tol_eq, {
            "check": "invariant_basis", "x": m.state_to_json(x), "A": _states(m, A), **iv.witness})))
    return out


_LINEAR = {
    "Symmetry": _lin_symmetry,
    "NonNegativity": _lin_nonnegativity,
    "Boundedness": _lin_boundedness,
    "OProjection": _lin_oprojection,
    "Factorization": _lin_factorization,
    "Inequality": _lin_inequality,
    "Continuity": _lin_continuity,
    "ObservableLaws": _lin_observables,
    "MorphismLaws": _lin_morphisms,
}


# -- exhaustive families for finite models ---------------------------------------
# generators of Samples in a fixed order; the draw index is the position

def _ex_symmetry(m, cfg, obs):
    S = m.canonical_states()
    for x in S:
        for y in S:
            yield Sample(-abs(m._similarity(x, y) - m._similarity(y, x)), m.tol.tol_eq,
                         {"x": x, "y": y, "p_xy": m._similarity(x, y), "p_yx": m._similarity(y, x)})


def _ex_nonnegativity(m, cfg, obs):
    S = m.canonical_states()
    for x in S:
        for y in S:
            yield Sample(m._similarity(x, y), m.tol.tol_eq, {"x": x, "y": y})


def _nonempty_ortho_sets(m):
    return [A for A in ortho_sets(m) if A]


def _ex_boundedness(m, cfg, obs):
    sets = _nonempty_ortho_sets(m)
    for x in m.canonical_states():
        for A in sets:
            p = sum(m._similarity(x, a) for a in A)
            yield Sample(1.0 - p, m.tol.tol_eq, {"x": x, "A": list(A), "p_xA": p})


def _ex_oprojection(m, cfg, obs):
    sets = _nonempty_ortho_sets(m)
    for x in m.canonical_states():
        for A in sets:
            pxA = sum(m._similarity(x, a) for a in A)
            if pxA >= 1.0 - m.tol.tol_eq:
                continue
            y, defect = _search_o_projection(m, x, A, pxA)
            wit = {"x": x, "A": list(A)}
            if y is not None:
                wit["y"] = y
            yield Sample(-defect, m.tol.tol_eq, wit)


def _ex_factorization(m, cfg, obs):
    tol = m.tol.tol_eq
    S = m.canonical_states()
    for A in _nonempty_ortho_sets(m):
        inside = [s for s in S if sum(m._similarity(s, a) for a in A) >= 1.0 - tol]
        for x in S:
            pxA = sum(m._similarity(x, a) for a in A)
            for y in inside:
                if abs(m._similarity(x, y) - pxA) > tol:
                    continue
                for z in inside:
                    d = abs(m._similarity(x, z) - m._similarity(x, y) * m._similarity(y, z))
                    yield Sample(-d, tol, {"x": x, "y": y, "z": z, "A": list(A)})


def _ex_inequality(m, cfg, obs):
    for C in ortho_sets(m):
        if len(C) < 2:
            continue
        rest = C[1:]
        for mask in range(2 ** len(rest)):
            X = [C[0]] + [c for j, c in enumerate(rest) if mask >> j & 1]
            Y = [c for j, c in enumerate(rest) if not mask >> j & 1]
            if not Y:
                continue
            ctx = phase_context(m, X, Y)
            inside = [s for s in m.canonical_states() if ctx.Z.contains(s)]
            for a in inside:
                for b in inside:
                    try:
                        yield _inequality_sample(m, ctx, a, b)
                    except SPError as exc:
                        yield _error_sample(exc, a=a, b=b, X=X, Y=Y)


def _ex_continuity(m, cfg, obs):
    S = m.canonical_states()
    c = cfg.continuity_coefficient
    for x in S:
        for y in S:
            for z in S:
                yield Sample(continuity_bound(m, x, y, z, c), m.tol.tol_eq,
                             {"x": x, "y": y, "z": z, "coefficient": c})


def _ex_observables(m, cfg, obs):
    if obs is None:
        return
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(AXIOMS.index("ObservableLaws"),)))
    S = m.canonical_states()
    for a in S:
        for b in S:
            for _, s in _observable_samples(m, obs, a, b, rng, 0):
                yield s


def _ex_none(m, cfg, obs):
    return iter(())


_EXHAUSTIVE = {
    "Symmetry": _ex_symmetry,
    "NonNegativity": _ex_nonnegativity,
    "Boundedness": _ex_boundedness,
    "OProjection": _ex_oprojection,
    "Factorization": _ex_factorization,
    "Inequality": _ex_inequality,
    "Continuity": _ex_continuity,
    "ObservableLaws": _ex_observables,
    "MorphismLaws": _ex_none,
}


# -- orchestration -------------------------------------------------------------

def _key(s: Sample, batch: int, draw: int) -> tuple:
    return (s.margin + s.tol, batch, draw)


def _merge(a: Optional[_Best], b: Optional[_Best]) -> Optional[_Best]:
    if a is None:
        return b
    if b is None:
        return a
    return a if a.key <= b.key else b


def _rng(cfg: CheckConfig, axiom: str, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(AXIOMS.index(axiom), batch)))


def run_batch(m: SPModel, config: CheckConfig, axiom: str, batch: int,
              observable: Optional[Observable] = None) -> list:
    """All checks of one batch of a sampled family, as ``(draw, Sample)`` pairs.

    Reruns exactly what :func:`run_suite` evaluated for that batch, which is
    how a witness is reproduced from its ``batch`` and ``draw`` fields.
    """
    if config.tol is not None:
        m = m.with_tolerances(config.tol)
    n = min(config.batch_size, config.samples - batch * config.batch_size)
    if n <= 0:
        return []
    rng = _rng(config, axiom, batch)
    try:
        return _LINEAR[axiom](m, rng, config, n, observable)
    except SPError as exc:
        return [(0, _error_sample(exc))]


def _sampled(m, cfg, axiom, obs) -> tuple[int, Optional[_Best]]:
    nb = math.ceil(cfg.samples / cfg.batch_size)

    def one(k):
        best, count = None, 0
        for draw, s in run_batch(m, cfg, axiom, k, obs):
            count += 1
            best = _merge(best, _Best(_key(s, k, draw), s, k, draw))
        return count, best

    if cfg.workers > 1 and nb > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(one, range(nb)))
    else:
        results = [one(k) for k in range(nb)]
    total, best = 0, None
    for count, b in results:
        total += count
        best = _merge(best, b)
    return total, best


def _exhaustive(m, cfg, axiom, obs) -> tuple[int, Optional[_Best], bool]:
    best, count = None, 0
    truncated = False
    for s in _EXHAUSTIVE[axiom](m, cfg, obs):
        if count >= cfg.exhaustive_limit:
            truncated = True
            break
        best = _merge(best, _Best(_key(s, 0, count), s, 0, count))
        count += 1
    return count, best, truncated


def _report(axiom, cfg, count, best, extra=None) -> AxiomReport:
    if count == 0 or best is None:
        return AxiomReport(axiom, "not-applicable", None, None, {}, 0, cfg.seed)
    s = best.sample
    verdict = "fail" if s.margin + s.tol < 0 else "pass"
    witness = _jsonable({**s.witness, "batch": best.batch, "draw": best.draw, **(extra or {})})
    # + 0.0 turns a negated zero defect into a plain 0.0
    return AxiomReport(axiom, verdict, float(s.margin) + 0.0, float(s.tol), witness, count, cfg.seed)


def run_suite(m: SPModel, config: Optional[CheckConfig] = None,
              observable: Optional[Observable] = None) -> list[AxiomReport]:
    """One report per axiom in ``config.axioms``, in canonical order.

    Linear models are sampled; matrix models are decided over every state,
    pair, triple and ortho-set.  ``observable`` replaces the random
    observables of the ObservableLaws family and makes that family
    applicable to matrix models.
    """
    cfg = config or CheckConfig()
    mm = m.with_tolerances(cfg.tol) if cfg.tol is not None else m
    if observable is not None and observable.model is not m:
        observable = Observable(mm, observable.parts, check=False)
    reports = []
    for axiom in AXIOMS:
        if axiom not in cfg.axioms:
            continue
        if mm.is_linear:
            count, best = _sampled(mm, replace(cfg, tol=None), axiom, observable)
            rep = _report(axiom, cfg, count, best)
        else:
            count, best, truncated = _exhaustive(mm, cfg, axiom, observable)
            rep = _report(axiom, cfg, count, best, {"truncated": True} if truncated else None)
        log.debug("%s: %s margin=%s samples=%d", axiom, rep.verdict, rep.worst_margin, rep.samples)
        reports.append(rep)
    return reports


def _round_seed(seed: int, r: int) -> int:
    return int(np.random.SeedSequence([seed, r]).generate_state(2, np.uint32).view(np.uint64)[0])


def fuzz(m: SPModel, config: Optional[CheckConfig] = None, rounds: int = 3,
         observable: Optional[Observable] = None) -> list[AxiomReport]:
    """Worst report per axiom over several adversarial rounds.

    Round ``r`` doubles the near-degenerate fraction and runs with its own
    derived seed; the winning report records that seed, and its witness
    records the round and fraction needed to rerun it.  Matrix models are
    already decided exactly, so they get a single round.
    """
    cfg = config or CheckConfig()
    if not m.is_linear:
        return run_suite(m, cfg, observable)
    best: dict[str, tuple] = {}
    totals: dict[str, int] = {}
    for r in range(max(1, rounds)):
        frac = min(1.0, cfg.near_fraction * 2 ** r)
        rc = replace(cfg, seed=_round_seed(cfg.seed, r), near_fraction=frac, adversarial=True)
        for rep in run_suite(m, rc, observable):
            totals[rep.axiom] = totals.get(rep.axiom, 0) + rep.samples
            if rep.verdict == "not-applicable":
                best.setdefault(rep.axiom, (math.inf, r, rep))
                continue
            rep.witness = {**rep.witness, "round": r, "near_fraction": frac}
            key = (rep.worst_margin + rep.tolerance, r)
            if rep.axiom not in best or key < best[rep.axiom][:2]:
                best[rep.axiom] = (*key, rep)
    out = []
    for axiom in AXIOMS:
        if axiom in best:
            rep = best[axiom][-1]
            rep.samples = totals[axiom]
            out.append(rep)
    return out


def continuity_sweep(rs: Sequence[float], epss: Sequence[float], deltas: Sequence[float],
                     coefficient: float = CONTINUITY_COEFFICIENT) -> list[dict]:
    """Continuity slack at ``z = u`` over the two-level family, one row per grid point.

    Grid points with ``eps = delta = 0`` (``x = y``) are skipped.
    """
    rows = []
    for r in rs:
        for eps in epss:
            for delta in deltas:
                if eps == 0 and delta == 0:
                    continue
                fam = continuity_family(r, eps, delta)
                m = fam.model
                rows.append({
                    "r": r, "eps": eps, "delta": delta,
                    "one_minus_p": 1.0 - m.similarity(fam.x, fam.y),
                    "slack": continuity_bound(m, fam.x, fam.y, fam.u, coefficient),
                })
    return rows


# -- output ----------------------------------------------------------------------

def report_document(m: SPModel, config: CheckConfig, reports: Sequence[AxiomReport]) -> dict:
    return {
        "model": _jsonable(m.describe()),
        "config": config.to_json(m),
        "reports": [r.to_dict() for r in reports],
    }


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render_text(doc: dict) -> str:
    """Human-readable summary derived from a report document."""
    lines = [f"model: {json.dumps(doc['model'], sort_keys=False)}",
             f"seed: {doc['config']['seed']}  samples: {doc['config']['samples']}"]
    for r in doc["reports"]:
        margin = "-" if r["worst_margin"] is None else f"{r['worst_margin']:+.3e}"
        line = f"  {r['axiom']:<15} {r['verdict']:<15} margin {margin:>11}  n={r['samples']}"
        if r["verdict"] == "fail":
            line += "\n      witness: " + json.dumps(r["witness"])
        lines.append(line)
    failed = sum(r["verdict"] == "fail" for r in doc["reports"])
    lines.append(f"{failed} failing" if failed else "no failures")
    return "\n".join(lines) + "\n"
