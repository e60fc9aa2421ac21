"""Dimensions, twists, S-matrix and related invariants."""

from __future__ import annotations

import cmath
import math
import weakref
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, TypeVar

import numpy as np

from .core import EPS, Report, SuperMTC

__all__ = [
    "ConvergenceError",
    "NotModularError",
    "DerivedInvariants",
    "quantum_dimension",
    "total_dimension",
    "topological_twist",
    "twists",
    "s_matrix",
    "monodromy",
    "monodromy_matrix",
    "muger_center",
    "check_super_modular",
    "gauss_sum",
    "central_charge",
    "invariants",
]

MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    pass


class NotModularError(ValueError):
    pass


T = TypeVar("T")
_cache: "weakref.WeakKeyDictionary[SuperMTC, dict]" = weakref.WeakKeyDictionary()


def _memo(c: SuperMTC, key: str, fn: Callable[[], T]) -> T:
    slot = _cache.setdefault(c, {})
    if key not in slot:
        slot[key] = fn()
    return slot[key]


def _perron(c: SuperMTC, tol: float) -> np.ndarray:
    # sum_a N_a is entrywise positive for a connected fusion ring, so plain
    # power iteration converges to the Perron vector, which is d up to scale.
    M = c.N.sum(axis=0).astype(float)
    v = np.ones(c.n)
    for _ in range(MAX_ITER):
        w = M @ v
        w /= w[0]
        if np.abs(w - v).max() < tol:
            return w
        v = w
    raise ConvergenceError(f"{c.name}: Perron iteration did not converge in {MAX_ITER} steps")


def quantum_dimension(c: SuperMTC, tol: float = EPS) -> np.ndarray:
    return _memo(c, "d", lambda: _perron(c, tol * 1e-3))


def total_dimension(c: SuperMTC) -> float:
    d = quantum_dimension(c)
    return float(np.sqrt((d**2).sum()))


def twists(c: SuperMTC) -> np.ndarray:
    def build() -> np.ndarray:
        d = quantum_dimension(c)
        out = np.empty(c.n, dtype=complex)
        for a in range(c.n):
            out[a] = sum(d[k] * np.trace(c.R[(a, a, k)]) for k in c.rules.products[a][a]) / d[a]
        return out

    return _memo(c, "theta", build)


def topological_twist(c: SuperMTC, a: int) -> complex:
    return complex(twists(c)[a])


def s_matrix(c: SuperMTC) -> np.ndarray:
    def build() -> np.ndarray:
        d = quantum_dimension(c)
        th = twists(c)
        D = total_dimension(c)
        bar = c.rules.dual
        # S_ab = sum_k N^{k}_{abar b} theta_k d_k / (theta_a theta_b D)
        Nbar = c.N[list(bar)]
        S = np.einsum("abk,k->ab", Nbar, th * d) / np.outer(th, th) / D
        return S

    return _memo(c, "S", build)


def monodromy_matrix(c: SuperMTC) -> np.ndarray:
    d = quantum_dimension(c)
    return s_matrix(c) * total_dimension(c) / np.outer(d, d)


def monodromy(c: SuperMTC, a: int, b: int) -> complex:
    return complex(monodromy_matrix(c)[a, b])


def muger_center(c: SuperMTC, tol: float = EPS) -> list[int]:
    M = monodromy_matrix(c)
    return [a for a in range(c.n) if np.abs(M[a] - 1).max() < tol]


@dataclass
class SuperModularResult:
    report: Report
    representatives: list[int]
    S_tilde: np.ndarray | None


def check_super_modular(c: SuperMTC, tol: float = EPS) -> SuperModularResult:
    """Check that S factors as S~ (x) [[1,1],[1,1]]/sqrt2 over psi-orbits."""
    rep = Report("super-modularity")
    if c.fermion is None:
        rep.add("no fermion declared")
        return SuperModularResult(rep, [], None)
    psi = c.fermion
    th = twists(c)
    rep.checked += 1
    if abs(th[psi] + 1) > tol:
        rep.add(f"theta_psi = {th[psi]:.6g}, expected -1")
    if not (c.N[psi, psi, 0] == 1 and c.N[psi, psi].sum() == 1):
        rep.add("psi x psi != 1")
        return SuperModularResult(rep, [], None)
    center = muger_center(c, tol)
    rep.checked += 1
    if sorted(center) != sorted({0, psi}):
        rep.add(f"Muger center is {[c.label(a) for a in center]}, expected {{1, {c.label(psi)}}}")
    partner = [c.times_psi(a) for a in range(c.n)]
    reps = [a for a in range(c.n) if a <= partner[a]]
    if any(partner[a] == a for a in range(c.n)):
        rep.add("some anyon is fixed by psi fusion")
        return SuperModularResult(rep, reps, None)
    S = s_matrix(c)
    for a in reps:
        for b in reps:
            rep.checked += 1
            block = S[np.ix_([a, partner[a]], [b, partner[b]])]
            if np.abs(block - block[0, 0]).max() > tol:
                rep.add(f"S block ({c.label(a)},{c.label(b)}) is not constant on psi-orbits")
    St = math.sqrt(2) * S[np.ix_(reps, reps)]
    err = np.abs(St @ St.conj().T - np.eye(len(reps))).max()
    rep.checked += 1
    if err > tol:
        rep.add(f"S~ not unitary (error {err:.3g})")
    return SuperModularResult(rep, reps, St)


def gauss_sum(c: SuperMTC) -> complex:
    d = quantum_dimension(c)
    return complex((d**2 * twists(c)).sum() / total_dimension(c))


def central_charge(c: SuperMTC, tol: float = 1e-6) -> Fraction:
    """Chiral central charge mod 8 from the Gauss sum, on the quarter grid."""
    g = gauss_sum(c)
    if abs(abs(g) - 1) > tol:
        raise NotModularError(f"{c.name}: |Gauss sum| = {abs(g):.6g}, not modular")
    x = (cmath.phase(g) * 8 / (2 * math.pi)) % 8
    q = round(x * 4)
    if abs(x * 4 - q) > tol * 4:
        raise NotModularError(f"{c.name}: central charge {x:.8g} is off the 1/4 grid")
    return Fraction(q % 32, 4)


@dataclass(frozen=True)
class DerivedInvariants:
    d: np.ndarray
    D: float
    theta: np.ndarray
    S: np.ndarray
    transparent: list[int]


def invariants(c: SuperMTC, tol: float = EPS) -> DerivedInvariants:
    return DerivedInvariants(
        quantum_dimension(c), total_dimension(c), twists(c), s_matrix(c), muger_center(c, tol)
    )
