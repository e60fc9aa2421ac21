"""Anomaly indicators and partition functions on generating manifolds.

Time-reversal data is read from a :class:`SymmetryAction` whose group is
cyclic with generator ``T`` (element 1).  Lie-group data enters only through
the charge table ``act.charges`` (or an explicit ``q``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import quantum_dimension, s_matrix, total_dimension, twists
from .core import EPS, SuperMTC
from .symmetry import SymmetryAction, check_action

__all__ = [
    "CLASSIFICATIONS",
    "TENFOLD",
    "IndicatorResult",
    "HallConductance",
    "OffGridError",
    "SymmetryTypeError",
    "indicator_pin_plus",
    "indicator_epin",
    "partition_rp4",
    "partition_cp2",
    "partition_s2s2",
    "partition_s4",
    "class_a_theta",
    "class_c_theta",
    "hall_conductance",
    "tenfold_report",
    "anomaly_class",
    "gaplessness_check",
]

#: order of the cyclic group each tag is read in; None for angle-valued tags
CLASSIFICATIONS: dict[str, int | None] = {
    "Z16_pinplus": 16,
    "Z4_epin": 4,
    "Z2": 2,
    "U1": None,
    "Z8xZ2_pinc": None,
    "Z2cubed": None,
    "Z4xZ2": None,
    "composite": None,
}

GRID_TOL = 1e-6


class OffGridError(ValueError):
    """An indicator phase is not on the grid its classification allows."""


class SymmetryTypeError(ValueError):
    pass


@dataclass(frozen=True)
class IndicatorResult:
    value: complex
    classification: str
    nu: int | float | None
    order: int | None = None
    shadows: tuple[complex, ...] = ()
    manifold: str = ""

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "value": [self.value.real, self.value.imag],
            "classification": self.classification,
            "order": self.order,
            "nu": self.nu,
            "shadows": [[z.real, z.imag] for z in self.shadows],
        }


def anomaly_class(value: complex, group: str, order: int | None = None) -> int:
    """nu with value = exp(2 pi i nu / order); refuses off-grid phases."""
    n = order if order is not None else CLASSIFICATIONS.get(group)
    if n is None:
        raise ValueError(f"{group} needs an explicit order")
    if abs(abs(value) - 1) > GRID_TOL:
        raise OffGridError(f"|value| = {abs(value):.9g}, not a phase")
    x = cmath.phase(value) * n / (2 * math.pi)
    k = round(x)
    if abs(x - k) > GRID_TOL * n:
        raise OffGridError(f"phase {x:.9g}/{n} of a turn is off the Z/{n} grid")
    return k % n


def _checked(c: SuperMTC, act: SymmetryAction, order: int, omega: bool, what: str, tol: float) -> None:
    sym = act.symmetry
    if sym.order != order or sym.cyclic_order != order or not sym.s[1]:
        raise SymmetryTypeError(f"{what} needs a cyclic group of order {order} with antiunitary generator")
    from .symmetry import cyclic_class

    if bool(cyclic_class(sym.omega, sym)) != omega:
        raise SymmetryTypeError(f"{what} needs omega {'nontrivial' if omega else 'trivial'}")
    bad = [r for r in check_action(c, act, tol) if not r.ok]
    if bad:
        raise ValueError(f"inconsistent action: {bad[0].summary()}")


# ---------------------------------------------------------------------------
# Z/4^{Tf}: RP^4


def partition_rp4(c: SuperMTC, act: SymmetryAction) -> tuple[complex, complex, complex]:
    """(value, Z1, Z2) of the RP^4 partition function, without input checks."""
    d = quantum_dimension(c)
    th = twists(c)
    D = total_dimension(c)
    psi = c.fermion
    T = act.rho[1]
    z1 = z2 = 0j
    for a in range(c.n):
        ap = c.times_psi(a)
        eta = act.eta[a, 1, 1]
        if T[a] == a:
            z1 += d[a] * th[a] * eta
        elif T[a] == ap:
            z2 += d[a] * th[a] * eta * act.U[1, a, psi, ap] * c.fsym(a, psi, psi, a, ap, 0)
    z1, z2 = complex(z1 / D), complex(z2 / D)
    return (z1 + 1j * z2) / math.sqrt(2), z1, z2


def indicator_pin_plus(c: SuperMTC, act: SymmetryAction, tol: float = EPS) -> IndicatorResult:
    """RP^4 indicator for T^2 = (-1)^F, in Z/16."""
    _checked(c, act, 2, True, "pin+ indicator", tol)
    value, z1, z2 = partition_rp4(c, act)
    return IndicatorResult(value, "Z16_pinplus", anomaly_class(value, "Z16_pinplus"), 16, (z1, z2), "RP4")


# ---------------------------------------------------------------------------
# Z/4^T x Z/2^f


def _inv(z: complex) -> complex:
    return 1 / z if z else 0j


def epin_shadows(c: SuperMTC, act: SymmetryAction) -> tuple[complex, complex, complex, complex]:
    """The four bosonic shadows Z_1..Z_4 of the epin generator."""
    c.require_multiplicity_free("epin indicator")
    n = c.n
    P = c.rules.products
    N = c.N
    psi = c.fermion
    d = quantum_dimension(c)
    th = twists(c)
    D2 = total_dimension(c) ** 2
    rho = act.rho
    T1, T2, T3 = rho[1], rho[2], rho[3]
    U = act.U[1]
    eta = act.eta
    F = c.fsym
    R = c.rsym
    xp = c.times_psi
    Z = [0j, 0j, 0j, 0j]
    for a in range(n):
        Ta, T2a, T3a = T1[a], T2[a], T3[a]
        etas = np.conj(eta[a, 1, 1] * eta[T2a, 1, 1] * eta[T2a, 2, 2])
        for y in P[a][T2a]:
            Ty, T2y = T1[y], T2[y]
            head = d[a] * np.conj(R(Ta, T3a, Ty)) * np.conj(_inv(U[Ta, T3a, Ty])) * _inv(U[a, T2a, T2y]) * etas
            for b in range(n):
                Tb, bp = T1[b], xp(b)
                for u in P[b][a]:
                    for Tz in P[u][T2a]:
                        if not (N[b, y, Tz] and N[b, T2y, Tz]):
                            continue
                        z = T3[Tz]
                        zp = xp(z)
                        x = (
                            head
                            * th[u]
                            / th[b]
                            * np.conj(F(b, a, T2a, Tz, u, y))
                            * F(b, a, T2a, Tz, u, T2y)
                            * _inv(U[b, T2y, Tz])
                        )
                        if Tb == b and Tz == z:
                            Z[0] += x * np.conj(_inv(U[b, Ty, Tz]))
                        elif Tb == bp and Tz == zp:
                            Z[1] += (
                                x
                                * np.conj(F(psi, Tb, y, zp, b, z))
                                * F(psi, Tb, Ty, zp, b, z)
                                * np.conj(_inv(U[b, Ty, Tz]))
                            )
                        elif Tb == b and Tz == zp:
                            Z[2] += (
                                x
                                * F(psi, b, y, z, bp, zp)
                                * F(psi, b, Ty, zp, bp, z)
                                * np.conj(F(psi, psi, z, z, 0, zp))
                                * np.conj(_inv(U[psi, b, bp]))
                                * np.conj(_inv(U[bp, Ty, Tz]))
                            )
                        elif Tb == bp and Tz == z:
                            # sign fixed so that Z3 and Z4 enter with a common phase
                            Z[3] -= (
                                x
                                * F(Tb, psi, psi, Tb, xp(Tb), 0)
                                * np.conj(_inv(U[b, psi, bp]))
                                * np.conj(_inv(U[bp, Ty, Tz]))
                            )
    return tuple(complex(s / D2) for s in Z)  # type: ignore[return-value]


def combine_epin(shadows: Sequence[complex], phase: complex = 1j) -> complex:
    """(Z1 - Z2 + p Z3 + p Z4) / 2 with spin-structure phase p (+i by default)."""
    z1, z2, z3, z4 = shadows
    return (z1 - z2 + phase * z3 + phase * z4) / 2


def indicator_epin(c: SuperMTC, act: SymmetryAction, tol: float = EPS, *, phase: complex = 1j) -> IndicatorResult:
    """Indicator of the Z/4^T x Z/2^f anomaly, in Z/4."""
    _checked(c, act, 4, False, "epin indicator", tol)
    shadows = epin_shadows(c, act)
    value = combine_epin(shadows, phase)
    return IndicatorResult(value, "Z4_epin", anomaly_class(value, "Z4_epin"), 4, shadows, "Klein bottle bundle over S2")


# ---------------------------------------------------------------------------
# Lie group pieces


def _charges(c: SuperMTC, q) -> np.ndarray:
    if isinstance(q, SymmetryAction):
        q = q.charges
    if q is None or len(q) != c.n:
        raise ValueError("a charge for every anyon is required")
    return np.array([float(Fraction(x)) for x in q])


def partition_cp2(c: SuperMTC, q) -> complex:
    d, th, D = quantum_dimension(c), twists(c), total_dimension(c)
    qa = _charges(c, q)
    return complex((d**2 * th * np.exp(2j * np.pi * qa)).sum() / (math.sqrt(2) * D))


def partition_s2s2(c: SuperMTC, q) -> complex:
    d, S, D = quantum_dimension(c), s_matrix(c), total_dimension(c)
    w = d * np.exp(4j * np.pi * _charges(c, q))
    return complex(w @ S @ w / (2 * D))


def partition_s4() -> complex:
    """The S^4 generator of the SO(3) pieces has trivial partition function."""
    return 1 + 0j


def _angle(z: complex) -> float:
    t = cmath.phase(z) % (2 * math.pi)
    return 0.0 if min(t, 2 * math.pi - t) < 1e-12 else t


def class_a_theta(c: SuperMTC, q) -> tuple[float, float]:
    cp2 = partition_cp2(c, q)
    return _angle(partition_s2s2(c, q) / cp2**8), _angle(cp2)


def class_c_theta(c: SuperMTC, q) -> tuple[float, float]:
    qa = _charges(c, q)
    if not np.all(np.isin(qa, (0.0, 0.5))):
        raise ValueError("SO(3) charges must be 0 or 1/2")
    cp2 = partition_cp2(c, q)
    return _angle(cp2**-4), _angle(cp2)


@dataclass(frozen=True)
class HallConductance:
    kappa: Fraction
    sigma: Fraction
    modulus: int


def _snap(x: float, modulus: int) -> Fraction:
    x %= modulus
    k = round(x * 16)
    if abs(x * 16 - k) <= GRID_TOL * 16:
        return Fraction(k, 16) % modulus
    q = Fraction(x).limit_denominator(1000)
    if abs(float(q) - x) > GRID_TOL:
        raise OffGridError(f"{x:.9g} is not a small rational")
    return q % modulus


def hall_conductance(theta: tuple[float, float], cls: str) -> HallConductance:
    """(kappa, sigma_H) modulo 1 for class A and modulo 2 for class C."""
    t1, t2 = theta
    if cls == "A":
        return HallConductance(_snap(t1 / (2 * math.pi), 1), _snap((8 * t2 + t1) / (2 * math.pi), 1), 1)
    if cls == "C":
        return HallConductance(_snap(t1 / math.pi, 2), _snap((4 * t2 + t1) / math.pi, 2), 2)
    raise ValueError(f"class must be 'A' or 'C', got {cls!r}")


# ---------------------------------------------------------------------------
# ten-fold way


@dataclass(frozen=True)
class _Piece:
    manifold: str
    order: int


TENFOLD: dict[str, tuple[str, str, tuple[_Piece, ...]]] = {
    "AI": ("U(1)", "Z2", (_Piece("CP2", 2),)),
    "AII": ("U(1)", "Z2cubed", (_Piece("RP4", 2), _Piece("CP2", 2), _Piece("S2xS2", 2))),
    "AIII": ("U(1)", "Z8xZ2_pinc", (_Piece("RP4", 8), _Piece("CP2", 2))),
    "CI": ("SO(3)", "Z4xZ2", (_Piece("RP4", 4), _Piece("CP2", 2))),
    "CII": ("SO(3)", "Z2cubed", (_Piece("RP4", 2), _Piece("CP2", 2), _Piece("S4", 2))),
}


def tenfold_report(c: SuperMTC, act: SymmetryAction, cls: str, tol: float = EPS) -> list[IndicatorResult]:
    """One result per generating manifold of the class.

    ``act`` supplies the charges and, for classes with RP^4, the time-reversal
    sub-data as a Z/2 action with T^2 = (-1)^F.
    """
    if cls not in TENFOLD:
        raise ValueError(f"unknown class {cls!r}; expected one of {', '.join(TENFOLD)}")
    sector, tag, pieces = TENFOLD[cls]
    if act.charges is None:
        raise ValueError(f"class {cls} needs a charge table")
    if act.symmetry.lie_sector != sector:
        raise SymmetryTypeError(f"class {cls} needs {sector} charges, action declares {act.symmetry.lie_sector}")
    out = []
    for piece in pieces:
        shadows: tuple[complex, ...] = ()
        if piece.manifold == "RP4":
            _checked(c, act, 2, True, f"class {cls} RP4 piece", tol)
            value, z1, z2 = partition_rp4(c, act)
            shadows = (z1, z2)
        elif piece.manifold == "CP2":
            value = partition_cp2(c, act)
        elif piece.manifold == "S2xS2":
            value = partition_s2s2(c, act)
        else:
            value = partition_s4()
        nu = anomaly_class(value, tag, piece.order)
        out.append(IndicatorResult(value, tag, nu, piece.order, shadows, piece.manifold))
    return out


#: values that no fermionic topological order can produce
UNREALIZABLE = {"CI": ("RP4", (1j, -1j)), "CII": ("S4", (-1,))}


def _infer_class(report: Sequence[IndicatorResult]) -> str | None:
    tags = {r.classification for r in report}
    manifolds = {r.manifold for r in report}
    if "Z4xZ2" in tags:
        return "CI"
    if "Z2cubed" in tags and "S4" in manifolds:
        return "CII"
    return None


def gaplessness_check(report: Sequence[IndicatorResult], cls: str | None = None, tol: float = 1e-6) -> list[str]:
    """Flags for indicator values that force gaplessness; empty on consistent input.

    The class is read off the report when not given.
    """
    cls = cls or _infer_class(report)
    if cls not in UNREALIZABLE:
        return []
    manifold, bad = UNREALIZABLE[cls]
    return [
        f"class {cls}: {manifold} value {r.value:.6g} cannot come from a gapped phase"
        for r in report
        if r.manifold == manifold and any(abs(r.value - v) < tol for v in bad)
    ]
