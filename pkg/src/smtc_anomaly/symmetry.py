"""Fermionic symmetries acting on super-MTCs: groups, actions, checks and gauges.

Actions are stored for multiplicity-free categories only.  ``U[g, x, y, z]``
is the U-symbol ``U_g(x, y; z)`` indexed by *image* labels (zero on
non-admissible triples) and ``eta[a, g, h]`` is ``eta_a(g, h)``.  For an
antiunitary ``g`` every ``varsigma(g)`` in the formulas is complex
conjugation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import IO, Any, Sequence, Union

import numpy as np

from .core import EPS, Report, SchemaError, ShapeError, SuperMTC, _read_json, _require

__all__ = [
    "LIE_SECTORS",
    "FermionicSymmetry",
    "SymmetryAction",
    "GaugeTransform",
    "act_on_anyon",
    "validate_action",
    "check_ufur",
    "check_u_eta",
    "check_eta_cocycle",
    "check_fermion_class",
    "check_action",
    "apply_vertex_gauge",
    "apply_action_gauge",
    "random_gauge",
    "apply_gauge",
    "eta_cocycle_defect",
    "pullback",
    "z2_coboundary",
    "cyclic_class",
    "load_action",
    "action_to_dict",
    "dump_action",
]

LIE_SECTORS = ("U(1)", "SO(3)")


def _conj_if(z, flag):
    return np.conj(z) if flag else z


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True, eq=False)
class FermionicSymmetry:
    """Finite bosonic group with antiunitarity map ``s`` and Z2 cocycle ``omega``.

    Element 0 is the identity.  ``omega`` is a 0/1 table representing a class
    in H^2(G_b, Z2).
    """

    elements: tuple[str, ...]
    mul: np.ndarray
    s: np.ndarray
    omega: np.ndarray
    lie_sector: str | None = None
    cyclic_order: int | None = None

    def __post_init__(self) -> None:
        k = len(self.elements)
        for name, arr, shape in (("mul", self.mul, (k, k)), ("s", self.s, (k,)), ("omega", self.omega, (k, k))):
            a = np.asarray(arr, dtype=np.int64)
            if a.shape != shape:
                raise ShapeError(f"{name} has shape {a.shape}, expected {shape}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.lie_sector not in (None, *LIE_SECTORS):
            raise SchemaError(f"unknown lie_sector {self.lie_sector!r}")

    @classmethod
    def cyclic(
        cls,
        order: int,
        *,
        antiunitary: bool = True,
        omega: str = "trivial",
        lie_sector: str | None = None,
    ) -> "FermionicSymmetry":
        k = int(order)
        if k < 1:
            raise SchemaError("cyclic order must be positive")
        names = ["1", "T"] + [f"T^{j}" for j in range(2, k)]
        i, j = np.meshgrid(range(k), range(k), indexing="ij")
        mul = (i + j) % k
        s = np.array([j % 2 if antiunitary else 0 for j in range(k)])
        if antiunitary and k % 2:
            raise SchemaError("an antiunitary generator needs even order")
        if omega == "trivial":
            w = np.zeros((k, k), dtype=np.int64)
        elif omega == "nontrivial":
            if k % 2:
                raise SchemaError("H^2(Z_k, Z2) vanishes for odd k")
            # carry cocycle, the standard generator of H^2(Z_k, Z2)
            w = ((i + j) >= k).astype(np.int64)
        else:
            raise SchemaError(f"omega must be 'trivial' or 'nontrivial', got {omega!r}")
        return cls(tuple(names[:k]), mul, s, w, lie_sector, cyclic_order=k)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.array([int(np.nonzero(self.mul[g] == 0)[0][0]) for g in range(self.order)])
        inv.setflags(write=False)
        return inv

    def power(self, g: int, j: int) -> int:
        out = 0
        for _ in range(j % self.order if self.cyclic_order else j):
            out = int(self.mul[out, g])
        return out

    @property
    def generator(self) -> int:
        if not self.cyclic_order:
            raise ValueError("not declared cyclic")
        return 1 if self.order > 1 else 0

    def problems(self) -> list[str]:
        out = []
        k = self.order
        m = self.mul
        if not (np.array_equal(m[0], np.arange(k)) and np.array_equal(m[:, 0], np.arange(k))):
            out.append("element 0 is not the identity")
        for row in m:
            if sorted(row) != list(range(k)):
                out.append("multiplication table is not a Latin square")
                break
        g, h, l = np.meshgrid(range(k), range(k), range(k), indexing="ij")
        if not np.array_equal(m[m[g, h], l], m[g, m[h, l]]):
            out.append("multiplication is not associative")
        if ((self.s[m] - self.s[:, None] - self.s[None, :]) % 2).any():
            out.append("s is not a homomorphism to Z2")
        w = self.omega
        if ((w[h, l] + w[g, m[h, l]] + w[m[g, h], l] + w[g, h]) % 2).any():
            out.append("omega violates the 2-cocycle identity")
        return out

    def to_dict(self) -> dict:
        d: dict[str, Any]
        if self.cyclic_order:
            d = {"kind": "cyclic", "order": self.order}
        else:
            d = {
                "kind": "table",
                "elements": list(self.elements),
                "mul": [[self.elements[x] for x in row] for row in self.mul],
            }
        return {
            "group": d,
            "s": {g: int(v) for g, v in zip(self.elements, self.s)},
            "omega": self.omega.tolist(),
            "lie_sector": self.lie_sector,
        }


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True, eq=False)
class SymmetryAction:
    symmetry: FermionicSymmetry
    rho: np.ndarray
    U: np.ndarray
    eta: np.ndarray
    charges: tuple[Fraction, ...] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        for attr, dtype in (("rho", np.int64), ("U", complex), ("eta", complex)):
            a = np.array(getattr(self, attr), dtype=dtype)
            a.setflags(write=False)
            object.__setattr__(self, attr, a)
        if self.charges is not None:
            object.__setattr__(self, "charges", tuple(Fraction(q) % 1 for q in self.charges))

    @property
    def G(self) -> FermionicSymmetry:
        return self.symmetry

    @cached_property
    def rho_inv(self) -> np.ndarray:
        """``rho_inv[g]`` is the permutation of g^{-1}."""
        return self.rho[self.symmetry.inverse]

    def anti(self, g: int) -> bool:
        return bool(self.symmetry.s[g])

    def with_(self, **changes) -> "SymmetryAction":
        return replace(self, **changes)

    @classmethod
    def trivial_data(cls, c: SuperMTC, sym: FermionicSymmetry, rho: np.ndarray, **kw) -> "SymmetryAction":
        """Action with every admissible U and every eta equal to 1."""
        k, n = sym.order, c.n
        U = np.broadcast_to((c.N > 0).astype(complex), (k, n, n, n)).copy()
        eta = np.ones((n, k, k), dtype=complex)
        return cls(sym, rho, U, eta, **kw)


def act_on_anyon(act: SymmetryAction, g: int, a: int, power: int = 1) -> int:
    for _ in range(power):
        a = int(act.rho[g, a])
    return a


def _admissible(c: SuperMTC) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(np.nonzero(c.N))  # type: ignore[return-value]


def validate_action(c: SuperMTC, act: SymmetryAction, tol: float = EPS) -> Report:
    """Shape, permutation, gauge-fixing and charge invariants of an action."""
    rep = Report("action structure")
    sym = act.symmetry
    k, n = sym.order, c.n
    for msg in sym.problems():
        rep.add(msg)
    if act.rho.shape != (k, n) or act.U.shape != (k, n, n, n) or act.eta.shape != (n, k, k):
        rep.add(f"array shapes rho {act.rho.shape}, U {act.U.shape}, eta {act.eta.shape} do not match ({k}, {n})")
        return rep
    if not c.rules.multiplicity_free:
        rep.add("symmetry actions are implemented for multiplicity-free categories only")
        return rep
    rho = act.rho
    rep.checked += 1
    for g in range(k):
        if sorted(rho[g]) != list(range(n)):
            rep.add(f"rho[{sym.elements[g]}] is not a permutation")
            return rep
    if not np.array_equal(rho[0], np.arange(n)):
        rep.add("rho of the identity is not the identity")
    for g, h in itertools.product(range(k), repeat=2):
        if not np.array_equal(rho[g][rho[h]], rho[sym.mul[g, h]]):
            rep.add(f"rho is not a homomorphism at ({sym.elements[g]}, {sym.elements[h]})")
    if c.fermion is not None and (rho[:, c.fermion] != c.fermion).any():
        rep.add("psi is not fixed by the action")
    N = c.N
    for g in range(k):
        p = rho[g]
        if not np.array_equal(N[np.ix_(p, p, p)], N):
            rep.add(f"rho[{sym.elements[g]}] does not preserve fusion")
    A, B, C = _admissible(c)
    vals = act.U[:, A, B, C]
    rep.checked += vals.size
    bad = np.abs(np.abs(vals) - 1) > tol
    for g, i in zip(*np.nonzero(bad)):
        rep.add(f"|U_{sym.elements[g]}({c.label(A[i])},{c.label(B[i])};{c.label(C[i])})| != 1")
    mask = np.ones_like(act.U, dtype=bool)
    mask[:, A, B, C] = False
    if np.abs(act.U[mask]).max(initial=0) > tol:
        rep.add("U populated on non-admissible triples")
    if (np.abs(np.abs(act.eta) - 1) > tol).any():
        rep.add("eta is not unit modulus")
    # gauge fixing
    if np.abs(act.eta[0] - 1).max() > tol:
        rep.add("eta_1(g,h) != 1")
    if np.abs(act.eta[:, 0, :] - 1).max() > tol or np.abs(act.eta[:, :, 0] - 1).max() > tol:
        rep.add("eta_a(1,g) or eta_a(g,1) != 1")
    if np.abs(act.U[:, 0, np.arange(n), np.arange(n)] - 1).max() > tol:
        rep.add("U_g(1,b;b) != 1")
    if np.abs(act.U[:, np.arange(n), 0, np.arange(n)] - 1).max() > tol:
        rep.add("U_g(a,1;a) != 1")
    rep.merge(_check_charges(c, act))
    return rep


def _check_charges(c: SuperMTC, act: SymmetryAction) -> Report:
    rep = Report("charges")
    sector = act.symmetry.lie_sector
    q = act.charges
    if sector is None:
        if q is not None:
            rep.add("charges given without a Lie sector")
        return rep
    if q is None or len(q) != c.n:
        rep.add(f"Lie sector {sector} requires a charge for every anyon")
        return rep
    if c.fermion is not None and q[c.fermion] != Fraction(1, 2):
        rep.add("q_psi must be 1/2")
    if q[0] != 0:
        rep.add("q_1 must be 0")
    for a, b, cc in zip(*_admissible(c)):
        rep.checked += 1
        if (q[a] + q[b] - q[cc]) % 1:
            rep.add(f"q is not additive on {c.label(a)} x {c.label(b)} -> {c.label(cc)}")
    if sector == "SO(3)":
        for a in range(c.n):
            if q[a] not in (0, Fraction(1, 2)):
                rep.add(f"SO(3) charge of {c.label(a)} is {q[a]}, not 0 or 1/2")
    return rep


# ---------------------------------------------------------------------------
# consistency equations


def check_ufur(c: SuperMTC, act: SymmetryAction, tol: float = EPS) -> Report:
    """U-F and U-R compatibility for every group element."""
    c.require_multiplicity_free("check_ufur")
    rep = Report("UFUR")
    U = act.U
    sym = act.symmetry
    f_keys = np.array(list(c._f6.keys()), dtype=np.int64).reshape(-1, 6)
    f_vals = np.array(list(c._f6.values()), dtype=complex)
    r_keys = np.array(list(c._r3.keys()), dtype=np.int64).reshape(-1, 3)
    r_vals = np.array(list(c._r3.values()), dtype=complex)
    f_pos = {tuple(k): i for i, k in enumerate(f_keys.tolist())}
    r_pos = {tuple(k): i for i, k in enumerate(r_keys.tolist())}
    for g in range(sym.order):
        p = act.rho[g]
        Ug = U[g]
        anti = act.anti(g)
        # F line: U(ga,gb;ge) U(ge,gc;gd) F^{ga gb gc}_{gd;ge gf} / (U(gb,gc;gf) U(ga,gf;gd)) = K F K
        img = p[f_keys]
        a, b, cc, d, e, f = img.T
        F_img = np.array([f_vals[f_pos[tuple(k)]] for k in img.tolist()])
        lhs = Ug[a, b, e] * Ug[e, cc, d] * F_img / (Ug[b, cc, f] * Ug[a, f, d])
        err = np.abs(lhs - _conj_if(f_vals, anti))
        rep.checked += err.size
        for i in np.nonzero(err > tol)[0]:
            key = ",".join(c.label(x) for x in f_keys[i])
            rep.add(f"F line, g={sym.elements[g]}, F[{key}]: |lhs - rhs| = {err[i]:.3g}")
        # R line: U(gb,ga;gc) R^{ga gb}_{gc} / U(ga,gb;gc) = K R K
        img = p[r_keys]
        a, b, cc = img.T
        R_img = np.array([r_vals[r_pos[tuple(k)]] for k in img.tolist()])
        lhs = Ug[b, a, cc] * R_img / Ug[a, b, cc]
        err = np.abs(lhs - _conj_if(r_vals, anti))
        rep.checked += err.size
        for i in np.nonzero(err > tol)[0]:
            key = ",".join(c.label(x) for x in r_keys[i])
            rep.add(f"R line, g={sym.elements[g]}, R[{key}]: |lhs - rhs| = {err[i]:.3g}")
    return rep


def check_u_eta(c: SuperMTC, act: SymmetryAction, tol: float = EPS) -> Report:
    """eta_a eta_b / eta_c = U_gh(a,b;c) / (U_g(a,b;c) K U_h(g^-1 a, g^-1 b; g^-1 c) K)."""
    c.require_multiplicity_free("check_u_eta")
    rep = Report("U-eta")
    sym = act.symmetry
    A, B, C = _admissible(c)
    U, eta = act.U, act.eta
    for g, h in itertools.product(range(sym.order), repeat=2):
        gi = act.rho_inv[g]
        lhs = eta[A, g, h] * eta[B, g, h] / eta[C, g, h]
        rhs = U[sym.mul[g, h], A, B, C] / (U[g, A, B, C] * _conj_if(U[h, gi[A], gi[B], gi[C]], act.anti(g)))
        err = np.abs(lhs - rhs)
        rep.checked += err.size
        for i in np.nonzero(err > tol)[0]:
            rep.add(
                f"g={sym.elements[g]}, h={sym.elements[h]}, ({c.label(A[i])},{c.label(B[i])};{c.label(C[i])}): "
                f"|lhs - rhs| = {err[i]:.3g}"
            )
    return rep


def eta_cocycle_defect(act: SymmetryAction, eta: np.ndarray | None = None) -> np.ndarray:
    """|eta_a(g,h) eta_a(gh,k) - eta_a(g,hk) eta_{g^-1 a}(h,k)^varsigma(g)| over (a,g,h,k)."""
    eta = act.eta if eta is None else eta
    sym = act.symmetry
    k = sym.order
    g, h, l = np.meshgrid(range(k), range(k), range(k), indexing="ij")
    lhs = eta[:, g, h] * eta[:, sym.mul[g, h], l]
    back = eta[act.rho_inv[g].transpose(3, 0, 1, 2), h, l]  # eta_{g^-1 a}(h, l)
    back = np.where(sym.s[g][None] == 1, np.conj(back), back)
    rhs = eta[:, g, sym.mul[h, l]] * back
    return np.abs(lhs - rhs)


def check_eta_cocycle(c: SuperMTC, act: SymmetryAction, tol: float = EPS) -> Report:
    rep = Report("eta cocycle")
    err = eta_cocycle_defect(act)
    rep.checked += err.size
    names = act.symmetry.elements
    for a, g, h, l in zip(*np.nonzero(err > tol)):
        rep.add(f"a={c.label(a)}, (g,h,k)=({names[g]},{names[h]},{names[l]}): |lhs - rhs| = {err[a, g, h, l]:.3g}")
    return rep


def z2_coboundary(x: np.ndarray, mul: np.ndarray) -> np.ndarray | None:
    """A 0/1 cochain f with x(g,h) = f(g)+f(h)-f(gh) mod 2, or None if x is not a coboundary.

    Exhaustive over normalized 1-cochains, so only for small groups.
    """
    k = len(mul)
    if k > 20:
        raise ValueError("brute-force coboundary search limited to groups of order <= 20")
    x = np.asarray(x) % 2
    for bits in itertools.product((0, 1), repeat=k - 1):
        f = np.array((0, *bits))
        if np.array_equal((f[:, None] + f[None, :] + f[mul]) % 2, x):
            return f
    return None


def cyclic_class(x: np.ndarray, sym: FermionicSymmetry) -> int:
    """Class of a Z2 2-cocycle on a cyclic group: 1 iff prod_j x(g, g^j) = -1.

    For odd order H^2 vanishes and the product is not a class invariant, so 0
    is returned.
    """
    k = sym.order
    if k % 2:
        return 0
    g = sym.generator
    return int(sum(int(x[g, sym.power(g, j)]) for j in range(k)) % 2)


def check_fermion_class(c: SuperMTC, act: SymmetryAction, sym: FermionicSymmetry | None = None,
                        tol: float = EPS) -> Report:
    """Compare the class of eta_psi with omega."""
    rep = Report("fermion class")
    sym = sym or act.symmetry
    if c.fermion is None:
        rep.add("no fermion declared")
        return rep
    e = act.eta[c.fermion]
    rep.checked += e.size
    if np.abs(np.abs(e.real) - 1).max() > tol or np.abs(e.imag).max() > tol:
        rep.add("eta_psi is not +-1 valued")
        return rep
    x = (e.real < 0).astype(np.int64)
    m = sym.mul
    k = sym.order
    g, h, l = np.meshgrid(range(k), range(k), range(k), indexing="ij")
    if ((x[h, l] + x[g, m[h, l]] + x[m[g, h], l] + x[g, h]) % 2).any():
        rep.add("eta_psi is not a 2-cocycle")
        return rep
    diff = (x + sym.omega) % 2
    if sym.cyclic_order:
        same = cyclic_class(diff, sym) == 0
    else:
        same = z2_coboundary(diff, m) is not None
    if not same:
        rep.add("[eta_psi] differs from omega")
    return rep


def check_action(c: SuperMTC, act: SymmetryAction, tol: float = EPS) -> list[Report]:
    structure = validate_action(c, act, tol)
    if not structure.ok:
        return [structure]
    return [
        structure,
        check_ufur(c, act, tol),
        check_u_eta(c, act, tol),
        check_eta_cocycle(c, act, tol),
        check_fermion_class(c, act, tol=tol),
    ]


# ---------------------------------------------------------------------------
# gauge transformations


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """Vertex basis changes ``vertex[(a,b,c)]`` and action phases ``action[a, g]``."""

    vertex: dict[tuple[int, int, int], np.ndarray]
    action: np.ndarray | None = None

    def scalar_vertex(self, n: int) -> np.ndarray:
        out = np.zeros((n, n, n), dtype=complex)
        for (a, b, cc), m in self.vertex.items():
            if m.shape != (1, 1):
                raise NotImplementedError("scalar view needs multiplicity-free channels")
            out[a, b, cc] = m[0, 0]
        return out

    def problems(self, tol: float = EPS) -> list[str]:
        out = []
        for key, m in self.vertex.items():
            if np.abs(m.conj().T @ m - np.eye(len(m))).max() > tol:
                out.append(f"vertex gauge at {key} is not unitary")
        if self.action is not None and (np.abs(np.abs(self.action) - 1) > tol).any():
            out.append("action gauge is not unit modulus")
        return out


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    size = sum(len(b) for b in blocks)
    out = np.zeros((size, size), dtype=complex)
    i = 0
    for b in blocks:
        out[i : i + len(b), i : i + len(b)] = b
        i += len(b)
    return out


def apply_vertex_gauge(
    c: SuperMTC, act: SymmetryAction | None, gauge: GaugeTransform
) -> tuple[SuperMTC, SymmetryAction | None]:
    """F -> (G^{ab}_e G^{ec}_d) F (G^{bc}_f G^{af}_d)^{-1}, R -> G^{ba}_c R (G^{ab}_c)^{-1}.

    U_g(x,y;z) -> [G^{g^-1 x, g^-1 y}_{g^-1 z}]^varsigma(g) U_g(x,y;z) / G^{xy}_z.
    Channels missing from ``gauge.vertex`` are left untouched.
    """
    N = c.N

    def G(a, b, k):
        m = gauge.vertex.get((a, b, k))
        return np.eye(N[a, b, k], dtype=complex) if m is None else m

    if c.rules.multiplicity_free:
        gam = np.ones((c.n,) * 3, dtype=complex)
        for (a, b, k), m in gauge.vertex.items():
            gam[a, b, k] = m[0, 0]
        return _scalar_vertex_gauge(c, act, gam)
    F = {}
    for key, mat in c.F.items():
        a, b, cc, d = key
        left = _block_diag([np.kron(G(a, b, e), G(e, cc, d)) for e in c.rules.products[a][b] if N[e, cc, d]])
        right = _block_diag([np.kron(G(b, cc, f), G(a, f, d)) for f in c.rules.products[b][cc] if N[a, f, d]])
        F[key] = left @ mat @ np.linalg.inv(right)
    R = {(a, b, k): G(b, a, k) @ m @ np.linalg.inv(G(a, b, k)) for (a, b, k), m in c.R.items()}
    new_c = c.replace(F=F, R=R)
    if act is None:
        return new_c, None
    c.require_multiplicity_free("apply_vertex_gauge with an action")
    gam = np.ones((c.n,) * 3, dtype=complex)
    for (a, b, k), m in gauge.vertex.items():
        gam[a, b, k] = m[0, 0]
    U = act.U.copy()
    A, B, C = _admissible(c)
    for g in range(act.symmetry.order):
        gi = act.rho_inv[g]
        pre = _conj_if(gam[gi[A], gi[B], gi[C]], act.anti(g))
        U[g, A, B, C] = pre * U[g, A, B, C] / gam[A, B, C]
    return new_c, act.with_(U=U)


def _scalar_vertex_gauge(c: SuperMTC, act: SymmetryAction | None, gam: np.ndarray):
    P = c.rules.products
    N = c.N
    F = {}
    for (a, b, cc, d), mat in c.F.items():
        left = np.array([gam[a, b, e] * gam[e, cc, d] for e in P[a][b] if N[e, cc, d]])
        right = np.array([gam[b, cc, f] * gam[a, f, d] for f in P[b][cc] if N[a, f, d]])
        F[(a, b, cc, d)] = left[:, None] * mat / right[None, :]
    R = {(a, b, k): m * (gam[b, a, k] / gam[a, b, k]) for (a, b, k), m in c.R.items()}
    new_c = c.replace(F=F, R=R)
    if act is None:
        return new_c, None
    U = act.U.copy()
    A, B, C = _admissible(c)
    for g in range(act.symmetry.order):
        gi = act.rho_inv[g]
        pre = _conj_if(gam[gi[A], gi[B], gi[C]], act.anti(g))
        U[g, A, B, C] = pre * U[g, A, B, C] / gam[A, B, C]
    return new_c, act.with_(U=U)


def apply_action_gauge(c: SuperMTC, act: SymmetryAction, gamma: np.ndarray) -> SymmetryAction:
    """U_g(a,b;c) -> gamma_a(g) gamma_b(g) / gamma_c(g) U_g(a,b;c) and the matching eta change."""
    gamma = np.asarray(gamma, dtype=complex)
    sym = act.symmetry
    k = sym.order
    A, B, C = _admissible(c)
    U = act.U.copy()
    for g in range(k):
        U[g, A, B, C] *= gamma[A, g] * gamma[B, g] / gamma[C, g]
    g, h = np.meshgrid(range(k), range(k), indexing="ij")
    back = gamma[act.rho_inv[g].transpose(2, 0, 1), h]  # gamma_{g^-1 a}(h)
    back = np.where(sym.s[g][None] == 1, np.conj(back), back)
    factor = gamma[:, sym.mul[g, h]] / (gamma[:, g] * back)
    return act.with_(U=U, eta=act.eta * factor)


def _haar_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_gauge(c: SuperMTC, act: SymmetryAction | None, seed: int) -> GaugeTransform:
    """Seeded random gauge that keeps the standard gauge fixing.

    Channels with a unit leg and the psi x psi -> 1 channel are left at the
    identity, and gamma is 1 on the unit anyon, on psi and at the identity
    element.
    """
    rng = np.random.default_rng(seed)
    vertex = {}
    for a, b, k in c.r_keys():
        m = int(c.N[a, b, k])
        fixed = a == 0 or b == 0 or (c.fermion is not None and a == b == c.fermion)
        vertex[(a, b, k)] = np.eye(m, dtype=complex) if fixed else _haar_unitary(rng, m)
    action = None
    if act is not None:
        k = act.symmetry.order
        action = np.exp(2j * np.pi * rng.random((c.n, k)))
        action[0, :] = 1
        action[:, 0] = 1
        if c.fermion is not None:
            action[c.fermion, :] = 1
    return GaugeTransform(vertex, action)


def apply_gauge(c: SuperMTC, act: SymmetryAction | None, gauge: GaugeTransform):
    c2, act2 = apply_vertex_gauge(c, act, gauge)
    if act2 is not None and gauge.action is not None:
        act2 = apply_action_gauge(c2, act2, gauge.action)
    return c2, act2


# ---------------------------------------------------------------------------
# JSON


def _phase(value: Any, where: str) -> complex:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise SchemaError(f"{where}: value must be [re, im]")
    return complex(float(value[0]), float(value[1]))


def _group_from(doc: dict) -> FermionicSymmetry:
    gdoc = _require(doc, "group", "action")
    kind = _require(gdoc, "kind", "group")
    lie = doc.get("lie_sector")
    omega_doc = doc.get("omega", "trivial")
    if kind == "cyclic":
        order = int(_require(gdoc, "order", "group"))
        base = FermionicSymmetry.cyclic(order, antiunitary=False, lie_sector=lie)
    elif kind == "table":
        names = [str(x) for x in _require(gdoc, "elements", "group")]
        idx = {g: i for i, g in enumerate(names)}
        mul_doc = _require(gdoc, "mul", "group")
        try:
            mul = [[idx[x] if isinstance(x, str) else int(x) for x in row] for row in mul_doc]
        except KeyError as exc:
            raise SchemaError(f"group.mul: unknown element {exc}") from exc
        k = len(names)
        base = FermionicSymmetry(tuple(names), np.array(mul), np.zeros(k), np.zeros((k, k)), lie)
    else:
        raise SchemaError(f"group.kind must be 'cyclic' or 'table', got {kind!r}")
    k = base.order
    s_doc = _require(doc, "s", "action")
    if isinstance(s_doc, dict):
        s = np.zeros(k, dtype=np.int64)
        for g, v in s_doc.items():
            if g not in base.index:
                raise SchemaError(f"s: unknown element {g!r}")
            s[base.index[g]] = int(v)
    else:
        s = np.array(s_doc, dtype=np.int64)
    if isinstance(omega_doc, str):
        if kind != "cyclic":
            raise SchemaError("omega shortcut strings are only allowed for cyclic groups")
        omega = FermionicSymmetry.cyclic(k, antiunitary=False, omega=omega_doc).omega
    else:
        omega = np.array(omega_doc, dtype=np.int64)
    sym = FermionicSymmetry(base.elements, base.mul, s, omega, lie, base.cyclic_order)
    bad = sym.problems()
    if bad:
        raise ShapeError("; ".join(bad))
    return sym


def load_action(source: Union[bytes, str, IO[Any], dict], c: SuperMTC) -> SymmetryAction:
    """Load an action on ``c`` from the action JSON schema."""
    doc = source if isinstance(source, dict) else _read_json(source)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    c.require_multiplicity_free("load_action")
    sym = _group_from(doc)
    k, n = sym.order, c.n
    idx = c.rules.index

    def anyon(x: Any, where: str) -> int:
        if x not in idx:
            raise SchemaError(f"{where}: unknown anyon {x!r}")
        return idx[x]

    def element(x: Any, where: str) -> int:
        if x not in sym.index:
            raise SchemaError(f"{where}: unknown group element {x!r}")
        return sym.index[x]

    rho = np.full((k, n), -1, dtype=np.int64)
    rho[0] = np.arange(n)
    for g, perm in _require(doc, "rho", "action").items():
        gi = element(g, "rho")
        row = np.arange(n)
        if isinstance(perm, dict):
            for a, b in perm.items():
                row[anyon(a, "rho")] = anyon(b, "rho")
        else:
            if len(perm) != n:
                raise ShapeError(f"rho[{g}] has {len(perm)} entries, expected {n}")
            row = np.array([anyon(b, "rho") for b in perm])
        rho[gi] = row
    # close under products so generators suffice
    changed = True
    while changed:
        changed = False
        for g, h in itertools.product(range(k), repeat=2):
            gh = sym.mul[g, h]
            if rho[g, 0] >= 0 and rho[h, 0] >= 0 and rho[gh, 0] < 0:
                rho[gh] = rho[g][rho[h]]
                changed = True
    if (rho < 0).any():
        missing = [sym.elements[g] for g in range(k) if rho[g, 0] < 0]
        raise SchemaError(f"rho does not determine elements {missing}")

    U = np.broadcast_to((c.N > 0).astype(complex), (k, n, n, n)).copy()
    default_u = _phase(doc.get("U_default", [1, 0]), "U_default")
    U[:, c.N > 0] = default_u
    for i, e in enumerate(doc.get("U", [])):
        where = f"U[{i}]"
        g = element(_require(e, "g", where), where)
        a, b, cc = (anyon(_require(e, x, where), where) for x in "abc")
        if not c.N[a, b, cc]:
            raise ShapeError(f"{where}: channel not admissible")
        if int(e.get("mu", 0)) or int(e.get("nu", 0)):
            raise ShapeError(f"{where}: multiplicity index out of range")
        U[g, a, b, cc] = _phase(_require(e, "value", where), where)
    eta = np.ones((n, k, k), dtype=complex)
    for i, e in enumerate(doc.get("eta", [])):
        where = f"eta[{i}]"
        a = anyon(_require(e, "a", where), where)
        g = element(_require(e, "g", where), where)
        h = element(_require(e, "h", where), where)
        eta[a, g, h] = _phase(_require(e, "value", where), where)
    charges = None
    if "charges" in doc and doc["charges"] is not None:
        charges_list = [Fraction(0)] * n
        for a, q in doc["charges"].items():
            try:
                charges_list[anyon(a, "charges")] = Fraction(str(q))
            except (ValueError, ZeroDivisionError) as exc:
                raise SchemaError(f"charges: bad rational {q!r}") from exc
        charges = tuple(charges_list)
    return SymmetryAction(sym, rho, U, eta, charges, name=str(doc.get("name", "")))


def action_to_dict(c: SuperMTC, act: SymmetryAction, tol: float = 0.0) -> dict:
    sym = act.symmetry
    L = c.labels
    E = sym.elements
    out = {"name": act.name}
    out.update(sym.to_dict())
    out["rho"] = {E[g]: [L[x] for x in act.rho[g]] for g in range(1, sym.order)}
    U = []
    A, B, C = _admissible(c)
    for g in range(sym.order):
        for a, b, cc in zip(A, B, C):
            z = complex(act.U[g, a, b, cc])
            if abs(z - 1) > tol:
                U.append({"g": E[g], "a": L[a], "b": L[b], "c": L[cc], "value": [z.real, z.imag]})
    eta = []
    for a, g, h in itertools.product(range(c.n), range(sym.order), range(sym.order)):
        z = complex(act.eta[a, g, h])
        if abs(z - 1) > tol:
            eta.append({"a": L[a], "g": E[g], "h": E[h], "value": [z.real, z.imag]})
    out["U"] = U
    out["eta"] = eta
    if act.charges is not None:
        out["charges"] = {L[a]: str(q) for a, q in enumerate(act.charges)}
    return out


def dump_action(c: SuperMTC, act: SymmetryAction, fp: IO[str]) -> None:
    json.dump(action_to_dict(c, act), fp, indent=1)
    fp.write("\n")


def pullback(act: SymmetryAction, symmetry: FermionicSymmetry, projection: Sequence[int]) -> SymmetryAction:
    """Action of a larger group through a surjection onto ``act.symmetry``."""
    p = np.asarray(projection, dtype=np.int64)
    base = act.symmetry
    if p.shape != (symmetry.order,) or not np.array_equal(p[symmetry.mul], base.mul[p[:, None], p[None, :]]):
        raise ValueError("projection is not a group homomorphism")
    if not np.array_equal(base.s[p], symmetry.s):
        raise ValueError("projection does not preserve s")
    return SymmetryAction(
        symmetry,
        act.rho[p],
        act.U[p],
        act.eta[:, p[:, None], p[None, :]],
        act.charges,
        name=act.name,
    )
