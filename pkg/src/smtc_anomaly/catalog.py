"""Built-in categories, extensions and symmetry actions."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .core import SuperMTC
from .symmetry import FermionicSymmetry, SymmetryAction, pullback

__all__ = [
    "abelian_category",
    "su2k",
    "build_u1k",
    "build_semion_fermion",
    "build_so33",
    "build_trivial",
    "build_toric_fermion",
    "build_extension_fixtures",
    "CATALOG",
    "get",
    "names",
]


def _turns(x) -> complex:
    return cmath.exp(2j * math.pi * float(x))


# ---------------------------------------------------------------------------
# abelian theories


def _digits(index: int, orders: Sequence[int]) -> tuple[int, ...]:
    out = []
    for n in reversed(orders):
        out.append(index % n)
        index //= n
    return tuple(reversed(out))


def _index(digits: Sequence[int], orders: Sequence[int]) -> int:
    i = 0
    for x, n in zip(digits, orders):
        i = i * n + x % n
    return i


def abelian_category(
    name: str,
    orders: Sequence[int],
    spins: Sequence[Fraction],
    mixed: dict[tuple[int, int], Fraction] | None = None,
    *,
    fermion: Sequence[int] | None = None,
    labels: Sequence[str] | None = None,
) -> SuperMTC:
    """Braided category on Z_{n_1} x ... x Z_{n_r} in a canonical gauge.

    ``spins[i]`` is theta of the i-th generator in turns and ``mixed[i, j]``
    (i < j) the extra braiding phase between generators i and j.  With
    R^{x,y} = prod_i e^{2 pi i q_i x_i y_i} prod_{i<j} e^{2 pi i b_ij x_i y_j}
    the F-symbols absorb the carries: F^{x,y,z} = prod_i e^{2 pi i q_i n_i x_i c_i}
    where c_i is the carry of y_i + z_i.  The caller is responsible for
    choosing consistent data; run the hexagon check to confirm.
    """
    orders = tuple(int(n) for n in orders)
    spins = tuple(Fraction(q) for q in spins)
    mixed = {k: Fraction(v) for k, v in (mixed or {}).items()}
    size = math.prod(orders)
    digits = [_digits(i, orders) for i in range(size)]
    if labels is None:
        if len(orders) == 1:
            labels = [str(i) for i in range(size)]
        else:
            labels = ["(" + ",".join(map(str, d)) + ")" for d in digits]
    N = np.zeros((size,) * 3, dtype=np.int64)
    for x in range(size):
        for y in range(size):
            N[x, y, _index([a + b for a, b in zip(digits[x], digits[y])], orders)] = 1

    # integer numerators over a common denominator keep the loops cheap
    den = math.lcm(*(q.denominator for q in spins), *(v.denominator for v in mixed.values()))
    qs = [int(q * den) for q in spins]
    bs = [(i, j, int(v * den)) for (i, j), v in mixed.items()]
    roots = np.exp(2j * np.pi * np.arange(den) / den)

    def F(x, y, z, *_):
        dx, dy, dz = digits[x], digits[y], digits[z]
        k = sum(q * n * a * ((b + c) // n) for q, n, a, b, c in zip(qs, orders, dx, dy, dz))
        return roots[k % den]

    def R(x, y, _):
        dx, dy = digits[x], digits[y]
        k = sum(q * a * b for q, a, b in zip(qs, dx, dy))
        k += sum(v * dx[i] * dy[j] for i, j, v in bs)
        return roots[k % den]

    psi = None if fermion is None else _index(fermion, orders)
    return SuperMTC.from_scalars(name, labels, N, F, R, psi)


def build_u1k_category(k: int) -> SuperMTC:
    """U(1)_k with k odd: Z_2k, F = 1, R^{a,b} = e^{pi i ab/k}, psi = k."""
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and at least 3")
    n = 2 * k
    N = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            N[a, b, (a + b) % n] = 1
    return SuperMTC.from_scalars(
        f"U(1)_{k}",
        [str(a) for a in range(n)],
        N,
        lambda *_: 1.0,
        lambda a, b, _: cmath.exp(1j * math.pi * a * b / k),
        fermion=k,
    )


def semion_fermion_category() -> SuperMTC:
    labels = ("1", "s", "psi", "stilde")
    # Z2 x Z2 with s = (1,0), psi = (0,1), stilde = (1,1)
    coords = [(0, 0), (1, 0), (0, 1), (1, 1)]
    N = np.zeros((4, 4, 4), dtype=np.int64)
    for a, b in itertools.product(range(4), repeat=2):
        c = coords.index(((coords[a][0] + coords[b][0]) % 2, (coords[a][1] + coords[b][1]) % 2))
        N[a, b, c] = 1
    semionic = {1, 3}
    R = np.array(
        [[1, 1, 1, 1], [1, 1j, 1, 1j], [1, 1, -1, -1], [1, 1j, -1, -1j]],
        dtype=complex,
    )
    return SuperMTC.from_scalars(
        "semion-fermion",
        labels,
        N,
        lambda a, b, c, *_: -1.0 if {a, b, c} <= semionic else 1.0,
        lambda a, b, _: R[a, b],
        fermion=2,
    )


def build_trivial_category() -> SuperMTC:
    N = np.zeros((2, 2, 2), dtype=np.int64)
    N[0, 0, 0] = N[0, 1, 1] = N[1, 0, 1] = N[1, 1, 0] = 1
    return SuperMTC.from_scalars(
        "trivial", ("1", "psi"), N, lambda *_: 1.0, lambda a, b, _: -1.0 if a == b == 1 else 1.0, fermion=1
    )


# ---------------------------------------------------------------------------
# SU(2)_k


@dataclass(frozen=True)
class _QuantumInts:
    k: int

    @property
    def q(self) -> complex:
        return cmath.exp(2j * math.pi / (self.k + 2))

    def bracket(self, n: int) -> complex:
        # sum_{m=1}^{n} q^{(n+1)/2 - m}, written with half-integer powers of q
        half = cmath.exp(1j * math.pi / (self.k + 2))
        return sum(half ** (n + 1 - 2 * m) for m in range(1, n + 1))

    def fact(self, n: int) -> complex:
        if n < 0:
            raise ValueError("negative quantum factorial")
        out = 1.0 + 0j
        for m in range(1, n + 1):
            out *= self.bracket(m)
        return out

    def delta(self, a: int, b: int, c: int) -> complex:
        f = self.fact
        return cmath.sqrt(f((a + b - c) // 2) * f((a - b + c) // 2) * f((-a + b + c) // 2) / f((a + b + c + 2) // 2))


def _su2_admissible(k: int, a: int, b: int, c: int) -> bool:
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b and a + b + c <= 2 * k


def su2k(k: int, subset: Sequence[int] | None = None, *, name: str | None = None,
         labels: Sequence[str] | None = None, fermion: int | None = None) -> SuperMTC:
    """SU(2)_k on Dynkin labels 0..k, optionally restricted to a fusion-closed subset.

    The 6j sum follows the usual q-Racah formula with q = e^{2 pi i/(k+2)};
    every factorial argument is halved, including the b+d+e+f-n term.
    """
    qi = _QuantumInts(k)
    f = qi.fact
    B = qi.bracket
    sub = list(range(k + 1)) if subset is None else list(subset)
    n = len(sub)
    N = np.zeros((n, n, n), dtype=np.int64)
    for i, j, l in itertools.product(range(n), repeat=3):
        N[i, j, l] = int(_su2_admissible(k, sub[i], sub[j], sub[l]))

    def F(i, j, l, m, p, r):
        a, b, c, d, e, g = (sub[x] for x in (i, j, l, m, p, r))
        pref = (-1) ** ((a + b + c + d) // 2) * qi.delta(a, b, e) * qi.delta(c, d, e)
        pref *= qi.delta(b, c, g) * qi.delta(a, d, g) * cmath.sqrt(B(e + 1) * B(g + 1))
        lo = max(a + b + e, c + d + e, b + c + g, a + d + g)
        hi = min(a + b + c + d, a + c + e + g, b + d + e + g)
        total = 0j
        for t in range(lo + lo % 2, hi + 1, 2):
            den = f((a + b + c + d - t) // 2) * f((a + c + e + g - t) // 2) * f((b + d + e + g - t) // 2)
            den *= f((t - a - b - e) // 2) * f((t - c - d - e) // 2) * f((t - b - c - g) // 2) * f((t - a - d - g) // 2)
            total += (-1) ** (t // 2) * f((t + 2) // 2) / den
        return pref * total

    def R(i, j, l):
        a, b, c = sub[i], sub[j], sub[l]
        return (-1) ** ((a + b - c) // 2) * qi.q ** ((c * (c + 2) - a * (a + 2) - b * (b + 2)) / 8)

    return SuperMTC.from_scalars(
        name or f"SU(2)_{k}",
        labels or [str(a) for a in sub],
        N,
        F,
        R,
        fermion,
    )


def so33_category() -> SuperMTC:
    return su2k(6, [0, 2, 4, 6], name="SO(3)_3", labels=("1", "s", "stilde", "psi"), fermion=3)


def build_trivial_extension() -> SuperMTC:
    return abelian_category(
        "toric code", [2, 2], [0, 0], {(0, 1): Fraction(1, 2)}, fermion=(1, 1), labels=("1", "m", "e", "f")
    )


def toric_fermion_category() -> SuperMTC:
    """Toric code stacked with {1, psi}; generators (e, m, psi)."""
    labels = ("1", "psi", "m", "m.psi", "e", "e.psi", "f", "f.psi")
    return abelian_category(
        "toric code x {1,psi}", [2, 2, 2], [0, 0, Fraction(1, 2)], {(0, 1): Fraction(1, 2)},
        fermion=(0, 0, 1), labels=labels,
    )


# ---------------------------------------------------------------------------
# actions


def _z4_from_z2(act: SymmetryAction) -> SymmetryAction:
    z4 = FermionicSymmetry.cyclic(4, omega="trivial", lie_sector=act.symmetry.lie_sector)
    return pullback(act, z4, [0, 1, 0, 1])


def _perm(c: SuperMTC, mapping: dict[str, str]) -> np.ndarray:
    row = np.arange(c.n)
    for a, b in mapping.items():
        row[c.idx(a)] = c.idx(b)
    return row


def _powers(sym: FermionicSymmetry, gen: np.ndarray) -> np.ndarray:
    rows = [np.arange(len(gen))]
    for _ in range(1, sym.order):
        rows.append(gen[rows[-1]])
    return np.array(rows)


def u1k_action(c: SuperMTC, k: int, multiplier: int) -> SymmetryAction:
    sym = FermionicSymmetry.cyclic(4, omega="trivial")
    gen = (multiplier * np.arange(2 * k)) % (2 * k)
    return SymmetryAction.trivial_data(c, sym, _powers(sym, gen), name=f"Z4 a -> {multiplier}a")


def build_u1k(k: int, multiplier: int | None = None) -> tuple[SuperMTC, SymmetryAction | None]:
    """U(1)_k and, for k = 5 or an explicit ``multiplier``, its Z4 time reversal."""
    c = build_u1k_category(k)
    if multiplier is None and k == 5:
        multiplier = 3
    return c, None if multiplier is None else u1k_action(c, k, multiplier)


_SF_U = np.array([[1, 1, 1, 1], [1, 1, 1, 1], [1, -1, 1, -1], [1, -1, 1, -1]], dtype=complex)


def semion_fermion_z2(c: SuperMTC) -> SymmetryAction:
    sym = FermionicSymmetry.cyclic(2, omega="nontrivial")
    rho = _powers(sym, _perm(c, {"s": "stilde", "stilde": "s"}))
    act = SymmetryAction.trivial_data(c, sym, rho, name="Z2 T^2 = (-1)^F")
    U = act.U.copy()
    for a, b in itertools.product(range(4), repeat=2):
        U[1, a, b, c.fuse(a, b)] = _SF_U[a, b]
    eta = act.eta.copy()
    for name, z in (("psi", -1), ("s", -1j), ("stilde", 1j)):
        eta[c.idx(name), 1, 1] = z
    return act.with_(U=U, eta=eta)


def build_semion_fermion(pullback: bool = True) -> tuple[SuperMTC, SymmetryAction, bool]:
    c = semion_fermion_category()
    act = semion_fermion_z2(c)
    return c, (_z4_from_z2(act).with_(name="Z4 pullback") if pullback else act), pullback


def so33_z2(c: SuperMTC) -> SymmetryAction:
    sym = FermionicSymmetry.cyclic(2, omega="nontrivial")
    rho = _powers(sym, _perm(c, {"s": "stilde", "stilde": "s"}))
    act = SymmetryAction.trivial_data(c, sym, rho, name="Z2 T^2 = (-1)^F")
    s, st, psi = c.idx("s"), c.idx("stilde"), c.idx("psi")
    U = act.U.copy()
    plus_i = [(s, st, psi), (st, psi, s), (psi, s, st), (s, s, s), (st, st, st)]
    minus_i = [(s, psi, st), (psi, st, s), (st, s, psi)]
    for x in itertools.product((s, st), repeat=3):
        if sorted(x) in ([s, s, st], [s, st, st]):
            minus_i.append(x)
    for key in plus_i:
        U[(1, *key)] = 1j
    for key in minus_i:
        U[(1, *key)] = -1j
    eta = act.eta.copy()
    eta[psi, 1, 1] = -1
    return act.with_(U=U, eta=eta)


def build_so33(pullback: bool = True) -> tuple[SuperMTC, SymmetryAction]:
    c = so33_category()
    act = so33_z2(c)
    return c, (_z4_from_z2(act).with_(name="Z4 pullback") if pullback else act)


def trivial_action(c: SuperMTC, kind: str) -> SymmetryAction:
    if kind == "z4":
        sym = FermionicSymmetry.cyclic(4, omega="trivial")
        return SymmetryAction.trivial_data(c, sym, _powers(sym, np.arange(2)), name="Z4 trivial")
    sym = FermionicSymmetry.cyclic(2, omega="nontrivial", lie_sector=None if kind == "z2" else "SO(3)")
    act = SymmetryAction.trivial_data(c, sym, _powers(sym, np.arange(2)), name="Z2 T^2 = (-1)^F")
    eta = act.eta.copy()
    eta[1, 1, 1] = -1
    if kind == "z2":
        return act.with_(eta=eta)
    return act.with_(eta=eta, charges=(Fraction(0), Fraction(1, 2)), name="Z2 with SO(3) charges")


def toric_fermion_action(c: SuperMTC, eta_e: int = 1, eta_m: int = 1, charges: bool = True) -> SymmetryAction:
    """T acts trivially on anyons; eta_a(T,T) is the character with eta_psi = -1."""
    sym = FermionicSymmetry.cyclic(2, omega="nontrivial", lie_sector="SO(3)" if charges else None)
    act = SymmetryAction.trivial_data(c, sym, _powers(sym, np.arange(c.n)))
    eta = act.eta.copy()
    for x in range(c.n):
        e, m, f = _digits(x, (2, 2, 2))
        eta[x, 1, 1] = eta_e**e * eta_m**m * (-1) ** f
    tag = ("e" + ("T" if eta_e < 0 else "")) + ("m" + ("T" if eta_m < 0 else ""))
    q = tuple(Fraction(_digits(x, (2, 2, 2))[2], 2) for x in range(c.n)) if charges else None
    return act.with_(eta=eta, charges=q, name=tag)


def charged_action(c: SuperMTC, act: SymmetryAction, charges: Sequence, sector: str) -> SymmetryAction:
    """Copy of ``act`` tagged with a Lie sector and a charge table."""
    sym = act.symmetry
    tagged = FermionicSymmetry(sym.elements, sym.mul, sym.s, sym.omega, sector, sym.cyclic_order)
    return act.with_(symmetry=tagged, charges=tuple(Fraction(q) for q in charges))


# ---------------------------------------------------------------------------
# modular extensions


@dataclass(frozen=True)
class ExtensionFixture:
    name: str
    smtc: str
    ext: SuperMTC
    embedding: tuple[int, ...]
    action: SymmetryAction | None

    def __iter__(self):
        # unpacks as (extension, embedding, action)
        return iter((self.ext, self.embedding, self.action))


def zested_b() -> SuperMTC:
    """The c = 0 extension of U(1)_5 on Z2 x Z10 with trivial F."""
    return abelian_category(
        "B", [2, 10], [Fraction(1, 2), Fraction(1, 10)], {(0, 1): Fraction(1, 2)}, fermion=(1, 5)
    )


def u1_2_u1_m4() -> SuperMTC:
    return abelian_category("U(1)_2 x U(1)_-4", [2, 4], [Fraction(1, 4), Fraction(-1, 8)], fermion=(0, 2))


def u1_20() -> SuperMTC:
    return abelian_category("U(1)_20", [20], [Fraction(1, 40)], fermion=(10,))


def b_action(ext: SuperMTC) -> SymmetryAction:
    sym = FermionicSymmetry.cyclic(4, omega="trivial")
    gen = np.array([_index((a, 3 * b), (2, 10)) for a, b in (_digits(x, (2, 10)) for x in range(ext.n))])
    return SymmetryAction.trivial_data(ext, sym, _powers(sym, gen), name="(a,b) -> (a,3b)")


def u1_2_u1_m4_rho() -> np.ndarray:
    sym = FermionicSymmetry.cyclic(4)
    gen = np.array([_index((a + b, 2 * a + b), (2, 4)) for a, b in (_digits(x, (2, 4)) for x in range(8))])
    return _powers(sym, gen)


def toric_extension_action(ext: SuperMTC) -> SymmetryAction:
    sym = FermionicSymmetry.cyclic(4, omega="trivial")
    return SymmetryAction.trivial_data(ext, sym, _powers(sym, np.arange(ext.n)), name="trivial")


@lru_cache(maxsize=1)
def _fixtures() -> tuple[ExtensionFixture, ...]:
    """Modular extensions used by the cascade diagnostics.

    The U(1)_2 x U(1)_-4 action carries U-symbols solved from the UFUR
    equations together with agreement on the semion-fermion image.  Its eta
    is left at 1: no eta on the extension is consistent with the
    semion-fermion data, which is exactly the layer-3 obstruction.
    """
    from .extensions import solve_extension_u  # local import: extensions depends on catalog

    sf, sf_act, _ = build_semion_fermion()
    ext_sf = u1_2_u1_m4()
    emb_sf = tuple(_index(x, (2, 4)) for x in [(0, 0), (1, 0), (0, 2), (1, 2)])  # 1, s, psi, stilde
    rho = u1_2_u1_m4_rho()
    U = solve_extension_u(sf, sf_act, ext_sf, emb_sf, rho)
    sf_ext_act = SymmetryAction(sf_act.symmetry, rho, U, np.ones((ext_sf.n, 4, 4), dtype=complex),
                                name="(a,b) -> (a+b, 2a+b)")
    b = zested_b()
    toric = build_trivial_extension()
    return (
        ExtensionFixture("u1_20", "u1_5", u1_20(), tuple(2 * a for a in range(10)), None),
        ExtensionFixture("zested_b", "u1_5", b, tuple(_index((a, a), (2, 10)) for a in range(10)), b_action(b)),
        ExtensionFixture("u1_2xu1_m4", "semion_fermion", ext_sf, emb_sf, sf_ext_act),
        ExtensionFixture("su2_6", "so3_3", su2k(6, fermion=6), (0, 2, 4, 6), None),
        ExtensionFixture("toric_code", "trivial", toric, (0, 3), toric_extension_action(toric)),
    )


def build_extension_fixtures() -> list[ExtensionFixture]:
    return list(_fixtures())


def build_trivial(kind: str = "z4") -> tuple[SuperMTC, SymmetryAction]:
    c = build_trivial_category()
    return c, trivial_action(c, kind)


def build_toric_fermion(eta_e: int = 1, eta_m: int = 1) -> tuple[SuperMTC, SymmetryAction]:
    c = toric_fermion_category()
    return c, toric_fermion_action(c, eta_e, eta_m)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    build: Callable[[], SuperMTC]
    actions: dict[str, Callable[[SuperMTC], SymmetryAction]]
    default_action: str | None = None
    super_modular: bool = True


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry(
            "trivial", "{1, psi}", build_trivial_category,
            {
                "z4": lambda c: trivial_action(c, "z4"),
                "z2": lambda c: trivial_action(c, "z2"),
                "ci": lambda c: trivial_action(c, "ci"),
            },
            "z4",
        ),
        CatalogEntry(
            "u1_5", "U(1)_5", lambda: build_u1k_category(5),
            {
                "z4": lambda c: u1k_action(c, 5, 3),
            },
            "z4",
        ),
        CatalogEntry(
            "semion_fermion", "U(1)_2 x U(1)_-1", semion_fermion_category,
            {
                "z4": lambda c: _z4_from_z2(semion_fermion_z2(c)).with_(name="Z4 pullback"),
                "z2": semion_fermion_z2,
            },
            "z4",
        ),
        CatalogEntry(
            "so3_3", "SO(3)_3 inside SU(2)_6", so33_category,
            {"z4": lambda c: _z4_from_z2(so33_z2(c)).with_(name="Z4 pullback"), "z2": so33_z2},
            "z4",
        ),
        CatalogEntry(
            "toric_fermion", "toric code x {1, psi}", toric_fermion_category,
            {
                "ci": toric_fermion_action,
                "ci_eT": lambda c: toric_fermion_action(c, -1, 1),
                "ci_eTmT": lambda c: toric_fermion_action(c, -1, -1),
            },
            "ci",
        ),
        CatalogEntry("u1_20", "U(1)_20", u1_20, {}, None, False),
        CatalogEntry("zested_b", "Z2 x Z10 extension of U(1)_5", zested_b, {"z4": b_action}, "z4", False),
        # its fixture action carries rho and U only: no eta completes it (layer 3)
        CatalogEntry("u1_2xu1_m4", "U(1)_2 x U(1)_-4", u1_2_u1_m4, {}, None, False),
        CatalogEntry("su2_6", "SU(2)_6", lambda: su2k(6, fermion=6), {}, None, False),
        CatalogEntry("toric_code", "toric code", build_trivial_extension, {"z4": toric_extension_action}, "z4", False),
    ]
}


def names() -> list[str]:
    return list(CATALOG)


def get(ref: str) -> tuple[SuperMTC, SymmetryAction | None]:
    """Resolve ``name`` or ``name/action``; a bare name uses the default action."""
    name, _, act_name = ref.partition("/")
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}")
    entry = CATALOG[name]
    c = entry.build()
    act_name = act_name or entry.default_action
    if act_name is None:
        return c, None
    if act_name not in entry.actions:
        raise KeyError(f"{name} has no action {act_name!r}; known: {', '.join(entry.actions) or 'none'}")
    return c, entry.actions[act_name](c)
