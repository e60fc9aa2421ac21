"""Zesting of abelian modular extensions and the anomaly-cascade layer tests.

Only layers 1 and 3 are implemented.  Layer 1 asks whether some modular
extension can carry time reversal (central charge 0 mod 8).  Layer 3 asks
whether the eta-symbols of the fermionic theory extend to the bosonic
extension.  It is decided twice: by an explicit search over the torsor of
eta modifications, and by a joint linear solve of every equation involved
(all of them are linear in the phases once written in turns).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._phases import LinearSystem, to_turns
from .algebra import central_charge, monodromy_matrix, muger_center, twists
from .axioms import check_all
from .core import EPS, Report, SuperMTC
from .symmetry import SymmetryAction, eta_cocycle_defect

__all__ = [
    "Grading",
    "ZestParameter",
    "ZestResult",
    "ZestError",
    "grading",
    "zest",
    "zest_orbit",
    "find_isomorphism",
    "embed_check",
    "Layer1Result",
    "cascade_layer1",
    "solve_extension_u",
    "Layer3Result",
    "cascade_layer3",
    "cascade_layer3_linear",
]

SEARCH_LIMIT = 1 << 16


class ZestError(ValueError):
    pass


# ---------------------------------------------------------------------------
# grading and zesting


@dataclass(frozen=True)
class Grading:
    """``odd[a]`` is True when ``a`` braids nontrivially with psi."""

    odd: tuple[bool, ...]

    def problems(self, c: SuperMTC) -> list[str]:
        out = []
        for a, b, k in zip(*np.nonzero(c.N)):
            if self.odd[a] ^ self.odd[b] != self.odd[k]:
                out.append(f"grading not additive on {c.label(a)} x {c.label(b)} -> {c.label(k)}")
        return out


def grading(c: SuperMTC, tol: float = EPS) -> Grading:
    if c.fermion is None:
        raise ZestError(f"{c.name}: no psi declared")
    m = monodromy_matrix(c)[:, c.fermion]
    odd = []
    for a, z in enumerate(m):
        if abs(z - 1) < tol:
            odd.append(False)
        elif abs(z + 1) < tol:
            odd.append(True)
        else:
            raise ZestError(f"monodromy of {c.label(a)} with psi is {z:.6g}, not +-1")
    return Grading(tuple(odd))


@dataclass(frozen=True)
class ZestParameter:
    b: complex

    def __post_init__(self) -> None:
        if abs(abs(self.b) - 1) > 1e-12:
            raise ValueError("zest parameter must be a phase")

    @classmethod
    def root(cls, j: int, order: int = 16) -> "ZestParameter":
        return cls(np.exp(2j * np.pi * j / order))


@dataclass(frozen=True)
class ZestResult:
    """Zested theory rebuilt on its recognized fusion group.

    ``relabel[x]`` is the index in ``category`` of the old anyon ``x``;
    ``theta`` and ``R`` are the zested twists and braidings computed directly
    from the zesting formulas, in old labels.
    """

    category: SuperMTC
    orders: tuple[int, ...]
    relabel: tuple[int, ...]
    mul: np.ndarray
    R: np.ndarray
    theta: np.ndarray
    b: complex


def _invariant_factors(mul: np.ndarray) -> tuple[int, ...]:
    """Invariant factors n_1 | n_2 | ... of a finite abelian group table."""
    n = len(mul)
    orders = []
    for x in range(n):
        y, k = x, 1
        while y != 0:
            y, k = int(mul[y, x]), k + 1
        orders.append(k if x else 1)
    stats = sorted(orders)
    for cand in _factor_chains(n):
        if sorted(_orders_of(cand)) == stats:
            return cand
    raise ZestError("fusion table is not an abelian group")


def _factor_chains(n: int, least: int = 2) -> list[tuple[int, ...]]:
    if n == 1:
        return [()]
    out = []
    for d in range(least, n + 1):
        if n % d == 0:
            for rest in _factor_chains(n // d, d):
                if not rest or rest[0] % d == 0:
                    out.append((d, *rest))
    return out


def _orders_of(factors: Sequence[int]) -> list[int]:
    out = []
    for digits in itertools.product(*(range(f) for f in factors)):
        k = 1
        for x, f in zip(digits, factors):
            k = np.lcm(k, f // np.gcd(x, f))
        out.append(int(k))
    return out


def _generators(mul: np.ndarray, factors: Sequence[int]) -> tuple[int, ...]:
    """First tuple (in index order) of elements generating Z_{n_1} x ... freely."""
    n = len(mul)

    def power(x: int, k: int) -> int:
        y = 0
        for _ in range(k):
            y = int(mul[y, x])
        return y

    order = {x: next(k for k in range(1, n + 1) if power(x, k) == 0) for x in range(n)}
    pools = [[x for x in range(n) if order[x] == f] for f in factors]
    for gens in itertools.product(*pools):
        seen = set()
        for digits in itertools.product(*(range(f) for f in factors)):
            y = 0
            for g, k in zip(gens, digits):
                y = int(mul[y, power(g, k)])
            seen.add(y)
        if len(seen) == n:
            return tuple(gens)
    raise ZestError("no generating tuple found")


def _coords(mul: np.ndarray, gens: Sequence[int], factors: Sequence[int]) -> dict[int, tuple[int, ...]]:
    out = {}
    for digits in itertools.product(*(range(f) for f in factors)):
        y = 0
        for g, k in zip(gens, digits):
            for _ in range(k):
                y = int(mul[y, g])
        out[y] = digits
    return out


def zest(ext: SuperMTC, param: ZestParameter, tol: float = EPS) -> ZestResult:
    """Zest an abelian modular category along its declared psi.

    Odd-odd fusion gains a psi and the odd-odd braiding becomes
    ``b R^{a,psi} R^{psi a, b} / F^{b, psi, a}``.  The result is rebuilt as a
    canonical abelian category from its twists and monodromies, then checked
    against the directly zested data.
    """
    from .catalog import _index, abelian_category  # catalog imports this module lazily

    if not ext.rules.abelian:
        raise NotImplementedError("zesting is implemented for abelian categories only")
    if muger_center(ext, tol) != [0]:
        raise ZestError(f"{ext.name} is not modular")
    psi = ext.fermion
    odd = grading(ext, tol).odd
    mul, F, R = ext.group_tables
    n = ext.n
    new_mul = mul.copy()
    Rz = R.astype(complex).copy()
    for a, c in itertools.product(range(n), repeat=2):
        if odd[a] and odd[c]:
            new_mul[a, c] = mul[mul[a, psi], c]
            Rz[a, c] = param.b * R[a, psi] * R[mul[psi, a], c] / F[c, psi, a]
    theta = np.array([Rz[a, a] for a in range(n)])
    factors = _invariant_factors(new_mul)
    gens = _generators(new_mul, factors)
    coords = _coords(new_mul, gens, factors)
    spins = [to_turns(theta[g]) for g in gens]
    mixed = {
        (i, j): to_turns(Rz[gens[i], gens[j]] * Rz[gens[j], gens[i]])
        for i in range(len(gens))
        for j in range(i + 1, len(gens))
    }
    fermion = coords[psi] if psi is not None else None
    rebuilt = abelian_category(f"{ext.name} zested", factors, spins, mixed, fermion=fermion)
    relabel = tuple(_index(coords[x], factors) for x in range(n))
    # the rebuild is only meaningful if the zested twists form a quadratic
    # form whose bilinear form is the zested double braid (the monodromy
    # matrix is its conjugate, being read off from S)
    th2 = twists(rebuilt)
    M2 = monodromy_matrix(rebuilt)
    r = np.array(relabel)
    err = max(np.abs(th2[r] - theta).max(), np.abs(M2[np.ix_(r, r)] - np.conj(Rz * Rz.T)).max())
    if err > 1e-7:
        raise ZestError(f"b = {param.b:.6g}: zested braiding is inconsistent (error {err:.3g})")
    bad = [rep for rep in check_all(rebuilt, tol) if not rep.ok]
    if bad:
        raise ZestError(f"b = {param.b:.6g}: {bad[0].summary()}")
    return ZestResult(rebuilt, tuple(factors), relabel, new_mul, Rz, theta, param.b)


def zest_orbit(ext: SuperMTC, order: int = 16, tol: float = EPS) -> list[ZestResult]:
    """Every consistent zest of ``ext`` with b an ``order``-th root of unity."""
    out = []
    for j in range(order):
        try:
            out.append(zest(ext, ZestParameter.root(j, order), tol))
        except ZestError:
            continue
    return out


def find_isomorphism(
    src: SuperMTC, dst: SuperMTC, fixed: dict[int, int] | None = None, tol: float = EPS
) -> tuple[int, ...] | None:
    """Braided isomorphism between abelian categories matching R entry-wise.

    Searches over images of a generating set of ``src``; ``fixed`` pins some
    labels.  Returns the label map or None.
    """
    if src.n != dst.n or not (src.rules.abelian and dst.rules.abelian):
        return None
    ms, _, Rs = src.group_tables
    md, _, Rd = dst.group_tables
    factors = _invariant_factors(ms)
    if _invariant_factors(md) != factors:
        return None
    gens = _generators(ms, factors)
    coords = _coords(ms, gens, factors)
    fixed = fixed or {}
    n = src.n

    def power(table, x, k):
        y = 0
        for _ in range(k):
            y = int(table[y, x])
        return y

    pools = [[y for y in range(n) if power(md, y, f) == 0] for f in factors]
    for images in itertools.product(*pools):
        phi = [0] * n
        for x, digits in coords.items():
            y = 0
            for g, k in zip(images, digits):
                y = int(md[y, power(md, g, k)])
            phi[x] = y
        if len(set(phi)) != n or any(phi[a] != b for a, b in fixed.items()):
            continue
        p = np.array(phi)
        if not np.array_equal(md[p[:, None], p[None, :]], p[ms]):
            continue
        if np.abs(Rd[np.ix_(p, p)] - Rs).max() < tol:
            return tuple(phi)
    return None


# ---------------------------------------------------------------------------
# embeddings


def embed_check(smtc: SuperMTC, ext: SuperMTC, embedding: Sequence[int], tol: float = EPS) -> Report:
    """Fusion, twists, F and R of ``smtc`` agree with their images in ``ext``."""
    rep = Report("embedding")
    e = np.asarray(embedding, dtype=np.int64)
    if e.shape != (smtc.n,) or len(set(e.tolist())) != smtc.n:
        rep.add("embedding is not injective on the anyons")
        return rep
    if (e < 0).any() or (e >= ext.n).any():
        rep.add("embedding leaves the extension")
        return rep
    rep.checked += 1
    if not np.array_equal(ext.N[np.ix_(e, e, e)], smtc.N):
        rep.add("fusion multiplicities differ on the image")
    outside = np.setdiff1d(np.arange(ext.n), e)
    if ext.N[np.ix_(e, e, outside)].any():
        rep.add("image is not closed under fusion")
    th_s, th_e = twists(smtc), twists(ext)
    for a in range(smtc.n):
        rep.checked += 1
        if abs(th_s[a] - th_e[e[a]]) > tol:
            rep.add(f"theta_{smtc.label(a)} = {th_s[a]:.6g} but image has {th_e[e[a]]:.6g}")
    if smtc.fermion is not None and ext.fermion is not None and e[smtc.fermion] != ext.fermion:
        rep.add("psi does not map to the declared psi of the extension")
    for key, m in smtc.R.items():
        rep.checked += 1
        img = ext.R.get(tuple(int(e[x]) for x in key))
        if img is None or img.shape != m.shape or np.abs(img - m).max() > tol:
            rep.add(f"R[{','.join(smtc.label(x) for x in key)}] differs from its image")
    for key, m in smtc.F.items():
        rep.checked += 1
        img = ext.F.get(tuple(int(e[x]) for x in key))
        if img is None or img.shape != m.shape or np.abs(img - m).max() > tol:
            rep.add(f"F[{','.join(smtc.label(x) for x in key)}] differs from its image")
    return rep


# ---------------------------------------------------------------------------
# layer 1


@dataclass
class Layer1Result:
    obstructed: bool
    charges: list[tuple[str, Fraction]]
    witness: str | None = None


def _orbit_charges(ext: SuperMTC, tol: float) -> list[tuple[str, Fraction]]:
    if ext.rules.abelian and ext.fermion is not None:
        return [(f"{ext.name} zested b={r.b:.4g}", central_charge(r.category)) for r in zest_orbit(ext, tol=tol)]
    # non-abelian: the sixteen minimal extensions have c shifted by k/2
    c0 = central_charge(ext)
    return [(f"{ext.name} (+{k}/2)", (c0 + Fraction(k, 2)) % 8) for k in range(16)]


def cascade_layer1(
    smtc: SuperMTC, candidates: Sequence[SuperMTC], *, orbit: bool = True, tol: float = EPS
) -> Layer1Result:
    """Unobstructed iff some candidate extension has c = 0 mod 8."""
    charges: list[tuple[str, Fraction]] = []
    for ext in candidates:
        charges.append((ext.name, central_charge(ext)))
        if orbit:
            charges.extend(_orbit_charges(ext, tol))
    for name, c in charges:
        if c % 8 == 0:
            return Layer1Result(False, charges, name)
    return Layer1Result(True, charges)


# ---------------------------------------------------------------------------
# layer 3


def _frac_table(table: np.ndarray) -> dict:
    return {idx: to_turns(z) for idx, z in np.ndenumerate(table)}


def _ufur_rows(sys: LinearSystem, ext: SuperMTC, rho: np.ndarray, s: np.ndarray, g: int) -> None:
    mul, F, R = ext.group_tables
    n = ext.n
    Ft = _frac_table(F)
    Rt = _frac_table(R)
    p = rho[g]
    sign = -1 if s[g] else 1
    for a, b, c in itertools.product(range(n), repeat=3):
        ga, gb, gc = p[a], p[b], p[c]
        ge, gf = mul[ga, gb], mul[gb, gc]
        terms = [(("U", g, ga, gb), 1), (("U", g, ge, gc), 1), (("U", g, gb, gc), -1), (("U", g, ga, gf), -1)]
        sys.add(terms, sign * Ft[(a, b, c)] - Ft[(ga, gb, gc)])
    for a, b in itertools.product(range(n), repeat=2):
        ga, gb = p[a], p[b]
        sys.add([(("U", g, gb, ga), 1), (("U", g, ga, gb), -1)], sign * Rt[(a, b)] - Rt[(ga, gb)])


def _u_fixing_rows(sys: LinearSystem, n: int, g: int) -> None:
    for x in range(n):
        sys.add([(("U", g, 0, x), 1)], 0)
        sys.add([(("U", g, x, 0), 1)], 0)


def _u_restriction_rows(sys, smtc, act, embedding, g) -> None:
    e = embedding
    for a, b in itertools.product(range(smtc.n), repeat=2):
        c = smtc.fuse(a, b)
        sys.add([(("U", g, e[a], e[b]), 1)], to_turns(act.U[g, a, b, c]))


def solve_extension_u(
    smtc: SuperMTC, act: SymmetryAction, ext: SuperMTC, embedding: Sequence[int], rho: np.ndarray
) -> np.ndarray:
    """U-symbols on an abelian extension solving U-F and U-R and restricting to ``act.U``."""
    if not ext.rules.abelian:
        raise NotImplementedError("U-symbols are solved for abelian extensions only")
    k, n = act.symmetry.order, ext.n
    mul = ext.group_tables[0]
    U = np.zeros((k, n, n, n), dtype=complex)
    for g in range(k):
        sys = LinearSystem()
        _ufur_rows(sys, ext, rho, act.symmetry.s, g)
        _u_fixing_rows(sys, n, g)
        _u_restriction_rows(sys, smtc, act, embedding, g)
        sol = sys.solve()
        if sol is None:
            raise ValueError(f"no U-symbols on {ext.name} for g={act.symmetry.elements[g]}")
        for (_, _, x, y), q in sol.items():
            U[g, x, y, mul[x, y]] = np.exp(2j * np.pi * float(q))
        for x, y in itertools.product(range(n), repeat=2):
            if ("U", g, x, y) not in sol:
                U[g, x, y, mul[x, y]] = 1
    return U


@dataclass
class Layer3Result:
    obstructed: bool
    eta: np.ndarray | None
    searched: int
    reason: str = ""
    best_defect: float = field(default=float("nan"))


def _check_layer3_inputs(smtc, act, ext, ext_act, embedding) -> np.ndarray:
    if not ext.rules.abelian:
        raise NotImplementedError("layer 3 is implemented for abelian extensions only")
    if ext_act.symmetry.order != act.symmetry.order or not np.array_equal(ext_act.symmetry.mul, act.symmetry.mul):
        raise ValueError("extension action uses a different group")
    e = np.asarray(embedding, dtype=np.int64)
    for g in range(act.symmetry.order):
        if not np.array_equal(ext_act.rho[g][e], e[act.rho[g]]):
            raise ValueError("extension permutation does not restrict to the action on the super-MTC")
    return e


def _eta0(smtc, act, ext, ext_act, e, g, h) -> np.ndarray | None:
    """A solution of the U-eta equation on ``ext`` for (g,h) restricting to ``act.eta``."""
    sym = ext_act.symmetry
    mul = ext.group_tables[0]
    n = ext.n
    U = ext_act.U
    gi = ext_act.rho_inv[g]
    sys = LinearSystem()
    for x, y in itertools.product(range(n), repeat=2):
        z = mul[x, y]
        back = U[h, gi[x], gi[y], gi[z]]
        rhs = U[sym.mul[g, h], x, y, z] / (U[g, x, y, z] * (np.conj(back) if sym.s[g] else back))
        sys.add([(x, 1), (y, 1), (z, -1)], to_turns(rhs))
    for a in range(smtc.n):
        sys.add([(int(e[a]), 1)], to_turns(act.eta[a, g, h]))
    sol = sys.solve()
    if sol is None:
        return None
    return np.array([np.exp(2j * np.pi * float(sol.get(x, 0))) for x in range(n)])


def cascade_layer3(
    smtc: SuperMTC,
    act: SymmetryAction,
    ext: SuperMTC,
    ext_act: SymmetryAction,
    embedding: Sequence[int],
    tol: float = EPS,
) -> Layer3Result:
    """Search the eta torsor on ``ext`` for a cocycle restricting to ``act.eta``.

    Solutions of the U-eta equation with the right restriction differ by
    eta_a(g,h) -> eta_a(g,h) M_{a,t(g,h)} with t(g,h) in {1, psi}, so for
    the gauge-fixed pairs (g,h != 1) the search is over 2^((|G|-1)^2)
    assignments.
    """
    e = _check_layer3_inputs(smtc, act, ext, ext_act, embedding)
    sym = ext_act.symmetry
    k, n = sym.order, ext.n
    if ext.fermion is None:
        raise ValueError("extension needs a declared psi")
    eta0 = np.ones((n, k, k), dtype=complex)
    for g, h in itertools.product(range(1, k), repeat=2):
        col = _eta0(smtc, act, ext, ext_act, e, g, h)
        if col is None:
            return Layer3Result(True, None, 0, f"U-eta has no solution at ({sym.elements[g]},{sym.elements[h]})")
        eta0[:, g, h] = col
    pairs = [(g, h) for g in range(1, k) for h in range(1, k)]
    if 2 ** len(pairs) > SEARCH_LIMIT:
        raise ValueError(f"torsor search over 2^{len(pairs)} assignments exceeds the limit")
    chi = monodromy_matrix(ext)[:, ext.fermion].real.round()  # +-1
    # all assignments at once: shape (2^p, n, k, k)
    bits = np.array(list(itertools.product((0, 1), repeat=len(pairs))), dtype=np.int64)
    flips = np.ones((len(bits), n, k, k))
    for j, (g, h) in enumerate(pairs):
        flips[:, :, g, h] = np.where(bits[:, j, None] == 1, chi[None, :], 1.0)
    best = np.inf
    for i in range(len(bits)):
        eta = eta0 * flips[i]
        d = float(eta_cocycle_defect(ext_act, eta).max())
        best = min(best, d)
        if d < tol:
            return Layer3Result(False, eta, i + 1, "", d)
    return Layer3Result(True, None, len(bits), "no eta in the torsor satisfies the eta cocycle condition", best)


def cascade_layer3_linear(
    smtc: SuperMTC,
    act: SymmetryAction,
    ext: SuperMTC,
    ext_act: SymmetryAction,
    embedding: Sequence[int],
    *,
    solve_u: bool | None = None,
) -> bool:
    """Independent route: True iff the joint linear system for (U, eta) is inconsistent.

    With ``solve_u`` the U-symbols on ``ext`` are unknowns alongside eta;
    otherwise ``ext_act.U`` is taken as given.  By default U is solved when
    the extension is small enough for a dense eliminator.
    """
    e = _check_layer3_inputs(smtc, act, ext, ext_act, embedding)
    sym = ext_act.symmetry
    k, n = sym.order, ext.n
    mul = ext.group_tables[0]
    if solve_u is None:
        solve_u = k * n * n <= 512
    sys = LinearSystem()

    def u_term(g, x, y, coef):
        if solve_u:
            return [(("U", g, x, y), coef)] if g else []
        return []

    def u_const(g, x, y) -> Fraction:
        return Fraction(0) if solve_u else to_turns(ext_act.U[g, x, y, mul[x, y]])

    def eta_term(a, g, h, coef):
        if g == 0 or h == 0:
            return []
        return [(("eta", a, g, h), coef)]

    if solve_u:
        for g in range(1, k):
            _ufur_rows(sys, ext, ext_act.rho, sym.s, g)
            _u_fixing_rows(sys, n, g)
            _u_restriction_rows(sys, smtc, act, e, g)
    # U-eta, every admissible triple
    for g, h in itertools.product(range(k), repeat=2):
        gi = ext_act.rho_inv[g]
        gh = sym.mul[g, h]
        sign = -1 if sym.s[g] else 1
        for x, y in itertools.product(range(n), repeat=2):
            z = mul[x, y]
            terms = eta_term(x, g, h, 1) + eta_term(y, g, h, 1) + eta_term(z, g, h, -1)
            terms += u_term(gh, x, y, -1) + u_term(g, x, y, 1) + u_term(h, gi[x], gi[y], sign)
            rhs = u_const(gh, x, y) - u_const(g, x, y) - sign * u_const(h, gi[x], gi[y])
            if terms:
                sys.add(terms, rhs)
            elif rhs % 1:
                return True
    # restriction of eta
    for a in range(smtc.n):
        for g, h in itertools.product(range(1, k), repeat=2):
            sys.add(eta_term(int(e[a]), g, h, 1), to_turns(act.eta[a, g, h]))
    # eta cocycle
    for a in range(n):
        for g, h, l in itertools.product(range(k), repeat=3):
            back = int(ext_act.rho_inv[g][a])
            sign = -1 if sym.s[g] else 1
            terms = (
                eta_term(a, g, h, 1)
                + eta_term(a, sym.mul[g, h], l, 1)
                + eta_term(a, g, sym.mul[h, l], -1)
                + eta_term(back, h, l, -sign)
            )
            if terms:
                sys.add(terms, 0)
    return sys.solve() is None
