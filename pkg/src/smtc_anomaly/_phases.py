"""Linear equations for phases: solve A x = v (mod 1) with integer A and rational v.

Each prime dividing a denominator of v is handled on its own over Z/p^K,
with K as large as int64 arithmetic allows.  Elimination uses full pivoting
on p-adic valuation, so the diagonal form it reaches is the local Smith form.
The pieces are glued with partial fractions.

Caveat: an elementary divisor whose valuation reaches K is invisible mod
p^K and looks like a zero row.  For the small coefficient matrices built
here (entries in {-2..2}) such divisors do not occur; every solution
returned is verified exactly, so the caveat can only produce a false
"inconsistent", never a wrong solution.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

__all__ = ["LinearSystem", "PrecisionError", "solve_mod1", "to_turns"]

LIMIT = 2**31


class PrecisionError(ArithmeticError):
    pass


def to_turns(z: complex, max_den: int = 4096, tol: float = 1e-9) -> Fraction:
    """Phase of a root of unity as a fraction of a full turn in [0, 1)."""
    if abs(abs(z) - 1) > tol:
        raise ValueError(f"{z} is not a phase")
    x = (cmath.phase(z) / (2 * math.pi)) % 1
    q = Fraction(x).limit_denominator(max_den)
    if abs(float(q) - x) > tol and abs(abs(float(q) - x) - 1) > tol:
        raise ValueError(f"{z} is not a root of unity of order <= {max_den}")
    return q % 1


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _split(v: Sequence[Fraction]) -> dict[int, tuple[int, np.ndarray]]:
    """p-parts of v: {p: (a, numerators over p^a)} with sum_p v_p = v mod 1."""
    parts: dict[int, tuple[int, list[int]]] = {}
    exps: dict[int, int] = {}
    for q in v:
        for p, a in _factor(q.denominator).items():
            exps[p] = max(exps.get(p, 0), a)
    for p, a in exps.items():
        nums = []
        for q in v:
            d = q.denominator
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            # q = n / (d p^e); its p-part is n * d^{-1} / p^e (mod 1)
            nums.append((q.numerator * pow(d, -1, p**e) % p**e) * p ** (a - e) if e else 0)
        parts[p] = (a, nums)
    return {p: (a, np.array(n, dtype=np.int64)) for p, (a, n) in parts.items()}


def _valuation(x: np.ndarray, p: int, K: int) -> np.ndarray:
    val = np.where(x == 0, K, 0)
    y = x.copy()
    live = (y != 0) & (y % p == 0)
    while live.any():
        val[live] += 1
        y[live] //= p
        live = (y != 0) & (y % p == 0)
    return val


def _solve_prime(A: np.ndarray, w: np.ndarray, p: int, a: int) -> tuple[np.ndarray, int] | None:
    K = 0
    while p ** (K + 1) < LIMIT:
        K += 1
    M = p**K
    m, n = A.shape
    W = A % M
    rhs = (w.astype(np.int64) * p ** (K - a)) % M
    Q = np.eye(n, dtype=np.int64)
    diag: list[tuple[int, int]] = []
    r = 0
    for t in range(min(m, n)):
        sub = W[t:, t:]
        nz = sub != 0
        if not nz.any():
            break
        units = nz & (sub % p != 0)
        if units.any():
            i, j = np.argwhere(units)[0]
            e = 0
        else:
            val = _valuation(sub, p, K)
            i, j = np.unravel_index(np.argmin(val), val.shape)
            e = int(val[i, j])
        i += t
        j += t
        W[[t, i]] = W[[i, t]]
        rhs[[t, i]] = rhs[[i, t]]
        W[:, [t, j]] = W[:, [j, t]]
        Q[:, [t, j]] = Q[:, [j, t]]
        pe = p**e
        u = int(W[t, t]) // pe
        uinv = pow(u, -1, M)
        below = W[t + 1 :, t]
        hit = np.nonzero(below)[0] + t + 1
        if hit.size:
            f = ((W[hit, t] // pe) % M * uinv) % M
            W[hit] = (W[hit] - (f[:, None] * W[t][None, :]) % M) % M
            rhs[hit] = (rhs[hit] - (f * rhs[t]) % M) % M
        right = np.nonzero(W[t, t + 1 :])[0] + t + 1
        if right.size:
            g = ((W[t, right] // pe) % M * uinv) % M
            Q[:, right] = (Q[:, right] - (Q[:, [t]] * g[None, :]) % M) % M
            W[t, right] = 0
        diag.append((e, uinv))
        r = t + 1
    e_max = max((e for e, _ in diag), default=0)
    if K < a + 2 * e_max:
        raise PrecisionError(f"p={p}: need K >= {a + 2 * e_max}, have {K}")
    if (rhs[r:] % M).any():
        return None
    z = np.zeros(n, dtype=np.int64)
    for t, (e, uinv) in enumerate(diag):
        pe = p**e
        if rhs[t] % pe:
            return None
        z[t] = ((int(rhs[t]) // pe) * uinv) % M
    x = np.zeros(n, dtype=np.int64)
    # y = Q z, computed column by column to keep products below 2^62
    for t in np.nonzero(z)[0]:
        x = (x + (Q[:, t] * int(z[t])) % M) % M
    return x, K


def solve_mod1(A: np.ndarray, v: Sequence[Fraction]) -> list[Fraction] | None:
    """One rational solution of A x = v (mod 1), or None if none exists."""
    A = np.asarray(A, dtype=np.int64)
    v = [Fraction(q) % 1 for q in v]
    m, n = A.shape
    if m == 0:
        return [Fraction(0)] * n
    if np.abs(A).max(initial=0) > 64:
        raise PrecisionError("coefficients too large for the int64 eliminator")
    # drop duplicate rows; conflicting duplicates are inconsistent at once
    seen: dict[bytes, Fraction] = {}
    keep = []
    for i in range(m):
        key = A[i].tobytes()
        if key in seen:
            if seen[key] != v[i]:
                return None
            continue
        seen[key] = v[i]
        keep.append(i)
    A = A[keep]
    v = [v[i] for i in keep]
    x = [Fraction(0)] * n
    for p, (a, w) in _split(v).items():
        res = _solve_prime(A, w, p, a)
        if res is None:
            return None
        xp, K = res
        M = p**K
        check = (A @ xp - w * p ** (K - a)) % M
        if check.any():
            raise PrecisionError(f"p={p}: elimination produced a non-solution")
        for j in np.nonzero(xp)[0]:
            x[j] += Fraction(int(xp[j]), M)
    return [q % 1 for q in x]


@dataclass
class LinearSystem:
    """Rows sum_k c_k x_k = rhs (mod 1) over named unknowns."""

    index: dict[Hashable, int] = field(default_factory=dict)
    rows: list[dict[int, int]] = field(default_factory=list)
    rhs: list[Fraction] = field(default_factory=list)

    def var(self, key: Hashable) -> int:
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]

    def add(self, terms: Iterable[tuple[Hashable, int]], rhs) -> None:
        row: dict[int, int] = {}
        for key, c in terms:
            j = self.var(key)
            row[j] = row.get(j, 0) + int(c)
        self.rows.append({j: c for j, c in row.items() if c})
        self.rhs.append(Fraction(rhs) % 1)

    def matrix(self) -> np.ndarray:
        A = np.zeros((len(self.rows), len(self.index)), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for j, c in row.items():
                A[i, j] = c
        return A

    def solve(self) -> dict[Hashable, Fraction] | None:
        if not self.index:
            return {} if all(q == 0 for q in self.rhs) else None
        x = solve_mod1(self.matrix(), self.rhs)
        if x is None:
            return None
        return {key: x[j] for key, j in self.index.items()}
