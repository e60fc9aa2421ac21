"""Skeletal data for (super) modular tensor categories.

A category is stored as dense fusion multiplicities plus sparse F and R
matrices.  F matrices use rows ``(e, alpha, beta)`` and columns
``(f, mu, nu)`` with ``alpha in V^{ab}_e``, ``beta in V^{ec}_d``,
``mu in V^{bc}_f`` and ``nu in V^{af}_d``.  R matrices ``R^{ab}_c`` are
``N^{ab}_c`` square.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Any, Callable, Iterator, Union

import numpy as np

__all__ = [
    "EPS",
    "CategoryError",
    "ParseError",
    "SchemaError",
    "ShapeError",
    "Report",
    "FusionRules",
    "SuperMTC",
    "load_category",
    "category_to_dict",
    "dump_category",
    "validate_structure",
    "dual_of",
    "fusion_outcomes",
]

#: default absolute tolerance for comparing complex symbols
EPS = 1e-9

VIOLATION_CAP = 100


class CategoryError(ValueError):
    """Base class for malformed category input."""


class ParseError(CategoryError):
    pass


class SchemaError(CategoryError):
    pass


class ShapeError(CategoryError):
    pass


@dataclass
class Report:
    """Outcome of a consistency check; empty ``violations`` means pass."""

    title: str
    violations: list[str] = field(default_factory=list)
    checked: int = 0
    dropped: int = 0

    def add(self, message: str) -> None:
        if len(self.violations) < VIOLATION_CAP:
            self.violations.append(message)
        else:
            self.dropped += 1

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def merge(self, other: "Report") -> "Report":
        for v in other.violations:
            self.add(f"{other.title}: {v}")
        self.dropped += other.dropped
        self.checked += other.checked
        return self

    def summary(self) -> str:
        if self.ok:
            return f"{self.title}: ok ({self.checked} checked)"
        extra = f" (+{self.dropped} more)" if self.dropped else ""
        return f"{self.title}: {len(self.violations)} violation(s){extra}"


@dataclass(frozen=True, eq=False)
class FusionRules:
    labels: tuple[str, ...]
    N: np.ndarray

    def __post_init__(self) -> None:
        N = np.array(self.N, dtype=np.int64)
        n = len(self.labels)
        if N.shape != (n, n, n):
            raise ShapeError(f"fusion table has shape {N.shape}, expected {(n, n, n)}")
        if (N < 0).any():
            raise ShapeError("negative fusion multiplicity")
        N.setflags(write=False)
        object.__setattr__(self, "N", N)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.labels)}

    @cached_property
    def products(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``products[a][b]`` lists the channels c with N^{ab}_c > 0."""
        return tuple(
            tuple(tuple(int(c) for c in np.nonzero(self.N[a, b])[0]) for b in range(self.n))
            for a in range(self.n)
        )

    @cached_property
    def dual(self) -> tuple[int, ...]:
        out = []
        for a in range(self.n):
            partners = [b for b in range(self.n) if self.N[a, b, 0] > 0]
            if len(partners) != 1 or self.N[a, partners[0], 0] != 1:
                raise ShapeError(f"anyon {self.labels[a]} has no unique dual")
            out.append(partners[0])
        return tuple(out)

    @cached_property
    def multiplicity_free(self) -> bool:
        return bool(self.N.max() <= 1)

    @cached_property
    def abelian(self) -> bool:
        return all(len(self.products[a][b]) == 1 for a in range(self.n) for b in range(self.n)) and self.multiplicity_free

    def fuse(self, a: int, b: int) -> int:
        """Unique channel of a x b; only meaningful when the result is simple."""
        chans = self.products[a][b]
        if len(chans) != 1:
            raise ValueError(f"{self.labels[a]} x {self.labels[b]} is not a single anyon")
        return chans[0]

    def structural_problems(self) -> list[str]:
        N = self.N
        n = self.n
        out: list[str] = []
        eye = np.eye(n, dtype=np.int64)
        if not np.array_equal(N[0], eye):
            out.append("unit axiom N[1][a][b] = delta_ab fails")
        if not np.array_equal(N[:, 0, :], eye):
            out.append("unit axiom N[a][1][b] = delta_ab fails")
        lhs = np.einsum("abe,ecd->abcd", N, N)
        rhs = np.einsum("afd,bcf->abcd", N, N)
        for a, b, c, d in zip(*np.nonzero(lhs != rhs)):
            out.append(
                "associativity fails at "
                f"({self.labels[a]},{self.labels[b]},{self.labels[c]},{self.labels[d]})"
            )
            if len(out) > VIOLATION_CAP:
                break
        for a in range(n):
            partners = [b for b in range(n) if N[a, b, 0] > 0]
            if len(partners) != 1 or N[a, partners[0], 0] != 1:
                out.append(f"dual of {self.labels[a]} is not unique")
        return out


Key4 = tuple[int, int, int, int]
Key3 = tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class SuperMTC:
    """Fusion rules with F and R matrices and an optional transparent fermion.

    ``fermion`` is ``None`` for the modular categories used as extensions.
    Instances are treated as immutable; derived tables are cached lazily.
    """

    name: str
    rules: FusionRules
    F: dict[Key4, np.ndarray]
    R: dict[Key3, np.ndarray]
    fermion: int | None = None

    def __post_init__(self) -> None:
        for table in (self.F, self.R):
            for m in table.values():
                m.setflags(write=False)

    # ---- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return self.rules.n

    @property
    def labels(self) -> tuple[str, ...]:
        return self.rules.labels

    @property
    def N(self) -> np.ndarray:
        return self.rules.N

    @property
    def psi(self) -> int:
        if self.fermion is None:
            raise ValueError(f"{self.name} has no declared fermion")
        return self.fermion

    def label(self, a: int) -> str:
        return self.rules.labels[a]

    def idx(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        return self.rules.index[name]

    def fuse(self, a: int, b: int) -> int:
        return self.rules.fuse(a, b)

    def times_psi(self, a: int) -> int:
        return self.rules.fuse(a, self.psi)

    # ---- F/R bases -------------------------------------------------------

    def f_rows(self, a: int, b: int, c: int, d: int) -> list[tuple[int, int, int]]:
        N = self.N
        return [
            (e, al, be)
            for e in self.rules.products[a][b]
            for al in range(N[a, b, e])
            for be in range(N[e, c, d])
        ]

    def f_cols(self, a: int, b: int, c: int, d: int) -> list[tuple[int, int, int]]:
        N = self.N
        return [
            (f, mu, nu)
            for f in self.rules.products[b][c]
            for mu in range(N[b, c, f])
            for nu in range(N[a, f, d])
        ]

    def f_keys(self) -> Iterator[Key4]:
        P = self.rules.products
        n = self.n
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in sorted({d for e in P[a][b] for d in P[e][c]}):
                        yield (a, b, c, d)

    def r_keys(self) -> Iterator[Key3]:
        for a in range(self.n):
            for b in range(self.n):
                for c in self.rules.products[a][b]:
                    yield (a, b, c)

    @cached_property
    def _blocks(self) -> dict[tuple[int, ...], np.ndarray]:
        """F split into blocks keyed (a,b,c,d,e,f) of shape (alpha, beta, mu, nu)."""
        N = self.N
        out: dict[tuple[int, ...], np.ndarray] = {}
        for (a, b, c, d), mat in self.F.items():
            rows = self.f_rows(a, b, c, d)
            cols = self.f_cols(a, b, c, d)
            r0: dict[int, int] = {}
            c0: dict[int, int] = {}
            for i, (e, _, _) in enumerate(rows):
                r0.setdefault(e, i)
            for j, (f, _, _) in enumerate(cols):
                c0.setdefault(f, j)
            for e, i in r0.items():
                ne = N[a, b, e] * N[e, c, d]
                for f, j in c0.items():
                    nf = N[b, c, f] * N[a, f, d]
                    blk = mat[i : i + ne, j : j + nf].reshape(N[a, b, e], N[e, c, d], N[b, c, f], N[a, f, d])
                    out[(a, b, c, d, e, f)] = blk
        return out

    def fblock(self, a: int, b: int, c: int, d: int, e: int, f: int) -> np.ndarray | None:
        return self._blocks.get((a, b, c, d, e, f))

    @cached_property
    def _f6(self) -> dict[tuple[int, ...], complex]:
        return {k: complex(v.reshape(-1)[0]) for k, v in self._blocks.items() if v.size == 1}

    def fsym(self, a: int, b: int, c: int, d: int, e: int, f: int) -> complex:
        """Scalar [F^{abc}_d]_{ef}; zero when the channel is not admissible.

        Only valid on multiplicity-free channels.
        """
        return self._f6.get((a, b, c, d, e, f), 0j)

    @cached_property
    def _r3(self) -> dict[Key3, complex]:
        return {k: complex(v[0, 0]) for k, v in self.R.items() if v.shape == (1, 1)}

    def rsym(self, a: int, b: int, c: int) -> complex:
        return self._r3.get((a, b, c), 0j)

    @cached_property
    def group_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """For abelian fusion: ``(mul, F3, R2)`` with F3[a,b,c] = F^{abc} and R2[a,b] = R^{ab}."""
        if not self.rules.abelian:
            raise ValueError(f"{self.name} does not have group-like fusion")
        n = self.n
        mul = np.array([[self.rules.products[a][b][0] for b in range(n)] for a in range(n)])
        F3 = np.empty((n, n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    F3[a, b, c] = self.F[(a, b, c, mul[mul[a, b], c])][0, 0]
        R2 = np.array([[self.R[(a, b, mul[a, b])][0, 0] for b in range(n)] for a in range(n)])
        for t in (mul, F3, R2):
            t.setflags(write=False)
        return mul, F3, R2

    def require_multiplicity_free(self, what: str) -> None:
        if not self.rules.multiplicity_free:
            raise NotImplementedError(f"{what} is implemented for multiplicity-free categories only")

    # ---- construction ----------------------------------------------------

    @classmethod
    def from_scalars(
        cls,
        name: str,
        labels: tuple[str, ...] | list[str],
        N: np.ndarray,
        fsym: Callable[[int, int, int, int, int, int], complex],
        rsym: Callable[[int, int, int], complex],
        fermion: int | None = None,
    ) -> "SuperMTC":
        """Build a multiplicity-free category from scalar F and R callables."""
        rules = FusionRules(tuple(labels), N)
        if not rules.multiplicity_free:
            raise ShapeError("from_scalars needs multiplicity-free fusion")
        shell = cls(name, rules, {}, {}, fermion)
        F: dict[Key4, np.ndarray] = {}
        for key in shell.f_keys():
            rows = shell.f_rows(*key)
            cols = shell.f_cols(*key)
            m = np.empty((len(rows), len(cols)), dtype=complex)
            for i, (e, _, _) in enumerate(rows):
                for j, (f, _, _) in enumerate(cols):
                    m[i, j] = fsym(*key, e, f)
            F[key] = m
        R = {key: np.array([[rsym(*key)]], dtype=complex) for key in shell.r_keys()}
        return cls(name, rules, F, R, fermion)

    def replace(self, *, name: str | None = None, F: dict | None = None, R: dict | None = None) -> "SuperMTC":
        return SuperMTC(
            name or self.name,
            self.rules,
            {k: np.array(v) for k, v in (F if F is not None else self.F).items()},
            {k: np.array(v) for k, v in (R if R is not None else self.R).items()},
            self.fermion,
        )


# ---------------------------------------------------------------------------
# JSON I/O


def _complex(value: Any, where: str) -> complex:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise SchemaError(f"{where}: value must be [re, im]")
    try:
        return complex(float(value[0]), float(value[1]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: non-numeric value") from exc


def _require(obj: dict, key: str, where: str = "category") -> Any:
    if key not in obj:
        raise SchemaError(f"{where}: missing field '{key}'")
    return obj[key]


def _read_json(source: Union[bytes, str, IO[Any]]) -> Any:
    try:
        if isinstance(source, (bytes, bytearray)):
            return json.loads(source.decode("utf-8"))
        if isinstance(source, str):
            return json.loads(source)
        return json.load(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc


def load_category(source: Union[bytes, str, IO[Any], dict]) -> SuperMTC:
    """Load a category from JSON bytes, text, a file object, or a parsed dict."""
    doc = source if isinstance(source, dict) else _read_json(source)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    name = str(_require(doc, "name"))
    anyons = _require(doc, "anyons")
    if not isinstance(anyons, list) or not anyons or len(set(anyons)) != len(anyons):
        raise SchemaError("'anyons' must be a non-empty list of distinct names")
    labels = tuple(str(a) for a in anyons)
    index = {a: i for i, a in enumerate(labels)}
    n = len(labels)

    def lookup(entry: dict, key: str, where: str) -> int:
        name_ = _require(entry, key, where)
        if name_ not in index:
            raise SchemaError(f"{where}: unknown anyon '{name_}'")
        return index[name_]

    N = np.zeros((n, n, n), dtype=np.int64)
    for k, entry in enumerate(_require(doc, "fusion")):
        where = f"fusion[{k}]"
        a, b, c = (lookup(entry, x, where) for x in "abc")
        mult = _require(entry, "N", where)
        if not isinstance(mult, int) or mult < 0:
            raise SchemaError(f"{where}: N must be a non-negative integer")
        N[a, b, c] = mult
    rules = FusionRules(labels, N)
    problems = rules.structural_problems()
    if problems:
        raise ShapeError("; ".join(problems[:5]))

    fermion_name = doc.get("fermion")
    fermion = None
    if fermion_name is not None:
        if fermion_name not in index:
            raise SchemaError(f"unknown fermion '{fermion_name}'")
        fermion = index[fermion_name]

    defaults = doc.get("defaults", {})
    f_default = _complex(defaults.get("F", [1.0, 0.0]), "defaults.F")
    r_default = _complex(defaults.get("R", [1.0, 0.0]), "defaults.R")

    shell = SuperMTC(name, rules, {}, {}, fermion)
    F: dict[Key4, np.ndarray] = {}
    fidx: dict[Key4, tuple[dict, dict]] = {}
    for key in shell.f_keys():
        rows = shell.f_rows(*key)
        cols = shell.f_cols(*key)
        F[key] = np.full((len(rows), len(cols)), f_default, dtype=complex)
        fidx[key] = ({r: i for i, r in enumerate(rows)}, {c: j for j, c in enumerate(cols)})
    for k, entry in enumerate(doc.get("F", [])):
        where = f"F[{k}]"
        a, b, c, d, e, f = (lookup(entry, x, where) for x in "abcdef")
        greek = tuple(int(entry.get(x, 0)) for x in ("alpha", "beta", "mu", "nu"))
        key = (a, b, c, d)
        if key not in fidx:
            raise ShapeError(f"{where}: F^{{{labels[a]}{labels[b]}{labels[c]}}}_{labels[d]} is not admissible")
        rmap, cmap = fidx[key]
        row, col = (e, greek[0], greek[1]), (f, greek[2], greek[3])
        if row not in rmap or col not in cmap:
            raise ShapeError(f"{where}: channel (e={labels[e]}, f={labels[f]}) or multiplicity index out of range")
        F[key][rmap[row], cmap[col]] = _complex(_require(entry, "value", where), where)

    R: dict[Key3, np.ndarray] = {}
    for key in shell.r_keys():
        m = int(N[key])
        R[key] = np.full((m, m), r_default, dtype=complex)
    for k, entry in enumerate(doc.get("R", [])):
        where = f"R[{k}]"
        a, b, c = (lookup(entry, x, where) for x in "abc")
        mu, nu = int(entry.get("mu", 0)), int(entry.get("nu", 0))
        if (a, b, c) not in R:
            raise ShapeError(f"{where}: R^{{{labels[a]}{labels[b]}}}_{labels[c]} is not admissible")
        m = N[a, b, c]
        if not (0 <= mu < m and 0 <= nu < m):
            raise ShapeError(f"{where}: multiplicity index out of range")
        R[(a, b, c)][mu, nu] = _complex(_require(entry, "value", where), where)
    return SuperMTC(name, rules, F, R, fermion)


def _num(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def category_to_dict(c: SuperMTC, *, default: complex = 1.0, tol: float = 0.0) -> dict:
    """Serialize with entries equal to ``default`` (within ``tol``) omitted."""
    L = c.labels
    fusion = [
        {"a": L[a], "b": L[b], "c": L[k], "N": int(c.N[a, b, k])}
        for a in range(c.n)
        for b in range(c.n)
        for k in range(c.n)
        if c.N[a, b, k]
    ]
    F = []
    for key in sorted(c.F):
        a, b, cc, d = key
        mat = c.F[key]
        for i, (e, al, be) in enumerate(c.f_rows(*key)):
            for j, (f, mu, nu) in enumerate(c.f_cols(*key)):
                z = complex(mat[i, j])
                if abs(z - default) <= tol:
                    continue
                F.append(
                    {"a": L[a], "b": L[b], "c": L[cc], "d": L[d], "e": L[e], "alpha": al, "beta": be,
                     "f": L[f], "mu": mu, "nu": nu, "value": _num(z)}
                )
    R = []
    for key in sorted(c.R):
        a, b, k = key
        mat = c.R[key]
        for mu in range(mat.shape[0]):
            for nu in range(mat.shape[1]):
                z = complex(mat[mu, nu])
                if abs(z - default) <= tol:
                    continue
                R.append({"a": L[a], "b": L[b], "c": L[k], "mu": mu, "nu": nu, "value": _num(z)})
    return {
        "name": c.name,
        "anyons": list(L),
        "fermion": None if c.fermion is None else L[c.fermion],
        "fusion": fusion,
        "defaults": {"F": _num(default), "R": _num(default)},
        "F": F,
        "R": R,
    }


def dump_category(c: SuperMTC, fp: IO[str]) -> None:
    json.dump(category_to_dict(c), fp, indent=1)
    fp.write("\n")


# ---------------------------------------------------------------------------
# structural checks


def _unitarity_error(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.abs(m.conj().T @ m - np.eye(m.shape[1])).max())


def validate_structure(c: SuperMTC, tol: float = EPS) -> Report:
    rep = Report("structure")
    L = c.labels
    for msg in c.rules.structural_problems():
        rep.add(msg)
    rep.checked += 1
    N = c.N
    for key in c.f_keys():
        rep.checked += 1
        mat = c.F.get(key)
        a, b, cc, d = key
        tag = f"F^{{{L[a]}{L[b]}{L[cc]}}}_{L[d]}"
        if mat is None:
            rep.add(f"{tag} missing")
            continue
        dim_r = sum(N[a, b, e] * N[e, cc, d] for e in range(c.n))
        dim_c = sum(N[b, cc, f] * N[a, f, d] for f in range(c.n))
        if mat.shape != (dim_r, dim_c) or dim_r != dim_c:
            rep.add(f"{tag} has shape {mat.shape}, expected ({dim_r}, {dim_c})")
            continue
        err = _unitarity_error(mat)
        if err > tol:
            i, j = np.unravel_index(np.argmax(np.abs(mat.conj().T @ mat - np.eye(dim_c))), mat.shape)
            rep.add(f"{tag} not unitary (error {err:.3g} at entry {i},{j})")
    for key in c.r_keys():
        rep.checked += 1
        a, b, k = key
        tag = f"R^{{{L[a]}{L[b]}}}_{L[k]}"
        mat = c.R.get(key)
        if mat is None:
            rep.add(f"{tag} missing")
            continue
        if mat.shape != (N[key], N[key]):
            rep.add(f"{tag} has shape {mat.shape}")
            continue
        err = _unitarity_error(mat)
        if err > tol:
            rep.add(f"{tag} not unitary (error {err:.3g})")
    extra_f = set(c.F) - set(c.f_keys())
    extra_r = set(c.R) - set(c.r_keys())
    for key in sorted(extra_f):
        rep.add(f"F entry populated on non-admissible channel {tuple(L[i] for i in key)}")
    for key in sorted(extra_r):
        rep.add(f"R entry populated on non-admissible channel {tuple(L[i] for i in key)}")
    if c.fermion is not None:
        psi = c.fermion
        if psi == 0:
            rep.add("fermion cannot be the unit")
        elif not (N[psi, psi, 0] == 1 and N[psi, psi].sum() == 1):
            rep.add("fermion does not satisfy psi x psi = 1")
    return rep


def dual_of(c: SuperMTC, a: int) -> int:
    return c.rules.dual[a]


def fusion_outcomes(c: SuperMTC, a: int, b: int) -> list[tuple[int, int]]:
    return [(k, int(c.N[a, b, k])) for k in c.rules.products[a][b]]
