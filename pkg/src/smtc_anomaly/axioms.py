"""Pentagon, hexagon and unitarity checks.

Both coherence equations are written against the F block layout of
:mod:`smtc_anomaly.core`.  With ``blk(a,b,c,d,e,f)[alpha,beta,mu,nu]`` the
pentagon reads::

    sum_nu F^{fcd}_e[(g,b,y),(l,d,nu)] F^{abl}_e[(f,a,nu),(k,l,m)]
        = sum_{h,s,p,r} F^{abc}_g[(f,a,b),(h,s,p)] F^{ahd}_e[(g,p,y),(k,r,m)]
                        F^{bcd}_k[(h,s,r),(l,d,l)]

and the first hexagon reads::

    sum R^{ac}_e[a,l] F^{acb}_d[(e,l,b),(g,y,n)] R^{bc}_g[y,m]
        = sum_{f,d,s,p} F^{cab}_d[(e,a,b),(f,d,s)] R^{fc}_d[s,p] F^{abc}_d[(f,d,p),(g,m,n)]

where ``R^{ab}_c`` maps V^{ab}_c to V^{ba}_c.  The second hexagon replaces
each ``R^{xc}`` by the inverse of ``R^{cx}``.  In this form a vertex gauge
``R -> G^{ba} R (G^{ab})^{-1}`` leaves both sides covariant.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import EPS, Report, SuperMTC, _unitarity_error

__all__ = ["check_pentagon", "check_hexagon", "check_unitarity", "check_all"]


def _fmt(c: SuperMTC, *idx: int) -> str:
    return ",".join(c.label(i) for i in idx)


def _zero_block(c: SuperMTC, a, b, cc, d, e, f) -> np.ndarray:
    N = c.N
    return np.zeros((N[a, b, e], N[e, cc, d], N[b, cc, f], N[a, f, d]), dtype=complex)


def _blk(c: SuperMTC, a, b, cc, d, e, f) -> np.ndarray:
    blk = c.fblock(a, b, cc, d, e, f)
    return _zero_block(c, a, b, cc, d, e, f) if blk is None else blk


def _pentagon_group(c: SuperMTC, tol: float, rep: Report) -> None:
    mul, F, _ = c.group_tables
    n = c.n
    a, b, cc, d = np.meshgrid(*(np.arange(n),) * 4, indexing="ij")
    f = mul[a, b]
    l = mul[cc, d]
    h = mul[b, cc]
    lhs = F[f, cc, d] * F[a, b, l]
    rhs = F[a, b, cc] * F[a, h, d] * F[b, cc, d]
    err = np.abs(lhs - rhs)
    rep.checked += err.size
    for idx in zip(*np.nonzero(err > tol)):
        rep.add(f"pentagon ({_fmt(c, *idx)}): |lhs - rhs| = {err[idx]:.3g}")


def _pentagon_scalar(c: SuperMTC, tol: float, rep: Report) -> None:
    # multiplicity-free: every block is 1x1x1x1, so skip einsum entirely
    P = c.rules.products
    N = c.N
    F = c.fsym
    for a, b, cc, d in itertools.product(range(c.n), repeat=4):
        for f in P[a][b]:
            for g in P[f][cc]:
                for e in P[g][d]:
                    for l in P[cc][d]:
                        for k in P[b][l]:
                            if not N[a, k, e]:
                                continue
                            rep.checked += 1
                            lhs = F(f, cc, d, e, g, l) * F(a, b, l, e, f, k)
                            rhs = sum(
                                F(a, b, cc, g, f, h) * F(a, h, d, e, g, k) * F(b, cc, d, k, h, l)
                                for h in P[b][cc]
                            )
                            err = abs(lhs - rhs)
                            if err > tol:
                                rep.add(
                                    f"pentagon ({_fmt(c, a, b, cc, d)}; e={c.label(e)}, f={c.label(f)}, "
                                    f"g={c.label(g)}, k={c.label(k)}, l={c.label(l)}): |lhs - rhs| = {err:.3g}"
                                )


def _pentagon_general(c: SuperMTC, tol: float, rep: Report) -> None:
    P = c.rules.products
    N = c.N
    n = c.n
    for a, b, cc, d in itertools.product(range(n), repeat=4):
        for f in P[a][b]:
            for g in P[f][cc]:
                for e in P[g][d]:
                    for l in P[cc][d]:
                        for k in P[b][l]:
                            if not N[a, k, e]:
                                continue
                            rep.checked += 1
                            lhs = np.einsum(
                                "BGDN,ANLM->ABGDLM",
                                _blk(c, f, cc, d, e, g, l),
                                _blk(c, a, b, l, e, f, k),
                            )
                            rhs = np.zeros_like(lhs)
                            for h in P[b][cc]:
                                if not (N[a, h, g] and N[h, d, k]):
                                    continue
                                rhs += np.einsum(
                                    "ABSP,PGRM,SRDL->ABGDLM",
                                    _blk(c, a, b, cc, g, f, h),
                                    _blk(c, a, h, d, e, g, k),
                                    _blk(c, b, cc, d, k, h, l),
                                )
                            err = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
                            if err > tol:
                                rep.add(
                                    f"pentagon ({_fmt(c, a, b, cc, d)}; e={c.label(e)}, f={c.label(f)}, "
                                    f"g={c.label(g)}, k={c.label(k)}, l={c.label(l)}): |lhs - rhs| = {err:.3g}"
                                )


def check_pentagon(c: SuperMTC, tol: float = EPS) -> Report:
    rep = Report("pentagon")
    if c.rules.abelian:
        _pentagon_group(c, tol, rep)
    elif c.rules.multiplicity_free:
        _pentagon_scalar(c, tol, rep)
    else:
        _pentagon_general(c, tol, rep)
    return rep


def _hexagon_group(c: SuperMTC, tol: float, rep: Report) -> None:
    mul, F, R = c.group_tables
    n = c.n
    a, b, cc = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    f = mul[a, b]
    for name, Rx in (("hexagon", R), ("inverse hexagon", 1 / R.T)):
        lhs = Rx[a, cc] * F[a, cc, b] * Rx[b, cc]
        rhs = F[cc, a, b] * Rx[f, cc] * F[a, b, cc]
        err = np.abs(lhs - rhs)
        rep.checked += err.size
        for idx in zip(*np.nonzero(err > tol)):
            rep.add(f"{name} ({_fmt(c, *idx)}): |lhs - rhs| = {err[idx]:.3g}")


def _hexagon_general(c: SuperMTC, tol: float, rep: Report) -> None:
    P = c.rules.products
    N = c.N
    n = c.n
    forward = c.R
    backward = {(x, y, z): np.linalg.inv(c.R[(y, x, z)]) for (x, y, z) in c.R}
    for name, Rx in (("hexagon", forward), ("inverse hexagon", backward)):
        for a, b, cc in itertools.product(range(n), repeat=3):
            for e in P[a][cc]:
                for g in P[b][cc]:
                    for d in P[e][b]:
                        if not N[a, g, d]:
                            continue
                        rep.checked += 1
                        lhs = np.einsum(
                            "AL,LBGN,GM->ABMN", Rx[(a, cc, e)], _blk(c, a, cc, b, d, e, g), Rx[(b, cc, g)]
                        )
                        rhs = np.zeros_like(lhs)
                        for f in P[a][b]:
                            if not N[cc, f, d]:
                                continue
                            rhs += np.einsum(
                                "ABDS,SP,DPMN->ABMN",
                                _blk(c, cc, a, b, d, e, f),
                                Rx[(f, cc, d)],
                                _blk(c, a, b, cc, d, f, g),
                            )
                        err = float(np.abs(lhs - rhs).max()) if lhs.size else 0.0
                        if err > tol:
                            rep.add(
                                f"{name} ({_fmt(c, a, b, cc)}; d={c.label(d)}, e={c.label(e)}, "
                                f"g={c.label(g)}): |lhs - rhs| = {err:.3g}"
                            )


def check_hexagon(c: SuperMTC, tol: float = EPS) -> Report:
    rep = Report("hexagon")
    if c.rules.abelian:
        _hexagon_group(c, tol, rep)
    else:
        _hexagon_general(c, tol, rep)
    return rep


def check_unitarity(c: SuperMTC, tol: float = EPS) -> Report:
    rep = Report("unitarity")
    for table, tag in ((c.F, "F"), (c.R, "R")):
        for key in sorted(table):
            rep.checked += 1
            err = _unitarity_error(table[key])
            if err > tol:
                rep.add(f"{tag}[{_fmt(c, *key)}] not unitary (error {err:.3g})")
    return rep


def check_all(c: SuperMTC, tol: float = EPS) -> list[Report]:
    return [check_pentagon(c, tol), check_hexagon(c, tol), check_unitarity(c, tol)]
