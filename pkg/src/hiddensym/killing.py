"""Residual checkers and constructors for hidden-symmetry objects.

Every check evaluates a defining identity's left-minus-right side at
seeded sample points and reports the worst absolute and relative
residual.  Relative means scaled by the maximum input component
magnitude at the worst point (floored at 1 so exact-zero inputs do not
blow up the quotient).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .manifold import (Manifold, TensorField, antisymmetrize, covariant_derivative,
                       exterior_derivative, codifferential, raise_index, lower_index,
                       sample_points, symmetrize, GeometryError)

DEFAULT_TOL = 1e-9
DEFAULT_POINTS = 20

EPSILON3 = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    EPSILON3[_i, _j, _k] = ((_j - _i) * (_k - _i) * (_k - _j)) / 2


@dataclass
class ResidualReport:
    check: str
    tolerance: float
    points: int
    max_abs_residual: float
    max_rel_residual: float
    passed: bool
    worst_point: dict[str, float]
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "tolerance": self.tolerance,
            "points": self.points,
            "max_residual": self.max_abs_residual,
            "max_relative_residual": self.max_rel_residual,
            "pass": bool(self.passed),
            "worst_point": self.worst_point,
            "extra": self.extra,
        }


def _default_points(M: Manifold, points, seed):
    if points is None:
        return sample_points(M.chart, DEFAULT_POINTS, seed)
    if isinstance(points, int):
        return sample_points(M.chart, points, seed)
    return points


def _report(check: str, rows, tol: float, extra: dict | None = None) -> ResidualReport:
    """rows: iterable of (point, abs_residual, scale)."""
    worst_abs = worst_rel = -1.0
    worst_point = {}
    count = 0
    for point, res, scale in rows:
        count += 1
        rel = res / max(1.0, scale)
        if rel > worst_rel:
            worst_rel = rel
            worst_point = dict(point)
        worst_abs = max(worst_abs, res)
    return ResidualReport(check, tol, count, worst_abs, worst_rel,
                          worst_rel < tol, worst_point, extra or {})


def _max_abs(arr: np.ndarray) -> float:
    return float(np.max(np.abs(arr))) if arr.size else 0.0


# ---------------------------------------------------------------------------
# Killing vectors

def killing_vector_residual(X: TensorField, M: Manifold, points=None, seed=0,
                            tol=DEFAULT_TOL) -> ResidualReport:
    """(L_X g)_{mu nu} = grad_mu X_nu + grad_nu X_mu at sampled points."""
    pts = _default_points(M, points, seed)
    Xd = lower_index(X, M, 0)
    nabla = covariant_derivative(Xd, M)
    rows = []
    for p in pts:
        dX = nabla.at(M, p)
        res = dX + dX.T
        rows.append((p, _max_abs(res), _max_abs(dX)))
    return _report("killing-vector", rows, tol)


def conformal_killing_factor(X: TensorField, M: Manifold, points=None, seed=0,
                             tol=DEFAULT_TOL):
    """Per-point least-squares factor f with L_X g ~ f g; returns (factors, report)."""
    pts = _default_points(M, points, seed)
    Xd = lower_index(X, M, 0)
    nabla = covariant_derivative(Xd, M)
    factors = []
    rows = []
    for p in pts:
        dX = nabla.at(M, p)
        L = dX + dX.T
        g = M.metric_at(p)
        f = float(np.sum(L * g) / np.sum(g * g))
        factors.append(f)
        res = L - f * g
        rows.append((p, _max_abs(res), max(_max_abs(L), _max_abs(g))))
    report = _report("conformal-killing", rows, tol,
                     extra={"factor_max_abs": max(abs(f) for f in factors)})
    return factors, report


# ---------------------------------------------------------------------------
# Staeckel-Killing / Killing-Yano / conformal Killing-Yano

def _is_symmetric(T: TensorField) -> bool:
    comp = T.components
    for idx in np.ndindex(comp.shape):
        sidx = tuple(sorted(idx))
        if idx != sidx and sp.simplify(comp[idx] - comp[sidx]) != 0:
            return False
    return True


def _is_antisymmetric_at(T: TensorField, M: Manifold, pts, tol=1e-12) -> bool:
    for p in pts[:3]:
        arr = T.at(M, p)
        if _max_abs(arr - antisymmetrize_numeric(arr)) > tol * max(1.0, _max_abs(arr)):
            return False
    return True


def antisymmetrize_numeric(arr: np.ndarray) -> np.ndarray:
    import math
    from .manifold import _perm_sign
    k = arr.ndim
    out = np.zeros_like(arr)
    for perm in itertools.permutations(range(k)):
        out += _perm_sign(perm) * np.transpose(arr, perm)
    return out / math.factorial(k)


def sk_residual(K: TensorField, M: Manifold, points=None, seed=0,
                tol=DEFAULT_TOL) -> ResidualReport:
    """Fully symmetrized covariant derivative of a symmetric tensor."""
    if not _is_symmetric(K):
        raise GeometryError("sk_residual requires a symmetric tensor")
    pts = _default_points(M, points, seed)
    nabla = covariant_derivative(K, M)
    sym_part = TensorField(symmetrize(nabla.components), nabla.variance)
    rows = []
    for p in pts:
        res = sym_part.at(M, p)
        scale = _max_abs(nabla.at(M, p))
        rows.append((p, _max_abs(res), scale))
    return _report("staeckel-killing", rows, tol)


def ky_residual(f: TensorField, M: Manifold, points=None, seed=0,
                tol=DEFAULT_TOL) -> ResidualReport:
    """Symmetric part of grad f, and deviation of grad f from its alternation."""
    pts = _default_points(M, points, seed)
    if not _is_antisymmetric_at(f, M, pts):
        raise GeometryError("ky_residual requires an antisymmetric form")
    nabla = covariant_derivative(f, M)
    comp = nabla.components
    n = M.dim
    # symmetrize over the derivative slot and the form's first slot
    sym_pair = np.empty(comp.shape, dtype=object)
    for idx in np.ndindex(comp.shape):
        swapped = (idx[1], idx[0]) + idx[2:]
        sym_pair[idx] = (comp[idx] + comp[swapped]) / 2
    sym_field = TensorField(sym_pair, nabla.variance)
    alt_field = TensorField(comp - antisymmetrize(comp), nabla.variance)
    rows = []
    for p in pts:
        r1 = _max_abs(sym_field.at(M, p))
        r2 = _max_abs(alt_field.at(M, p))
        scale = _max_abs(nabla.at(M, p))
        rows.append((p, max(r1, r2), scale))
    return _report("killing-yano", rows, tol)


def cky_residual(f: TensorField, M: Manifold, points=None, seed=0,
                 tol=DEFAULT_TOL) -> ResidualReport:
    """Conformal Killing-Yano identity with X over the coordinate basis.

    residual_mu = grad_mu f - 1/(p+1) (df)_{mu .} + 1/(n-p+1) ((dx_mu)* wedge d*f).
    """
    n = M.dim
    p = f.rank
    if not 1 <= p <= n - 1:
        raise GeometryError("cky_residual needs 1 <= p <= n-1")
    pts = _default_points(M, points, seed)
    if not _is_antisymmetric_at(f, M, pts):
        raise GeometryError("cky_residual requires an antisymmetric form")
    nabla = covariant_derivative(f, M)
    df = exterior_derivative(f, M)
    codf = codifferential(f, M) if p >= 1 else None
    g = M.metric
    # (X* wedge d*f) for X = coordinate basis vector mu: X*_nu = g_{mu nu}
    wedge = np.zeros((n,) + (n,) * p, dtype=object)
    if p == 1:
        for mu in range(n):
            for a in range(n):
                wedge[mu, a] = g[mu, a] * codf.components[()]
    else:
        cod = codf.components
        for mu in range(n):
            for idx in np.ndindex((n,) * p):
                total = sp.Integer(0)
                for pos in range(p):
                    rest = idx[:pos] + idx[pos + 1:]
                    total += (-1) ** pos * g[mu, idx[pos]] * cod[rest]
                wedge[(mu,) + idx] = total
    res_comp = np.empty(nabla.components.shape, dtype=object)
    for idx in np.ndindex(res_comp.shape):
        res_comp[idx] = (nabla.components[idx]
                         - sp.Rational(1, p + 1) * df.components[idx]
                         + sp.Rational(1, n - p + 1) * wedge[idx])
    res_field = TensorField(res_comp, nabla.variance)
    rows = []
    for ppt in pts:
        res = res_field.at(M, ppt)
        scale = max(_max_abs(nabla.at(M, ppt)), _max_abs(df.at(M, ppt)))
        rows.append((ppt, _max_abs(res), scale))
    return _report("conformal-killing-yano", rows, tol)


def covariant_constancy_residual(T: TensorField, M: Manifold, points=None, seed=0,
                                 tol=DEFAULT_TOL) -> ResidualReport:
    pts = _default_points(M, points, seed)
    nabla = covariant_derivative(T, M)
    rows = []
    worst_components = []
    for p in pts:
        arr = nabla.at(M, p)
        rows.append((p, _max_abs(arr), _max_abs(T.at(M, p))))
        worst_components.append(_max_abs(arr))
    return _report("covariant-constancy", rows, tol,
                   extra={"max_abs_per_point": worst_components})


def associated_sk(f: TensorField, M: Manifold) -> TensorField:
    """K_{mu nu} = f_{mu a2..ap} f^{a2..ap}_{nu}: the S-K square of a K-Y form."""
    p = f.rank
    n = M.dim
    ginv = M.inverse_metric_matrix()
    comp = f.components
    out = np.empty((n, n), dtype=object)
    inner_shape = (n,) * (p - 1)
    for mu in range(n):
        for nu in range(n):
            total = sp.Integer(0)
            for a_idx in np.ndindex(inner_shape):
                for b_idx in np.ndindex(inner_shape):
                    factor = sp.Integer(1)
                    for a, b in zip(a_idx, b_idx):
                        factor *= ginv[a, b]
                    if factor == 0:
                        continue
                    total += comp[(mu,) + a_idx] * factor * comp[b_idx + (nu,)]
            out[mu, nu] = sp.cancel(sp.together(total))
    return TensorField(out, "dd", "symmetric")


def unit_root_check(f: TensorField, M: Manifold, points=None, seed=0,
                    tol=DEFAULT_TOL) -> ResidualReport:
    """f^mu_a f_{mu b} vs g_{ab}, both strict (c=1) and with fitted scale c."""
    if f.rank != 2:
        raise GeometryError("unit_root_check needs a 2-form")
    pts = _default_points(M, points, seed)
    fn = f.compile(M)
    rows = []
    strict_worst = -1.0
    scales = []
    for p in pts:
        F = fn(p)
        g = M.metric_at(p)
        ginv = M.inverse_metric_at(p)
        if abs(np.linalg.det(F)) < 1e-12:
            raise GeometryError(f"singular 2-form at {p}")
        A = ginv @ F               # A[mu, a] = f^mu_a
        Msq = A.T @ F              # f^mu_a f_{mu b}
        c = float(np.sum(Msq * g) / np.sum(g * g))
        scales.append(c)
        strict = _max_abs(Msq - g)
        fitted = _max_abs(Msq - c * g)
        strict_worst = max(strict_worst, strict / max(1.0, _max_abs(Msq)))
        rows.append((p, fitted, _max_abs(Msq)))
    report = _report("unit-root", rows, tol,
                     extra={"fitted_scale": float(np.mean(scales)),
                            "scale_spread": float(np.max(scales) - np.min(scales)),
                            "strict_rel_residual": strict_worst,
                            "strict_pass": bool(strict_worst < tol)})
    return report


def quaternion_relations_check(f1: TensorField, f2: TensorField, f3: TensorField,
                               M: Manifold, points=None, seed=0,
                               tol=DEFAULT_TOL) -> ResidualReport:
    """f^i f^j + f^j f^i = -2 delta_ij, f^i f^j - f^j f^i = -2 eps_ijk f^k."""
    pts = _default_points(M, points, seed)
    forms = [f1, f2, f3]
    fns = [f.compile(M) for f in forms]
    rows = []
    for p in pts:
        ginv = M.inverse_metric_at(p)
        E = [ginv @ fn(p) for fn in fns]  # endomorphisms (f^i)^mu_nu
        ident = np.eye(M.dim)
        worst = 0.0
        scale = max(_max_abs(e) for e in E)
        for i in range(3):
            for j in range(3):
                anti = E[i] @ E[j] + E[j] @ E[i] + 2 * (i == j) * ident
                comm = E[i] @ E[j] - E[j] @ E[i]
                for k in range(3):
                    if EPSILON3[i, j, k]:
                        comm += 2 * EPSILON3[i, j, k] * E[k]
                worst = max(worst, _max_abs(anti), _max_abs(comm))
        rows.append((p, worst, scale))
    return _report("quaternion-relations", rows, tol)
