"""Spinor calculus: orthonormal frames, spin connection, gamma algebra,
and three operator constructions (standard Dirac, the operator attached to
a Killing vector, and the Dirac-type operator attached to a Killing-Yano
two-form), with numeric verification of their (anti)commutation identities.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .killing import (DEFAULT_TOL, ResidualReport, _default_points, _max_abs,
                      _report)
from .manifold import GeometryError, Manifold, TensorField, covariant_derivative, lower_index

# Sign of the quarter term in the Killing operator
#   X_k = -i (R^mu grad_mu + QUARTER_SIGN * (1/4) gamma^mu gamma^nu R_{mu;nu}).
# Fixed so that [D_s, X_k] = 0 holds on every verified Killing payload.
QUARTER_SIGN = -1


class FrameError(GeometryError):
    pass


# ---------------------------------------------------------------------------
# frames

@dataclass
class Frame:
    """Orthonormal coframe e^a_mu with e^a_mu e^b_nu eta_ab = g_{mu nu}."""

    vierbein: np.ndarray          # e[a, mu], object array of expressions
    eta: tuple[int, ...]          # frame metric diagonal

    def __post_init__(self):
        self.vierbein = np.array(self.vierbein, dtype=object)
        for idx in np.ndindex(self.vierbein.shape):
            self.vierbein[idx] = sp.sympify(self.vierbein[idx])
        self._inverse = None

    @property
    def dim(self) -> int:
        return self.vierbein.shape[0]

    def inverse(self) -> np.ndarray:
        """e_a^mu with e_a^mu e^a_nu = delta^mu_nu (rows indexed by a)."""
        if self._inverse is None:
            matrix = sp.Matrix(self.dim, self.dim,
                               lambda a, mu: self.vierbein[a, mu])
            inv = matrix.inv()
            self._inverse = np.array(
                [[sp.cancel(sp.together(inv[mu, a])) for mu in range(self.dim)]
                 for a in range(self.dim)], dtype=object)
        return self._inverse


def orthonormal_frame(M: Manifold, vierbein=None,
                      eta: tuple[int, ...] | None = None) -> Frame:
    """Build a frame from a diagonal metric, or wrap a supplied one."""
    n = M.dim
    if vierbein is not None:
        return Frame(np.array(vierbein, dtype=object),
                     tuple(eta) if eta else tuple(M.signature))
    for i in range(n):
        for j in range(n):
            if i != j and sp.simplify(M.metric[i, j]) != 0:
                raise FrameError(
                    "metric is not diagonal; supply an explicit frame")
    comp = np.zeros((n, n), dtype=object)
    eta_out = []
    for i in range(n):
        gii = M.metric[i, i]
        sign = M.signature[i]
        comp[i, i] = sp.sqrt(sp.simplify(sign * gii))
        eta_out.append(sign)
    return Frame(comp, tuple(eta_out))


def frame_residual(F: Frame, M: Manifold, points=None, seed=0,
                   tol=1e-10) -> ResidualReport:
    """e^a_mu e^b_nu eta_ab - g_{mu nu} at sampled points."""
    pts = _default_points(M, points, seed)
    fn = M.compile_array(F.vierbein)
    eta = np.diag(F.eta).astype(float)
    rows = []
    for p in pts:
        e = fn(p)
        g = M.metric_at(p)
        rows.append((p, _max_abs(e.T @ eta @ e - g), _max_abs(g)))
    return _report("frame-orthonormality", rows, tol)


def spin_connection(F: Frame, M: Manifold) -> np.ndarray:
    """omega[mu, a, b] = omega_{mu a b}, both frame indices lowered.

    Determined by the vanishing of the total derivative of the vierbein:
    omega_mu{}^a{}_b = -(d_mu e^a_nu - Gamma^lam_{mu nu} e^a_lam) e_b^nu.
    """
    n = M.dim
    e = F.vierbein
    einv = F.inverse()
    gamma = M.christoffel()
    xs = M.coord_symbols
    omega = np.zeros((n, n, n), dtype=object)
    for mu in range(n):
        for a in range(n):
            for b in range(n):
                total = sp.Integer(0)
                for nu in range(n):
                    de = sp.diff(e[a, nu], xs[mu])
                    corr = sum(gamma[lam, mu, nu] * e[a, lam] for lam in range(n))
                    total += -(de - corr) * einv[b, nu]
                # lower the first frame index with eta
                omega[mu, a, b] = sp.cancel(sp.together(F.eta[a] * total))
    return omega


def spin_connection_antisymmetry(omega, M: Manifold, points=None, seed=0,
                                 tol=1e-10) -> ResidualReport:
    pts = _default_points(M, points, seed)
    fn = M.compile_array(omega)
    rows = []
    for p in pts:
        w = fn(p)
        rows.append((p, _max_abs(w + np.swapaxes(w, 1, 2)), max(1.0, _max_abs(w))))
    return _report("spin-connection-antisymmetry", rows, tol)


# ---------------------------------------------------------------------------
# gamma matrices

_SIGMA = [sp.Matrix([[0, 1], [1, 0]]),
          sp.Matrix([[0, -sp.I], [sp.I, 0]]),
          sp.Matrix([[1, 0], [0, -1]])]


@dataclass
class GammaRep:
    """Exact-entry gamma matrices with {gamma^a, gamma^b} = 2 eta^{ab} Id."""

    eta: tuple[int, ...]
    matrices: list[sp.Matrix]

    @property
    def dim(self) -> int:
        return len(self.matrices)

    @property
    def spinor_size(self) -> int:
        return self.matrices[0].shape[0]

    def clifford_defect(self) -> int:
        worst = 0
        size = self.spinor_size
        for a in range(self.dim):
            for b in range(self.dim):
                lhs = (self.matrices[a] * self.matrices[b]
                       + self.matrices[b] * self.matrices[a]
                       - 2 * self.eta[a] * (1 if a == b else 0) * sp.eye(size))
                if lhs != sp.zeros(size, size):
                    worst = 1
        return worst

    def conjugate(self, U: sp.Matrix) -> "GammaRep":
        Uinv = U.H
        if sp.simplify(U * Uinv) != sp.eye(U.shape[0]):
            raise ValueError("conjugation matrix must be unitary")
        return GammaRep(self.eta, [sp.expand(U * g * Uinv) for g in self.matrices])


def canonical_gamma(eta: tuple[int, ...]) -> GammaRep:
    """One fixed exact representation for dimensions 2, 3, and 4."""
    n = len(eta)
    if n == 2:
        base = [_SIGMA[0], _SIGMA[1]]
    elif n == 3:
        base = list(_SIGMA)
    elif n == 4:
        one = sp.eye(2)
        base = [sp.Matrix(np.kron(_SIGMA[a], _SIGMA[0])) for a in range(3)]
        base.append(sp.Matrix(np.kron(one, _SIGMA[1])))
    else:
        raise ValueError("gamma representations provided for dimensions 2-4")
    mats = []
    for a, g in enumerate(base):
        mats.append(g if eta[a] == 1 else sp.I * g)
    return GammaRep(tuple(eta), mats)


def standard_unitary(size: int) -> sp.Matrix:
    """A fixed exact unitary used for the representation-independence test."""
    u2 = sp.Rational(1, 2) * sp.Matrix([[1 + sp.I, 1 - sp.I], [1 - sp.I, 1 + sp.I]])
    U = u2
    while U.shape[0] < size:
        U = sp.Matrix(np.kron(U, u2))
    if U.shape[0] != size:
        raise ValueError("size must be a power of 2")
    return U


# ---------------------------------------------------------------------------
# spinor fields and operators

SpinorField = np.ndarray      # object array of expressions, length = spinor size


@dataclass
class OperatorSpec:
    """kind in {standard-dirac, killing-op, dirac-type}; payload is the
    Killing vector (contravariant) or the Killing-Yano two-form (covariant)."""

    kind: str
    payload: TensorField | None = None

    def __post_init__(self):
        if self.kind not in ("standard-dirac", "killing-op", "dirac-type"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind != "standard-dirac" and self.payload is None:
            raise ValueError(f"{self.kind} needs a payload")


class SpinContext:
    """Caches the frame-dependent ingredients of all three operators."""

    def __init__(self, M: Manifold, F: Frame, rep: GammaRep | None = None):
        if rep is None:
            rep = canonical_gamma(F.eta)
        if tuple(rep.eta) != tuple(F.eta):
            raise ValueError("gamma signature must match the frame signature")
        self.M = M
        self.F = F
        self.rep = rep
        self._op_cache = {}
        self._compose_cache = {}
        self.omega = spin_connection(F, M)
        n = M.dim
        einv = F.inverse()
        # curved-index gammas gamma^mu = e_a^mu gamma^a
        self.gamma_up = [sp.zeros(rep.spinor_size, rep.spinor_size) for _ in range(n)]
        for mu in range(n):
            acc = sp.zeros(rep.spinor_size, rep.spinor_size)
            for a in range(n):
                acc += einv[a, mu] * rep.matrices[a]
            self.gamma_up[mu] = acc
        # connection matrices (1/4) omega_{mu a b} gamma^a gamma^b
        self.conn = []
        inv_eta = [F.eta[a] for a in range(n)]   # eta^{aa} = eta_{aa} for +-1
        for mu in range(n):
            acc = sp.zeros(rep.spinor_size, rep.spinor_size)
            for a in range(n):
                for b in range(n):
                    w = self.omega[mu, a, b]
                    if w == 0:
                        continue
                    acc += (sp.Rational(1, 4) * w * inv_eta[a] * inv_eta[b]
                            * rep.matrices[a] * rep.matrices[b])
            self.conn.append(acc)

    def covariant_spinor_derivative(self, psi: SpinorField) -> list[SpinorField]:
        """grad_mu psi = d_mu psi + (1/4) omega_{mu a b} gamma^a gamma^b psi."""
        xs = self.M.coord_symbols
        size = self.rep.spinor_size
        out = []
        for mu in range(self.M.dim):
            comp = np.empty(size, dtype=object)
            for s in range(size):
                expr = sp.diff(psi[s], xs[mu])
                for s2 in range(size):
                    c = self.conn[mu][s, s2]
                    if c != 0:
                        expr += c * psi[s2]
                comp[s] = expr
            out.append(comp)
        return out

    def _mat_apply(self, mat: sp.Matrix, vec: np.ndarray) -> np.ndarray:
        size = self.rep.spinor_size
        out = np.empty(size, dtype=object)
        for s in range(size):
            expr = sp.Integer(0)
            for s2 in range(size):
                c = mat[s, s2]
                if c != 0:
                    expr += c * vec[s2]
            out[s] = expr
        return out


def _tidy(m: sp.Matrix) -> sp.Matrix:
    # Coefficient matrices stay small enough to leave unsimplified; numeric
    # evaluation uses common-subexpression elimination, and sp.cancel on the
    # mixed-radical entries that appear here is prohibitively slow.
    return m


class LinearOperator:
    """First-order operator c1[mu] d_mu + c0 with matrix coefficients.

    Composition happens on the coefficient matrices, so second-order
    compositions stay exact while never differentiating bank spinors."""

    def __init__(self, ctx: SpinContext, c1: list[sp.Matrix], c0: sp.Matrix):
        self.ctx = ctx
        self.c1 = c1
        self.c0 = c0

    def apply(self, psi: SpinorField) -> SpinorField:
        xs = self.ctx.M.coord_symbols
        size = self.ctx.rep.spinor_size
        out = np.full(size, sp.Integer(0), dtype=object)
        dpsi = [np.array([sp.diff(e, x) for e in psi], dtype=object) for x in xs]
        for mu in range(self.ctx.M.dim):
            out = out + self.ctx._mat_apply(self.c1[mu], dpsi[mu])
        return out + self.ctx._mat_apply(self.c0, psi)

    def compose(self, other: "LinearOperator") -> "SecondOrderOperator":
        """self applied after other."""
        ctx = self.ctx
        n = ctx.M.dim
        xs = ctx.M.coord_symbols
        size = ctx.rep.spinor_size
        c2 = [[_tidy(self.c1[mu] * other.c1[nu]) for nu in range(n)]
              for mu in range(n)]
        c1 = [sp.zeros(size, size) for _ in range(n)]
        for nu in range(n):
            acc = self.c0 * other.c1[nu] + self.c1[nu] * other.c0
            for mu in range(n):
                acc += self.c1[mu] * other.c1[nu].applyfunc(
                    lambda e, x=xs[mu]: sp.diff(e, x))
            c1[nu] = _tidy(acc)
        c0 = self.c0 * other.c0
        for mu in range(n):
            c0 += self.c1[mu] * other.c0.applyfunc(
                lambda e, x=xs[mu]: sp.diff(e, x))
        return SecondOrderOperator(ctx, c2, c1, _tidy(c0))


class SecondOrderOperator:
    def __init__(self, ctx, c2, c1, c0):
        self.ctx = ctx
        self.c2 = c2
        self.c1 = c1
        self.c0 = c0

    def __add__(self, other):
        n = self.ctx.M.dim
        return SecondOrderOperator(
            self.ctx,
            [[self.c2[m][n2] + other.c2[m][n2] for n2 in range(n)] for m in range(n)],
            [self.c1[m] + other.c1[m] for m in range(n)],
            self.c0 + other.c0)

    def __sub__(self, other):
        n = self.ctx.M.dim
        return SecondOrderOperator(
            self.ctx,
            [[self.c2[m][n2] - other.c2[m][n2] for n2 in range(n)] for m in range(n)],
            [self.c1[m] - other.c1[m] for m in range(n)],
            self.c0 - other.c0)

    def apply(self, psi: SpinorField) -> SpinorField:
        ctx = self.ctx
        xs = ctx.M.coord_symbols
        n = ctx.M.dim
        size = ctx.rep.spinor_size
        dpsi = [np.array([sp.diff(e, x) for e in psi], dtype=object) for x in xs]
        d2psi = [[np.array([sp.diff(e, xs[nu]) for e in dpsi[mu]], dtype=object)
                  for nu in range(n)] for mu in range(n)]
        out = np.full(size, sp.Integer(0), dtype=object)
        for mu in range(n):
            for nu in range(n):
                out = out + ctx._mat_apply(self.c2[mu][nu], d2psi[mu][nu])
        for nu in range(n):
            out = out + ctx._mat_apply(self.c1[nu], dpsi[nu])
        return out + ctx._mat_apply(self.c0, psi)


def build_operator(spec: OperatorSpec, ctx: SpinContext) -> LinearOperator:
    """Coefficient form of D_s, X_k, or D_f on the given spin context."""
    M, rep = ctx.M, ctx.rep
    n, size = M.dim, rep.spinor_size

    if spec.kind == "standard-dirac":
        # D_s = i gamma^mu grad_mu
        c1 = [_tidy(sp.I * ctx.gamma_up[mu]) for mu in range(n)]
        c0 = sp.zeros(size, size)
        for mu in range(n):
            c0 += sp.I * ctx.gamma_up[mu] * ctx.conn[mu]
        return LinearOperator(ctx, c1, _tidy(c0))

    if spec.kind == "killing-op":
        # X_k = -i (R^mu grad_mu + QUARTER_SIGN/4 gamma^mu gamma^nu R_{mu;nu})
        R = spec.payload
        if R.variance != "u":
            raise ValueError("killing-op payload must be a vector field")
        Rlow = lower_index(R, M, 0)
        dR = covariant_derivative(Rlow, M).components    # dR[nu, mu] = R_{mu;nu}
        c1 = [_tidy(-sp.I * R.components[mu] * sp.eye(size)) for mu in range(n)]
        c0 = sp.zeros(size, size)
        for mu in range(n):
            c0 += R.components[mu] * ctx.conn[mu]
        for mu in range(n):
            for nu in range(n):
                c = dR[nu, mu]
                if c != 0:
                    c0 += (QUARTER_SIGN * sp.Rational(1, 4) * c
                           * ctx.gamma_up[mu] * ctx.gamma_up[nu])
        return LinearOperator(ctx, c1, _tidy(-sp.I * c0))

    # dirac-type: D_f = i gamma^mu (f_mu^nu grad_nu - (1/6) gamma^nu gamma^rho f_{mu nu;rho})
    f = spec.payload
    if f.variance != "dd":
        raise ValueError("dirac-type payload must be a covariant two-form")
    ginv = M.inverse_metric_matrix()
    fmix = np.empty((n, n), dtype=object)                # f_mu{}^nu
    for mu in range(n):
        for nu in range(n):
            fmix[mu, nu] = sp.cancel(sp.together(
                sum(f.components[mu, lam] * ginv[lam, nu] for lam in range(n))))
    df = covariant_derivative(f, M).components           # df[rho, mu, nu] = f_{mu nu;rho}
    c1 = []
    for nu in range(n):
        acc = sp.zeros(size, size)
        for mu in range(n):
            if fmix[mu, nu] != 0:
                acc += fmix[mu, nu] * ctx.gamma_up[mu]
        c1.append(_tidy(sp.I * acc))
    c0 = sp.zeros(size, size)
    for mu in range(n):
        for nu in range(n):
            if fmix[mu, nu] != 0:
                c0 += fmix[mu, nu] * ctx.gamma_up[mu] * ctx.conn[nu]
        curl = sp.zeros(size, size)
        for nu in range(n):
            for rho in range(n):
                c = df[rho, mu, nu]
                if c != 0:
                    curl += c * ctx.gamma_up[nu] * ctx.gamma_up[rho]
        c0 -= sp.Rational(1, 6) * ctx.gamma_up[mu] * curl
    return LinearOperator(ctx, c1, _tidy(sp.I * c0))


def _spec_key(spec: OperatorSpec) -> tuple:
    # Content-based key: payload objects are often temporaries, so keying on
    # object identity can alias distinct payloads once one is collected.
    if spec.payload is None:
        return (spec.kind,)
    t = spec.payload
    comps = tuple(sp.srepr(t.components[idx]) for idx in np.ndindex(t.components.shape))
    return (spec.kind, t.variance, t.components.shape, comps)


def apply_operator(spec: OperatorSpec, psi: SpinorField, ctx: SpinContext) -> SpinorField:
    """Symbolic application; composition remains exact to second order."""
    key = _spec_key(spec)
    cache = ctx._op_cache
    if key not in cache:
        cache[key] = build_operator(spec, ctx)
    return cache[key].apply(psi)


# ---------------------------------------------------------------------------
# test-spinor bank and residual reports

def spinor_bank(M: Manifold, count: int = 5, seed: int = 0,
                size: int | None = None) -> list[SpinorField]:
    """Deterministic bank: degree-<=2 polynomials in the coordinates times
    {1, sin(theta_1), cos(theta_1)} where theta_1 is the first coordinate."""
    rng = random.Random(seed)
    xs = [sp.Symbol(c) for c in M.chart.coords]
    if size is None:
        size = 2 ** (M.dim // 2)
    trig = [sp.Integer(1), sp.sin(xs[min(1, M.dim - 1)]), sp.cos(xs[min(1, M.dim - 1)])]
    monomials = [sp.Integer(1)] + xs + [xs[i] * xs[j] for i in range(M.dim)
                                        for j in range(i, M.dim)]
    bank = []
    for _ in range(count):
        comp = np.empty(size, dtype=object)
        for s in range(size):
            poly = sum(sp.Integer(rng.randint(-2, 2)) * m
                       for m in rng.sample(monomials, 3))
            comp[s] = sp.expand(poly * rng.choice(trig))
        bank.append(comp)
    return bank


def _eval_spinor(psi: SpinorField, M: Manifold, points) -> np.ndarray:
    args = M._arg_symbols()
    fn = sp.lambdify(args, list(psi), modules="numpy", cse=True)
    params = [M.params[p] for p in sorted(M.params)]
    coords = M.chart.coords
    return np.array([fn(*[p[c] for c in coords], *params) for p in points],
                    dtype=complex)


def _get_operator(spec: OperatorSpec, ctx: SpinContext) -> "LinearOperator":
    key = _spec_key(spec)
    if key not in ctx._op_cache:
        ctx._op_cache[key] = build_operator(spec, ctx)
    return ctx._op_cache[key]


def _bilinear_report(check, specA, specB, ctx, bank, points, seed, tol,
                     combine, squares=False) -> ResidualReport:
    M = ctx.M
    pts = _default_points(M, points, seed)
    if bank is None:
        bank = spinor_bank(M, 5, seed)
    A = _get_operator(specA, ctx)
    B = _get_operator(specB, ctx)
    if squares:
        ab_op, ba_op = _compose_cached(A, A, ctx), _compose_cached(B, B, ctx)
    else:
        ab_op, ba_op = _compose_cached(A, B, ctx), _compose_cached(B, A, ctx)
    pieces = []
    for psi in bank:
        pieces.append(ab_op.apply(psi))
        pieces.append(ba_op.apply(psi))
    vals = _eval_spinor(np.concatenate(pieces), M, pts)
    s = ctx.rep.spinor_size
    worst = None
    for k in range(len(bank)):
        rows = []
        for i, p in enumerate(pts):
            va = vals[i, 2 * k * s:(2 * k + 1) * s]
            vb = vals[i, (2 * k + 1) * s:(2 * k + 2) * s]
            res = float(np.max(np.abs(combine(va, vb))))
            scale = max(float(np.max(np.abs(va))), float(np.max(np.abs(vb))), 1.0)
            rows.append((p, res, scale))
        rep = _report(check, rows, tol)
        if worst is None or rep.max_rel_residual > worst.max_rel_residual:
            worst = rep
    worst.extra["bank_size"] = len(bank)
    return worst


def _compose_cached(A: "LinearOperator", B: "LinearOperator",
                    ctx: SpinContext) -> "SecondOrderOperator":
    key = (id(A), id(B))
    if key not in ctx._compose_cache:
        ctx._compose_cache[key] = A.compose(B)
    return ctx._compose_cache[key]


def anticommutator_residual(specA: OperatorSpec, specB: OperatorSpec,
                            ctx: SpinContext, bank=None, points=None, seed=0,
                            tol=1e-8) -> ResidualReport:
    """Residual of (AB + BA) psi over the bank, relative to |ABpsi|, |BApsi|."""
    return _bilinear_report("anticommutator", specA, specB, ctx, bank, points,
                            seed, tol, lambda a, b: a + b)


def commutator_residual(specA: OperatorSpec, specB: OperatorSpec,
                        ctx: SpinContext, bank=None, points=None, seed=0,
                        tol=1e-8) -> ResidualReport:
    """Residual of (AB - BA) psi over the bank."""
    return _bilinear_report("commutator", specA, specB, ctx, bank, points,
                            seed, tol, lambda a, b: a - b)


def square_compare(spec_f: OperatorSpec, ctx: SpinContext, bank=None,
                   points=None, seed=0, tol=1e-8) -> ResidualReport:
    """Residual of (D_f^2 - D_s^2) psi over the bank."""
    if spec_f.kind != "dirac-type":
        raise ValueError("square_compare expects a dirac-type operator")
    return _bilinear_report("square-compare", spec_f,
                            OperatorSpec("standard-dirac"), ctx, bank, points,
                            seed, tol, lambda ff, ss: ff - ss, squares=True)
