"""Mixed 3-structures: identity suites, cone construction, and the
pseudo-sphere fixture.

The fixture is the unit pseudo-sphere {x1^2+x2^2-x3^2-x4^2 = 1} inside
flat R^{2,2}, carrying the structure induced by one constant complex
structure and two constant para-complex structures of the ambient space.
Its cone is the ambient flat space itself, so every cone-level check has
an independent closed-form answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .killing import (ResidualReport, _default_points, _max_abs, _report,
                      killing_vector_residual, conformal_killing_factor,
                      ky_residual, DEFAULT_TOL)
from .manifold import (Chart, GeometryError, Manifold, TensorField,
                       antisymmetrize, covariant_derivative, exterior_derivative,
                       lie_bracket, lower_index, sample_points, vector, one_form)

EPS = (1, -1, -1)
_EVEN = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]


@dataclass
class MixedThreeStructure:
    """Three endomorphisms phi_a, vectors xi_a, one-forms eta_a with
    signs (1, -1, -1) on a base of dimension 4n+3."""

    manifold: Manifold
    phi: list[TensorField]          # variance "ud": phi[a][i, j] = (phi_a)^i_j
    xi: list[TensorField]
    eta: list[TensorField]

    def __post_init__(self):
        n = self.manifold.dim
        if n % 4 != 3:
            raise GeometryError("mixed 3-structure needs dimension 4n+3")
        if not (len(self.phi) == len(self.xi) == len(self.eta) == 3):
            raise GeometryError("need exactly three structure triples")

    @property
    def sasakian_rank(self) -> int:
        return (self.manifold.dim - 3) // 4


@dataclass
class ConeManifold:
    base: MixedThreeStructure
    manifold: Manifold              # chart = base chart + radial coordinate
    J: list[TensorField]            # variance "ud" on the cone chart
    radial: str = "r"

    def euler_field(self) -> TensorField:
        n = self.manifold.dim
        comp = [0] * n
        comp[n - 1] = sp.Symbol(self.radial)
        return vector(comp)


# ---------------------------------------------------------------------------
# identity suites

def _phi_mats(S: MixedThreeStructure, point):
    return [p.at(S.manifold, point) for p in S.phi]


def structure_identity_suite(S: MixedThreeStructure, points=None, seed=0,
                             tol=DEFAULT_TOL) -> ResidualReport:
    """All algebraic axioms of a metric mixed 3-structure at sampled points."""
    M = S.manifold
    pts = _default_points(M, points, seed)
    n = M.dim
    rows = []
    for p in pts:
        g = M.metric_at(p)
        phi = _phi_mats(S, p)
        xi = [x.at(M, p) for x in S.xi]
        eta = [e.at(M, p) for e in S.eta]
        ident = np.eye(n)
        worst = 0.0
        scale = max(max(_max_abs(a) for a in phi), 1.0)
        for a in range(3):
            # phi^2 = -eps Id + xi (x) eta,  eta(xi) = eps
            worst = max(worst, _max_abs(phi[a] @ phi[a] + EPS[a] * ident
                                        - np.outer(xi[a], eta[a])))
            worst = max(worst, abs(float(eta[a] @ xi[a]) - EPS[a]))
            # compatibility and metric duality
            worst = max(worst, _max_abs(phi[a].T @ g @ phi[a] - EPS[a] * g
                                        + np.outer(eta[a], eta[a])))
            worst = max(worst, _max_abs(g @ xi[a] - eta[a]))
            for b in range(3):
                if a != b:
                    worst = max(worst, abs(float(eta[a] @ xi[b])))
        for a, b, c in _EVEN:
            worst = max(worst, _max_abs(phi[a] @ xi[b] - EPS[c] * xi[c]))
            worst = max(worst, _max_abs(phi[b] @ xi[a] + EPS[c] * xi[c]))
            worst = max(worst, _max_abs(eta[a] @ phi[b] - EPS[c] * eta[c]))
            worst = max(worst, _max_abs(eta[b] @ phi[a] + EPS[c] * eta[c]))
            worst = max(worst, _max_abs(phi[a] @ phi[b] - np.outer(xi[a], eta[b])
                                        - EPS[c] * phi[c]))
            worst = max(worst, _max_abs(-phi[b] @ phi[a] + np.outer(xi[b], eta[a])
                                        - EPS[c] * phi[c]))
        rows.append((p, worst, scale))
    return _report("mixed-structure-identities", rows, tol)


def _nabla_phi(S: MixedThreeStructure, a: int) -> TensorField:
    return covariant_derivative(S.phi[a], S.manifold)


def sasakian_residuals(S: MixedThreeStructure, points=None, seed=0,
                       tol=DEFAULT_TOL) -> ResidualReport:
    """Sasakian law for alpha=1, LP-Sasakian laws for alpha=2,3.

    Orientation convention: all three members satisfy grad_X xi = phi X,
    the unique choice compatible with the algebraic cross-relations (a
    structure obeying those with the opposite slope in the alpha=1 sector
    cannot exist: the cross-relations force phi_1 xi_2 = -phi_2 xi_1,
    while grad xi = -phi_1 on a cone model forces phi_1 xi_2 = +phi_2 xi_1).
    The alpha=1 law therefore reads (grad_X phi_1) Y = -g(X,Y) xi_1 + eta_1(Y) X.
    """
    M = S.manifold
    pts = _default_points(M, points, seed)
    nphi = [_nabla_phi(S, a) for a in range(3)]
    rows = []
    for p in pts:
        g = M.metric_at(p)
        phi = _phi_mats(S, p)
        xi = [x.at(M, p) for x in S.xi]
        eta = [e.at(M, p) for e in S.eta]
        worst = 0.0
        scale = 1.0
        for a in range(3):
            dphi = nphi[a].at(M, p)   # dphi[lam, i, j] = (grad_lam phi)^i_j
            scale = max(scale, _max_abs(dphi))
            if a == 0:
                # (grad_X phi1) Y = -g(X,Y) xi1 + eta1(Y) X
                target = (-np.einsum("lj,i->lij", g, xi[a])
                          + np.einsum("j,li->lij", eta[a], np.eye(M.dim)))
            else:
                gphiphi = phi[a].T @ g @ phi[a]
                phi2 = phi[a] @ phi[a]
                # (grad_X phi) Y = g(phiX, phiY) xi + eta(Y) phi^2 X
                target = (np.einsum("lj,i->lij", gphiphi, xi[a])
                          + np.einsum("j,il->lij", eta[a], phi2))
            worst = max(worst, _max_abs(dphi - target))
        rows.append((p, worst, scale))
    return _report("sasakian-laws", rows, tol)


def killing_triple_check(S: MixedThreeStructure, points=None, seed=0,
                         tol=DEFAULT_TOL) -> ResidualReport:
    """Killing property, causal characters, orthogonality, bracket
    relations [xi_a, xi_b] = -2 eps_c xi_c, and phi_a X = grad_X xi_a
    (same orientation convention as sasakian_residuals)."""
    M = S.manifold
    pts = _default_points(M, points, seed)
    sub = {}
    for a in range(3):
        rep = killing_vector_residual(S.xi[a], M, pts, tol=tol)
        sub[f"killing_xi{a+1}"] = rep.max_rel_residual
    brackets = {}
    for a, b, c in _EVEN:
        br = lie_bracket(S.xi[a], S.xi[b], M)
        brackets[(a, b, c)] = br
    nxi = [covariant_derivative(lower_index(S.xi[a], M, 0), M) for a in range(3)]
    rows = []
    for p in pts:
        g = M.metric_at(p)
        ginv = M.inverse_metric_at(p)
        xi = [x.at(M, p) for x in S.xi]
        phi = _phi_mats(S, p)
        worst = max(sub.values())
        for a in range(3):
            worst = max(worst, abs(float(xi[a] @ g @ xi[a]) - EPS[a]))
            for b in range(a + 1, 3):
                worst = max(worst, abs(float(xi[a] @ g @ xi[b])))
        for (a, b, c), br in brackets.items():
            worst = max(worst, _max_abs(br.at(M, p) + 2 * EPS[c] * xi[c]))
        for a in range(3):
            # phi_a X = grad_X xi_a; nxi[a][mu, nu] = grad_mu (xi_a)_nu
            grad = ginv @ nxi[a].at(M, p).T   # (grad_mu xi^i) as [i, mu]
            worst = max(worst, _max_abs(phi[a] - grad))
        rows.append((p, worst, 1.0))
    return _report("killing-triple", rows, tol, extra=sub)


def curvature_characterization(S: MixedThreeStructure, points=None, seed=0,
                               tol=DEFAULT_TOL) -> ResidualReport:
    """R(X, xi_a)Y = g(xi_a, Y) X - g(X, Y) xi_a over the coordinate basis."""
    M = S.manifold
    pts = _default_points(M, points, seed)
    riem = M.riemann_field()
    rows = []
    for p in pts:
        g = M.metric_at(p)
        R = riem.at(M, p)   # R[rho, sig, mu, nu] : R(e_mu, e_nu) e_sig
        worst = 0.0
        for a in range(3):
            xi = S.xi[a].at(M, p)
            eta = g @ xi
            # R(X, xi)Y with X = e_mu, Y = e_sig
            lhs = np.einsum("rsmn,n->rsm", R, xi)
            target = (np.einsum("s,rm->rsm", eta, np.eye(M.dim))
                      - np.einsum("ms,r->rsm", g, xi))
            worst = max(worst, _max_abs(lhs - target))
        rows.append((p, worst, max(1.0, _max_abs(R))))
    return _report("curvature-characterization", rows, tol)


def sectional_curvature_check(S: MixedThreeStructure, points=None, seed=0,
                              tol=DEFAULT_TOL, degeneracy_guard=1e-6) -> ResidualReport:
    """Sectional curvature of nondegenerate planes containing xi_a equals 1."""
    M = S.manifold
    pts = _default_points(M, points, seed)
    riem = M.riemann_field()
    n = M.dim
    rows = []
    skipped = 0
    for p in pts:
        g = M.metric_at(p)
        R = riem.at(M, p)
        Rlow = np.einsum("ra,asmn->rsmn", g, R)   # R_{rho sig mu nu}
        worst = 0.0
        for a in range(3):
            xi = S.xi[a].at(M, p)
            for mu in range(n):
                X = np.zeros(n)
                X[mu] = 1.0
                denom = (float(xi @ g @ xi) * float(X @ g @ X)
                         - float(xi @ g @ X) ** 2)
                if abs(denom) <= degeneracy_guard:
                    skipped += 1
                    continue
                # K = g(R(xi, X) X, xi) / denom = R_{rho sig mu nu} xi^rho X^sig xi^mu X^nu / denom
                num = float(np.einsum("rsmn,r,s,m,n->", Rlow, xi, X, xi, X))
                worst = max(worst, abs(num / denom - 1.0))
        rows.append((p, worst, 1.0))
    return _report("sectional-curvature", rows, tol, extra={"skipped_planes": skipped})


def einstein_check(M: Manifold, lam: float, points=None, seed=0,
                   tol=DEFAULT_TOL) -> ResidualReport:
    """Residual of Ric - lam * g at sampled points."""
    pts = _default_points(M, points, seed)
    ric = M.ricci()
    rows = []
    for p in pts:
        res = ric.at(M, p) - lam * M.metric_at(p)
        rows.append((p, _max_abs(res), max(1.0, _max_abs(M.metric_at(p)))))
    return _report("einstein", rows, tol, extra={"einstein_constant": lam})


# ---------------------------------------------------------------------------
# cone construction

def build_cone(S: MixedThreeStructure, radial: str = "r",
               r_box: tuple[float, float] = (0.5, 3.0)) -> ConeManifold:
    """Metric cone dr^2 + r^2 g with the induced endomorphism triple."""
    M = S.manifold
    if radial in M.chart.coords:
        raise GeometryError(f"radial name {radial!r} clashes with base coordinates")
    r = sp.Symbol(radial)
    n = M.dim
    coords = M.chart.coords + (radial,)
    box = dict(M.chart.box)
    box[radial] = r_box
    chart = Chart(coords, box)
    gc = [[sp.Integer(0)] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(n):
            gc[i][j] = r ** 2 * M.metric[i, j]
    gc[n][n] = sp.Integer(1)
    cone = Manifold(chart, gc, params=M.params,
                    signature=tuple(list(M.signature) + [1]),
                    name=(M.name + "-cone") if M.name else "cone")
    Js = []
    for a in range(3):
        comp = np.zeros((n + 1, n + 1), dtype=object)
        phi = S.phi[a].components
        xi = S.xi[a].components
        eta = S.eta[a].components
        for i in range(n):
            for j in range(n):
                comp[i, j] = phi[i, j]
            comp[n, i] = -eta[i] * r          # J X has Euler-direction part -eta(X) r
            comp[i, n] = xi[i] / r            # J(d_r) = xi / r
        comp[n, n] = sp.Integer(0)
        Js.append(TensorField(comp, "ud"))
    return ConeManifold(S, cone, Js, radial)


def para_hyperkahler_check(C: ConeManifold, points=None, seed=0,
                           tol=DEFAULT_TOL) -> ResidualReport:
    """J1 J2 J3 = -Id, eps-hermiticity, and parallelism of each J."""
    M = C.manifold
    pts = _default_points(M, points, seed)
    nJ = [covariant_derivative(J, M) for J in C.J]
    rows = []
    for p in pts:
        g = M.metric_at(p)
        J = [Ja.at(M, p) for Ja in C.J]
        worst = _max_abs(J[0] @ J[1] @ J[2] + np.eye(M.dim))
        for a in range(3):
            worst = max(worst, _max_abs(J[a].T @ g @ J[a] - EPS[a] * g))
            worst = max(worst, _max_abs(nJ[a].at(M, p)))
        rows.append((p, worst, max(1.0, max(_max_abs(Ja) for Ja in J))))
    return _report("para-hyperkahler", rows, tol)


def reverse_cone(C: ConeManifold) -> MixedThreeStructure:
    """Recover (phi, xi, eta) on the r=1 slice from the cone structure."""
    M = C.manifold
    n = M.dim - 1
    r = sp.Symbol(C.radial)
    base = C.base.manifold
    nJ_xi = []
    for a in range(3):
        # xi_a = J_a(d_r), restricted to r = 1
        comp = [sp.simplify(C.J[a].components[i, n].subs(r, 1)) for i in range(n)]
        nJ_xi.append(vector(comp))
    phis, etas = [], []
    for a in range(3):
        eta_comp = [sp.simplify(sum(base.metric[i, j] * nJ_xi[a].components[j]
                                    for j in range(n))) for i in range(n)]
        etas.append(one_form(eta_comp))
        nxi = covariant_derivative(lower_index(nJ_xi[a], base, 0), base)
        ginv = base.inverse_metric_matrix()
        comp = np.empty((n, n), dtype=object)
        for i in range(n):
            for mu in range(n):
                # phi^i_mu = g^{i nu} grad_mu (xi_a)_nu
                comp[i, mu] = sp.simplify(
                    sum(ginv[i, nu] * nxi.components[mu, nu]
                        for nu in range(n)))
        phis.append(TensorField(comp, "ud"))
    return MixedThreeStructure(base, phis, nJ_xi, etas)


def cone_roundtrip_residual(S: MixedThreeStructure, C: ConeManifold,
                            points=None, seed=0, tol=DEFAULT_TOL) -> ResidualReport:
    """Compare the structure recovered from the cone with the original."""
    R = reverse_cone(C)
    M = S.manifold
    pts = _default_points(M, points, seed)
    rows = []
    for p in pts:
        worst = scale = 0.0
        for a in range(3):
            for orig, back in ((S.phi[a], R.phi[a]), (S.xi[a], R.xi[a]),
                               (S.eta[a], R.eta[a])):
                o, b = orig.at(M, p), back.at(M, p)
                worst = max(worst, _max_abs(o - b))
                scale = max(scale, _max_abs(o))
        rows.append((p, worst, scale))
    return _report("cone-roundtrip", rows, tol)


# ---------------------------------------------------------------------------
# corollaries

def phi_not_killing_witness(S: MixedThreeStructure, points=None, seed=0,
                            threshold=1e-6) -> ResidualReport:
    """Find non-lightlike X orthogonal to xi_a with (grad_X phi_a) X != 0."""
    M = S.manifold
    pts = _default_points(M, points, seed)
    nphi = [_nabla_phi(S, a) for a in range(3)]
    witnesses = []
    min_val = np.inf
    n = M.dim
    worst_point = {}
    for a in range(3):
        found = None
        for p in pts:
            g = M.metric_at(p)
            xi = S.xi[a].at(M, p)
            dphi = nphi[a].at(M, p)
            for mu in range(n):
                X = np.zeros(n)
                X[mu] = 1.0
                # project X g-orthogonally to xi_a (xi_a is non-null)
                X = X - (float(X @ g @ xi) / float(xi @ g @ xi)) * xi
                if abs(float(X @ g @ X)) < 1e-8:
                    continue   # lightlike, excluded by the proposition
                val = _max_abs(np.einsum("lij,l,j->i", dphi, X, X))
                if val > threshold:
                    found = {"alpha": a + 1, "point": dict(p),
                             "direction": mu, "magnitude": val}
                    break
            if found:
                break
        if found is None:
            min_val = 0.0
            worst_point = dict(pts[0])
        else:
            witnesses.append(found)
            min_val = min(min_val, found["magnitude"])
    passed = len(witnesses) == 3
    return ResidualReport("phi-not-killing-witness", threshold, len(pts),
                          float(min_val if passed else 0.0),
                          float(min_val if passed else 0.0),
                          passed, worst_point, extra={"witnesses": witnesses})


def conformal_to_killing_check(S: MixedThreeStructure, X: TensorField,
                               points=None, seed=0, tol=DEFAULT_TOL) -> ResidualReport:
    """On a verified structure, any conformal Killing field must be Killing."""
    M = S.manifold
    pts = _default_points(M, points, seed)
    factors, rep = conformal_killing_factor(X, M, pts, tol=tol)
    is_ckv = rep.passed
    factor_max = max(abs(f) for f in factors)
    passed = is_ckv and factor_max < tol
    status = "killing" if passed else ("not-ckv" if not is_ckv else "ckv-not-killing")
    return ResidualReport("conformal-to-killing", tol, len(pts),
                          factor_max, factor_max, passed, rep.worst_point,
                          extra={"status": status,
                                 "ckv_residual": rep.max_rel_residual})


def wedge_forms(a: TensorField, b: TensorField) -> TensorField:
    """Wedge product with unit-weight alternation: a ^ b = C(p+q,p) Alt(a (x) b)."""
    p, q = a.rank, b.rank
    outer = np.multiply.outer(a.components, b.components)
    factor = sp.binomial(p + q, p)
    comp = factor * antisymmetrize(outer)
    return TensorField(comp, "d" * (p + q), "antisymmetric")


def ky_odd_rank_candidate(S: MixedThreeStructure, alpha: int, k: int) -> TensorField:
    """eta_a wedge (d eta_a)^k, the documented rank-(2k+1) candidate."""
    M = S.manifold
    if not 0 <= k <= 2 * S.sasakian_rank + 1:
        raise GeometryError("k out of range for this structure")
    eta = S.eta[alpha]
    form = eta
    if k:
        deta = exterior_derivative(eta, M)
        for _ in range(k):
            form = wedge_forms(form, deta)
    form = form.map(sp.expand)
    return form


def ky_odd_rank_check(S: MixedThreeStructure, k: int, alpha: int = 0,
                      points=None, seed=0, tol=DEFAULT_TOL) -> ResidualReport:
    form = ky_odd_rank_candidate(S, alpha, k)
    pts = _default_points(S.manifold, points, seed)
    if all(_max_abs(form.at(S.manifold, p)) < 1e-14 for p in pts[:3]):
        raise GeometryError("degenerate (zero) candidate form")
    rep = ky_residual(form, S.manifold, pts, tol=tol)
    rep.extra["rank"] = 2 * k + 1
    rep.extra["alpha"] = alpha + 1
    return rep


# ---------------------------------------------------------------------------
# the pseudo-sphere fixture

def _pseudo_sphere_structure_tensors():
    rho, t, psi = sp.symbols("rho t psi")
    ch, sh = sp.cosh(rho), sp.sinh(rho)
    X = sp.Matrix([ch * sp.cos(t), ch * sp.sin(t), sh * sp.cos(psi), sh * sp.sin(psi)])
    coords = [rho, t, psi]
    E = X.jacobian(coords)
    G = sp.diag(1, 1, -1, -1)
    g = sp.Matrix(3, 3, lambda i, j: sp.trigsimp(sp.expand((E.T * G * E)[i, j])))
    ginv = g.inv()
    J1 = sp.Matrix([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    J2 = sp.Matrix([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    J3 = -J1 * J2
    Js = [J1, J2, J3]

    def project(v):
        w = ginv * E.T * G * v
        return [sp.trigsimp(sp.expand(c)) for c in w]

    xis, etas, phis = [], [], []
    for J in Js:
        xi = project(J * X)
        eta = [sp.trigsimp(sp.expand(sum(g[i, j] * xi[j] for j in range(3))))
               for i in range(3)]
        phi = sp.zeros(3)
        for i in range(3):
            col = project(J * E[:, i] + eta[i] * X)
            for a in range(3):
                phi[a, i] = col[a]
        xis.append(xi)
        etas.append(eta)
        phis.append(phi)
    return g, phis, xis, etas


def build_pseudo_sphere_structure():
    """Catalog entry for the signature-(1,2) unit pseudo-sphere fixture."""
    from .catalog import CatalogEntry

    g, phis, xis, etas = _pseudo_sphere_structure_tensors()
    pi = float(np.pi)
    chart = Chart(("rho", "t", "psi"),
                  {"rho": (0.3, 1.5), "t": (0.1, 2 * pi - 0.1), "psi": (0.1, 2 * pi - 0.1)})
    M = Manifold(chart, g.tolist(), signature=(-1, 1, -1), name="pseudo-sphere")
    S = MixedThreeStructure(
        M,
        [TensorField(np.array(p.tolist(), dtype=object), "ud") for p in phis],
        [vector(x) for x in xis],
        [one_form(e) for e in etas],
    )
    entry = CatalogEntry(name="pseudo-sphere", manifold=M, structure=S)
    for a in range(3):
        entry.vectors[f"xi{a+1}"] = S.xi[a]
        entry.forms[f"eta{a+1}"] = S.eta[a]
    entry.metadata = {
        "einstein_constant": 2,
        "embedding": "unit pseudo-sphere x1^2+x2^2-x3^2-x4^2=1 in R^{2,2}",
    }
    entry.manifest = [
        {"check": "killing-vector", "target": "xi1", "expect_pass": True},
        {"check": "killing-vector", "target": "xi2", "expect_pass": True},
        {"check": "killing-vector", "target": "xi3", "expect_pass": True},
        {"check": "cky", "target": "eta1", "expect_pass": True},
        {"check": "cky", "target": "eta2", "expect_pass": True},
        {"check": "cky", "target": "eta3", "expect_pass": True},
    ]
    return entry
