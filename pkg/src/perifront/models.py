"""Cooperative reaction models in triangular form, the competition-to-
cooperative change of variables, and automated hypothesis checks.

A model has m components with reaction terms

    f_1 = u_1 h_1(x, u),
    f_i = sum_{j<i} a_ij(x) u_j + u_i h_i(x, u),   i >= 2,

where each h_i is an (at most quadratic) polynomial in u with L-periodic
coefficient fields.  The triangular structure is what lets the vector
eigenfunctions be built one component at a time, and the cooperativity of
the off-diagonal Jacobian is what powers every comparison argument.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import PerifrontError
from .grid import (CellGrid, OperatorSpec, PeriodicField, first_derivative,
                   make_cell_grid)
from .eigen import principal_eig_scalar, principal_eig_coupled

__all__ = [
    "PolyH",
    "ReactionModel",
    "CompetitionSpec",
    "TransformedCompetition",
    "HypothesisReport",
    "evaluate_F",
    "evaluate_jacobian",
    "check_hypotheses",
    "competition_steady_states",
    "competition_to_cooperative",
    "inverse_transform",
    "check_competition_assumptions",
    "make_model",
    "make_competition_spec",
]


@dataclass(frozen=True)
class PolyH:
    """One per-capita growth rate h_i(x, u), polynomial of degree <= 2 in u.

    c: (n,) constant part; b: (m, n) linear part; Q: (m, m, n) quadratic
    part (may be None), contributing u^T Q(x) u.
    """

    c: np.ndarray
    b: np.ndarray
    Q: np.ndarray | None = None

    def __call__(self, u: np.ndarray, xidx: np.ndarray) -> np.ndarray:
        """u: (m, npts), xidx: (npts,) cell-node indices -> (npts,)."""
        out = self.c[xidx] + np.einsum("kp,kp->p", self.b[:, xidx], u)
        if self.Q is not None:
            out += np.einsum("kp,klp,lp->p", u, self.Q[:, :, xidx], u)
        return out

    def du(self, k: int, u: np.ndarray, xidx: np.ndarray) -> np.ndarray:
        out = np.broadcast_to(self.b[k, xidx], u.shape[1:]).copy()
        if self.Q is not None:
            Qs = self.Q[k, :, :][:, xidx] + self.Q[:, k, :][:, xidx]
            out += np.einsum("lp,lp->p", Qs, u)
        return out

    def max_abs_du(self, box_lo: float, box_hi: float, samples: int = 3) -> float:
        """max over all nodes, all k, and a u-lattice of |dh/du_k|.

        The derivative is affine in u, so lattice corners realize the max;
        interior samples are kept for symmetry with the generic checks.
        """
        m = self.b.shape[0]
        pts = np.linspace(box_lo, box_hi, samples)
        best = 0.0
        for corner in itertools.product(pts, repeat=m):
            u = np.repeat(np.asarray(corner)[:, None], len(self.c), axis=1)
            for k in range(m):
                best = max(best, float(np.max(np.abs(
                    self.du(k, u, np.arange(len(self.c)))))))
        return best


@dataclass
class ReactionModel:
    """m-component cooperative reaction model on a periodicity cell."""

    cell: CellGrid
    d: np.ndarray              # (m, n) diffusion, > 0
    q: np.ndarray              # (m, n) drift
    couplings: dict            # (i, j) -> (n,) array a_ij, j < i, >= 0
    h: list                    # m PolyH evaluators
    name: str = "custom"

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        m, n = self.d.shape
        if n != self.cell.n or self.q.shape != (m, n) or len(self.h) != m:
            raise PerifrontError("inconsistent model field shapes")
        if m < 2:
            raise PerifrontError("need at least two components")
        if self.d.min() <= 0.0:
            raise PerifrontError("diffusion must be strictly positive")
        for (i, j), a in self.couplings.items():
            if not (0 <= j < i < m):
                raise PerifrontError(f"coupling index ({i},{j}) not lower-triangular")
            if np.asarray(a).min() < 0.0:
                raise PerifrontError(f"coupling a[{i},{j}] must be >= 0")

    @property
    def m(self) -> int:
        return self.d.shape[0]

    def coupling(self, i: int, j: int) -> np.ndarray | None:
        return self.couplings.get((i, j))

    def zeta(self, i: int) -> np.ndarray:
        """zeta_i(x) = h_i(x, 0), the linearized growth rate at zero."""
        return self.h[i].c

    def F(self, u: np.ndarray, xidx: np.ndarray) -> np.ndarray:
        """Reaction term; u: (m, npts) -> (m, npts)."""
        out = np.empty_like(u)
        for i in range(self.m):
            out[i] = u[i] * self.h[i](u, xidx)
            for j in range(i):
                a = self.coupling(i, j)
                if a is not None:
                    out[i] += a[xidx] * u[j]
        return out

    def jacobian(self, u: np.ndarray, xidx: np.ndarray) -> np.ndarray:
        """Pointwise Jacobian dF/du; returns (m, m, npts)."""
        m, npts = u.shape
        J = np.zeros((m, m, npts))
        for i in range(m):
            hi = self.h[i](u, xidx)
            for k in range(m):
                J[i, k] = u[i] * self.h[i].du(k, u, xidx)
                if k == i:
                    J[i, k] += hi
                elif k < i:
                    a = self.coupling(i, k)
                    if a is not None:
                        J[i, k] += a[xidx]
        return J

    def reaction_lipschitz(self, samples: int = 5) -> float:
        """max |dF_i/du_i| over the box lattice; bounds the explicit step."""
        pts = np.linspace(0.0, 1.0, samples)
        xidx = np.arange(self.cell.n)
        best = 0.0
        for corner in itertools.product(pts, repeat=self.m):
            u = np.repeat(np.asarray(corner)[:, None], self.cell.n, axis=1)
            J = self.jacobian(u, xidx)
            for i in range(self.m):
                best = max(best, float(np.max(np.abs(J[i, i]))))
        return best

    def d_field(self, i: int) -> PeriodicField:
        return PeriodicField(self.cell, self.d[i])

    def q_field(self, i: int) -> PeriodicField:
        return PeriodicField(self.cell, self.q[i])


def evaluate_F(model: ReactionModel, x_index, u) -> np.ndarray:
    """Reaction vector F(x_j, u) at a single node."""
    uu = np.asarray(u, dtype=float)[:, None]
    return model.F(uu, np.asarray([x_index]))[:, 0]


def evaluate_jacobian(model: ReactionModel, x_index, u) -> np.ndarray:
    uu = np.asarray(u, dtype=float)[:, None]
    return model.jacobian(uu, np.asarray([x_index]))[:, :, 0]


# ---------------------------------------------------------------------------
# hypothesis reports


@dataclass
class HypothesisEntry:
    verdict: str               # "pass" | "fail" | "not-checkable"
    margin: float | None = None
    witness: object = None
    note: str = ""

    def as_dict(self):
        return {"verdict": self.verdict, "margin": self.margin,
                "witness": repr(self.witness) if self.witness is not None else None,
                "note": self.note}


@dataclass
class HypothesisReport:
    entries: dict = field(default_factory=dict)

    def add(self, name, verdict, margin=None, witness=None, note=""):
        if verdict == "fail" and witness is None:
            raise PerifrontError(f"fail entry {name} requires a witness")
        self.entries[name] = HypothesisEntry(verdict, margin, witness, note)

    def __getitem__(self, name) -> HypothesisEntry:
        return self.entries[name]

    def ok(self, *names) -> bool:
        names = names or tuple(self.entries)
        return all(self.entries[n].verdict == "pass" for n in names
                   if self.entries[n].verdict != "not-checkable")

    def as_dict(self):
        return {k: v.as_dict() for k, v in self.entries.items()}

    def __str__(self):
        lines = []
        for k, v in sorted(self.entries.items()):
            margin = "" if v.margin is None else f"  margin={v.margin:+.6g}"
            lines.append(f"{k:>5}: {v.verdict}{margin}  {v.note}")
        return "\n".join(lines)


def _box_lattice(m: int, samples: int = 5, cap: int = 625):
    pts = np.linspace(0.0, 1.0, samples)
    lattice = list(itertools.product(pts, repeat=m))
    if len(lattice) > cap:
        lattice = lattice[:: len(lattice) // cap + 1]
    return np.asarray(lattice).T  # (m, npts)


def check_hypotheses(model: ReactionModel, e: int = 1,
                     run_h5_heuristic: bool = True) -> HypothesisReport:
    """Evaluate the structural and spectral standing assumptions.

    H1/H2/H3 are sampled pointwise, H4/H6/H8 go through the eigensolvers,
    H7 is tested along the critical linearized front on the region where
    its vector norm is at most one.  H5 is a global dynamical statement:
    reported not-checkable, with a cell-periodic relaxation run as
    heuristic evidence when requested.
    """
    from .dispersion import Dispersion  # local import to avoid a cycle

    rep = HypothesisReport()
    n = model.cell.n
    xidx = np.arange(n)
    m = model.m

    # H1: triangular structure is built in; check the sign conditions
    h1_ok, h1_wit = True, None
    for i in range(1, m):
        zi = model.zeta(i)
        if zi.max() >= 0.0:
            h1_ok, h1_wit = False, ("zeta", i + 1, int(np.argmax(zi)))
            break
        strict = [j for j in range(i)
                  if model.coupling(i, j) is not None
                  and model.coupling(i, j).min() > 0.0]
        if not strict:
            h1_ok, h1_wit = False, ("coupling-row", i + 1)
            break
    margin_h1 = min(
        (-model.zeta(i).max() for i in range(1, m)), default=None)
    rep.add("H1", "pass" if h1_ok else "fail", margin_h1, h1_wit,
            "triangular form, zeta_i < 0 (i>=2), some a_ij > 0")

    # H2: F(x, 1) = 0
    ones = np.ones((m, n))
    f1 = model.F(ones, xidx)
    h2_margin = float(np.max(np.abs(f1)))
    rep.add("H2", "pass" if h2_margin <= 1e-10 else "fail", h2_margin,
            None if h2_margin <= 1e-10 else ("node", int(np.argmax(np.abs(f1).max(axis=0)))),
            "F(x, 1) = 0")

    # H3: cooperativity of the Jacobian on the box lattice
    lattice = _box_lattice(m)
    worst, wit = np.inf, None
    for col in range(lattice.shape[1]):
        u = np.repeat(lattice[:, col][:, None], n, axis=1)
        J = model.jacobian(u, xidx)
        for i in range(m):
            for k in range(m):
                if i == k:
                    continue
                val = float(J[i, k].min())
                if val < worst:
                    worst = val
                    wit = (i + 1, k + 1, tuple(np.round(lattice[:, col], 3)),
                           int(np.argmin(J[i, k])))
    rep.add("H3", "pass" if worst >= -1e-12 else "fail", worst,
            None if worst >= -1e-12 else wit,
            "off-diagonal Jacobian >= 0 on [0,1]^m lattice")

    disp = Dispersion(model, e=e)

    # H4: kappa_1(0) > 0
    k0 = disp.kappa(0, 0.0)
    rep.add("H4", "pass" if k0 > 0.0 else "fail", k0,
            None if k0 > 0.0 else ("kappa1(0)", k0), "kappa_1(0) > 0")

    h6_ok = False
    if k0 > 0.0:
        # H6: gap at the critical tilt
        try:
            _, lam0 = disp.critical_speed()
            gap = disp.spectral_gap(lam0)
            h6_ok = gap > 0.0
            rep.add("H6", "pass" if h6_ok else "fail", gap,
                    None if h6_ok else ("lam", lam0),
                    "kappa_1 > max_j kappa_j at lam_+0")
        except PerifrontError as exc:
            rep.add("H6", "fail", None, ("error", str(exc)))
    else:
        rep.add("H6", "not-checkable", note="needs H4")

    # H7 along the critical linearized front, sampled where |w| <= 1
    if k0 > 0.0 and h6_ok:
        c0, lam0 = disp.critical_speed()
        front = disp.linearized_front(c0, k=1.0)
        phi = front.phi.as_array()
        s_hi = -np.log(front.phi.norm_p()) / lam0
        s_samples = np.linspace(s_hi - 20.0, s_hi, 120)
        worst, wit = np.inf, None
        for s in s_samples:
            w = np.exp(lam0 * s) * phi           # (m, n)
            if w.sum(axis=0).max() > 1.0 + 1e-12:
                continue
            h0 = np.stack([model.h[i](np.zeros((m, n)), xidx)
                           for i in range(m)])
            hw = np.stack([model.h[i](w, xidx) for i in range(m)])
            val = float((h0 - hw).min())
            if val < worst:
                worst = val
                ij = np.unravel_index(np.argmin(h0 - hw), h0.shape)
                wit = (int(ij[0]) + 1, float(s), int(ij[1]))
        rep.add("H7", "pass" if worst >= -1e-10 else "fail", worst,
                None if worst >= -1e-10 else wit,
                "h_i(x, w_c) <= h_i(x, 0) along the critical front")
    else:
        rep.add("H7", "not-checkable", note="needs H4 and H6")

    # H8: coupled Perron at the upper state
    try:
        pair = principal_eig_coupled(model, at="one", e=e)
        mu = pair.value
        rep.add("H8", "pass" if mu < 0.0 else "fail", -mu,
                None if mu < 0.0 else ("mu_minus", mu),
                f"mu_minus = {mu:.6g} with positive eigenfunction")
    except PerifrontError as exc:
        rep.add("H8", "fail", None, ("error", str(exc)))

    # H5: global attraction of 1 over periodic data; asymptotic, so only
    # heuristic evidence from a cell-periodic relaxation run
    if run_h5_heuristic:
        dist = _relax_on_cell(model, u0=0.5, T=80.0)
        rep.add("H5", "not-checkable", dist, None,
                f"heuristic: |u(T) - 1| = {dist:.2e} from homogeneous 0.5 start")
    else:
        rep.add("H5", "not-checkable", note="asymptotic statement")
    return rep


def _relax_on_cell(model: ReactionModel, u0, T: float, dt: float = 0.02,
                   also_state: bool = False):
    """Integrate the model with periodic BCs on one cell (IMEX, coarse)."""
    from .grid import BandedMatrix, assemble_tilted_operator, solve_cyclic_banded

    n = model.cell.n
    xidx = np.arange(n)
    u = np.full((model.m, n), float(u0)) if np.isscalar(u0) else np.array(u0)
    solvers = []
    for i in range(model.m):
        A = assemble_tilted_operator(OperatorSpec(
            d=model.d_field(i), q=model.q_field(i),
            eta=PeriodicField(model.cell, np.zeros(n)), lam=0.0, e=1))
        S = BandedMatrix(-dt * A.sub, 1.0 - dt * A.main, -dt * A.sup, True)
        solvers.append(S)
    steps = int(round(T / dt))
    for _ in range(steps):
        Fu = model.F(u, xidx)
        for i in range(model.m):
            u[i] = solve_cyclic_banded(solvers[i], u[i] + dt * Fu[i])
    dist = float(np.max(np.abs(u - 1.0)))
    return (dist, u) if also_state else dist


# ---------------------------------------------------------------------------
# competition system


@dataclass
class CompetitionSpec:
    """Two-species competition data: growth b_i, self/cross inhibition a_ij,
    diffusion d_i and drift a_i, all L-periodic."""

    cell: CellGrid
    d1: np.ndarray
    d2: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray

    def __post_init__(self):
        for name in ("d1", "d2", "a1", "a2", "b1", "b2",
                     "a11", "a12", "a21", "a22"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim == 0:
                v = np.full(self.cell.n, float(v))
            if v.shape != (self.cell.n,):
                raise PerifrontError(f"{name} has wrong shape")
            setattr(self, name, v)
        if self.d1.min() <= 0 or self.d2.min() <= 0:
            raise PerifrontError("diffusion floors violated")
        for name in ("a11", "a12", "a21", "a22"):
            if getattr(self, name).min() <= 0:
                raise PerifrontError(f"interaction floor violated for {name}")


def _scalar_logistic_steady_state(cell, d, a, b, aii, tol):
    """Positive periodic steady state of u_t = d u'' + a u' + u (b - aii u),
    by time stepping from the constant supersolution max(b)/min(aii)."""
    from .grid import BandedMatrix, assemble_tilted_operator, solve_cyclic_banded

    lam0 = principal_eig_scalar(OperatorSpec(
        d=PeriodicField(cell, d), q=PeriodicField(cell, a),
        eta=PeriodicField(cell, b), lam=0.0, e=1)).value
    if lam0 <= 0.0:
        raise PerifrontError(
            f"lambda_0(d, a, b) = {lam0:.6g} <= 0: no positive steady state")
    dt = min(0.2, 0.2 / max(1.0, float(np.max(np.abs(b)))))
    A = assemble_tilted_operator(OperatorSpec(
        d=PeriodicField(cell, d), q=PeriodicField(cell, a),
        eta=PeriodicField(cell, np.zeros(cell.n)), lam=0.0, e=1))
    S = BandedMatrix(-dt * A.sub, 1.0 - dt * A.main, -dt * A.sup, True)
    u = np.full(cell.n, float(np.max(b) / np.min(aii)))
    for _ in range(int(2e5)):
        f = u * (b - aii * u)
        u_new = solve_cyclic_banded(S, u + dt * f)
        rate = float(np.max(np.abs(u_new - u))) / dt
        u = u_new
        if rate <= tol:
            break
    else:
        raise PerifrontError("steady state iteration did not settle")
    if u.min() <= 0.0:
        raise PerifrontError("steady state lost positivity")
    return u


def competition_steady_states(spec: CompetitionSpec, tol: float = 1e-10):
    """Single-species periodic steady states (u1*, u2*)."""
    u1 = _scalar_logistic_steady_state(
        spec.cell, spec.d1, spec.a1, spec.b1, spec.a11, tol)
    u2 = _scalar_logistic_steady_state(
        spec.cell, spec.d2, spec.a2, spec.b2, spec.a22, tol)
    return (PeriodicField(spec.cell, u1), PeriodicField(spec.cell, u2))


@dataclass
class TransformedCompetition:
    """Cooperative 2-component model obtained from a competition system by
    normalizing species 1 by u1* and reversing species 2 around u2*."""

    spec: CompetitionSpec
    model: ReactionModel
    u1_star: PeriodicField
    u2_star: PeriodicField
    a11s: np.ndarray
    a12s: np.ndarray
    a21s: np.ndarray
    a22s: np.ndarray

    def forward(self, u1, u2):
        """(u1, u2) competition densities -> cooperative state."""
        return (u1 / self.u1_star.values,
                (self.u2_star.values - u2) / self.u2_star.values)

    def inverse(self, v1, v2):
        """Cooperative state -> competition densities."""
        return (v1 * self.u1_star.values, (1.0 - v2) * self.u2_star.values)


def competition_to_cooperative(spec: CompetitionSpec,
                               tol: float = 1e-10) -> TransformedCompetition:
    u1s, u2s = competition_steady_states(spec, tol)
    cell = spec.cell
    n = cell.n
    a11s = spec.a11 * u1s.values
    a12s = spec.a12 * u2s.values
    a21s = spec.a21 * u1s.values
    a22s = spec.a22 * u2s.values

    q1 = spec.a1 + 2.0 * spec.d1 * first_derivative(u1s).values / u1s.values
    q2 = spec.a2 + 2.0 * spec.d2 * first_derivative(u2s).values / u2s.values

    # h1 = a11*(1-u1) - a12*(1-u2),  h2 = a22*(u2-1) - a21*u1
    b1 = np.zeros((2, n)); b1[0] = -a11s; b1[1] = a12s
    b2 = np.zeros((2, n)); b2[0] = -a21s; b2[1] = a22s
    h1 = PolyH(c=a11s - a12s, b=b1)
    h2 = PolyH(c=-a22s, b=b2)
    model = ReactionModel(
        cell=cell,
        d=np.stack([spec.d1, spec.d2]),
        q=np.stack([q1, q2]),
        couplings={(1, 0): a21s},
        h=[h1, h2],
        name="competition-transformed")
    return TransformedCompetition(spec, model, u1s, u2s,
                                  a11s, a12s, a21s, a22s)


def inverse_transform(tc: TransformedCompetition, coop_state: np.ndarray,
                      xidx=None) -> np.ndarray:
    """Map a cooperative state array (2, npts) back to competition densities.

    xidx gives the cell-node index of each point (identity on the cell)."""
    v1, v2 = coop_state[0], coop_state[1]
    if xidx is None:
        xidx = np.arange(v1.shape[-1])
    u1 = v1 * tc.u1_star.values[xidx]
    u2 = (1.0 - v2) * tc.u2_star.values[xidx]
    return np.stack([u1, u2])


def check_competition_assumptions(tc: TransformedCompetition, e: int = 1,
                                  run_a2_heuristic: bool = True) -> HypothesisReport:
    """Check (A1) and (A3)-(A6); (A2) is reported not-checkable with a
    heuristic sweep of periodic initial data."""
    from .dispersion import Dispersion, boundary_speeds_A6

    spec, cell = tc.spec, tc.spec.cell
    rep = HypothesisReport()

    def lam0(d, q, b):
        return principal_eig_scalar(OperatorSpec(
            d=PeriodicField(cell, d), q=PeriodicField(cell, q),
            eta=PeriodicField(cell, b), lam=0.0, e=e)).value

    l1 = lam0(spec.d1, spec.a1, spec.b1)
    l2 = lam0(spec.d2, spec.a2, spec.b2)
    l3 = lam0(spec.d1, spec.a1, spec.b1 - spec.a12 * tc.u2_star.values)
    a1_margin = min(l1, l2, l3)
    rep.add("A1", "pass" if a1_margin > 0.0 else "fail", a1_margin,
            None if a1_margin > 0.0 else ("lambda0s", (l1, l2, l3)),
            "both species viable alone; (0, u2*) invadable")

    # A3 pointwise
    m1 = spec.a11 * tc.u1_star.values - spec.a12 * tc.u2_star.values
    m2 = spec.a22 * tc.u2_star.values - spec.a21 * tc.u1_star.values
    margin = min(float(m1.min()), float(m2.min()))
    rep.add("A3", "pass" if margin > 0.0 else "fail", margin,
            None if margin > 0.0 else
            ("node", int(np.argmin(np.minimum(m1, m2)))),
            "a11 u1* > a12 u2* and a22 u2* > a21 u1*")

    disp = Dispersion(tc.model, e=e)
    try:
        c0, lam_p0 = disp.critical_speed()
        gap = disp.spectral_gap(lam_p0)
        rep.add("A4", "pass" if gap > 0.0 else "fail", gap,
                None if gap > 0.0 else ("lam", lam_p0),
                "kappa gap of the transformed curves at lam_+0")
        # A5 on a small c-grid
        worst, wit = np.inf, None
        for fac in (1.0, 1.25, 1.5, 2.0):
            c = fac * c0
            phi = disp.cascade(disp.lambda_c(c)).as_array()
            ratio = (tc.u1_star.values * phi[0]) / (tc.u2_star.values * phi[1])
            bound = np.maximum(spec.a12 / spec.a11, spec.a22 / spec.a21)
            val = float((ratio - bound).min())
            if val < worst:
                worst = val
                wit = (fac, int(np.argmin(ratio - bound)))
        rep.add("A5", "pass" if worst >= 0.0 else "fail", worst,
                None if worst >= 0.0 else wit,
                "u1* phi1^c / (u2* phi2^c) dominates a12/a11, a22/a21")
    except PerifrontError as exc:
        rep.add("A4", "fail", None, ("error", str(exc)))
        rep.add("A5", "not-checkable", note="needs A4")

    c_minus, c_plus = boundary_speeds_A6(
        cell, spec.d1, tc.model.q[0], tc.a11s,
        spec.d2, tc.model.q[1], tc.a22s, e=e)
    rep.add("A6", "pass" if c_minus + c_plus > 0.0 else "fail",
            c_minus + c_plus,
            None if c_minus + c_plus > 0.0 else ("speeds", (c_minus, c_plus)),
            f"c_nu- + c_nu+ = {c_minus:.6g} + {c_plus:.6g}")

    if run_a2_heuristic:
        dist, ustate = _relax_on_cell(tc.model, u0=0.5, T=80.0, also_state=True)
        interior = bool(np.all(ustate > 1e-3) and np.all(ustate < 1 - 1e-3))
        rep.add("A2", "not-checkable", dist, None,
                "heuristic: interior periodic data "
                + ("settled at an interior state (coexistence suspected)"
                   if interior and dist > 1e-2 else
                   f"approached a boundary state, |u(T)-1| = {dist:.2e}"))
    else:
        rep.add("A2", "not-checkable", note="nonexistence statement")
    return rep


# ---------------------------------------------------------------------------
# built-in model library


def _const_model_fields(cell, m):
    n = cell.n
    return np.ones((m, n)), np.zeros((m, n))


def make_model(name: str, cell: CellGrid | None = None, **params) -> ReactionModel:
    """Built-in models.

    constant2      two components, closed-form dispersion: zeta1 = 1,
                   zeta2 = -1, coupling 0.3; passes H1-H8.
    periodic2      same reaction, periodic diffusion/drift shared by both
                   components (so the curve gap stays exactly 2).
    chain-m        m-component chain with nearest-neighbor coupling.
    competition-const   symmetric weak-competition constants (the closed-form
                   margin benchmark for A1, A3-A6).
    competition-strong  asymmetric constants for which exclusion of species 2
                   (hence H8 for the transformed model) genuinely holds.
    """
    if name in ("constant2", "periodic2"):
        cell = cell or make_cell_grid(1.0, 64)
        n = cell.n
        if name == "constant2":
            d = np.ones((2, n)); q = np.zeros((2, n))
        else:
            amp = params.get("amp", 0.25)
            qamp = params.get("qamp", 0.15)
            dvals = 1.0 + amp * np.cos(2 * np.pi * cell.x / cell.L)
            qvals = qamp * np.sin(2 * np.pi * cell.x / cell.L)
            d = np.stack([dvals, dvals]); q = np.stack([qvals, qvals])
        # zeta1 = 1, zeta2 = -1, coupling 0.3; the quadratic terms keep
        # h_2 nonincreasing along the front ray while the state 1 stays
        # linearly stable and no interior equilibrium appears
        g = params.get("g", 0.3)
        b1 = np.zeros((2, n)); b1[0] = -(1.0 + g); b1[1] = g
        h1 = PolyH(c=np.ones(n), b=b1)
        b2 = np.zeros((2, n)); b2[0] = -0.31; b2[1] = 2.0
        Q2 = np.zeros((2, 2, n)); Q2[0, 1] = 0.17; Q2[1, 1] = -1.16
        h2 = PolyH(c=-np.ones(n), b=b2, Q=Q2)
        return ReactionModel(cell, d, q, {(1, 0): np.full(n, 0.3)},
                             [h1, h2], name=name)

    if name == "custom2":
        cell = cell or make_cell_grid(params.get("L", 1.0),
                                      params.get("n", 64))
        n = cell.n
        spec = lambda key, default: PeriodicField.from_spec(
            cell, params.get(key, default)).values
        d = np.stack([spec("d1", 1.0), spec("d2", 1.0)])
        q = np.stack([spec("q1", 0.0), spec("q2", 0.0)])
        zeta1 = spec("zeta1", 1.0)
        zeta2 = spec("zeta2", -1.0)
        # the default coupling dominates |zeta2| so that h2 is nonincreasing
        # in u2 (h_i(x, w) <= h_i(x, 0) along fronts) and the upper state
        # is linearly stable; weaker couplings are allowed and the
        # hypothesis report will say what breaks
        a21 = spec("a21", 1.2)
        if zeta1.min() <= 0 or zeta2.max() >= 0 or a21.min() <= 0:
            raise PerifrontError(
                "custom2 needs zeta1 > 0, zeta2 < 0 and a21 > 0")
        # KPP family with F(x, 1) = 0 pointwise for arbitrary fields:
        # h1 = zeta1 (1 - u1), h2 = zeta2 + (-zeta2 - a21) u2
        b1 = np.zeros((2, n)); b1[0] = -zeta1
        b2 = np.zeros((2, n)); b2[1] = -zeta2 - a21
        return ReactionModel(cell, d, q, {(1, 0): a21},
                             [PolyH(c=zeta1, b=b1), PolyH(c=zeta2, b=b2)],
                             name="custom2")

    if name in ("chain-m", "chain3"):
        m = int(params.get("m", 3))
        cell = cell or make_cell_grid(1.0, 64)
        n = cell.n
        d, q = _const_model_fields(cell, m)
        a = params.get("a", 1.2)
        hs = []
        couplings = {}
        for i in range(m):
            b = np.zeros((m, n))
            if i == 0:
                b[0] = -1.0
                hs.append(PolyH(c=np.ones(n), b=b))
            else:
                b[i] = 1.0 - a        # h_i = -(1 - u_i) - a u_i
                hs.append(PolyH(c=-np.ones(n), b=b))
                couplings[(i, i - 1)] = np.full(n, a)
        return ReactionModel(cell, d, q, couplings, hs, name=name)

    raise PerifrontError(f"unknown model name: {name!r}")


def make_competition_spec(name: str, cell: CellGrid | None = None,
                          **params) -> CompetitionSpec:
    cell = cell or make_cell_grid(1.0, 64)
    n = cell.n
    one = np.ones(n)
    zero = np.zeros(n)
    if name == "competition-const":
        return CompetitionSpec(cell, one, one, zero, zero, one, one,
                               one, 0.3 * one, 0.3 * one, one)
    if name == "competition-strong":
        return CompetitionSpec(cell, one, one, zero, zero, one, one,
                               one, 0.3 * one, 1.5 * one, one)
    if name == "competition-periodic":
        b1 = 1.0 + 0.3 * np.cos(2 * np.pi * cell.x / cell.L)
        return CompetitionSpec(cell, one, one, zero, zero, b1, one,
                               one, 0.3 * one, 1.5 * one, one)
    raise PerifrontError(f"unknown competition spec: {name!r}")
