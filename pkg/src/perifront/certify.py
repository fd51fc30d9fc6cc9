"""Closed-form sub/supersolutions with their parameter recipes, and the
numerical verification of their defining differential inequalities.

Each builder assembles the candidate exactly as the comparison argument
prescribes: the supercritical subsolution subtracts a faster-decaying
eigen-mode from the front mode, the critical one carries the extra |s|
factor and the lambda-derivative of the eigenfunction, the supersolutions
clip the linearized front at 1, and the stability sandwich dresses a
numerically extracted profile with an exponentially damped corrector that
blends the tail mode into the stable-state eigenfunction.

residual_sign_check evaluates N_i = du_i/dt - d_i Lap u_i - q_i grad u_i
- f_i(x, u) on a (t, x) lattice by finite differences, normalizes by the
candidate's natural amplitude, and issues a verdict with an explicit
discretization allowance: sign conditions are checked, never assumed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationError, PerifrontError
from .eigen import principal_eig_coupled

__all__ = [
    "CandidateSolution",
    "BoundaryCheck",
    "CertReport",
    "build_sub_supercritical",
    "build_sub_critical",
    "build_super_linearized",
    "build_super_linearized_critical",
    "build_stability_sandwich",
    "find_sandwich_seed",
    "residual_sign_check",
    "compute_varrho",
    "smoothstep_cutoff",
]


@dataclass(frozen=True)
class BoundaryCheck:
    name: str
    margin: float               # >= 0 means satisfied
    witness: object = None


@dataclass
class CandidateSolution:
    kind: str                   # sub_* must have N <= 0, super_* N >= 0
    sense: str                  # "sub" | "super"
    params: dict
    s_region: tuple             # (s_min, s_max) where the inequality is claimed
    evaluator: object           # callable (t, x array) -> (m, len(x))
    scale: object               # callable s -> amplitude normalization
    constraints: list = field(default_factory=list)
    bare_evaluator: object = None   # profile part alone, for defect measurement
    bare_region: tuple = None       # argument range the dressed evaluator reads
    t_region: tuple = (0.5, 3.0)
    # profile-backed candidates supply the co-moving time derivative
    # analytically instead of leaving it to a finite difference in t
    dudt_evaluator: object = None
    bare_dudt_evaluator: object = None

    def __call__(self, t, x):
        return self.evaluator(t, x)


@dataclass
class CertReport:
    kind: str
    params: dict
    margins: np.ndarray          # per component, normalized
    boundary: list
    allowance: float
    verdict: bool
    witness: object
    profile_defect: float = 0.0

    def as_dict(self):
        return {
            "kind": self.kind,
            "params": {k: (float(v) if np.isscalar(v) else repr(v))
                       for k, v in self.params.items()},
            "margins": [float(v) for v in self.margins],
            "boundary": [{"name": b.name, "margin": float(b.margin)}
                         for b in self.boundary],
            "allowance": float(self.allowance),
            "profile_defect": float(self.profile_defect),
            "verdict": "pass" if self.verdict else "fail",
            "witness": repr(self.witness) if self.witness is not None else None,
        }


# ---------------------------------------------------------------------------
# shared helpers


def _phi_bounds(phi):
    arr = phi.as_array()
    return float(arr.max()), float(arr.min())


def _gamma0(model, box: float) -> float:
    """max |dh_i/du_j| over all components and the symmetric box."""
    return max(h.max_abs_du(-box, box) for h in model.h)


def _periodic_index(x: np.ndarray, cell) -> np.ndarray:
    return np.rint(x / cell.h).astype(int) % cell.n


def smoothstep_cutoff(s_lo: float, s_hi: float, with_prime: bool = False):
    """Quintic cutoff: 1 left of s_lo, 0 right of s_hi, with
    |chi'| + |chi''| <= 1 verified numerically for the chosen width."""
    w = s_hi - s_lo

    def chi(s):
        y = np.clip((np.asarray(s, dtype=float) - s_lo) / w, 0.0, 1.0)
        return 1.0 - (6 * y**5 - 15 * y**4 + 10 * y**3)

    def chi_prime(s):
        s = np.asarray(s, dtype=float)
        y = np.clip((s - s_lo) / w, 0.0, 1.0)
        out = -(30 * y**4 - 60 * y**3 + 30 * y**2) / w
        out[(s <= s_lo) | (s >= s_hi)] = 0.0
        return out

    ss = np.linspace(s_lo, s_hi, 2001)
    y = (ss - s_lo) / w
    d1 = np.abs(30 * y**4 - 60 * y**3 + 30 * y**2) / w
    d2 = np.abs(120 * y**3 - 180 * y**2 + 60 * y) / w**2
    bound = float(np.max(d1 + d2))
    if bound > 1.0:
        raise CertificationError(
            f"cutoff width {w} too narrow: |chi'|+|chi''| = {bound:.3f} > 1")
    return (chi, chi_prime) if with_prime else chi


# ---------------------------------------------------------------------------
# supercritical subsolution


def build_sub_supercritical(model, disp, c: float, delta1: float,
                            delta2: float) -> CandidateSolution:
    """Subsolution delta * e^{lam_c s} (Phi_c - n0 e^{eps s} Phi_eps) on
    s <= s0, with the recipe for s*, s0, n0 driving all constants."""
    if not (0.0 < delta2 <= delta1):
        raise CertificationError("need 0 < delta2 <= delta1")
    c0, lam0 = disp.critical_speed()
    if c <= c0 + 1e-12:
        raise CertificationError("supercritical construction needs c > c_+0")
    lam_c = disp.lambda_c(c)

    eps = disp.epsilon_rule(c)
    for _ in range(20):
        sigma_eps = disp.kappa(0, lam_c + eps) - c * (lam_c + eps)
        if sigma_eps < 0.0:
            break
        eps *= 0.5
    else:
        raise CertificationError("could not find eps with sigma_eps < 0")

    phi_c = disp.cascade(lam_c)
    phi_e = disp.cascade(lam_c + eps)
    M_c, m_c = _phi_bounds(phi_c)
    M_e, m_e = _phi_bounds(phi_e)
    # enlarged ratio so that theta_eff * phi_eps dominates phi_c pointwise,
    # making the s0-boundary value nonpositive for any normalization
    theta_eff = max(M_e, M_c) / m_e
    gamma0 = _gamma0(model, model.m * theta_eff)
    norm_c = phi_c.norm_p()
    norm_e = phi_e.norm_p()

    s_star = min(
        math.log(abs(sigma_eps) * m_e
                 / (gamma0 * (1 + theta_eff) ** 2 * (M_c + M_e)
                    * (norm_c + norm_e))) / (lam_c - eps),
        -1.0)
    s0 = min(s_star,
             -math.log(delta1 * M_c) / lam_c,
             math.log(theta_eff / delta1) / eps)
    n0 = theta_eff * math.exp(-eps * s0)

    arr_c = phi_c.as_array()
    arr_e = phi_e.as_array()
    cell = model.cell

    def evaluator(t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        s = c * t - x
        out = np.empty((model.m, len(x)))
        grow = np.exp(lam_c * s)
        pert = n0 * np.exp(eps * s)
        out[0] = delta1 * grow * (arr_c[0, idx] - pert * arr_e[0, idx])
        for i in range(1, model.m):
            out[i] = delta2 * grow * (
                arr_c[i, idx] - (n0 * delta1 / delta2)
                * np.exp(eps * s) * arr_e[i, idx])
        return out

    # boundary conditions of the comparison argument, checked numerically
    pert0 = n0 * math.exp(eps * s0)
    bvals1 = delta1 * math.exp(lam_c * s0) * (arr_c[0] - pert0 * arr_e[0])
    bmargins = [-(bvals1.max())]
    for i in range(1, model.m):
        bv = delta2 * math.exp(lam_c * s0) * (
            arr_c[i] - (n0 * delta1 / delta2) * math.exp(eps * s0) * arr_e[i])
        bmargins.append(-(bv.max()))
    scale0 = delta1 * math.exp(lam_c * s0)
    constraints = [
        BoundaryCheck("value_at_s0_nonpositive", min(bmargins) / scale0),
        BoundaryCheck("sup_below_one", 1.0 - delta1 * math.exp(lam_c * s0) * M_c),
    ]

    return CandidateSolution(
        kind="sub_supercritical", sense="sub",
        params=dict(c=c, lam_c=lam_c, eps=eps, sigma_eps=sigma_eps,
                    delta1=delta1, delta2=delta2, s_star=s_star, s0=s0,
                    n0=n0, gamma0=gamma0, theta=theta_eff),
        s_region=(s0 - 30.0, s0),
        evaluator=evaluator,
        scale=lambda s: delta1 * np.exp(lam_c * np.asarray(s)),
        constraints=constraints)


# ---------------------------------------------------------------------------
# critical subsolution


def _pick_eps_star(disp, cap: float | None = None) -> tuple:
    """Largest eps* of the form lam*/2**k with a positive curve gap at
    lam* + eps* and a negative sigma* = c*(lam*+eps*) - kappa_1(lam*+eps*)."""
    c0, lam0 = disp.critical_speed()
    eps = lam0 / 4.0
    if cap is not None:
        eps = min(eps, cap)
    for _ in range(30):
        try:
            gap_ok = disp.spectral_gap(lam0 + eps) > 0.0
        except PerifrontError:
            gap_ok = False
        sigma = c0 * (lam0 + eps) - disp.kappa(0, lam0 + eps)
        if gap_ok and sigma < 0.0:
            return eps, sigma
        eps *= 0.5
    raise CertificationError("no admissible eps* found")


def build_sub_critical(model, disp, delta1: float, delta2: float) -> CandidateSolution:
    """Critical subsolution with the |s| factor and the eigenfunction
    lambda-derivative, valid on s <= s0."""
    if not (0.0 < delta2 <= delta1):
        raise CertificationError("need 0 < delta2 <= delta1")
    c0, lam0 = disp.critical_speed()
    eps_s, sigma_s = _pick_eps_star(disp)

    phi_s = disp.cascade(lam0)
    phi_d = disp.cascade_derivative(lam0)
    phi_e = disp.cascade(lam0 + eps_s)
    M_s, m_s = _phi_bounds(phi_s)
    M_e, m_e = _phi_bounds(phi_e)
    M_d = float(np.max(np.abs(phi_d.as_array())))
    gamma0 = _gamma0(model, 4.0 / 3.0)
    norm_s = phi_s.norm_p()

    a = lam0 - eps_s
    # largest s <= -1 with 2 ln|s| + a s / 2 <= 0 for every point to the left
    s_hat = -1.0
    while 2.0 * math.log(abs(s_hat)) + 0.5 * a * s_hat > 0.0:
        s_hat *= 2.0
        if s_hat < -1e8:
            raise CertificationError("log-versus-exponential balance failed")
    s_hat = min(s_hat,
                2.0 / a * math.log(abs(sigma_s) * m_e
                                   / (36.0 * gamma0 * M_s * norm_s)))
    s_star = min(-1.0, -1.0 / lam0, -M_d / m_s, s_hat)

    s0 = s_star
    while delta1 * 3.0 * abs(s0) * M_s * math.exp(lam0 * s0) > 1.0:
        s0 -= 1.0
    s0 = min(s0, math.log(m_s / (delta1 * M_e)) / eps_s)
    m0 = 3.0 * abs(s0)
    n0 = math.exp(-eps_s * s0) * m_s / M_e

    arr_s = phi_s.as_array()
    arr_d = phi_d.as_array()
    arr_e = phi_e.as_array()
    cell = model.cell

    def component(i, s, idx):
        dd = delta1 if i == 0 else delta2
        m0_i = m0 if i == 0 else m0 * delta1 / delta2
        n0_i = n0 if i == 0 else n0 * delta1 / delta2
        return dd * np.exp(lam0 * s) * (
            np.abs(s) * arr_s[i, idx] - m0_i * arr_s[i, idx]
            - arr_d[i, idx] + n0_i * np.exp(eps_s * s) * arr_e[i, idx])

    def evaluator(t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        s = c0 * t - x
        return np.stack([component(i, s, idx) for i in range(model.m)])

    bvals = [component(i, np.full(cell.n, s0), np.arange(cell.n)).max()
             for i in range(model.m)]
    scale0 = delta1 * (1.0 + abs(s0)) * math.exp(lam0 * s0)
    constraints = [
        BoundaryCheck("value_at_s0_nonpositive", -max(bvals) / scale0),
        BoundaryCheck("sup_below_one",
                      1.0 - 3.0 * delta1 * abs(s0) * math.exp(lam0 * s0) * M_s),
    ]

    return CandidateSolution(
        kind="sub_critical", sense="sub",
        params=dict(c=c0, lam_star=lam0, eps_star=eps_s, sigma_star=sigma_s,
                    delta1=delta1, delta2=delta2, s_hat=s_hat, s_star=s_star,
                    s0=s0, m0=m0, n0=n0, gamma0=gamma0),
        s_region=(s0 - 30.0, s0),
        evaluator=evaluator,
        scale=lambda s: delta1 * (1.0 + np.abs(np.asarray(s)))
        * np.exp(lam0 * np.asarray(s)),
        constraints=constraints)


# ---------------------------------------------------------------------------
# supersolutions from the linearized system


def build_super_linearized(model, disp, c: float, k: float) -> CandidateSolution:
    """min{k e^{lam_c s} Phi_c, 1}: a supersolution wherever the growth-rate
    comparison h_i(x, w) <= h_i(x, 0) holds along the front mode."""
    if k <= 0.0:
        raise CertificationError("k must be positive")
    lam_c = disp.lambda_c(c)
    phi = disp.cascade(lam_c)
    arr = phi.as_array()
    cell = model.cell

    # the KPP-type property along this mode, with its measured margin
    margin = _h7_margin_along(model, arr, lam_c)
    if margin < -1e-10:
        raise CertificationError(
            f"h_i(x, w_c) <= h_i(x, 0) fails along the mode (margin {margin:.3e})")

    s_sat = -math.log(k * float(arr.max())) / lam_c

    def evaluator(t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        s = c * t - x
        w = k * np.exp(lam_c * s)[None, :] * arr[:, idx]
        return np.minimum(w, 1.0)

    return CandidateSolution(
        kind="super_linearized", sense="super",
        params=dict(c=c, lam_c=lam_c, k=k, s_sat=s_sat, h7_margin=margin),
        s_region=(s_sat - 30.0, s_sat),
        evaluator=evaluator,
        scale=lambda s: np.minimum(k * np.exp(lam_c * np.asarray(s)), 1.0),
        constraints=[BoundaryCheck("kpp_along_mode", margin)])


def _h7_margin_along(model, arr, lam):
    n = model.cell.n
    xidx = np.arange(n)
    zero = np.zeros((model.m, n))
    h0 = np.stack([model.h[i](zero, xidx) for i in range(model.m)])
    worst = np.inf
    norm = float(arr.sum(axis=0).max())
    s_hi = -math.log(norm) / lam
    for s in np.linspace(s_hi - 20.0, s_hi, 80):
        w = np.exp(lam * s) * arr
        hw = np.stack([model.h[i](w, xidx) for i in range(model.m)])
        worst = min(worst, float((h0 - hw).min()))
    return worst


def build_super_linearized_critical(model, disp, k: float, n_param: float,
                                    s_ceiling: float | None = None) -> CandidateSolution:
    """Critical supersolution k e^{lam* s} ((|s| + n) Phi* - Phi*'), valid
    and positive on s <= s0 <= s* = min{-1, n - 1/lam* - M*(1)/m*}."""
    if k <= 0.0 or n_param <= 0.0:
        raise CertificationError("k and n must be positive")
    c0, lam0 = disp.critical_speed()
    phi_s = disp.cascade(lam0)
    phi_d = disp.cascade_derivative(lam0)
    M_s, m_s = _phi_bounds(phi_s)
    M_d = float(np.max(np.abs(phi_d.as_array())))
    s_star = min(-1.0, n_param - 1.0 / lam0 - M_d / m_s)
    s0 = s_star if s_ceiling is None else min(s_ceiling, s_star)
    k_star = math.exp(-2.0 * lam0 * s0) / ((2.0 * abs(s0) + n_param) * m_s - M_d)

    margin = _h7_margin_along(model, phi_s.as_array(), lam0)
    if margin < -1e-10:
        raise CertificationError(
            f"h_i(x, w_c) <= h_i(x, 0) fails along the critical mode "
            f"(margin {margin:.3e})")

    arr_s = phi_s.as_array()
    arr_d = phi_d.as_array()
    cell = model.cell

    def raw(t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        s = c0 * t - x
        core = ((np.abs(s) + n_param)[None, :] * arr_s[:, idx] - arr_d[:, idx])
        return k * np.exp(lam0 * s)[None, :] * core

    def evaluator(t, x):
        return np.minimum(raw(t, x), 1.0)

    # positivity of the unclipped profile over the declared region
    pos_margin = np.inf
    for s in np.linspace(s0 - 30.0, s0, 60):
        core = (abs(s) + n_param) * arr_s - arr_d
        pos_margin = min(pos_margin, float(core.min()))

    return CandidateSolution(
        kind="super_linearized_critical", sense="super",
        params=dict(c=c0, lam_star=lam0, k=k, n=n_param, s_star=s_star,
                    s0=s0, k_star=k_star, h7_margin=margin),
        s_region=(s0 - 30.0, s0),
        evaluator=evaluator,
        scale=lambda s: k * (1.0 + np.abs(np.asarray(s)))
        * np.exp(lam0 * np.asarray(s)),
        constraints=[BoundaryCheck("positive_on_region", pos_margin),
                     BoundaryCheck("kpp_along_mode", margin)])


# ---------------------------------------------------------------------------
# stability sandwich around a numerical profile


def build_stability_sandwich(model, disp, profile, sign: str, delta: float,
                             sigma: float | None = None, s0: float = 0.0,
                             psi_pair=None, s_bar: float = 2.0,
                             chi_width: float = 4.0,
                             z_scan_max: float = 40.0,
                             smooth_passes: int = 2) -> CandidateSolution:
    """Profile-backed sandwich U(x, s0 +/- sigma(1-e^{-beta t})) +/- delta
    xi e^{-beta t}; the shift z0 inside the corrector is found by scanning
    until the near-one comparison inequality holds with margin delta/2.

    The profile is lightly smoothed along s and only its solidly-occupied
    range is used, so the finite-difference residual sees the front rather
    than bin-level roughness.
    """
    if sign not in ("lower", "upper"):
        raise CertificationError("sign must be 'lower' or 'upper'")
    if smooth_passes > 0:
        profile = profile.smoothed(smooth_passes)
    c = profile.c
    c0, lam0 = disp.critical_speed()
    critical = abs(c - c0) <= 1e-10

    psi_pair = psi_pair or principal_eig_coupled(model, at="one")
    mu = psi_pair.value
    if mu >= 0.0:
        raise CertificationError(
            f"upper state not linearly stable (mu = {mu:.4g}); "
            "the sandwich construction needs a negative coupled eigenvalue")
    psi = np.stack([v.values for v in psi_pair.vectors])
    delta_m = float((1.0 / psi).min(axis=1).min())
    delta_M = float((1.0 / psi).max(axis=1).max())
    if not (0.0 < delta <= delta_m):
        raise CertificationError(f"delta must lie in (0, {delta_m:.4g}]")

    if critical:
        eps, sig = _pick_eps_star(disp, cap=None)
        for _ in range(30):
            if abs(sig) <= abs(mu) / 2.0:
                break
            eps *= 0.5
            sig = c0 * (lam0 + eps) - disp.kappa(0, lam0 + eps)
        beta = abs(sig)
        lam_c = lam0
        arr_s = disp.cascade(lam0).as_array()
        arr_e = disp.cascade(lam0 + eps).as_array()
    else:
        lam_c = disp.lambda_c(c)
        eps = disp.epsilon_rule(c)
        for _ in range(30):
            sig = disp.kappa(0, lam_c + eps) - c * (lam_c + eps)
            if sig < 0.0 and abs(sig) <= abs(mu):
                break
            eps *= 0.5
        beta = abs(sig) / 2.0
        arr_e = disp.cascade(lam_c + eps).as_array()
        arr_s = None

    if sigma is None:
        sigma = 1.0 / beta
    if sigma * beta < 1.0 - 1e-12:
        raise CertificationError("need sigma >= 1/beta")

    chi, chi_p = smoothstep_cutoff(s_bar - chi_width, s_bar, with_prime=True)
    cell = model.cell

    def tail_and_slope(idx, s):
        if critical:
            ea = np.exp(lam_c * s)[None, :]
            eb = np.exp((lam_c + eps) * s)[None, :]
            T = ea * arr_s[:, idx] - eb * arr_e[:, idx]
            Ts = lam_c * ea * arr_s[:, idx] - (lam_c + eps) * eb * arr_e[:, idx]
        else:
            T = np.exp((lam_c + eps) * s)[None, :] * arr_e[:, idx]
            Ts = (lam_c + eps) * T
        return T, Ts

    def xi(idx, s):
        """Corrector field at cell nodes idx, positions s: (m, len(s))."""
        cs = chi(s)
        T, _ = tail_and_slope(idx, s)
        return cs[None, :] * T + (1.0 - cs)[None, :] * psi[:, idx]

    def xi_s(idx, s):
        cs = chi(s)
        cp = chi_p(s)
        T, Ts = tail_and_slope(idx, s)
        return cp[None, :] * (T - psi[:, idx]) + cs[None, :] * Ts

    # z0 scan: U(x, s) - delta xi(x, s + z0) - 1 <= -(delta/2) Psi(x)
    scan_s = np.arange(profile.s[0] - 10.0, profile.s[-1] + 10.0, cell.h)
    all_idx = np.arange(cell.n)
    z0 = None
    for z in np.arange(0.0, z_scan_max, cell.h):
        ok = True
        for r in range(cell.n):
            idx = np.full(len(scan_s), r)
            Uv = profile.eval(idx, scan_s, clamp=True)
            lhs = (Uv - delta * xi(idx, scan_s + z) - 1.0) / psi[:, r][:, None]
            if float(lhs.max()) > -delta / 2.0:
                ok = False
                break
        if ok:
            z0 = float(z)
            break
    if z0 is None:
        raise CertificationError(
            f"no corrector shift z0 found in [0, {z_scan_max}]: profile "
            "defects too large or delta too big")

    sgn = -1.0 if sign == "lower" else +1.0

    def shifted_s(t, x):
        return c * t - x + s0 + sgn * sigma * (1.0 - np.exp(-beta * t))

    def evaluator(t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        sh = shifted_s(t, x)
        base = profile.eval(idx, sh, clamp=True)
        corr = delta * xi(idx, sh + z0) * math.exp(-beta * t)
        return base + sgn * corr

    def dudt(t, x):
        # co-moving identity: the time derivative rides on dU/ds, with the
        # wide-stencil slope so bin roughness does not leak in
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        sh = shifted_s(t, x)
        rate = c + sgn * sigma * beta * math.exp(-beta * t)
        ebt = math.exp(-beta * t)
        out = rate * profile.ds(idx, sh, span=4)
        out += sgn * delta * ebt * (rate * xi_s(idx, sh + z0)
                                    - beta * xi(idx, sh + z0))
        return out

    def bare(t, x):
        # static profile, no shift: measures the profile's own PDE defect
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        return profile.eval(idx, c * t - x + s0, clamp=True)

    def bare_dudt(t, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = _periodic_index(x, cell)
        return c * profile.ds(idx, c * t - x + s0, span=4)

    # informational delta_c estimate from the profile's interior slope
    M_win = max(abs(s_bar - chi_width), abs(s_bar)) + 2.0
    alpha = profile.min_slope(-M_win, M_win)

    # keep the shifted profile argument strictly inside the solid range
    t_region = (0.5, 3.0)
    shift_max = sigma * (1.0 - math.exp(-beta * t_region[1]))
    pad = 2.0
    solid_lo, solid_hi = profile.s_solid
    if sign == "lower":
        s_lo = solid_lo - s0 + shift_max + pad
        s_hi = solid_hi - s0 - pad
        bare_region = (s_lo - shift_max, s_hi)
    else:
        s_lo = solid_lo - s0 + pad
        s_hi = solid_hi - s0 - shift_max - pad
        bare_region = (s_lo, s_hi + shift_max)
    return CandidateSolution(
        kind="sandwich_" + sign, sense="sub" if sign == "lower" else "super",
        params=dict(c=c, critical=critical, lam_c=lam_c, eps=eps, beta=beta,
                    sigma=sigma, s0=s0, z0=z0, delta=delta, mu_minus=mu,
                    delta_m=delta_m, delta_M=delta_M,
                    alpha_min_slope=alpha.tolist()),
        s_region=(s_lo, s_hi),
        evaluator=evaluator,
        scale=lambda s: np.ones_like(np.asarray(s, dtype=float)),
        constraints=[BoundaryCheck("z0_margin", delta / 2.0),
                     BoundaryCheck("slope_positive", float(alpha.min()))],
        bare_evaluator=bare,
        bare_region=bare_region,
        t_region=t_region,
        dudt_evaluator=dudt,
        bare_dudt_evaluator=bare_dudt)


# ---------------------------------------------------------------------------
# seeding the sandwich against a simulated solution


def find_sandwich_seed(model, disp, profile, traj, delta: float,
                       psi_pair=None, t_grid=(1.0, 2.0, 4.0, 8.0),
                       sigma_factors=(1.0, 2.0, 4.0, 8.0),
                       margin_cells: int = 4):
    """Search a small (t_c, sigma) grid for a pair whose lower and upper
    sandwich evaluators bracket the simulated solution at t_c.

    The anchoring shift s0 is fitted per t_c by matching the half-level
    position of the first component.  Returns (t_c, sigma, s0, lower,
    upper) for the first bracketing pair; raises if none brackets, without
    deciding whether the data or the search range is at fault.
    """
    from .fronts import front_position
    window = traj.window
    n = model.cell.n
    inner = slice(margin_cells * n, window.npts - margin_cells * n)
    x_in = window.x[inner]
    psi_pair = psi_pair or principal_eig_coupled(model, at="one")

    snap = {round(t, 9): u for t, u in zip(traj.times, traj.snapshots)}
    for t_c in t_grid:
        u_tc = snap.get(round(t_c, 9))
        if u_tc is None:
            continue
        # phase of the simulated front at t_c, in profile coordinates
        pos = front_position(u_tc[0], window.x, 0.5)
        s0 = -(profile.c * t_c - pos)
        beta = build_stability_sandwich(model, disp, profile, "lower",
                                        delta=delta, psi_pair=psi_pair,
                                        s0=s0).params["beta"]
        for fac in sigma_factors:
            sigma = fac / beta
            lower = build_stability_sandwich(model, disp, profile, "lower",
                                             delta=delta, psi_pair=psi_pair,
                                             s0=s0, sigma=sigma)
            upper = build_stability_sandwich(model, disp, profile, "upper",
                                             delta=delta, psi_pair=psi_pair,
                                             s0=s0, sigma=sigma)
            lo = lower.evaluator(t_c, x_in)
            hi = upper.evaluator(t_c, x_in)
            if float((lo - u_tc[:, inner]).max()) <= 0.0 \
                    and float((u_tc[:, inner] - hi).max()) <= 0.0:
                return t_c, sigma, s0, lower, upper
    raise CertificationError(
        "no (t_c, sigma) pair bracketed the solution on the search grid; "
        "either the profile is too rough, delta too large, or the grid "
        "too small")


# ---------------------------------------------------------------------------
# residual verification


def residual_sign_check(model, cand: CandidateSolution, t_samples=None,
                        dt_fd: float = 1e-3, C_allow: float = 10.0) -> CertReport:
    """Finite-difference check of the differential inequality on a (t, x)
    lattice covering the candidate's s-region.

    The residual is normalized by the candidate's amplitude scale; the
    pass/fail allowance is C_allow*(h**2 + dt_fd**2) plus, for
    profile-backed candidates, the measured residual of the bare profile
    over the same lattice.
    """
    cell = model.cell
    h = cell.h
    s_lo, s_hi = cand.s_region
    if s_hi <= s_lo:
        raise CertificationError("empty region")
    c = cand.params["c"]
    if t_samples is None:
        t0 = max(cand.t_region[0], 2 * dt_fd)
        t_samples = np.linspace(t0, cand.t_region[1], 5)

    def lattice_residual(evaluator, region, dudt_eval=None):
        reg_lo, reg_hi = region
        worst = np.full(model.m, np.inf)
        wit = None
        for t in t_samples:
            # x so that s = c t - x sweeps the region, padded one node
            x_lo = c * t - reg_hi
            x_hi = c * t - reg_lo
            j0 = math.floor(x_lo / h) - 1
            j1 = math.ceil(x_hi / h) + 1
            x = np.arange(j0, j1 + 1) * h
            idx = _periodic_index(x, cell)
            u = evaluator(t, x)
            if dudt_eval is not None:
                dudt = dudt_eval(t, x)
            else:
                up = evaluator(t + dt_fd, x)
                um = evaluator(t - dt_fd, x)
                dudt = (up - um) / (2.0 * dt_fd)
            lap = (u[:, 2:] - 2.0 * u[:, 1:-1] + u[:, :-2]) / h**2
            grad = (u[:, 2:] - u[:, :-2]) / (2.0 * h)
            inner = slice(1, -1)
            f = model.F(u[:, inner], idx[inner])
            N = (dudt[:, inner]
                 - model.d[:, idx[inner]] * lap
                 - model.q[:, idx[inner]] * grad
                 - f)
            Nhat = N / cand.scale(c * t - x[inner])[None, :]
            if cand.sense == "sub":
                marg = -Nhat.max(axis=1)
            else:
                marg = Nhat.min(axis=1)
            for i in range(model.m):
                if marg[i] < worst[i]:
                    worst[i] = marg[i]
                    if cand.sense == "sub":
                        jbad = int(np.argmax(Nhat[i]))
                    else:
                        jbad = int(np.argmin(Nhat[i]))
                    wit = (i + 1, float(t), float(x[inner][jbad]),
                           float(Nhat[i, jbad]))
        return worst, wit

    margins, witness = lattice_residual(cand.evaluator, (s_lo, s_hi),
                                        cand.dudt_evaluator)

    profile_defect = 0.0
    if cand.bare_evaluator is not None:
        bare_m, _ = lattice_residual(cand.bare_evaluator,
                                     cand.bare_region or (s_lo, s_hi),
                                     cand.bare_dudt_evaluator)
        profile_defect = float(np.max(np.abs(bare_m)))

    allowance = C_allow * (h**2 + dt_fd**2) + profile_defect
    b_ok = all(b.margin >= -allowance for b in cand.constraints)
    verdict = bool(margins.min() >= -allowance and b_ok)
    if not b_ok and witness is None:
        witness = [b.name for b in cand.constraints if b.margin < -allowance]
    return CertReport(kind=cand.kind, params=cand.params, margins=margins,
                      boundary=list(cand.constraints), allowance=allowance,
                      verdict=verdict, witness=witness,
                      profile_defect=profile_defect)


# ---------------------------------------------------------------------------
# near-one Jacobian variation radius


def compute_varrho(model, mu_minus: float, psi: np.ndarray,
                   samples: int = 3) -> tuple:
    """Per-component radius rho_i such that the Jacobian rows vary from
    their value at 1 by at most alpha* |mu-| / 2 over the box
    [(1-rho) 1, (1+rho) 1]; returns (list of rho_i, min capped at 1)."""
    if mu_minus >= 0.0:
        raise CertificationError("needs a negative coupled eigenvalue")
    alpha_star = float(psi.min() / psi.max())
    bound = alpha_star * abs(mu_minus) / 2.0
    n = model.cell.n
    xidx = np.arange(n)
    ones = np.ones((model.m, n))
    J1 = model.jacobian(ones, xidx)

    def variation(i, rho):
        pts = np.linspace(1.0 - rho, 1.0 + rho, samples)
        worst = 0.0
        for corner in itertools.product(pts, repeat=model.m):
            u = np.repeat(np.asarray(corner)[:, None], n, axis=1)
            J = model.jacobian(u, xidx)
            tot = np.abs(J[i] - J1[i]).sum(axis=0)
            worst = max(worst, float(tot.max()))
        return worst

    rhos = []
    for i in range(model.m):
        if variation(i, 0.0) > bound:
            raise CertificationError(
                "Jacobian variation positive already at rho = 0 "
                "(numerical inconsistency)")
        if variation(i, 1.0) <= bound:
            rhos.append(1.0)
            continue
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if variation(i, mid) <= bound:
                lo = mid
            else:
                hi = mid
        rhos.append(lo)
    return rhos, min(1.0, min(rhos))
