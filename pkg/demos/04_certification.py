"""Numerical certification of the explicit sub/supersolutions.

Builds the closed-form comparison functions with their prescribed
parameter recipes and verifies the defining differential inequalities by
finite differences on (t, x) lattices: supercritical and critical
subsolutions, clipped linearized supersolutions, and the near-one
Jacobian-variation radius used by the uniqueness argument.
"""

import numpy as np

from perifront import (Dispersion, build_sub_critical,
                       build_sub_supercritical, build_super_linearized,
                       build_super_linearized_critical, compute_varrho,
                       make_model, principal_eig_coupled,
                       residual_sign_check)

model = make_model("constant2")
disp = Dispersion(model)


def show(tag, cand):
    rep = residual_sign_check(model, cand)
    status = "pass" if rep.verdict else "FAIL"
    print(f"{tag:<22} {status}: normalized margins "
          f"{np.round(rep.margins, 5)}, allowance {rep.allowance:.2e}")
    return rep


sub = build_sub_supercritical(model, disp, 2.5, 0.1, 0.1)
print(f"supercritical subsolution parameters: eps={sub.params['eps']:.4f}, "
      f"sigma_eps={sub.params['sigma_eps']:.6f}, s0={sub.params['s0']:.2f}, "
      f"n0={sub.params['n0']:.3g}")
show("sub (supercritical)", sub)

sub_c = build_sub_critical(model, disp, 0.1, 0.1)
print(f"critical subsolution: s0={sub_c.params['s0']:.2f}, "
      f"m0={sub_c.params['m0']:.2f}, n0={sub_c.params['n0']:.3g}")
show("sub (critical)", sub_c)

show("super (clipped w_c)", build_super_linearized(model, disp, 2.5, 1.0))
show("super (critical)",
     build_super_linearized_critical(model, disp, 1.0, 2.0))

pair = principal_eig_coupled(model, at="one")
psi = np.stack([v.values for v in pair.vectors])
rhos, rho_star = compute_varrho(model, pair.value, psi)
print(f"near-one variation radii: rho_i = {np.round(rhos, 4)}, "
      f"rho* = {rho_star:.4f}  (mu- = {pair.value:.4f})")
