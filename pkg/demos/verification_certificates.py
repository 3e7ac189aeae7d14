"""Executable verification: balance residuals and derivation identities.

The library's analytical claims come with runnable certificates:

1. the internal-energy and entropy balance residuals, evaluated on a
   random smooth manufactured state, shrink at the stencil order under
   grid refinement;
2. six auxiliary identities used in the derivation hold either exactly
   (round-off) or at the stencil order;
3. the two algebraic decompositions of the entropy production Xi agree
   to machine precision on random states, and Xi stays nonnegative when
   the heat-source condition holds.

    python demos/verification_certificates.py
"""
import numpy as np

from qgdmhd import IdealGas
from qgdmhd.diagnostics import (
    batch_xi,
    identity_suite,
    residual_convergence,
    sample_random_states,
)
from qgdmhd.manufactured import random_manufactured_state
from qgdmhd.regularization import CoefficientLaw, RegParams

TWO_PI = 2.0 * np.pi
eos = IdealGas(R=1.0, c_v=1.5)
params = RegParams(
    tau_mode="constant", tau0=0.05,
    mu=CoefficientLaw("constant", 0.02),
    lam=CoefficientLaw("constant", 0.01),
    kappa=CoefficientLaw("constant", 0.03),
)

# --- 1. balance residuals under refinement --------------------------------
rng = np.random.default_rng(7)
ms = random_manufactured_state(rng, (TWO_PI,), 1, u_amp=0.5, b_amp=0.5)
levels = (32, 64, 128)
study = residual_convergence(ms, params, None, eos, ndim=1, Ns=levels)

print("balance residual max-norms (manufactured state, order-2 stencils)")
print(f"{'N':>6} {'internal energy':>18} {'entropy':>18}")
for N in levels:
    print(f"{N:>6} {study.internal_energy[N]:>18.3e} {study.entropy_balance[N]:>18.3e}")
print(f"rates: {study.rate_internal_energy:.2f}, {study.rate_entropy_balance:.2f} "
      "(2.0 expected)\n")

# --- 2. derivation identities ---------------------------------------------
print("identity suite")
for r in identity_suite(ms, eos, ndim=1, Ns=levels):
    rate = "exact (round-off)" if r.exact else f"rate {r.rate:.2f}"
    print(f"  {r.name:28s} {rate}   passed={r.passed}")
print()

# --- 3. entropy production on random states --------------------------------
batch = sample_random_states(np.random.default_rng(8), 2000, ndim=1, eos=eos)
xa = batch_xi(batch, eos, "a")
xb = batch_xi(batch, eos, "b")
scale = np.max(np.abs(xa))
print(f"Xi over 2000 random admissible states:")
print(f"  min Xi_a            = {np.min(xa):.3e}  (scale {scale:.2e})")
print(f"  max |Xi_a - Xi_b|   = {np.max(np.abs(xa - xb)):.3e}")

# Violating the heat-source smallness condition can push Xi negative.
bad = sample_random_states(np.random.default_rng(9), 500, ndim=1,
                           q_max=1e4, u_amp=6.0,
                           enforce_heat_condition=False, eos=eos)
xbad = batch_xi(bad, eos, "a")
print(f"  with the condition violated (huge Q): min Xi = {np.min(xbad):.3e}")
