"""
Beltrami eigenflows and their residuals
=======================================

Builds a few mode flows, checks curl u = -lam u, and measures the
Navier-Stokes residual with the Bernoulli pressure.
"""

import numpy as np

from nsexact import eigen, fields, solutions, verify

# a radial mode smooth through the origin, and one singular at r = 0
smooth = solutions.radial_mode(lam=1.0, alpha=1.0, beta=0.0)
singular = solutions.radial_mode(lam=2.0, alpha=0.0, beta=1.0)  # r >= 0.1

for mode in (smooth, singular):
    flow = solutions.ns_decaying(mode, nu=0.05)
    samples = verify.SampleSet.for_flow(flow, count=200, seed=0, t_values=[0.0, 1.0, 5.0])
    rep = verify.ns_residual(flow, samples)
    print(f"{flow.tag:8s} momentum {rep['momentum'].max_rel:.2e}  div {rep['div u'].max_rel:.2e}")

# the Beltrami property, and the sign control that must fail
flow = solutions.euler_static(smooth)
print("curl u + lam u:", verify.beltrami_check(flow).entries[0].max_rel)
print("curl u - lam u:", verify.beltrami_check(flow, sign=+1.0).entries[0].max_rel)

# a disc mode with an axial wave: lam^2 = xi^2 + eta^2
disc = eigen.disc_radial_eigen(eigen.DiscSpec(1.0), 1)
ymode = solutions.cylinder_mode(disc, eta=1.0)
print("disc mode lam =", ymode.lam, "=", np.hypot(disc.value, 1.0))

# removing the pressure breaks the solution
bad = solutions.euler_static(ymode).with_pressure(fields.ConstantField(0.0))
samples = verify.SampleSet.for_flow(bad, count=100)
print("without pressure:", verify.euler_residual(bad, samples)["momentum"].max_rel)
