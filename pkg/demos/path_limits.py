"""
Inviscid limits along nu t = omega
==================================

All the flows here depend on viscosity and time only through nu t, so
they are constant along each path nu t = omega. Different paths give
different limits, so the double limit (nu, 1/t) -> (0, 0) cannot exist.
"""

from nsexact import solutions, turbulence, verify
from nsexact.profiles import GaussianProfile

mode = solutions.radial_mode(1.0)
probes = verify.SampleSet.for_flow(solutions.euler_static(mode), count=50)

rep = turbulence.double_limit_probe(mode, 0.1, 1.0, probes)
print(rep.to_text())
print("off-path speeds (fixed nu, growing t):", [f"{row[2]:.2e}" for row in rep.off_path])

# a 2D swirl whose profiles spread by the heat kernel
swirl = turbulence.swirl2d_heat(1.0, GaussianProfile(0.25, -0.5), GaussianProfile(0.5), nu=1.0)
table = turbulence.path_convergence_table(swirl, turbulence.PathSpec.from_times(0.2, [10, 1e3, 1e6]),
                                          verify.SampleSet.for_flow(swirl, 8))
print(table.to_csv())

# the limit field is a static Euler solution
limit = turbulence.path_limit_2d(swirl, 0.2)
print("Euler residual of the limit:",
      verify.euler_residual(limit, verify.SampleSet.for_flow(limit, 10))["momentum"].max_rel)
