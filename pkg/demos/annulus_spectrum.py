"""
Annulus eigenvalues: Bessel determinant against RK4 shooting
============================================================
"""

import numpy as np

from nsexact import eigen

spec = eigen.AnnulusSpec(1.0, 2.0)

for name, bc in [("dirichlet", eigen.SeparatedBC.dirichlet()),
                 ("neumann", eigen.SeparatedBC.neumann())]:
    modes = eigen.annulus_eigen_separated(spec, bc, 3)
    shoot = eigen.shooting_eigenvalues(spec, bc, 3)
    print(name, [m.value for m in modes], "max diff", np.max(np.abs(np.array([m.value for m in modes]) - shoot)))

# coupled ends Y(R1) = K Y(R2), det K = 1
bc = eigen.CoupledBC(((2.0, 1.0), (1.0, 1.0)))
print("coupled", [m.value for m in eigen.annulus_eigen_coupled(spec, bc, 3)])

# the transfer matrix is unimodular
for z in (0.5, 3.0, 12.0):
    print(f"det F({z}) - 1 = {np.linalg.det(eigen.transfer_matrix(spec, z)) - 1:.1e}")

# choosing K = F(z*) makes z* a double eigenvalue
K = eigen.transfer_matrix(spec, 3.7)
for m in eigen.annulus_eigen_coupled(spec, eigen.CoupledBC(K), 2, zeta_max=5.0):
    print(f"zeta = {m.value:.12f}  multiplicity {m.multiplicity}")
