"""
Modules:
models     - Bloch Hamiltonians, the registered model zoo, occupied states and gaps
linalg     - Pauli and gamma matrices, eigensystems, projectors
symmetry   - verification of TR, PH and chiral symmetries, Altland-Zirnbauer labels
wilson     - link variables, lattice field strength, Wilson loops and Berry phases
invariants - Chern numbers, winding numbers, Gauss-map degree
z2         - Z2 indices in 2D and 3D, sewing matrices, inversion-parity route
pfaffian   - Pfaffians of antisymmetric matrices
critical   - zeros of d(k, m) with Brouwer signs, phase diagrams in the mass
greens     - Green's functions, the N3 frequency-momentum winding, h_eff route
ktable     - classifying spaces, periodic table, torus decompositions
edge       - ribbon Hamiltonians, edge spectra, chiral edge-mode counts
serialize  - JSON and CSV renderings of results
config     - defaults < config file < command-line settings
cli        - command-line dispatcher
errors     - contract errors, all subclasses of TopoBandError
"""
