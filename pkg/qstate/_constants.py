# Numerical tolerances shared by every package

# Hermiticity, normalisation and energy residue tolerance
ATOL = 1e-9

# Eigenvalues at or below this count as zero in 0·log 0
EIGEN_CLAMP = 1e-12

# Outcomes with probability at or below this are rejected
ZERO_PROBABILITY = 1e-12

# Eigenvalues closer than this belong to one level
LEVEL_TOL = 1e-9

# Largest qubit count handled with dense matrices
MAX_DENSE_QUBITS = 12

# Largest qubit count for which ‖H‖∞ is computed by a dense eigensolve
DENSE_NORM_QUBITS = 10

# Positive-semidefiniteness is only checked up to this dimension
PSD_CHECK_DIM = 1024
