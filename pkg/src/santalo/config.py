"""Numeric tolerances and size cutoffs shared across the package.

Values are module-level so callers can override them globally; operations
that need a different tolerance locally accept an explicit argument instead.
"""

# Absolute tolerance for geometric predicates (membership, dominance,
# support/gauge agreement).  Double precision leaves ample headroom at the
# desk dimensions (N <= 6) this package targets.
GEOM_ATOL = 1e-10

# Tolerance for symmetry checks on vertex/normal lists (+- pairing).
SYM_ATOL = 1e-12

# Largest dimension where polytope volume and H<->V conversion are done
# exactly; above this, Monte Carlo fallbacks kick in.
MAX_EXACT_DIM = 6
