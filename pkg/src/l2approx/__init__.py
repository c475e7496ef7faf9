"""Finite-quotient and Folner approximation of L2-invariants."""

__version__ = "0.1.0"

from .groups import (GroupSpec, QuotientChain, QuotientMap, FolnerExhaustion,
                     build_folner, boundary_neighborhood, free_abelian, free_group,
                     finite_group, cyclic_group, product_cyclic_group,
                     symmetric_group, alternating_group)
from .coefficients import (AlgebraicNumber, NumberField, clear_denominators,
                           embed, field_arith)
from .groupring import (GroupRingElement, GroupRingMatrix, KappaReport,
                        clear_matrix_denominators, element, laurent)
from .finitize import FiniteModel, amenable_error_term, folner_model, quotient_model
from .spectra import (DensityEnvelope, SpectralDensity, density, density_bound,
                      eigenvalues, exact_kernel_dim, log_det, norm_lower_bound,
                      sandwich_poly)
from .approx import (ApproximationRun, approximate_kernel_dim, check_atiyah_integrality,
                     liouville_exclusion, spectrum_gap_check, verify_algebraic_continuity,
                     verify_det_bound)
from .orelocal import OreSolution, PolyGroupRingElement, ore_solve, specialize_zero_divisor
