"""Free cumulants, free Poisson moments and Wigner chaos diagnostics."""

from .chaos import (ContractionSequence, MomentReport, convergence_scan,
                    em_domination_check, enumerate_sequences,
                    fourth_moment_statistic, lemma2_decomposition,
                    poisson_defect, wigner_moment, wigner_product_expand)
from .cumulants import (CumulantSequence, MomentSequence, additivity_check,
                        centered_poisson_moment, cumulants_from_moments,
                        free_poisson_cumulants, moments_from_cumulants)
from .fock import FockVector, oracle_moment, wigner_apply
from .kernel import (Kernel, adjoint, axpy, contract, inner_product,
                     is_mirror_symmetric, poisson_kernel, scale)
from .laws import Law, density, quadrature_moment
from .partitions import (Partition, catalan, enumerate_nc, is_noncrossing,
                         riordan, riordan_refined)

__version__ = "0.1.0"
