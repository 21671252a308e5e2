"""Lyapunov exponents, densities of states and m-functions of Jacobi operators,
and their averages over ergodic families."""
from .lattice import (BoundError, Coefficients, SingularityError, Window, as_energy,
                      extract_window, metric_d, reflect, shift)
from .transfer import (CosSin, ScaledProduct, cosine_sine, lyapunov_finite, step_matrix,
                       transfer_product)
from .eigen import (DOSMeasure, dos_measure, eigenvalues_bisect, ids_estimate,
                    log_potential, sturm_count, thouless_rhs)
from .weyl import (MFunctionError, MFunctionValue, box_m, lyap_via_m, m_minus, m_plus,
                   reflectionless_defect, u_plus_check)
from .models import (ProfileFunction, SkewShiftState, anderson, constant, decaying,
                     discrepancy, free, nrho, parse_model, parse_profile, periodic,
                     skewshift, sparse_squares, star_discrepancy)
from .measures import (EmpiricalMeasure, convergence_in_probability, cylinder_distance,
                       drr_statistic, empirical_measure, periodic_measure)
from .averaging import (AverageReport, average_r0, average_skew_mc, gamma_const, k_const,
                        simonzhu_interval)

__version__ = "0.1.0"
