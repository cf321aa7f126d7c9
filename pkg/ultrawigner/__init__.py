from .errors import (UltraWignerError, ArgumentError, DomainError, ExtrapolationError, CapacityError,
                     DataError, NumericError, PreconditionError, ConventionError,
                     InsufficientSupportError, FitDegenerateError, TruncationWarning)
from .utils import (SampledFunction, symmetric_grid, parse_grid)
from .weights import (WeightFunction, AxiomReport, check_weight_axioms, eval_omega, omega_star,
                      function_norm, sequence_norm, matrix_norm, phase_space_norm, flat_norm)
from .hermite import (CoefficientSequence, HermiteSeries, QuadratureRule, gauss_hermite_rule,
                      hermite_values, hermite_log_values, analyze, synthesize, fourier_in_coefficients,
                      fourier_numeric, hermite_operator_in_coefficients, derivative_in_coefficients,
                      hermite_tail_envelope_check, uniform_bound_check)
from .decay import (DecayEnvelope, TameBoundReport, fit_envelope, verify_forward_bound,
                    verify_backward_bound, tail_sum_check, moment_bound_check)
from .phase_space import (PhaseSpaceGrid, laguerre_values, special_hermite, special_hermite_matrix,
                          special_hermite_integral, special_hermite_integral_matrix, radial_modulus,
                          radial_bound_check, krasikov_check, wigner_of_density, wigner_pure_direct,
                          tilde_rescale, marginals, ambiguity_of_coefficients, fourier_2d, isometry_ratio,
                          wigner_norm_comparison, pure_norm_comparison, ambiguity_norm_comparison)
from .states import (DensityMatrix, ValidationReport, pure_state_density, mixture_density,
                     validate_density, counterexample_density, counterexample_wigner_closed_form,
                     counterexample_series, decay_vs_wigner_experiment)
