from .mollifier import (SmoothingResult, ProfileRow, gaussian_weight_integral, weight_integral_oracle, analytic_smooth,
                        smoothing_convergence_profile, entire_extension, analyticity_check, smoothing_norm_bound,
                        DEFAULT_HERMITE_NODES)
