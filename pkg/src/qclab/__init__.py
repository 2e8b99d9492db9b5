"""qclab: a numerical laboratory for plane homeomorphisms with finite distortion.

Distortion coefficients, conformal moduli of ring curve families, circle and
disk means, the convex-function condition calculus, and numeric verification
of the associated distortion bounds and equicontinuity criteria on
closed-form test mappings.
"""

from .divergence import CONVERGENT, DIVERGENT, INCONCLUSIVE, TailVerdict, classify_tail
from .geometry import (INF, CircleIntegral, Domain, ExtendedPoint, PolarGrid, Ring,
                       annulus_domain, chordal, circle_quadrature, disk_domain,
                       invert, spherical_diameter, spherical_distance, whole_plane)
from .mappings import (DerivativePair, MappingModel, dilatation_quotient, distortion,
                       distortion_field, identity_map, jacobian, log_distortion_map,
                       operator_norm, radial_map, radial_stretch,
                       shrinking_stretch_family, wirtinger)
from .means import (DiskMean, FmoEstimate, MeanProfile, circle_l1, circle_mean,
                    constant_field, disk_mean, divergence_at_zero, fmo_estimate,
                    I_integral, lebesgue_point_check, log_singularity_fit)
from .modulus import (CIRCLES, CONNECTING, SEPARATING, CurveFamilySpec, GridDensity,
                      ModulusResult, annulus_modulus, discrete_modulus,
                      extremal_density_lower, extremal_weight_ring,
                      image_annulus_modulus, lower_rhs, ring_rhs)
from .phicalc import (BUILTIN_PHIS, CONDITIONS, ConditionVerdict, EquivalenceBattery,
                      PhiFunction, classify_condition, equivalence_battery, h_inverse,
                      inverse_tail_condition, linear_growth_check, log_tail_condition,
                      phi_inverse, phi_inverse_of_phi_check, transforms)
from .verification import (BoundReport, BoundSpec, ClassConstraint, ContinuityTable,
                           battery_maps, battery_rings, class_membership,
                           disk_power_bound_check, equicontinuity_probe,
                           exponential_decay_bound, fmo_power_exponent_fit,
                           integral_divergence_check, log_majorant_bound_check,
                           necessity_demo, ring_mean_bound_check,
                           ring_tail_bound_check, truncated_tail_bound_check,
                           weighted_hypothesis_check)

__version__ = "0.1.0"
