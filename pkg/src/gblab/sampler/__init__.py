"""Crofton Monte Carlo integration, tubes around singular points and family scans."""

from .crofton import (CHUNK_SIZE, IntegralEstimate, MultiEstimate, ResampleError,
                      crofton_integrate, crofton_integrate_many, projective_volume)
from .family import (EXCISION_EPSILONS, EXCISION_POWERS, SCAN_COLUMNS, EpsilonFit,
                     ExcisedIntegral, FamilyError, FamilyScan, Plateau, chart_for,
                     detect_plateau, excised_integral, extrapolate_epsilon, family_member,
                     family_tube_scan, fit_shared, intercept_weights)
from .lines import (LineIntersection, ProjectiveLine, fs_distance, fs_sine_distance,
                    haar_frames, haar_line, intersect_lines, line_intersection)
from .sections import SectionError, binary_roots, linear_section, restrict
from .tubes import TubeSpec, fs_ball, polydisk

__all__ = [
    "CHUNK_SIZE", "EXCISION_EPSILONS", "EXCISION_POWERS", "EpsilonFit", "ExcisedIntegral",
    "FamilyError", "FamilyScan", "IntegralEstimate", "LineIntersection", "MultiEstimate",
    "Plateau", "ProjectiveLine", "ResampleError", "SCAN_COLUMNS", "SectionError", "TubeSpec",
    "binary_roots", "chart_for", "crofton_integrate", "crofton_integrate_many",
    "detect_plateau", "excised_integral", "extrapolate_epsilon", "family_member",
    "family_tube_scan", "fit_shared", "fs_ball", "fs_distance", "fs_sine_distance",
    "haar_frames", "haar_line", "intercept_weights", "intersect_lines", "line_intersection",
    "linear_section", "polydisk", "projective_volume", "restrict",
]
