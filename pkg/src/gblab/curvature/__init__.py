"""Induced metric, Chern curvature and Chern forms on projective hypersurfaces."""

from .batch import (ChernIntegrand, FrameCurvature, Hypersurface, UnitIntegrand,
                    frame_curvature, gauss_bonnet_integrand, jet_density_ratio,
                    mather_degree_integrand)
from .exterior import MAX_DIM, ExteriorForm
from .forms import (CurvatureMatrix, DegreeError, all_chern_forms, chern_curvature, chern_form,
                    density, kahler_form, pfaffian_crosscheck, unitary_frame)
from .metric import MetricJet, SmoothnessError, metric_from_potential, pullback_metric

__all__ = [
    "ChernIntegrand", "CurvatureMatrix", "DegreeError", "ExteriorForm", "FrameCurvature",
    "Hypersurface", "MAX_DIM", "MetricJet", "SmoothnessError", "UnitIntegrand",
    "all_chern_forms", "chern_curvature", "chern_form", "density", "frame_curvature",
    "gauss_bonnet_integrand", "jet_density_ratio", "kahler_form", "mather_degree_integrand",
    "metric_from_potential", "pfaffian_crosscheck", "pullback_metric", "unitary_frame",
]
