"""Numerical verification toolkit for the Calabi ALE metric and orbifold gluing."""
from . import charts, tensor_core
from .errors import CalabiGlueError
from .tensor_core import (Box, ChartMetric, CurvatureBundle, Shell, TensorField,
                          christoffel, covariant_derivative, curvature, inner)

__all__ = [
    "Box", "ChartMetric", "CurvatureBundle", "Shell", "TensorField",
    "CalabiGlueError", "charts", "christoffel", "covariant_derivative",
    "curvature", "inner", "tensor_core",
]
__version__ = "0.1.0"
