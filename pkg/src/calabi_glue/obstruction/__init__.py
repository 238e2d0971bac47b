"""Orbifold-side algebra: sphere moments, quadratic tensors, curvature data and the obstruction."""
from .core import (LEDGER_NAMES, QuadratureResult, WallVerdict, assemble_sphere_integral,
                   bianchi_cyclic_J_identity, classify_wall, com8_coefficients, contraction_ledger,
                   gauge_tensor_H, gauge_tensor_H_raw, lambda_normalized, ledger_coefficients,
                   o_norm2, obstruction_lambda_bruteforce, obstruction_lambda_closed,
                   quadrature_scale, wall_ratio, wall_value)
from .data import (BUILTINS, CurvatureData, builtin, constant_curvature, flat, from_mapping,
                   kahler_einstein, load_curvature_data, random_einstein, to_mapping)
from .quadratic import (QuadraticTensor, conformal_killing_array, conformal_killing_quadratic,
                        ledger_tensors, sigma2_tensor)
from .sphere import monte_carlo, sphere_moment2, sphere_moment4, sphere_nodes, sphere_volume

__all__ = [name for name in dir() if not name.startswith("_")]
