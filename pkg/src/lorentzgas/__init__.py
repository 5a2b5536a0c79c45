"""Free path length statistics for the two-dimensional periodic Lorentz gas.

Exact and Monte Carlo distributions of the distance a point particle travels
among lattice disks before its first collision, the continued-fraction
machinery behind the exactly solvable slit model, and the closed-form
logarithmic size average with its 2/(pi^2 t*) large-time asymptote.
"""

__version__ = "0.1.0"

from .cf import (ContinuedFraction, DepthExhausted, PartitionIndex,
                 error_product, expand, gauss_map, locate, renorm_residuals)
from .distributions import (AngularWeight, CesaroSpec, McConfig,
                            SurvivalCurve,
                            cesaro_survival, cesaro_survival_nodes,
                            disk_survival_curve, disk_survival_directional,
                            disk_survival_weighted,
                            scaled_survival, slit_survival_mc)
from .ergodic import (DeltaPair, THRESHOLD_RATE, asymptote_gap_bound,
                      birkhoff_vs_gauss, cesaro_limit, cesaro_limit_asymptote,
                      gauss_expectation, limit_curve, partition_tail_bound,
                      step4_constants, threshold_index, threshold_ratio,
                      window_offsets, windowed_average, windowed_limit)
from .kinetic import CosineBump, MomentComparison, limit_density, moment_compare, \
    transported_density
from .slits import (Direction, HorizonError, SlitPartition, slit_exit_time,
                    slit_exit_times, slit_length, slit_partition, slit_survival,
                    survival_approx, survival_approx_bound)
from .tracer import (ObstacleConfig, exit_time_pair, free_area_fraction,
                     free_path, free_paths, sample_free_positions, survives)

__all__ = [
    "AngularWeight", "CesaroSpec", "ContinuedFraction", "CosineBump",
    "DeltaPair", "DepthExhausted", "Direction", "HorizonError", "McConfig",
    "MomentComparison", "ObstacleConfig", "PartitionIndex", "SlitPartition",
    "SurvivalCurve",
    "THRESHOLD_RATE", "asymptote_gap_bound", "birkhoff_vs_gauss",
    "cesaro_limit", "cesaro_limit_asymptote", "cesaro_survival",
    "cesaro_survival_nodes", "disk_survival_curve",
    "disk_survival_directional",
    "disk_survival_weighted", "error_product", "exit_time_pair", "expand",
    "free_area_fraction", "free_path", "free_paths", "gauss_expectation",
    "gauss_map", "limit_curve", "limit_density", "locate", "moment_compare",
    "partition_tail_bound", "renorm_residuals", "sample_free_positions",
    "scaled_survival", "slit_exit_time", "slit_exit_times", "slit_length",
    "slit_partition", "slit_survival", "slit_survival_mc", "step4_constants",
    "survival_approx", "survival_approx_bound", "survives", "threshold_index",
    "threshold_ratio", "window_offsets", "windowed_average", "windowed_limit",
]
