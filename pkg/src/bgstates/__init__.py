"""Barut-Girardello coherent states for classical, f- and q-deformed su(1,1).

Layers:

* :mod:`bgstates.qspecial` - q-numbers, q-factorials and their continuation,
  q-Pochhammer/Gaussian binomials, q-Gamma/q-digamma, modified Bessel I / K
  and the q-Bessel series.
* :mod:`bgstates.repalg` - truncated discrete-series representations,
  deformation maps, ladder and coproduct actions.
* :mod:`bgstates.costate` - single-node coherent states (recurrence,
  q-factorial, and operator-exponential constructions).
* :mod:`bgstates.bipartite` - the entangled two-node state: recurrence
  solvers with closed-form oracles, norm series, crossing symmetry, Schmidt
  analysis.
* :mod:`bgstates.measure` - completeness measures and moment-relation
  quadrature.
* :mod:`bgstates.cli` - batch command line (``bgstates --help``).
"""

from .errors import (BGStatesError, DomainError, PoleError,
                     SeriesConvergenceError, ShapeError, TruncationError)
from .qspecial import (CLASSICAL, DEFAULT_CONTROL, QParam, SeriesControl,
                       bessel_i_q, bessel_k, q_binomial, q_digamma,
                       q_factorial, q_factorial_cont, q_gamma, q_number,
                       q_pochhammer)
from .repalg import (BipartiteOperator, DeformationMap, LadderOperator,
                     apply_coproduct, apply_ladder)
from .costate import (LadderState, build_by_operator_series, build_f_coherent,
                      build_q_coherent, normalization_series)
from .bipartite import (BipartiteMatrix, BipartiteParams, BoundarySequence,
                        SchmidtSpectrum, build_q_bipartite, classical_bipartite,
                        crossing_transform, eigen_residual, eigen_residual_parts,
                        fidelity, g_ansatz_eval, g_closed_geometric, norm_series,
                        schmidt_entropy, solve_g_recurrence)
from .measure import (MomentRecord, MomentReport, QuadratureSpec,
                      classical_measure, moment_check, q_measure)

__version__ = "0.1.0"
