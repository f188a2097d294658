"""Quantum baker's maps on qubits, stochastic perturbation ensembles and
hypersensitivity measures."""
from ._kernels import BACKEND
from .baker import BakerMap, baker_apply, baker_dense
from .hyper import (
    GAConfig,
    StateEnsemble,
    exhaustive_bipartition,
    genetic_bipartition,
    grouping_stats,
    haar_random_ensemble,
    s_parameter,
    temporal_grouping,
    tradeoff_curve,
)
from .perturb import PerturbationSpec, evolve_histories, load_ensemble, save_ensemble
from .qcore import DensityMatrix, PureState, von_neumann_entropy
from .signatures import entropy_growth, fidelity_decay

__version__ = "0.1.0"
