"""Learning formulas from demonstrations."""

from .atoms import AtomFit, Agreement, describe_atom, learn_atom, remove_agreement
from .cluster import cluster_trajectories
from .config import LearnConfig, LearnError
from .dag import END, START, AtomDag, SimplifyError, simplify_dag
from .learner import LearnResult, learn, learn_atom_dag, learn_fpl
from .merge import merge_similar_atoms, similarity, symmetric_kl

__all__ = [
    "AtomFit", "Agreement", "AtomDag", "END", "START", "LearnConfig", "LearnError", "LearnResult",
    "SimplifyError", "cluster_trajectories", "describe_atom", "learn", "learn_atom", "learn_atom_dag",
    "learn_fpl", "merge_similar_atoms", "remove_agreement", "similarity", "simplify_dag", "symmetric_kl",
]
