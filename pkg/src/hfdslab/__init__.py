"""hfdslab: a desk-scale laboratory for hidden-fermion determinant states.

Exact ground states of random fermionic models, overlap-loss training of
determinant-based trial wavefunctions, complexity measures (Born entropy,
1-RDM entropy, entanglement, mutual information), and parameter-scaling fits.
"""

__version__ = "0.1.0"

from . import ansatz, eigensolver, fock, kernels, measures, models, scaling, training

__all__ = ["ansatz", "eigensolver", "fock", "kernels", "measures", "models",
           "scaling", "training", "__version__"]
