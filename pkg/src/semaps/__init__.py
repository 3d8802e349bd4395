"""Semi-supervised spectral embedding with barrier potentials.

Pipelines for plain and potential-steered spectral embeddings of point
clouds, a vector-angle classifier, a UCI benchmark harness, and an HTTP
service for interactive labeling.
"""

from .classify import (VacModel, ZERO_CLASS, UNCLASSIFIED, error_rate,
                       fit_seeds, vac_classify)
from .data import (LabeledDataset, TrainSplit, UNLABELED, binarize_labels,
                   load_csv, load_dataset, load_manifest, make_arc,
                   mmd_clean, sample_train, standardize)
from .eigensolve import EigenResult, smallest_eigs
from .embedding import (DisconnectedGraphError, Embedding, embed_graph,
                        laplacian_eigenmaps, nullmass, potential_energy,
                        quadratic_minimizer, schroedinger_eigenmaps)
from .graph import (SparseSym, WeightedGraph, build_graph,
                    connected_components, heat_weights, knn_graph)
from .operators import (ChainPotential, DiagonalPotential, PairwisePotential,
                        SumPotential, alpha_heuristic, diagonal_on,
                        laplacian, normalize, parse_potential_spec,
                        potential_spec, realize_potential, schroedinger)

__version__ = "0.1.0"
