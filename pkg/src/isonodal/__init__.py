"""Spectra and nodal counts of discrete and quantum graphs, with checks of
how leaf-pair surgery preserves isospectrality and nodal data."""

from .graph import (DiscreteGraph, GraphError, LeafPairSpec, attach_k_leaf_pair, betti, build_graph,
                    find_leaf_pairs, insert_pair_edge, is_isomorphic, laplacian, path_graph, star_graph)
from .metric import MetricGraph, add_dummy_vertex, add_leaf_pair, build_metric, glue_leaf_pair, two_pair_graph
from .nodal import NonGenericError, flip_set, nodal_count, nodal_profiles
from .qnodal import interlacing_check, q_flip_count, q_nodal_count, verify_theorem3
from .qspectra import fd_oracle, secular_spectrum, spectrum_up_to
from .report import VerificationReport
from .spectra import Spectrum, eig_sym, genericity_flags, graph_spectrum
from .theorems import (search_noniso_pairs, verify_corollary1, verify_lemma1, verify_theorem1,
                       verify_theorem2)

__version__ = "0.1.0"
