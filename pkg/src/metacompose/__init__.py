"""Community-based two-layer service composition."""
import logging

from .compose import MetaComposition, find_meta_composition, refine_meta_composition
from .estimator import CommunityComposer
from .instantiate import CoverEnumerator, InstantiationCursor, enumerate_goal_covers, enumerate_in_covers, new_cursor, next_composition
from .metalayer import InteractionNetwork, MetaNetwork, MetaOperation, build_interaction_network, build_meta_operations, suppliers
from .oracle import OracleResult, enumerate_valid_compositions, is_feasible, is_valid_composition
from .registry import OperationDescriptor, Registry, RegistryError, Request, RequestError, load_registry, validate_request
from .similarity import (Community, SimilarityKind, SimilarityNetwork, build_similarity_network, communities,
                         excess_sim, full_sim, maximal_cliques, partial_sim, relation_sim)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
