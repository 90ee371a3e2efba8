"""scikit-learn style front end.

``CommunityComposer.fit`` builds both layers from a registry; requests are
then answered with ``compose`` (a resumable cursor) or ``predict`` (first
composition per request).
"""
from __future__ import annotations

import logging

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .compose import find_meta_composition, refine_meta_composition
from .instantiate import InstantiationCursor
from .metalayer import build_interaction_network, build_meta_operations
from .similarity import build_similarity_network, communities
from .validation import check_registry, check_request

log = logging.getLogger(__name__)


class CommunityComposer(BaseEstimator):
    """Two-layer composition engine.

    Parameters
    ----------
    queue : {"fifo", "lifo"}
        Order in which candidate paths are explored during the backward
        search. A path whose head is already selected is accepted without
        further expansion, so the selected node set can differ between the
        two orders on some networks; the feasibility verdict has agreed on
        every randomized registry tried so far.
    """

    def __init__(self, queue="fifo"):
        self.queue = queue

    def fit(self, X, y=None):
        if self.queue not in ("fifo", "lifo"):
            raise ValueError(f"queue must be 'fifo' or 'lifo', got {self.queue!r}")
        registry = check_registry(X)
        self.registry_ = registry
        self.similarity_network_ = build_similarity_network(registry)
        self.communities_ = communities(self.similarity_network_)
        self.meta_operations_ = build_meta_operations(registry, self.communities_)
        self.interaction_network_ = build_interaction_network(self.meta_operations_)
        owner = {o: m.id for m in self.meta_operations_ for o in m.member_ids}
        self.labels_ = [owner[o] for o in registry.ids]
        self.n_operations_ = len(registry)
        return self

    def transform(self, X):
        """Map operation ids (or descriptors) to their meta-operation ids."""
        check_is_fitted(self, "interaction_network_")
        owner = dict(zip(self.registry_.ids, self.labels_))
        out = []
        for item in X:
            op_id = getattr(item, "id", item)
            if op_id not in owner:
                raise KeyError(f"operation {op_id!r} was not seen during fit")
            out.append(owner[op_id])
        return out

    def fit_transform(self, X, y=None):
        return self.fit(X).labels_

    def meta_composition(self, known, goal=None):
        """Return (phase-one composition, refined composition); either may be None."""
        check_is_fitted(self, "interaction_network_")
        request, warnings = check_request(known, goal, self.registry_)
        for w in warnings:
            log.warning(w)
        found = find_meta_composition(request, self.interaction_network_, queue=self.queue)
        refined = refine_meta_composition(found) if found is not None else None
        return found, refined

    def compose(self, known, goal=None) -> InstantiationCursor | None:
        """Cursor over concrete compositions, or None if the request is infeasible."""
        _, refined = self.meta_composition(known, goal)
        return InstantiationCursor(refined) if refined is not None else None

    def predict(self, requests):
        """First composition for each (known, goal) pair, None where infeasible."""
        results = []
        for known, goal in requests:
            cursor = self.compose(known, goal)
            results.append(cursor.next_composition() if cursor is not None else None)
        return results
