"""Deterministic random-stream derivation for ensemble training.

Every random decision in a forest is drawn from a counter-based Philox
stream keyed by ``(master seed, tree index)``, with disjoint counter
regions per decision:

* the bootstrap resample of tree ``b`` starts at counter 0;
* the candidate-feature draw at node ``i`` of tree ``b`` (nodes numbered
  in preorder, left child before right) starts at counter
  ``2**192 + i * 2**64``.

Streams of different trees never interact, so bagging and random-forest
ensembles could be grown one-tree-per-worker and still match a sequential
build bit for bit; within a tree, draws are pinned to the node counter
rather than to evaluation order.
"""

from __future__ import annotations

import numpy as np

_WORD = 1 << 64
_NODE_REGION = 1 << 192


def _key(seed: int, tree_index: int) -> int:
    return (int(seed) % _WORD) + ((int(tree_index) % _WORD) << 64)


def bootstrap_rng(seed: int, tree_index: int) -> np.random.Generator:
    """Stream that draws the bootstrap sample of one tree."""
    return np.random.Generator(np.random.Philox(counter=0, key=_key(seed, tree_index)))


def node_rng(seed: int, tree_index: int, node_counter: int) -> np.random.Generator:
    """Stream for the candidate-feature draw at one tree node."""
    counter = _NODE_REGION + (int(node_counter) << 64)
    return np.random.Generator(np.random.Philox(counter=counter, key=_key(seed, tree_index)))


class NodeStreams:
    """Hands out the per-node streams of one tree, in preorder.

    Equivalent to calling :func:`node_rng` with an incrementing counter,
    but reuses a single bit generator (its state is reset between nodes),
    which keeps per-node setup cheap. The generator returned by
    :meth:`next_rng` is therefore only valid until the next call.
    """

    def __init__(self, seed: int, tree_index: int = 0):
        self.seed = int(seed)
        self.tree_index = int(tree_index)
        self._count = 0
        self._bitgen = np.random.Philox(counter=0, key=_key(self.seed, self.tree_index))
        self._gen = np.random.Generator(self._bitgen)

    @property
    def draws(self) -> int:
        """Number of node streams handed out so far."""
        return self._count

    def next_rng(self) -> np.random.Generator:
        state = self._bitgen.state
        counter = state["state"]["counter"]
        counter[:] = 0
        counter[1] = self._count
        counter[3] = 1
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        state["uinteger"] = 0
        self._bitgen.state = state
        self._count += 1
        return self._gen
