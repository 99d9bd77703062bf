"""
Relation Matrix Module
Boolean relations over a finite carrier, stored as numpy matrices so that
closures and compositions are vectorized operations
"""

import numpy as np
from typing import Iterable, List, Optional, Sequence, Set, Tuple
import logging

logger = logging.getLogger(__name__)


class RelationMatrix:
    """
    Binary relation over an ordered, duplicate-free carrier of names
    """

    def __init__(self, carrier: Sequence[str], matrix: Optional[np.ndarray] = None):
        """
        Initialize with a carrier and an optional boolean matrix

        Args:
            carrier: Names indexing rows and columns
            matrix: Square boolean matrix; the empty relation when omitted
        """
        self.carrier: List[str] = list(carrier)
        self._index = {name: i for i, name in enumerate(self.carrier)}
        if len(self._index) != len(self.carrier):
            raise ValueError("Relation carrier contains duplicate names")
        size = len(self.carrier)
        if matrix is None:
            matrix = np.zeros((size, size), dtype=bool)
        if matrix.shape != (size, size):
            raise ValueError(f"Matrix shape {matrix.shape} does not match carrier of size {size}")
        self.matrix = matrix.astype(bool)

    @classmethod
    def from_pairs(cls, carrier: Sequence[str], pairs: Iterable[Tuple[str, str]],
                   symmetric: bool = False) -> "RelationMatrix":
        """Build a relation from name pairs; names outside the carrier are rejected"""
        relation = cls(carrier)
        for left, right in pairs:
            i, j = relation.index(left), relation.index(right)
            relation.matrix[i, j] = True
            if symmetric:
                relation.matrix[j, i] = True
        return relation

    def index(self, name: str) -> int:
        if name not in self._index:
            raise KeyError(f"'{name}' is not in the relation carrier")
        return self._index[name]

    def _derive(self, matrix: np.ndarray) -> "RelationMatrix":
        return RelationMatrix(self.carrier, matrix)

    def contains(self, left: str, right: str) -> bool:
        return bool(self.matrix[self.index(left), self.index(right)])

    def pairs(self) -> List[Tuple[str, str]]:
        """Return the related pairs in lexicographic order"""
        rows, cols = np.nonzero(self.matrix)
        return sorted((self.carrier[i], self.carrier[j]) for i, j in zip(rows, cols))

    def unordered_pairs(self) -> List[Tuple[str, str]]:
        """Return each symmetric pair once, as a sorted tuple"""
        return sorted({tuple(sorted(pair)) for pair in self.pairs()})

    def successors(self, name: str) -> Set[str]:
        row = self.matrix[self.index(name), :]
        return {self.carrier[j] for j in np.nonzero(row)[0]}

    def predecessors(self, name: str) -> Set[str]:
        col = self.matrix[:, self.index(name)]
        return {self.carrier[i] for i in np.nonzero(col)[0]}

    def is_empty(self) -> bool:
        return not self.matrix.any()

    def reflexive_elements(self) -> List[str]:
        return [self.carrier[i] for i in np.nonzero(np.diag(self.matrix))[0]]

    def is_irreflexive(self) -> bool:
        return not np.diag(self.matrix).any()

    def symmetric(self) -> "RelationMatrix":
        return self._derive(self.matrix | self.matrix.T)

    def union(self, other: "RelationMatrix") -> "RelationMatrix":
        return self._derive(self.matrix | other.aligned(self.carrier))

    def difference(self, other: "RelationMatrix") -> "RelationMatrix":
        return self._derive(self.matrix & ~other.aligned(self.carrier))

    def intersection(self, other: "RelationMatrix") -> "RelationMatrix":
        return self._derive(self.matrix & other.aligned(self.carrier))

    def is_subset(self, other: "RelationMatrix") -> bool:
        return not (self.matrix & ~other.aligned(self.carrier)).any()

    def aligned(self, carrier: Sequence[str]) -> np.ndarray:
        """Return this relation's matrix re-indexed over another carrier with the same names"""
        if list(carrier) == self.carrier:
            return self.matrix
        order = [self.index(name) for name in carrier]
        return self.matrix[np.ix_(order, order)]

    def compose(self, other: "RelationMatrix") -> "RelationMatrix":
        """Relational composition: (x, z) whenever x self y and y other z"""
        product = self.matrix.astype(np.int64) @ other.aligned(self.carrier).astype(np.int64)
        return self._derive(product > 0)

    def transitive_closure(self) -> "RelationMatrix":
        """Warshall closure, one vectorized outer product per pivot"""
        closure = self.matrix.copy()
        for k in range(len(self.carrier)):
            closure |= np.outer(closure[:, k], closure[k, :])
        return self._derive(closure)

    def transitivity_witness(self) -> Optional[Tuple[str, str]]:
        """A pair implied by composition but missing from the relation, if any"""
        missing = self.compose(self).difference(self)
        pairs = missing.pairs()
        return pairs[0] if pairs else None

    def has_cycle(self) -> bool:
        return not self.transitive_closure().is_irreflexive()

    def restrict(self, names: Iterable[str]) -> "RelationMatrix":
        """Sub-relation over the given names, keeping carrier order"""
        keep = set(names)
        carrier = [name for name in self.carrier if name in keep]
        order = [self.index(name) for name in carrier]
        return RelationMatrix(carrier, self.matrix[np.ix_(order, order)])

    def is_related_within(self, names: Iterable[str]) -> Optional[Tuple[str, str]]:
        """Return some related pair with both ends in `names`, or None"""
        members = [self.index(name) for name in sorted(set(names))]
        if not members:
            return None
        block = self.matrix[np.ix_(members, members)]
        rows, cols = np.nonzero(block)
        if len(rows) == 0:
            return None
        i, j = members[rows[0]], members[cols[0]]
        return self.carrier[i], self.carrier[j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelationMatrix):
            return NotImplemented
        if set(self.carrier) != set(other.carrier):
            return False
        return bool((self.matrix == other.aligned(self.carrier)).all())

    def __repr__(self) -> str:
        return f"RelationMatrix({self.pairs()})"
