"""Query-metered access to a digraph in the two query models."""
from __future__ import annotations

import enum

from .errors import BadVertexIndex, ModelViolation

__all__ = ["QueryModel", "OracleSession"]


class QueryModel(enum.Enum):
    UNIDIRECTIONAL = "unidirectional"
    BIDIRECTIONAL = "bidirectional"


class OracleSession:
    """Counts every neighbor or degree query made against ``graph``.

    ``graph`` is anything exposing ``num_vertices``, ``out_neighbor(v, i)``
    and ``out_degree(v)``; bidirectional sessions also need ``in_neighbor``
    and ``in_degree``. A :class:`~digraph_lab.digraph.BoundedDigraph` and a
    :class:`~digraph_lab.reduction.ReductionOracle` both qualify.
    """

    def __init__(self, graph, model: QueryModel | str = QueryModel.BIDIRECTIONAL):
        self.graph = graph
        self.model = QueryModel(model)
        self.query_count = 0
        if self.model is QueryModel.BIDIRECTIONAL and not hasattr(graph, "in_neighbor"):
            raise TypeError(f"{type(graph).__name__} cannot answer in-neighbor queries")

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices

    def _check(self, v: int) -> None:
        if not 1 <= v <= self.graph.num_vertices:
            raise BadVertexIndex(f"vertex {v} outside 1..{self.graph.num_vertices}")

    def _check_in(self) -> None:
        if self.model is QueryModel.UNIDIRECTIONAL:
            raise ModelViolation("in-neighbor queries are not allowed in the unidirectional model")

    def out_neighbor(self, v: int, i: int) -> int | None:
        self._check(v)
        self.query_count += 1
        return self.graph.out_neighbor(v, i)

    def out_degree(self, v: int) -> int:
        self._check(v)
        self.query_count += 1
        return self.graph.out_degree(v)

    def in_neighbor(self, v: int, i: int) -> int | None:
        self._check_in()
        self._check(v)
        self.query_count += 1
        return self.graph.in_neighbor(v, i)

    def in_degree(self, v: int) -> int:
        self._check_in()
        self._check(v)
        self.query_count += 1
        return self.graph.in_degree(v)

    def __repr__(self) -> str:
        return f"OracleSession({self.model.value}, queries={self.query_count})"
