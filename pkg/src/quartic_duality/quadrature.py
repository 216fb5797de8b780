"""Radial grids and the composite rules used to integrate nodal fields."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

EPS = float(np.finfo(float).eps)
# roundoff floor on error estimates, in units of eps * sum |w_i f_i|
ROUNDOFF_FACTOR = 50.0

# 5-point Gauss-Lobatto rule on [-1, 1]
_LOBATTO_X = np.array([-1.0, -np.sqrt(3.0 / 7.0), 0.0, np.sqrt(3.0 / 7.0), 1.0])
_LOBATTO_W = np.array([0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1])


class Rule(str, enum.Enum):
    COMPOSITE_SIMPSON = "CompositeSimpson"
    GAUSS_LEGENDRE_COMPOSITE = "GaussLegendreComposite"


@dataclass(frozen=True)
class Integral:
    value: float
    error: float

    def __iter__(self):
        yield self.value
        yield self.error


class RadialGrid:
    """Strictly increasing nodes on ``[a, b]`` together with a quadrature rule.

    ``CompositeSimpson`` pairs consecutive intervals (odd node count) and
    accepts non-uniform spacing.  ``GaussLegendreComposite`` uses 5-point
    Gauss-Lobatto panels, so the node count is ``4*panels + 1`` and panel
    ends are shared nodes; build such grids with :meth:`uniform`.
    """

    def __init__(self, nodes, rule: Rule = Rule.COMPOSITE_SIMPSON):
        nodes = np.asarray(nodes, dtype=float)
        rule = Rule(rule)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValueError("a grid needs at least three nodes")
        if not np.all(np.isfinite(nodes)) or np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be finite and strictly increasing")
        if nodes.size % 2 == 0:
            raise ValueError("composite rules need an odd node count")
        if rule is Rule.GAUSS_LEGENDRE_COMPOSITE and (nodes.size - 1) % 4:
            raise ValueError("Lobatto panels need 4*k + 1 nodes")
        self.nodes = nodes
        self.rule = rule
        self.nodes.setflags(write=False)
        self.weights = self._weights(nodes, rule)

    @classmethod
    def uniform(cls, a: float, b: float, n: int = 2049, rule: Rule = Rule.COMPOSITE_SIMPSON) -> "RadialGrid":
        if not a < b:
            raise ValueError("need a < b")
        rule = Rule(rule)
        if rule is Rule.COMPOSITE_SIMPSON:
            return cls(np.linspace(a, b, n), rule)
        if (n - 1) % 4:
            raise ValueError("Lobatto panels need 4*k + 1 nodes")
        edges = np.linspace(a, b, (n - 1) // 4 + 1)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
        inner = (mid[:, None] + half[:, None] * _LOBATTO_X[None, 1:4]).ravel()
        nodes = np.empty(n)
        nodes[0::4] = edges
        nodes[np.arange(n) % 4 != 0] = inner
        return cls(nodes, rule)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    def __len__(self) -> int:
        return self.nodes.size

    def __repr__(self) -> str:
        return f"RadialGrid([{self.a!r}, {self.b!r}], n={len(self)}, rule={self.rule.value})"

    @staticmethod
    def _weights(nodes: np.ndarray, rule: Rule) -> np.ndarray:
        w = np.zeros_like(nodes)
        if rule is Rule.GAUSS_LEGENDRE_COMPOSITE:
            half = 0.5 * (nodes[4::4] - nodes[:-4:4])
            for k in range(5):
                w[k:k + nodes.size - 4:4] += half * _LOBATTO_W[k]
            return w
        h0 = nodes[1:-1:2] - nodes[:-2:2]
        h1 = nodes[2::2] - nodes[1:-1:2]
        span = (h0 + h1) / 6.0
        w[:-2:2] += span * (2.0 - h1 / h0)
        w[1:-1:2] += span * (h0 + h1) ** 2 / (h0 * h1)
        w[2::2] += span * (2.0 - h0 / h1)
        return w

    def coarse(self) -> "RadialGrid | None":
        """Every other node, when that is still a valid grid for the rule."""
        if self.rule is Rule.COMPOSITE_SIMPSON and (len(self) - 1) % 4 == 0:
            return RadialGrid(self.nodes[::2], self.rule)
        return None

    def integrate(self, values) -> Integral:
        """Integral of nodal ``values`` with an error estimate.

        Simpson: Richardson estimate ``|I_h - I_2h| / 15`` against the
        every-other-node grid, falling back to the Simpson-trapezoid gap when
        the node count does not allow halving.  Lobatto: gap to the Simpson
        rule embedded in each panel.  The estimate never drops below the
        accumulated rounding level ``50 * eps * sum |w_i f_i|``.
        """
        values = np.asarray(values, dtype=float)
        if values.shape != self.nodes.shape:
            raise ValueError(f"expected {self.nodes.size} nodal values, got {values.shape}")
        value = float(np.dot(self.weights, values))
        if self.rule is Rule.GAUSS_LEGENDRE_COMPOSITE:
            embedded = RadialGrid(self.nodes[::2], Rule.COMPOSITE_SIMPSON)
            err = abs(value - float(np.dot(embedded.weights, values[::2])))
        else:
            coarse = self.coarse()
            if coarse is not None:
                err = abs(value - float(np.dot(coarse.weights, values[::2]))) / 15.0
            else:
                trap = 0.5 * float(np.dot(np.diff(self.nodes), values[1:] + values[:-1]))
                err = abs(value - trap)
        floor = ROUNDOFF_FACTOR * EPS * float(np.dot(np.abs(self.weights), np.abs(values)))
        return Integral(value, max(err, floor))
