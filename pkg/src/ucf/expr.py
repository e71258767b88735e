"""Sparse linear expressions over named variables.

Coefficients may be int, float, or Fraction; the expression never mixes a
variable in twice and drops terms that cancel to zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field


class LinExpr:
    """constant + sum(coef * var) with hashable variable ids as keys."""

    __slots__ = ("terms", "constant")

    def __init__(self, terms=None, constant=0):
        self.terms: dict = dict(terms) if terms else {}
        self.constant = constant

    @classmethod
    def var(cls, vid, coef=1) -> "LinExpr":
        return cls({vid: coef})

    @classmethod
    def const(cls, c) -> "LinExpr":
        return cls(None, c)

    def add_term(self, vid, coef) -> "LinExpr":
        if coef == 0:
            return self
        cur = self.terms.get(vid, 0)
        new = cur + coef
        if new == 0:
            self.terms.pop(vid, None)
        else:
            self.terms[vid] = new
        return self

    def add(self, other, scale=1) -> "LinExpr":
        """In-place self += scale * other, where other is LinExpr or a number."""
        if isinstance(other, LinExpr):
            for vid, c in other.terms.items():
                self.add_term(vid, scale * c)
            self.constant = self.constant + scale * other.constant
        else:
            self.constant = self.constant + scale * other
        return self

    def copy(self) -> "LinExpr":
        e = LinExpr()
        e.terms = dict(self.terms)
        e.constant = self.constant
        return e

    def scaled(self, k) -> "LinExpr":
        e = LinExpr()
        if k != 0:
            e.terms = {v: k * c for v, c in self.terms.items()}
            e.constant = k * self.constant
        return e

    def value(self, assignment, default=0):
        """Evaluate under a mapping var id -> value."""
        tot = self.constant
        for vid, c in self.terms.items():
            tot = tot + c * assignment.get(vid, default)
        return tot

    def is_constant(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, LinExpr) and self.terms == other.terms
                and self.constant == other.constant)

    def __repr__(self):
        body = " + ".join(f"{c}*{v}" for v, c in sorted(self.terms.items(), key=lambda kv: str(kv[0])))
        if self.constant or not body:
            body = f"{body} + {self.constant}" if body else f"{self.constant}"
        return f"LinExpr({body})"


@dataclass(frozen=True)
class Variable:
    """A model variable: bounds plus integrality marker."""

    id: str
    kind: str          # "u", "v", "w", "tau", "tau3", "p", "s", "z"
    lower: float = 0.0
    upper: float = 1.0
    integral: bool = False


@dataclass
class Row:
    """A linear constraint expr (sense) rhs with sense in {<=, >=, =}.

    The expression's constant is folded into the rhs at build time, so
    stored rows always have constant 0.
    """

    name: str
    expr: LinExpr
    sense: str
    rhs: float

    def __post_init__(self):
        if self.expr.constant:
            self.rhs = self.rhs - self.expr.constant
            self.expr = LinExpr(self.expr.terms)
        if self.sense not in ("<=", ">=", "="):
            raise ValueError(f"bad row sense {self.sense!r}")


@dataclass
class Formulation:
    """A built model: variables in deterministic order, rows, and objective."""

    kind: str
    variables: dict[str, Variable] = field(default_factory=dict)
    rows: list[Row] = field(default_factory=list)
    objective: LinExpr = field(default_factory=LinExpr)
    quad_objective: list[tuple[str, str, float]] = field(default_factory=list)
    # tangent range per quadratic variable; piecewise linearization places
    # its supports here rather than on the (wider) variable bounds
    quad_domain: dict[str, tuple[float, float]] = field(default_factory=dict)

    def add_var(self, v: Variable) -> str:
        if v.id in self.variables:
            raise ValueError(f"duplicate variable {v.id}")
        self.variables[v.id] = v
        return v.id

    def add_row(self, name: str, expr: LinExpr, sense: str, rhs: float) -> None:
        for vid in expr.terms:
            if vid not in self.variables:
                raise ValueError(f"row {name} references unknown variable {vid}")
        self.rows.append(Row(name, expr, sense, rhs))

    @property
    def stats(self) -> dict:
        nz = sum(len(r.expr.terms) for r in self.rows)
        nbin = sum(1 for v in self.variables.values() if v.integral)
        return {
            "kind": self.kind,
            "variables": len(self.variables),
            "binaries": nbin,
            "rows": len(self.rows),
            "nonzeros": nz,
        }
