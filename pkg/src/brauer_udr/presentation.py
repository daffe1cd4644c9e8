"""The bound quiver of the generalized Brauer star algebra with e edges.

Vertices are ``1..e``.  Arrows ``a1..a<e>`` run around the star's cyclic
order (``a_i: i -> i+1``, ``a_e: e -> 1``) and ``d`` is the loop at vertex
``e`` coming from the multiplicity-two leaf.  Paths are tuples of arrow
names written in composition order: ``("a2", "a1", "a3")`` applies ``a3``
first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

Path = tuple[str, ...]


class PresentationError(ValueError):
    pass


class InvalidE(PresentationError):
    pass


class NotComposable(PresentationError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass(frozen=True)
class Relation:
    """``lhs = rhs`` in the algebra; ``rhs is None`` means ``lhs = 0``."""

    lhs: Path
    rhs: Path | None = None

    def __str__(self):
        left = "".join(self.lhs)
        return f"{left} = {''.join(self.rhs)}" if self.rhs else f"{left} = 0"


class NormalForm(NamedTuple):
    """A nonzero basis path of P_start: ``(start, depth, branch)``.

    ``branch`` is ``"a"`` for walks along the arrow cycle (depth 0 is the
    idempotent) and ``"d"`` for the loop ``d`` itself.
    """

    start: int
    depth: int
    branch: str


@dataclass(frozen=True, eq=False)
class QuiverPresentation:
    e: int

    def __post_init__(self):
        if not isinstance(self.e, int) or self.e < 1:
            raise InvalidE(f"number of edges must be a positive integer, got {self.e!r}")

    # -- arrows ----------------------------------------------------------
    @cached_property
    def arrows(self) -> tuple[Arrow, ...]:
        e = self.e
        out = [Arrow(f"a{i}", i, i % e + 1) for i in range(1, e + 1)]
        out.append(Arrow("d", e, e))
        return tuple(out)

    @cached_property
    def arrow_map(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    @property
    def arrow_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.arrows)

    @property
    def vertices(self) -> range:
        return range(1, self.e + 1)

    def arrow(self, name: str) -> Arrow:
        try:
            return self.arrow_map[name]
        except KeyError:
            raise PresentationError(f"no arrow named {name!r} for e={self.e}") from None

    def cycle_arrow(self, v: int) -> str:
        """The cycle arrow leaving vertex v."""
        return f"a{v}"

    def path_source(self, path: Path, start: int | None = None) -> int:
        if not path:
            if start is None:
                raise NotComposable("the empty path needs an explicit vertex")
            return start
        return self.arrow(path[-1]).source

    def path_target(self, path: Path, start: int | None = None) -> int:
        if not path:
            return self.path_source(path, start)
        self.check_composable(path)
        return self.arrow(path[0]).target

    def check_composable(self, path: Path) -> None:
        for left, right in zip(path, path[1:]):
            if self.arrow(right).target != self.arrow(left).source:
                raise NotComposable(f"{left} cannot follow {right}")

    # -- relations -------------------------------------------------------
    def cycle(self, i: int) -> Path:
        """The full arrow cycle based at i, in written order."""
        e = self.e
        applied = [f"a{(i - 1 + k) % e + 1}" for k in range(e)]
        return tuple(reversed(applied))

    def walk(self, i: int, length: int) -> Path:
        e = self.e
        applied = [f"a{(i - 1 + k) % e + 1}" for k in range(length)]
        return tuple(reversed(applied))

    @cached_property
    def relations(self) -> tuple[Relation, ...]:
        e = self.e
        if e == 1:
            return (
                Relation(("a1", "d")),
                Relation(("d", "a1")),
                Relation(("a1", "a1"), ("d", "d")),
            )
        rels = [
            Relation(self.cycle(e) * 2, ("d", "d")),
            Relation((f"a{e}", "d")),
            Relation(("d", f"a{e - 1}")),
        ]
        for i in range(1, e):
            rels.append(Relation((f"a{i}",) + self.cycle(i) * 2))
        return tuple(rels)

    # -- normal forms ----------------------------------------------------
    def vertex_of(self, nf: NormalForm) -> int:
        if nf.branch == "d":
            return self.e
        return (nf.start - 1 + nf.depth) % self.e + 1

    @property
    def socle_depth(self) -> int:
        return 2 * self.e

    def step(self, nf: NormalForm | None, arrow: str) -> NormalForm | None:
        """Apply one arrow to a basis path (or to zero)."""
        arr = self.arrow(arrow)
        if nf is None:
            return None
        here = self.vertex_of(nf)
        if arr.source != here:
            raise NotComposable(f"{arrow} does not start at vertex {here}")
        e = self.e
        top = 2 * e
        if nf.branch == "d":
            # d then d lands in the socle (d^2 = C^2); a_e d = 0
            return NormalForm(nf.start, top, "a") if arrow == "d" else None
        if nf.depth == top:
            return None
        if arrow == "d":
            # only the idempotent at e may start with d; d a_{e-1} = 0
            return NormalForm(e, 1, "d") if nf.depth == 0 else None
        return NormalForm(nf.start, nf.depth + 1, "a")

    def normal_form(self, path: Path, start: int | None = None) -> NormalForm | None:
        """Normal form of a path, or None if it is zero in the algebra."""
        self.check_composable(path)
        s = self.path_source(path, start)
        if start is not None and path and start != s:
            raise NotComposable(f"path starts at {s}, not {start}")
        nf: NormalForm | None = NormalForm(s, 0, "a")
        for arrow in reversed(path):
            nf = self.step(nf, arrow)
        return nf

    def canonical_path(self, nf: NormalForm) -> Path:
        if nf.branch == "d":
            return ("d",)
        return self.walk(nf.start, nf.depth)

    def socle_form(self, i: int) -> NormalForm:
        return NormalForm(i, 2 * self.e, "a")

    def socle_path(self, i: int) -> Path:
        return self.walk(i, 2 * self.e)

    def is_socle_or_zero(self, path: Path, start: int | None = None) -> bool:
        nf = self.normal_form(path, start)
        return nf is None or nf.depth == 2 * self.e

    def format_path(self, path: Path) -> str:
        return "*".join(path)


def build_presentation(e: int) -> QuiverPresentation:
    return QuiverPresentation(e)


@dataclass(frozen=True)
class PathBasis:
    """Normal-form basis of each indecomposable projective P_i."""

    quiver: QuiverPresentation
    per_vertex: dict

    def basis(self, i: int) -> tuple[NormalForm, ...]:
        return self.per_vertex[i]

    def dim(self, i: int) -> int:
        return len(self.per_vertex[i])

    @property
    def total_dimension(self) -> int:
        return sum(len(b) for b in self.per_vertex.values())


def compute_path_basis(q: QuiverPresentation) -> PathBasis:
    """Close the idempotent of each vertex under all arrows."""
    per_vertex = {}
    for i in q.vertices:
        seen: list[NormalForm] = []
        frontier = [NormalForm(i, 0, "a")]
        while frontier:
            nf = frontier.pop(0)
            if nf in seen:
                continue
            seen.append(nf)
            here = q.vertex_of(nf)
            for arr in q.arrows:
                if arr.source == here:
                    nxt = q.step(nf, arr.name)
                    if nxt is not None and nxt not in seen:
                        frontier.append(nxt)
        # ordered by vertex, then depth, then branch
        seen.sort(key=lambda nf: (q.vertex_of(nf), nf.depth, nf.branch))
        per_vertex[i] = tuple(seen)
    return PathBasis(q, per_vertex)
