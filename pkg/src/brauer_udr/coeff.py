"""Exact scalars: GF(p) arithmetic, dense linear algebra mod p, and
finite-dimensional commutative local algebras given by multiplication tables.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._kernels import rref

DEFAULT_DEGREE_CAP = 8


class CoeffError(ValueError):
    pass


class NonLocal(CoeffError):
    pass


class InfiniteWithinCap(CoeffError):
    pass


class ParseError(CoeffError):
    def __init__(self, message: str, text: str = "", position: int = 0, expected: tuple[str, ...] = ()):
        self.text = text
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        if text:
            detail += f"\n  {text}\n  {' ' * position}^"
        super().__init__(detail)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n**0.5) + 1))


def check_prime(p: int) -> int:
    if not is_prime(p) or p < 3:
        raise CoeffError(f"modulus must be an odd prime, got {p}")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(p)."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise CoeffError("mixed moduli")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def inverse(self) -> "FieldElement":
        return FieldElement(inv_mod(self.value, self.p), self.p)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.p).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElement(pow(self.value, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


# ---------------------------------------------------------------------------
# linear algebra mod p

def as_mod(A, p: int) -> np.ndarray:
    return np.asarray(A, dtype=np.int64) % p


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[1] == 0 or A.shape[0] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    if A.shape[1] * (p - 1) ** 2 < 2**52:
        # exact in double precision; goes through BLAS
        return (A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p
    return (A @ B) % p


def rank(A, p: int) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def row_basis(A, p: int) -> np.ndarray:
    """Echelonized basis (as rows) of the row space of ``A``."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2:
        A = A.reshape(-1, A.shape[-1]) if A.ndim > 2 else A.reshape(1, -1)
    if A.shape[0] == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    R, piv = rref(A, p)
    return R[: len(piv)].copy()


def nullspace(A, p: int, ncols: int | None = None) -> np.ndarray:
    """Basis of {x : A x = 0}, one vector per row.

    The vector attached to free column ``f`` has a 1 in position ``f`` and
    zeros in every other free position, so the basis is deterministic.
    """
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1] if ncols is None else ncols
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    piv = list(piv)
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        K[k, f] = 1
        for r, c in enumerate(piv):
            K[k, c] = (-R[r, f]) % p
    return K


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of ``solve_linear``: either a particular solution or an
    inconsistency certificate ``y`` with ``y A = 0`` and ``y b != 0``."""

    consistent: bool
    particular: np.ndarray | None
    kernel: np.ndarray
    certificate: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.kernel.shape[0]


def solve_linear(A, b, p: int) -> LinearSolution:
    A = as_mod(A, p)
    b = as_mod(b, p)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    m, n = A.shape
    if m == 0:
        return LinearSolution(True, np.zeros(n, dtype=np.int64), np.eye(n, dtype=np.int64))
    aug = np.concatenate([A, b, np.eye(m, dtype=np.int64)], axis=1)
    R, piv = rref(aug, p, ncols=n)
    r = len(piv)
    kernel = nullspace(A, p)
    bad = np.nonzero(R[r:, n])[0]
    if bad.size:
        cert = R[r + int(bad[0]), n + 1 :].copy()
        return LinearSolution(False, None, kernel, cert)
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return LinearSolution(True, x, kernel)


def inverse(A, p: int) -> np.ndarray:
    A = as_mod(A, p)
    n = A.shape[0]
    if A.shape != (n, n):
        raise CoeffError("inverse of a non-square matrix")
    if n == 0:
        return A.copy()
    R, piv = rref(np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1), p, ncols=n)
    if len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return R[:, n:].copy()


def is_invertible(A, p: int) -> bool:
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def in_row_space(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    if basis.shape[0] == 0:
        return not np.any(np.asarray(v) % p)
    return rank(np.vstack([basis, np.asarray(v).reshape(1, -1)]), p) == rank(basis, p)


def complement_columns(basis: np.ndarray, n: int, p: int) -> list[int]:
    """Standard basis indices completing the row space of ``basis`` to k^n."""
    if basis.shape[0] == 0:
        return list(range(n))
    _, piv = rref(basis, p)
    piv = set(int(c) for c in piv)
    return [c for c in range(n) if c not in piv]


# ---------------------------------------------------------------------------
# polynomials and ring specs

Monomial = tuple[int, ...]
Poly = dict  # Monomial -> coefficient mod p


def _padd(a: Poly, b: Poly, p: int, sign: int = 1) -> Poly:
    out = dict(a)
    for m, c in b.items():
        out[m] = (out.get(m, 0) + sign * c) % p
    return {m: c for m, c in out.items() if c}


def _pmul(a: Poly, b: Poly, p: int) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = (out.get(m, 0) + c1 * c2) % p
    return {m: c for m, c in out.items() if c}


def _pdeg(a: Poly) -> int:
    return max((sum(m) for m in a), default=-1)


class _Tokens:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        names = sorted(variables, key=len, reverse=True)
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.toks.append(("int", text[i:j], i))
                i = j
                continue
            for name in names:
                if text.startswith(name, i):
                    self.toks.append(("var", name, i))
                    i += len(name)
                    break
            else:
                if ch in "()+-*^,":
                    self.toks.append((ch, ch, i))
                    i += 1
                else:
                    raise ParseError(f"unexpected character {ch!r}", text, i, ("variable", "integer", "( ) + - * ^ ,"))
        self.k = 0

    def peek(self) -> str | None:
        return self.toks[self.k][0] if self.k < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.k][2] if self.k < len(self.toks) else len(self.text)

    def take(self, kind: str | None = None):
        if self.k >= len(self.toks):
            raise ParseError("unexpected end of input", self.text, len(self.text), (kind,) if kind else ())
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"unexpected token {tok[1]!r}", self.text, tok[2], (kind,))
        self.k += 1
        return tok


class _IdealParser:
    """Recursive-descent parser for generator lists.

    Values are ``("poly", Poly)`` or ``("ideal", [Poly, ...])``; a
    parenthesised comma list is an ideal, and ideals multiply generator-wise.
    """

    def __init__(self, text: str, variables: tuple[str, ...], p: int):
        self.t = _Tokens(text, variables)
        self.vars = variables
        self.p = p

    def const(self, c: int) -> Poly:
        c %= self.p
        return {(0,) * len(self.vars): c} if c else {}

    def parse(self) -> list[Poly]:
        val = self.expr()
        if self.t.peek() is not None:
            raise ParseError("trailing input", self.t.text, self.t.pos(), ("end of input",))
        return val[1] if val[0] == "ideal" else [val[1]]

    def expr(self):
        val = self.term()
        while self.t.peek() in ("+", "-"):
            op = self.t.take()[0]
            pos = self.t.pos()
            rhs = self.term()
            if val[0] != "poly" or rhs[0] != "poly":
                raise ParseError("ideals cannot be added with +; list generators with ','", self.t.text, pos)
            val = ("poly", _padd(val[1], rhs[1], self.p, 1 if op == "+" else -1))
        return val

    def term(self):
        val = self.unary()
        while True:
            nxt = self.t.peek()
            if nxt == "*":
                self.t.take()
            elif nxt not in ("var", "int", "("):
                return val
            rhs = self.unary()
            val = self._mul(val, rhs)

    def _mul(self, a, b):
        if a[0] == "poly" and b[0] == "poly":
            return ("poly", _pmul(a[1], b[1], self.p))
        ga = a[1] if a[0] == "ideal" else [a[1]]
        gb = b[1] if b[0] == "ideal" else [b[1]]
        return ("ideal", [_pmul(x, y, self.p) for x in ga for y in gb])

    def unary(self):
        if self.t.peek() == "-":
            self.t.take()
            val = self.unary()
            if val[0] != "poly":
                raise ParseError("cannot negate an ideal", self.t.text, self.t.pos())
            return ("poly", _padd({}, val[1], self.p, -1))
        if self.t.peek() == "+":
            self.t.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.t.peek() == "^":
            self.t.take()
            n = int(self.t.take("int")[1])
            val = ("poly", self.const(1))
            for _ in range(n):
                val = self._mul(val, base)
            return val
        return base

    def atom(self):
        kind = self.t.peek()
        if kind == "int":
            return ("poly", self.const(int(self.t.take()[1])))
        if kind == "var":
            name = self.t.take()[1]
            idx = self.vars.index(name)
            return ("poly", {tuple(int(j == idx) for j in range(len(self.vars))): 1})
        if kind == "(":
            self.t.take()
            items = [self.expr()]
            while self.t.peek() == ",":
                self.t.take()
                items.append(self.expr())
            self.t.take(")")
            if len(items) == 1:
                return items[0]
            gens: list[Poly] = []
            for it in items:
                gens.extend(it[1] if it[0] == "ideal" else [it[1]])
            return ("ideal", gens)
        raise ParseError(
            "expected a polynomial" if kind else "unexpected end of input",
            self.t.text, self.t.pos(), ("variable", "integer", "("),
        )


_SPEC_RE = re.compile(r"^\s*k\s*(?:\[(?P<vars>[^\]]*)\])?\s*(?:/(?P<ideal>.*))?$", re.S)


def parse_ring_spec(spec: str, p: int) -> tuple[tuple[str, ...], list[Poly]]:
    m = _SPEC_RE.match(spec)
    if not m:
        raise ParseError("ring spec must look like k[t]/(...) or k[t1,t2]/(...)", spec, 0, ("k",))
    names = tuple(v.strip() for v in (m.group("vars") or "").split(",") if v.strip())
    if len(names) > 2:
        raise ParseError("at most two variables are supported", spec, spec.index("["))
    for v in names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z_]*\d*", v):
            raise ParseError(f"bad variable name {v!r}", spec, spec.index(v))
    if len(set(names)) != len(names):
        raise ParseError("repeated variable", spec, spec.index("["))
    ideal = m.group("ideal")
    if ideal is None:
        if names:
            raise InfiniteWithinCap(f"{spec}: a polynomial ring without relations is infinite-dimensional")
        return names, []
    offset = m.start("ideal")
    try:
        gens = _IdealParser(ideal, names, p).parse()
    except ParseError as exc:
        raise ParseError(str(exc).split(" at position")[0], spec, offset + exc.position, exc.expected) from None
    return names, gens


def _monomials(nvars: int, maxdeg: int) -> list[Monomial]:
    """All monomials of degree <= maxdeg in the local order: by degree, and
    within a degree with the last variable's exponent descending."""
    out: list[Monomial] = []
    for d in range(maxdeg + 1):
        if nvars == 0:
            if d == 0:
                out.append(())
            continue
        if nvars == 1:
            out.append((d,))
            continue
        for b in range(d, -1, -1):
            out.append((d - b, b))
    return out


def _monomial_label(m: Monomial, names: tuple[str, ...]) -> str:
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True, eq=False)
class LocalAlgebra:
    """A commutative local k-algebra of finite dimension with basis[0] = 1."""

    name: str
    p: int
    labels: tuple[str, ...]
    mult: np.ndarray = field(repr=False)
    variables: tuple[str, ...] = ()
    monomials: tuple[Monomial, ...] = ()
    # reduction data for monomials of degree <= cap: monomial -> coords
    _reduce: dict = field(default_factory=dict, repr=False, compare=False)
    cap: int = DEFAULT_DEGREE_CAP

    @property
    def dimension(self) -> int:
        return len(self.labels)

    @property
    def max_ideal_indices(self) -> tuple[int, ...]:
        return tuple(range(1, self.dimension))

    def __repr__(self):
        return f"LocalAlgebra({self.name!r}, p={self.p}, dim={self.dimension})"

    # -- elements ----------------------------------------------------------
    def zero(self) -> np.ndarray:
        return np.zeros(self.dimension, dtype=np.int64)

    def one(self) -> np.ndarray:
        v = self.zero()
        v[0] = 1
        return v

    def scalar(self, c: int) -> np.ndarray:
        v = self.zero()
        v[0] = c % self.p
        return v

    def element(self, text: str) -> np.ndarray:
        """Parse a polynomial in the ring's variables and reduce it."""
        gens = _IdealParser(text, self.variables, self.p).parse()
        if len(gens) != 1:
            raise ParseError("expected a single element", text, 0)
        return self.reduce_poly(gens[0])

    def reduce_poly(self, poly: Poly) -> np.ndarray:
        out = self.zero()
        for m, c in poly.items():
            if sum(m) > self.cap:
                continue  # lies in m^(cap+1), which is zero in the quotient
            out = (out + c * self._reduce[m]) % self.p
        return out

    def gen(self, name: str) -> np.ndarray:
        return self.element(name)

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), self.mult) % self.p

    def add(self, x, y) -> np.ndarray:
        return (np.asarray(x) + np.asarray(y)) % self.p

    def is_unit(self, x) -> bool:
        return int(np.asarray(x)[0]) % self.p != 0

    def mult_matrix(self, x) -> np.ndarray:
        """Matrix of y -> x*y in the basis (columns index y's basis)."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=np.int64), self.mult) % self.p

    def inverse(self, x) -> np.ndarray:
        if not self.is_unit(x):
            raise ZeroDivisionError("element of the maximal ideal is not invertible")
        return inverse(self.mult_matrix(x), self.p)[:, 0].copy()

    def format(self, x) -> str:
        x = np.asarray(x) % self.p
        terms = []
        for c, lab in zip(x, self.labels):
            c = int(c)
            if not c:
                continue
            if lab == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(lab)
            else:
                terms.append(f"{c}*{lab}")
        return " + ".join(terms) if terms else "0"

    # -- matrices over R: arrays of shape (rows, cols, dim) -----------------
    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.dimension == 1:
            return matmul(A[:, :, 0], B[:, :, 0], self.p)[:, :, None]
        C = np.einsum("abi,bcj->acij", A, B) % self.p
        return np.einsum("acij,ijk->ack", C, self.mult) % self.p

    def identity(self, n: int) -> np.ndarray:
        out = np.zeros((n, n, self.dimension), dtype=np.int64)
        out[np.arange(n), np.arange(n), 0] = 1
        return out

    def embed(self, A: np.ndarray) -> np.ndarray:
        """A GF(p) matrix viewed over R."""
        A = np.asarray(A, dtype=np.int64) % self.p
        out = np.zeros(A.shape + (self.dimension,), dtype=np.int64)
        out[..., 0] = A
        return out

    def reduce(self, A: np.ndarray) -> np.ndarray:
        """Entrywise reduction modulo the maximal ideal."""
        return np.asarray(A)[..., 0] % self.p

    def restrict_scalars(self, A: np.ndarray) -> np.ndarray:
        """The k-linear matrix of an R-matrix acting on R^cols (block per entry)."""
        A = np.asarray(A, dtype=np.int64)
        r, c, d = A.shape
        blocks = np.einsum("abi,ijk->akbj", A, self.mult) % self.p
        return blocks.reshape(r * d, c * d)

    # -- structure checks ----------------------------------------------------
    def check_axioms(self) -> None:
        T = self.mult
        d = self.dimension
        p = self.p
        if not np.array_equal(T, np.transpose(T, (1, 0, 2))):
            raise CoeffError(f"{self.name}: not commutative")
        left = np.einsum("ijm,mkn->ijkn", T, T) % p
        right = np.einsum("jkm,imn->ijkn", T, T) % p
        if not np.array_equal(left, right):
            raise CoeffError(f"{self.name}: not associative")
        e0 = np.eye(d, dtype=np.int64)
        if not np.array_equal(T[0] % p, e0):
            raise CoeffError(f"{self.name}: basis[0] is not the unit")
        if self.nilpotency_index() is None:
            raise NonLocal(f"{self.name}: maximal ideal is not nilpotent")

    def nilpotency_index(self) -> int | None:
        """Least N with m^N = 0, or None."""
        d = self.dimension
        if d == 1:
            return 1
        m = np.eye(d, dtype=np.int64)[1:]
        power = m
        for n in range(1, d + 1):
            if power.shape[0] == 0 or not np.any(power):
                return n
            prods = np.einsum("ai,bj,ijk->abk", power, m, self.mult).reshape(-1, d) % self.p
            power = row_basis(prods, self.p)
        return None

    def ideal_power_basis(self, n: int) -> np.ndarray:
        d = self.dimension
        basis = np.eye(d, dtype=np.int64)
        m = basis[1:]
        for _ in range(n):
            if basis.shape[0] == 0:
                break
            prods = np.einsum("ai,bj,ijk->abk", basis, m, self.mult).reshape(-1, d) % self.p
            basis = row_basis(prods, self.p)
        return basis


def _reduction_data(names, gens, p, cap):
    nv = len(names)
    monos = _monomials(nv, cap)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in gens:
        for mu in monos:
            prod = _pmul(g, {mu: 1}, p)
            row = np.zeros(len(monos), dtype=np.int64)
            for m, c in prod.items():
                if sum(m) <= cap:
                    row[index[m]] = c
            if row.any():
                rows.append(row)
    if rows:
        R, piv = rref(np.array(rows), p)
        R = R[: len(piv)]
    else:
        R, piv = np.zeros((0, len(monos)), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return monos, index, R, [int(c) for c in piv]


def _contains_power_in_polynomial_ring(names, gens, p, n, bound) -> bool:
    """Does the ideal of k[t] (not its completion) contain every monomial of
    degree n, certified by combinations of degree <= bound?"""
    nv = len(names)
    monos = _monomials(nv, bound)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in gens:
        dg = _pdeg(g)
        for mu in monos:
            if sum(mu) + dg > bound:
                continue
            prod = _pmul(g, {mu: 1}, p)
            row = np.zeros(len(monos), dtype=np.int64)
            for m, c in prod.items():
                row[index[m]] = c
            rows.append(row)
    if not rows:
        return False
    basis = row_basis(np.array(rows), p)
    r0 = basis.shape[0]
    targets = [m for m in monos if sum(m) == n]
    extra = np.zeros((len(targets), len(monos)), dtype=np.int64)
    for i, m in enumerate(targets):
        extra[i, index[m]] = 1
    return rank(np.vstack([basis, extra]), p) == r0


def build_local_algebra(spec: str, p: int, cap: int = DEFAULT_DEGREE_CAP) -> LocalAlgebra:
    """Quotient of k[t] (or k[t1,t2]) by an ideal containing a power of the
    augmentation ideal, with a monomial basis in the local order."""
    check_prime(p)
    names, gens = parse_ring_spec(spec, p)
    nv = len(names)
    gens = [g for g in gens if g]
    if nv == 0:
        if gens:
            raise NonLocal(f"{spec}: a nonzero constant generates the unit ideal")
        mult = np.ones((1, 1, 1), dtype=np.int64)
        return LocalAlgebra(spec.strip(), p, ("1",), mult, (), ((),), {(): np.ones(1, dtype=np.int64)}, cap)
    if any(g.get((0,) * nv, 0) for g in gens):
        raise NonLocal(f"{spec}: a generator has a nonzero constant term, so the quotient is not local at the origin")
    monos, index, R, piv = _reduction_data(names, gens, p, cap)
    pivset = set(piv)
    level = None
    for n in range(1, cap + 1):
        if all(index[m] in pivset for m in monos if sum(m) == n):
            level = n
            break
    if level is None:
        raise InfiniteWithinCap(f"{spec}: no power of the maximal ideal up to degree {cap} lies in the ideal")
    if not _contains_power_in_polynomial_ring(names, gens, p, level, 2 * cap):
        raise NonLocal(f"{spec}: the polynomial quotient has support away from the origin")
    basis_cols = sorted(
        (i for i in range(len(monos)) if i not in pivset),
        key=lambda i: (sum(monos[i]), tuple(-e for e in monos[i])),
    )
    pos = {c: j for j, c in enumerate(basis_cols)}
    d = len(basis_cols)
    reduce: dict = {}
    pivot_row = {c: r for r, c in enumerate(piv)}
    for i, m in enumerate(monos):
        v = np.zeros(d, dtype=np.int64)
        if i in pos:
            v[pos[i]] = 1
        else:
            row = R[pivot_row[i]]
            for c, j in pos.items():
                v[j] = (-row[c]) % p
        reduce[m] = v
    basis_monos = tuple(monos[c] for c in basis_cols)
    mult = np.zeros((d, d, d), dtype=np.int64)
    for a, ma in enumerate(basis_monos):
        for b, mb in enumerate(basis_monos):
            prod = tuple(x + y for x, y in zip(ma, mb))
            if sum(prod) <= cap:
                mult[a, b] = reduce[prod]
    labels = tuple(_monomial_label(m, names) for m in basis_monos)
    alg = LocalAlgebra(spec.strip(), p, labels, mult, names, basis_monos, reduce, cap)
    alg.check_axioms()
    return alg


def truncated_power_series(p: int, n: int, var: str = "t") -> LocalAlgebra:
    """k[t]/(t^n)."""
    return build_local_algebra(f"k[{var}]/({var}^{n})", p, cap=max(DEFAULT_DEGREE_CAP, n))


def reduce_mod_m(x) -> int:
    """Residue of an algebra element (its coefficient on the unit)."""
    return int(np.asarray(x)[0])


@dataclass(frozen=True, eq=False)
class RingSurjection:
    """A surjective map of local algebras, as a (dim target x dim source) matrix."""

    source: LocalAlgebra
    target: LocalAlgebra
    matrix: np.ndarray = field(repr=False)

    def __call__(self, x) -> np.ndarray:
        return matmul(self.matrix, np.asarray(x).reshape(-1, 1), self.source.p)[:, 0]

    def apply_matrix(self, A: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        return np.einsum("ki,abi->abk", self.matrix, A) % self.source.p

    @cached_property
    def kernel(self) -> np.ndarray:
        return nullspace(self.matrix, self.source.p)

    @cached_property
    def section(self) -> np.ndarray:
        """A linear right inverse (dim source x dim target)."""
        p = self.source.p
        cols = []
        for j in range(self.target.dimension):
            e = np.zeros(self.target.dimension, dtype=np.int64)
            e[j] = 1
            sol = solve_linear(self.matrix, e, p)
            if not sol.consistent:
                raise CoeffError("map is not surjective")
            cols.append(sol.particular)
        return np.array(cols, dtype=np.int64).T % p

    def lift_matrix(self, A: np.ndarray) -> np.ndarray:
        return np.einsum("ki,abi->abk", self.section, np.asarray(A, dtype=np.int64)) % self.source.p

    def is_small(self) -> bool:
        """Kernel killed by the maximal ideal of the source."""
        K = self.kernel
        R = self.source
        if K.shape[0] == 0:
            return True
        eye = np.eye(R.dimension, dtype=np.int64)
        for v in K:
            for i in R.max_ideal_indices:
                if np.any(R.mul(eye[i], v)):
                    return False
        return True


def natural_surjection(source: LocalAlgebra, target: LocalAlgebra) -> RingSurjection:
    """The map k[t]/I -> k[t]/J induced by the identity on variables (I in J)."""
    if source.variables != target.variables or source.p != target.p:
        raise CoeffError("natural surjection needs rings over the same variables and field")
    p = source.p
    M = np.zeros((target.dimension, source.dimension), dtype=np.int64)
    for j, m in enumerate(source.monomials):
        M[:, j] = target.reduce_poly({m: 1})
    surj = RingSurjection(source, target, M % p)
    # ring homomorphism check on the basis
    for a in range(source.dimension):
        for b in range(source.dimension):
            lhs = surj(source.mult[a, b])
            rhs = target.mul(M[:, a], M[:, b])
            if np.any((lhs - rhs) % p):
                raise CoeffError(f"{source.name} -> {target.name} is not a ring map (ideal not contained)")
    if rank(M, p) != target.dimension:
        raise CoeffError("natural map is not surjective")
    return surj


def all_vectors(n: int, p: int):
    """Every vector of GF(p)^n, in lexicographic order."""
    for t in itertools.product(range(p), repeat=n):
        yield np.array(t, dtype=np.int64)
