"""Seed modules of the stable Auslander-Reiten components and the verdicts
predicted for their Ω-orbits.

Every module with stable endomorphism ring k lies in the Ω-orbit of one of
these seeds or is a band B(1, λ) with λ² ≠ -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .presentation import build_presentation
from .repbuild import Representation, build_band, parse_module_spec

K = "k"
KT = "k[[t]]"
KT2 = "k[t]/(t^2)"
KT1T2 = "k[[t1,t2]]/(t1^2-t2^2,t1t2)"
VERDICTS = (K, KT, KT2, KT1T2)


class ComponentLabel(str, Enum):
    EXCEPTIONAL_TUBE = "ExceptionalTube"
    NON_PERIODIC = "NonPeriodic"
    HOMOGENEOUS_TUBE = "HomogeneousTube"
    PROJECTIVE = "Projective"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Seed:
    name: str
    spec: str
    component: ComponentLabel
    predicted: str
    note: str = ""


def _word(indices) -> str:
    return "*".join(f"a{i}" for i in indices)


def seeds(e: int) -> tuple[Seed, ...]:
    """Seeds of the Ω-orbits of modules with stable End ≅ k, by component."""
    ex, npc = ComponentLabel.EXCEPTIONAL_TUBE, ComponentLabel.NON_PERIODIC
    if e == 1:
        return (
            Seed("M(a1)", "str:a1", ex, KT),
            Seed("S_1", "S(1)", npc, KT1T2),
        )
    out = [Seed(f"S_{e - 1}", f"S({e - 1})", ex, K)]
    for i in range(1, e - 1):
        out.append(Seed(f"V_{i}", "str:" + _word(range(e - 2, i - 1, -1)), ex, K))
    w = _word(range(e - 2, 0, -1))
    w = (w + "*" if w else "") + f"a{e}*d~"
    out.append(Seed("W", "str:" + w, ex, KT))
    out.append(Seed(f"S_{e}", f"S({e})", npc, KT2))
    out.append(Seed("V", "str:" + _word(range(e - 1, 0, -1)), npc, KT2))
    for i in range(2, e):
        out.append(Seed(f"W_{i}", "str:" + _word(range(e - 1, i - 1, -1)), npc, K))
    return tuple(out)


def stable_end_k_band(lam: int, p: int) -> bool:
    return (lam * lam + 1) % p != 0


def band_seeds(p: int, n_max: int = 1) -> list[tuple[int, int]]:
    return [(n, lam) for n in range(1, n_max + 1) for lam in range(1, p)]


def predicted_band(n: int, lam: int, p: int) -> str | None:
    """Predicted verdict for B(n, λ), or None when stable End is not k."""
    return KT if n == 1 and stable_end_k_band(lam, p) else None


def m_n0(e: int, n: int = 1) -> str:
    """Spec of the tube module M_{n,0} (stable End larger than k)."""
    head = _word(range(e - 2, 0, -1))
    head = (head + "*" if head else "") + f"a{e}*d~"
    loop = _word(range(e - 1, 0, -1)) + f"*a{e}*d~"
    return "str:" + "*".join([head] + [loop] * n)


def m_ni(e: int, i: int, n: int = 1) -> str:
    """Spec of M_{n,i}, 1 <= i <= e-1."""
    head = _word(range(e - 2, 0, -1))
    head = (head + "*" if head else "") + f"a{e}*d~"
    loop = _word(range(e - 1, 0, -1)) + f"*a{e}*d~"
    tail = _word(range(e - 1, i - 1, -1))
    return "str:" + "*".join([head] + [loop] * (n - 1) + [tail])


def e1_tube_module(n: int) -> str:
    """M((a d~)^n a) for e = 1."""
    return "str:" + "*".join(["a1", "d~"] * n + ["a1"])


@dataclass(frozen=True)
class OrbitEntry:
    seed: Seed
    shift: int
    module: Representation


@dataclass(frozen=True)
class SeedOrbit:
    seed: Seed
    entries: tuple[OrbitEntry, ...]
    period: int | None


@lru_cache(maxsize=64)
def seed_orbits(e: int, p: int, max_dim: int) -> tuple[SeedOrbit, ...]:
    """Ω^k(seed) for every seed, for all shifts whose dimension stays within
    ``max_dim`` (periodic seeds: one full period)."""
    from .homalg import cosyzygy, iso_test, syzygy

    q = build_presentation(e)
    out = []
    for sd in seeds(e):
        V = parse_module_spec(sd.spec, q, p)
        entries = [OrbitEntry(sd, 0, V)]
        period = None
        tube = sd.component is ComponentLabel.EXCEPTIONAL_TUBE
        for step in ((syzygy, 1), (cosyzygy, -1)) if not tube else ((syzygy, 1),):
            op, sign = step
            cur, over = V, 0
            # non-periodic dimensions grow block-wise; stop after a whole
            # block (2e steps) above the bound
            for k in range(1, 2 * e * (max_dim + 2) + 1):
                cur = op(cur)
                if tube and cur.dims == V.dims and iso_test(cur, V).isomorphic:
                    period = k
                    break
                if not tube and cur.total_dim > max_dim:
                    over += 1
                    if over > 2 * e:
                        break
                    continue
                over = 0
                entries.append(OrbitEntry(sd, sign * k, cur))
        if tube and period is None:
            raise RuntimeError(f"tube seed {sd.name} is not Ω-periodic")
        out.append(SeedOrbit(sd, tuple(entries), period))
    return tuple(out)


def band_representation(e: int, p: int, n: int, lam: int) -> Representation:
    return build_band(build_presentation(e), p, (n, lam))
