"""Named link diagrams and a braid-closure PD generator."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from typing import Sequence

from .diagram import PlanarDiagram, from_tuples, parse_pd

__all__ = ["braid_closure_pd", "corpus", "get_link", "link_names", "renumber", "torus_pd"]


def renumber(tuples: Sequence[Sequence[int]]) -> list[tuple[int, int, int, int]]:
    """Relabel edges so that each component is numbered consecutively along its orientation."""
    d = from_tuples(tuples)
    succ = dict(d.successor)
    mapping: dict[int, int] = {}
    label = 1
    for start in sorted(succ):
        if start in mapping:
            continue
        e = start
        while e not in mapping:
            mapping[e] = label
            label += 1
            e = succ[e]
    return [tuple(mapping[e] for e in t) for t in tuples]  # type: ignore[misc]


def braid_closure_pd(word: Sequence[int], strands: int | None = None) -> str:
    """PD code of the closure of a braid word.

    ``word`` lists generators as nonzero integers: ``k`` for sigma_k and
    ``-k`` for its inverse (1-based).  Positive letters give positive crossings.
    """
    n = strands if strands is not None else max(abs(g) for g in word) + 1
    current = list(range(1, n + 1))
    fresh = n + 1
    raw = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < n - 1:
            raise ValueError("generator %d out of range for %d strands" % (g, n))
        left, right = current[i], current[i + 1]
        new_left, new_right = fresh, fresh + 1
        fresh += 2
        if g > 0:
            # over-strand runs left -> right, under-strand right -> left
            raw.append((right, new_right, new_left, left))
        else:
            # over-strand runs right -> left, under-strand left -> right
            raw.append((left, right, new_right, new_left))
        current[i], current[i + 1] = new_left, new_right
    closing = {current[j]: j + 1 for j in range(n) if current[j] != j + 1}
    if len(closing) != n:
        raise ValueError("braid leaves a strand without crossings")
    tuples = [tuple(closing.get(e, e) for e in t) for t in raw]
    return " ".join("X[%d,%d,%d,%d]" % t for t in renumber(tuples))


def torus_pd(p: int, q: int) -> str:
    """Positive (p, q) torus link as the closure of (sigma_1 ... sigma_{p-1})^q."""
    return braid_closure_pd(list(range(1, p)) * q, strands=p)


@lru_cache(maxsize=None)
def corpus() -> dict[str, str]:
    """Name -> PD code, read from the bundled data file."""
    text = resources.files("oddkh_lab").joinpath("data/corpus.txt").read_text()
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, pd = line.partition(":")
        out[name.strip()] = pd.strip()
    return out


def link_names() -> list[str]:
    return list(corpus())


def get_link(name: str) -> PlanarDiagram:
    try:
        return parse_pd(corpus()[name])
    except KeyError:
        raise KeyError("unknown link %r; known: %s" % (name, ", ".join(corpus()))) from None
