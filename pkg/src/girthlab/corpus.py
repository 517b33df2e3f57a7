"""Bundled test-corpus graphs: named constructors plus the data files
shipped under girthlab/corpus/data (written once by tools/build_corpus.py).
"""

from __future__ import annotations

import importlib.resources as resources

import numpy as np

from .graph import Graph, build_graph, read_graph_text


def petersen() -> Graph:
    """Outer 5-cycle, inner pentagram, spokes; 3-regular, girth 5."""
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return build_graph(10, edges)


def heawood() -> Graph:
    """Point-line incidence graph of the Fano plane; 3-regular, girth 6.

    Points 0..6, lines 7..13; line i contains points {i, i+1, i+3} mod 7.
    """
    edges = []
    for i in range(7):
        for j in (i, i + 1, i + 3):
            edges.append((j % 7, 7 + i))
    return build_graph(14, edges)


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i + 1) for i in range(leaves)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def _data_text(name: str) -> str:
    return (resources.files("girthlab") / "corpus" / "data" / name).read_text()


def load_corpus_graph(name: str) -> Graph:
    """Read one of the shipped `.graph` files by stem name."""
    return read_graph_text(_data_text(name + ".graph"))


def corpus_names() -> list:
    """Stems of all shipped graph files, sorted."""
    base = resources.files("girthlab") / "corpus" / "data"
    return sorted(p.name[:-6] for p in base.iterdir() if p.name.endswith(".graph"))


def cn_eigenvalues(n: int) -> np.ndarray:
    """Known circulant spectrum of the n-cycle (test oracle)."""
    return np.sort(2.0 * np.cos(2.0 * np.pi * np.arange(n) / n))
