import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from minkpack import DiagonalMap, IntervalMap, SimilarIFS, SpongeSystem, SymbolicSystem

MODELS = Path(__file__).resolve().parent.parent / "models"


def interval(p, q, off_p=0, off_q=1, orientation=1):
    return IntervalMap(Fraction(p, q), Fraction(off_p, off_q), orientation)


@pytest.fixture(scope="session")
def cantor():
    return SimilarIFS(
        dimension=1,
        digits=(
            DiagonalMap(0, (interval(1, 3),)),
            DiagonalMap(1, (interval(1, 3, 2, 3),)),
        ),
    )


@pytest.fixture(scope="session")
def mcmullen():
    digits = []
    for i, (c1, c2) in enumerate([(0, 0), (1, 1), (0, 2)]):
        digits.append(
            DiagonalMap(i, (interval(1, 2, c1, 2), interval(1, 3, c2, 3)))
        )
    return SpongeSystem(dimension=2, digits=tuple(digits))


@pytest.fixture(scope="session")
def fullgrid():
    digits = []
    for c1 in range(2):
        for c2 in range(3):
            digits.append(
                DiagonalMap(len(digits), (interval(1, 2, c1, 2), interval(1, 3, c2, 3)))
            )
    return SpongeSystem(dimension=2, digits=tuple(digits))


@pytest.fixture(scope="session")
def dust2d():
    digits = []
    for ox in (0, 3):
        for oy in (0, 3):
            digits.append(
                DiagonalMap(
                    len(digits),
                    (interval(1, 4, ox, 4), interval(1, 4, oy, 4)),
                )
            )
    return SimilarIFS(dimension=2, digits=tuple(digits))


@pytest.fixture(scope="session")
def kenyon():
    lam = 2.0**0.5 / 2.0
    return SimilarIFS(
        dimension=1,
        digits=(
            DiagonalMap(0, (IntervalMap(1 / 3, 0.0),)),
            DiagonalMap(1, (IntervalMap(1 / 3, 1 / 3),)),
            DiagonalMap(2, (IntervalMap(1 / 3, lam / 3),)),
        ),
    )


@pytest.fixture(scope="session")
def symbolic_mcm():
    return SymbolicSystem(n=3, m=2, digits=((0, 0), (1, 1), (2, 0)), flavor="full")


@pytest.fixture(scope="session")
def models_dir():
    return MODELS


def random_grid_sponge(rng: random.Random, d: int, max_digits: int = 8) -> SpongeSystem:
    """Grid-subdivision sponge: valid ordering and neat projection by construction."""
    qs = sorted(rng.sample(range(2, 8), d))
    all_cells = [tuple(rng.randrange(q) for q in qs) for _ in range(4 * max_digits)]
    cells = []
    for c in all_cells:
        if c not in cells:
            cells.append(c)
    cells = cells[: rng.randint(2, max_digits)]
    digits = []
    for i, cell in enumerate(cells):
        comps = tuple(interval(1, q, c, q) for q, c in zip(qs, cell))
        digits.append(DiagonalMap(i, comps))
    return SpongeSystem(dimension=d, digits=tuple(digits))


def random_column_carpet(rng: random.Random, max_digits: int = 8) -> SpongeSystem:
    """Column-structured carpet with per-column row heights (rational, valid)."""
    q = rng.randint(2, 4)
    columns = sorted(rng.sample(range(q), rng.randint(1, q)))
    digits = []
    for col in columns:
        p = q + rng.randint(1, 3)
        rows = sorted(rng.sample(range(p), rng.randint(1, 2)))
        for row in rows:
            if len(digits) >= max_digits:
                break
            digits.append(
                DiagonalMap(
                    len(digits),
                    (interval(1, q, col, q), interval(1, p, row, p)),
                )
            )
    return SpongeSystem(dimension=2, digits=tuple(digits))


def chain_component_labels(points: np.ndarray, eps: float) -> list[int]:
    """Brute-force chain-connectivity classes via repeated relaxation (test oracle)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    n = len(pts)
    diff = pts[:, None, :] - pts[None, :, :]
    near = np.sqrt((diff * diff).sum(axis=2)) <= eps
    labels = list(range(n))
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if near[i, j] and labels[j] != labels[i]:
                    low = min(labels[i], labels[j])
                    labels[i] = labels[j] = low
                    changed = True
    remap = {}
    out = []
    for lab in labels:
        if lab not in remap:
            remap[lab] = len(remap)
        out.append(remap[lab])
    return out


def scan_greedy_oracle(points, delta: float) -> list[int]:
    """Plain-python greedy packing scan (test oracle for the kernels)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    t = 2.0 * delta
    sel: list[int] = []
    for i in range(len(pts)):
        if all(float(np.sqrt(((pts[i] - pts[j]) ** 2).sum())) > t for j in sel):
            sel.append(i)
    return sel
