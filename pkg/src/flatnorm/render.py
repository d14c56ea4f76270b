"""Raster renderings of 2D decompositions and sweep plots.

Colors: white background, input ``T`` blue, ``S`` cells red, ``T - dS`` green.
"""

from __future__ import annotations

import os

import numpy as np

from .complex import Chain, ComplexError
from .mincut import Decomposition

WHITE = (255, 255, 255)
BLUE = (0, 0, 255)
RED = (255, 0, 0)
GREEN = (0, 255, 0)


def _paint_edges(img: np.ndarray, chain: Chain, color, cell: int) -> None:
    cx = chain.complex
    for i in chain.support():
        c = cx.cell(1, i)
        x, y = c.coords
        if c.axes == (0,):
            img[cell * y, cell * x:cell * x + cell + 1] = color
        else:
            img[cell * y:cell * y + cell + 1, cell * x] = color


def decomposition_rgb(dec: Decomposition, cell: int = 4) -> np.ndarray:
    """RGB array, rows indexed by ``y``; each pixel is a ``cell``-wide block."""
    cx = dec.t.complex
    if cx.dimension != 2 or dec.t.degree != 1:
        raise ComplexError("renderings need a 1-chain in a 2D complex")
    nx, ny = cx.extent
    img = np.empty((cell * ny + 1, cell * nx + 1, 3), dtype=np.uint8)
    img[:] = WHITE
    for i in dec.s_chain.support():
        x, y = cx.cell(2, i).coords
        img[cell * y + 1:cell * y + cell, cell * x + 1:cell * x + cell] = RED
    _paint_edges(img, dec.t, BLUE, cell)
    _paint_edges(img, dec.t_minus_ds, GREEN, cell)
    return img


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_decomposition_figure(dec: Decomposition, path: str | os.PathLike, title: str | None = None) -> None:
    plt = _figure()
    img = decomposition_rgb(dec)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(img, interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(title or f"lambda={dec.lam:.6g}  value={dec.value:.6g}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def save_sweep_figure(signature, path: str | os.PathLike) -> None:
    plt = _figure()
    lams = [r.lam for r in signature]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lams, [r.value for r in signature], "k-o", ms=3, label="F_lambda")
    ax.plot(lams, [r.mass_t_minus_ds for r in signature], "g--", label="M(T - dS)")
    ax.plot(lams, [r.lam * r.mass_s for r in signature], "r:", label="lambda M(S)")
    ax.set_xlabel("lambda")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
