"""Text formats: FLATCHAIN chain files and plain PBM/PPM images."""

from __future__ import annotations

import os
import re
from typing import TextIO

import numpy as np

from .complex import AXIS_NAMES, Chain, ComplexError, CubicalComplex, axes_label, parse_axes_label

MAGIC = "FLATCHAIN 1"
_CELL_TAGS = {0: "V", 1: "E", 2: "F", 3: "C"}


class FormatError(ValueError):
    """Malformed or inconsistent input file."""


def format_coeff(c: float) -> str:
    c = float(c)
    if c.is_integer():
        return str(int(c))
    return repr(c)


def format_number(x: float) -> str:
    """Numbers in reports: 9 significant digits."""
    x = float(x)
    if x == 0:
        x = 0.0  # no negative zero
    return f"{x:.9g}"


# -- FLATCHAIN ----------------------------------------------------------------


def dumps_chain(chain: Chain) -> str:
    cx = chain.complex
    lines = [
        MAGIC,
        "dim {} extent {} periodic {}".format(
            cx.dimension,
            " ".join(str(n) for n in cx.extent),
            " ".join("1" if p else "0" for p in cx.periodic),
        ),
        f"degree {chain.degree}",
    ]
    tag = _CELL_TAGS[chain.degree] if chain.degree < cx.dimension else ("F" if cx.dimension == 2 else "C")
    for i, c in chain.items():
        cell = cx.cell(chain.degree, i)
        fields = [tag, *map(str, cell.coords)]
        # full-dimensional cells carry no axis label
        if 0 < cell.degree < cx.dimension:
            fields.append(axes_label(cell.axes))
        fields.append(format_coeff(c))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def write_chain(chain: Chain, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_chain(chain))


def _parse_coeff(tok: str, lineno: int) -> float:
    try:
        val = int(tok)
    except ValueError:
        try:
            val = float(tok)
        except ValueError:
            raise FormatError(f"line {lineno}: bad coefficient {tok!r}") from None
        if not np.isfinite(val):
            raise FormatError(f"line {lineno}: non-finite coefficient {tok!r}")
    if val == 0:
        raise FormatError(f"line {lineno}: zero coefficients are not allowed")
    return val


def loads_chain(text: str) -> Chain:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 3 or lines[0] != MAGIC:
        raise FormatError(f"missing {MAGIC!r} header")
    head = lines[1].split()
    try:
        if head[0] != "dim":
            raise ValueError
        dim = int(head[1])
        if dim not in (2, 3) or head[2] != "extent" or head[3 + dim] != "periodic":
            raise ValueError
        extent = [int(t) for t in head[3:3 + dim]]
        flags = head[4 + dim:]
        if len(flags) != dim or any(f not in ("0", "1") for f in flags):
            raise ValueError
        periodic = [f == "1" for f in flags]
    except (ValueError, IndexError):
        raise FormatError(f"line 2: bad geometry line {lines[1]!r}") from None
    m = re.fullmatch(r"degree (\d+)", lines[2])
    if not m:
        raise FormatError(f"line 3: bad degree line {lines[2]!r}")
    degree = int(m.group(1))
    if degree > dim:
        raise FormatError(f"degree {degree} exceeds dimension {dim}")
    try:
        cx = CubicalComplex(dim, extent, periodic)
    except ComplexError as exc:
        raise FormatError(str(exc)) from None

    expected_tag = _CELL_TAGS[degree] if degree < dim else ("F" if dim == 2 else "C")
    coeffs: dict[int, float] = {}
    for lineno, ln in enumerate(lines[3:], start=4):
        toks = ln.split()
        if toks[0] != expected_tag:
            raise FormatError(f"line {lineno}: expected {expected_tag!r} cells for degree {degree}")
        labelled = 0 < degree < dim
        want = 1 + dim + (1 if labelled else 0) + 1
        if len(toks) != want:
            raise FormatError(f"line {lineno}: expected {want} fields, got {len(toks)}")
        try:
            coords = [int(t) for t in toks[1:1 + dim]]
        except ValueError:
            raise FormatError(f"line {lineno}: bad coordinates") from None
        if labelled:
            try:
                axes = parse_axes_label(toks[1 + dim])
            except ComplexError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            if len(axes) != degree:
                raise FormatError(f"line {lineno}: label {toks[1 + dim]!r} is not a {degree}-cell")
        else:
            axes = tuple(range(degree))
        if any(c < 0 or c >= n + (0 if (a in axes or p) else 1)
               for a, (c, n, p) in enumerate(zip(coords, extent, periodic))):
            raise FormatError(f"line {lineno}: cell outside the complex")
        idx = cx.index(coords, axes)
        if idx in coeffs:
            raise FormatError(f"line {lineno}: duplicate cell")
        coeffs[idx] = _parse_coeff(toks[-1], lineno)
    return Chain(cx, degree, coeffs)


def read_chain(path: str | os.PathLike) -> Chain:
    with open(path, encoding="ascii") as fh:
        return loads_chain(fh.read())


# -- PBM / PPM ----------------------------------------------------------------


def _strip_comments(text: str) -> str:
    return re.sub(r"#[^\n]*", " ", text)


def loads_pbm(text: str) -> np.ndarray:
    """Parse a plain (P1) PBM; returns a bool array indexed ``[row, col]``."""
    body = _strip_comments(text)
    m = re.match(r"\s*P1\s+(\d+)\s+(\d+)\s", body)
    if not m:
        raise FormatError("not a plain PBM (P1) file")
    width, height = int(m.group(1)), int(m.group(2))
    if width < 1 or height < 1:
        raise FormatError(f"bad PBM size {width}x{height}")
    raster = re.sub(r"\s+", "", body[m.end():])
    if set(raster) - {"0", "1"}:
        raise FormatError("PBM raster may only contain 0 and 1")
    if len(raster) < width * height:
        raise FormatError(f"truncated PBM: expected {width * height} pixels, got {len(raster)}")
    if len(raster) > width * height:
        raise FormatError("trailing data after PBM raster")
    bits = np.frombuffer(raster.encode("ascii"), dtype=np.uint8) - ord("0")
    return bits.reshape(height, width).astype(bool)


def read_pbm(path: str | os.PathLike) -> np.ndarray:
    try:
        with open(path, encoding="ascii") as fh:
            return loads_pbm(fh.read())
    except UnicodeDecodeError:
        raise FormatError(f"{path}: not a plain PBM file") from None


def dumps_pbm(mask) -> str:
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    out = [f"P1\n{w} {h}\n"]
    for row in mask:
        digits = "".join("1" if b else "0" for b in row)
        # plain netpbm lines stay under 70 characters
        out.extend(digits[i:i + 64] + "\n" for i in range(0, len(digits), 64))
    return "".join(out)


def write_pbm(mask, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_pbm(mask))


def dumps_ppm(rgb) -> str:
    rgb = np.asarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    out = [f"P3\n{w} {h}\n255\n"]
    for row in rgb:
        vals = " ".join(f"{r} {g} {b}" for r, g, b in row)
        out.append(_wrap(vals) + "\n")
    return "".join(out)


def _wrap(line: str, width: int = 70) -> str:
    toks, cur, lines = line.split(), "", []
    for t in toks:
        if cur and len(cur) + 1 + len(t) > width:
            lines.append(cur)
            cur = t
        else:
            cur = f"{cur} {t}" if cur else t
    lines.append(cur)
    return "\n".join(lines)


def loads_ppm(text: str) -> np.ndarray:
    body = _strip_comments(text).split()
    if not body or body[0] != "P3":
        raise FormatError("not a plain PPM (P3) file")
    try:
        w, h, maxval = int(body[1]), int(body[2]), int(body[3])
        vals = np.array([int(t) for t in body[4:]], dtype=np.int64)
    except (ValueError, IndexError):
        raise FormatError("bad PPM header or raster") from None
    if vals.size != w * h * 3 or maxval != 255:
        raise FormatError("PPM raster size mismatch")
    return vals.reshape(h, w, 3).astype(np.uint8)


def write_ppm(rgb, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_ppm(rgb))


def write_report(fields: dict, fh: TextIO) -> None:
    for k, v in fields.items():
        if isinstance(v, bool):
            v = int(v)
        if isinstance(v, float):
            v = format_number(v)
        fh.write(f"{k}={v}\n")


def read_report(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    with open(path, encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if ln and "=" in ln:
                k, v = ln.split("=", 1)
                out[k] = v
    return out


__all__ = [
    "AXIS_NAMES", "FormatError", "dumps_chain", "loads_chain", "read_chain", "write_chain",
    "loads_pbm", "dumps_pbm", "read_pbm", "write_pbm", "loads_ppm", "dumps_ppm", "write_ppm",
    "format_number", "write_report", "read_report",
]
