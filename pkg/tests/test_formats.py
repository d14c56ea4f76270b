import numpy as np
import pytest

from flatnorm import Chain, build_complex
from flatnorm.formats import (FormatError, dumps_chain, dumps_pbm, dumps_ppm, loads_chain, loads_pbm,
                              loads_ppm, format_number)


def test_chain_text_layout_2d():
    cx = build_complex(2, (3, 2))
    c = Chain.from_cells(cx, [((0, 0), (0,), 1), ((2, 1), (1,), -2.5)])
    assert dumps_chain(c) == "FLATCHAIN 1\ndim 2 extent 3 2 periodic 0 0\ndegree 1\nE 0 0 X 1\nE 2 1 Y -2.5\n"
    f = Chain.from_cells(cx, [((1, 1), (0, 1), 3)])
    assert dumps_chain(f).splitlines()[-1] == "F 1 1 3"


def test_chain_text_layout_3d():
    cx = build_complex(3, (3, 2, 2), (True, False, False))
    faces = Chain.from_cells(cx, [((0, 1, 1), (1, 2), 1), ((1, 0, 0), (0, 2), -1)])
    text = dumps_chain(faces)
    assert "periodic 1 0 0" in text
    assert "F 0 1 1 YZ 1" in text and "F 1 0 0 XZ -1" in text
    cubes = Chain.from_cells(cx, [((1, 1, 0), (0, 1, 2), 2)])
    assert dumps_chain(cubes).splitlines()[-1] == "C 1 1 0 2"


@pytest.mark.parametrize("dim, extent, periodic, k", [
    (2, (4, 3), (False, False), 1), (2, (4, 3), (True, True), 2),
    (3, (3, 3, 3), (False, True, False), 1), (3, (3, 3, 3), (False, False, False), 2),
    (3, (3, 3, 4), (True, True, True), 3), (2, (3, 3), (False, False), 0),
])
def test_chain_roundtrip(dim, extent, periodic, k, rng):
    cx = build_complex(dim, extent, periodic)
    n = cx.num_cells(k)
    vec = rng.normal(size=n) * (rng.random(n) < 0.4)
    vec[: n // 3] = np.round(vec[: n // 3] * 3)
    c = Chain.from_vector(cx, k, vec)
    assert loads_chain(dumps_chain(c)) == c


@pytest.mark.parametrize("text", [
    "",
    "FLATCHAIN 2\ndim 2 extent 2 2 periodic 0 0\ndegree 1\n",
    "FLATCHAIN 1\ndim 4 extent 2 2 2 2 periodic 0 0 0 0\ndegree 1\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0\ndegree 1\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 3\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 1\nE 0 0 X 0\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 1\nE 2 0 X 1\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 1\nF 0 0 1\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 1\nE 0 0 X 1\nE 0 0 X 1\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 1\nE 0 0 Q 1\n",
    "FLATCHAIN 1\ndim 2 extent 2 2 periodic 0 0\ndegree 1\nE 0 0 X nan\n",
    "FLATCHAIN 1\ndim 3 extent 2 2 2 periodic 0 0 0\ndegree 2\nF 0 0 0 X 1\n",
])
def test_bad_chain_text_rejected(text):
    with pytest.raises(FormatError):
        loads_chain(text)


def test_pbm_parse_and_roundtrip():
    m = loads_pbm("P1\n# a comment\n3 2\n1 0 1\n0 1 0\n")
    assert m.tolist() == [[True, False, True], [False, True, False]]
    assert loads_pbm("P1 3 2 101010") .tolist() == [[True, False, True], [False, True, False]]
    big = np.random.default_rng(0).random((7, 90)) < 0.5
    text = dumps_pbm(big)
    assert max(len(ln) for ln in text.splitlines()) <= 70
    assert np.array_equal(loads_pbm(text), big)


@pytest.mark.parametrize("text", ["P1\n3 2\n1 0 1\n0 1\n", "P2\n3 2\n", "P1\n3 2\n1 0 1 0 1 2\n", "hello",
                                  "P1\n3 2\n1 0 1 0 1 0 1\n"])
def test_bad_pbm_rejected(text):
    with pytest.raises(FormatError):
        loads_pbm(text)


def test_ppm_roundtrip():
    rgb = np.random.default_rng(1).integers(0, 256, size=(5, 13, 3)).astype(np.uint8)
    text = dumps_ppm(rgb)
    assert text.startswith("P3\n13 5\n255\n")
    assert max(len(ln) for ln in text.splitlines()) <= 70
    assert np.array_equal(loads_ppm(text), rgb)


def test_number_format_nine_digits():
    assert format_number(1 / 3) == "0.333333333"
    assert format_number(60.0) == "60"
    assert format_number(-0.0) == "0"
