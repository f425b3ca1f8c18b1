import io

import numpy as np
import pytest

from qcldpc.construct import BaseMatrix, MaskMatrix, builtin_mask, lift
from qcldpc.density import DegreeDistribution
from qcldpc.formats import (
    FormatError,
    read_alist,
    read_base,
    read_distribution,
    write_alist,
    write_base,
    write_distribution,
)


def roundtrip_alist(pcm):
    buf = io.StringIO()
    write_alist(pcm, buf)
    buf.seek(0)
    return read_alist(buf)


def test_alist_roundtrip_ra_code():
    base = BaseMatrix(np.arange(50).reshape(5, 10) % 8)
    pcm = lift(base, builtin_mask("M_RA"), 8)
    back = roundtrip_alist(pcm)
    assert back.nonzeros() == pcm.nonzeros()
    assert (back.n, back.r) == (pcm.n, pcm.r)


def test_alist_header_dimensions():
    pcm = lift(BaseMatrix(np.zeros((3, 6), int)), builtin_mask("M1", 3, 6), 4)
    buf = io.StringIO()
    write_alist(pcm, buf)
    assert buf.getvalue().splitlines()[0] == "24 12"


def test_alist_roundtrip_random(rng):
    for _ in range(10):
        h = (rng.random((5, 8)) < 0.4).astype(int)
        h[rng.integers(5), h.sum(axis=0) == 0] = 1
        from qcldpc.construct import ParityCheckMatrix

        pcm = ParityCheckMatrix.from_dense(h)
        assert roundtrip_alist(pcm).nonzeros() == pcm.nonzeros()


def test_alist_accepts_zero_padding():
    text = "3 2\n2 3\n2 2 1\n2 3\n1 2\n1 2\n2 0\n1 2 0\n1 2 3\n"
    pcm = read_alist(io.StringIO(text))
    assert pcm.nonzeros() == {(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)}


def test_alist_position_out_of_range():
    text = "4 2\n1 2\n1 1 1 1\n2 2\n1\n2\n1\n5\n1 2\n3 4\n"
    with pytest.raises(FormatError, match="out of range"):
        read_alist(io.StringIO(text))


def test_alist_malformed_header():
    with pytest.raises(FormatError, match="header"):
        read_alist(io.StringIO("4\n1 1\n1 1 1 1\n2 2\n"))
    with pytest.raises(FormatError, match="too short"):
        read_alist(io.StringIO("4 2\n"))


def test_alist_degree_mismatch():
    text = "2 1\n1 2\n1 1\n2\n1\n1\n1\n"  # row list claims degree 2, lists one entry
    with pytest.raises(FormatError, match="expected 2 positions"):
        read_alist(io.StringIO(text))


def test_alist_view_disagreement():
    # column view gives the identity, row view the anti-diagonal
    text = "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n"
    with pytest.raises(FormatError, match="disagree"):
        read_alist(io.StringIO(text))


def test_base_roundtrip():
    base = BaseMatrix([[0, 2], [4, 1]])
    mask = MaskMatrix([[0, 1], [1, 1]])
    buf = io.StringIO()
    write_base(base, mask, 5, buf)
    buf.seek(0)
    b2, m2, p2 = read_base(buf)
    assert p2 == 5
    assert (m2.bits == mask.bits).all()
    assert (b2.shifts[m2.bits == 1] == base.shifts[mask.bits == 1]).all()


def test_base_trivial_and_sentinel():
    b, m, p = read_base(io.StringIO("1 1 3\n0\n"))
    assert p == 3 and b.shifts[0, 0] == 0 and m.bits[0, 0] == 1
    b, m, p = read_base(io.StringIO("1 2 5\n-1 2\n"))
    assert m.bits.tolist() == [[0, 1]] and b.shifts[0, 1] == 2


def test_base_bounds():
    with pytest.raises(FormatError, match="not below p"):
        read_base(io.StringIO("1 1 5\n7\n"))
    with pytest.raises(FormatError, match="below -1"):
        read_base(io.StringIO("1 2 5\n-2 1\n"))


def test_distribution_roundtrip():
    dist = DegreeDistribution({2: 0.4, 5: 0.6}, {6: 1.0})
    buf = io.StringIO()
    write_distribution(dist, buf)
    buf.seek(0)
    back = read_distribution(buf)
    assert back.lam == dist.lam and back.rho == dist.rho


def test_distribution_validates_sum():
    text = "V 2 0.5\nV 3 0.4\nC 6 1.0\n"
    with pytest.raises(FormatError, match="sum"):
        read_distribution(io.StringIO(text))


def test_distribution_syntax_errors():
    with pytest.raises(FormatError, match="expected"):
        read_distribution(io.StringIO("X 2 1.0\n"))
    with pytest.raises(FormatError, match="duplicate"):
        read_distribution(io.StringIO("V 2 0.5\nV 2 0.5\nC 4 1.0\n"))
