import numpy as np
import pytest

from cqksolve import (
    CqkInstance,
    FormatError,
    SimplexInstance,
    gen_cqk,
    gen_simplex_y,
    read_instance,
    solve_cqk,
    write_instance,
)

from test_core import box


class TestTextFormat:
    def test_cqk_round_trip(self, tmp_path):
        inst = gen_cqk("cqk-uncorrelated", 37, 5)
        p = tmp_path / "i.cqk"
        write_instance(p, inst)
        back = read_instance(p)
        assert isinstance(back, CqkInstance)
        for f in ("d", "a", "b", "l", "u"):
            np.testing.assert_array_equal(getattr(back, f), getattr(inst, f))
        assert back.r == inst.r

    def test_cqk_header(self, tmp_path):
        p = tmp_path / "i.cqk"
        write_instance(p, box([1, 2], [0, 0], [1, 1], [0, 0], [1, 1], 1.0))
        first = p.read_text().splitlines()[0]
        assert first == "CQK1 2"

    def test_infinite_bounds_spelled_out(self, tmp_path):
        inst = box([1], [0], [1], [-np.inf], [np.inf], 1.0)
        p = tmp_path / "i.cqk"
        write_instance(p, inst)
        text = p.read_text()
        assert "-inf" in text and "inf" in text
        back = read_instance(p)
        assert back.l[0] == -np.inf and back.u[0] == np.inf

    def test_spx_round_trip(self, tmp_path):
        y = gen_simplex_y("simplex-n01", 23, 3)
        p = tmp_path / "i.spx"
        write_instance(p, SimplexInstance(y=y, r=1.5))
        back = read_instance(p)
        assert isinstance(back, SimplexInstance)
        np.testing.assert_array_equal(back.y, y)
        assert back.r == 1.5
        assert p.read_text().startswith("SPX1 23 ")

    def test_truncated_rejected(self, tmp_path):
        p = tmp_path / "bad.cqk"
        p.write_text("CQK1 3\n1 2 3\n")
        with pytest.raises(FormatError):
            read_instance(p)

    def test_unknown_header_rejected(self, tmp_path):
        p = tmp_path / "bad"
        p.write_text("WHAT 3\n")
        with pytest.raises(FormatError):
            read_instance(p)


class TestBinaryFormat:
    def test_cqk_bit_exact(self, tmp_path):
        inst = gen_cqk("cqk-weakly-correlated", 64, 11)
        p = tmp_path / "i.bin"
        write_instance(p, inst, binary=True)
        back = read_instance(p)
        for f in ("d", "a", "b", "l", "u"):
            a, b = getattr(inst, f), getattr(back, f)
            assert a.tobytes() == b.tobytes()
        assert np.float64(inst.r).tobytes() == np.float64(back.r).tobytes()

    def test_spx_bit_exact(self, tmp_path):
        y = gen_simplex_y("simplex-n01", 40, 1)
        p = tmp_path / "i.bin"
        write_instance(p, SimplexInstance(y=y, r=2.0), binary=True)
        back = read_instance(p)
        assert back.y.tobytes() == y.tobytes()
        assert back.r == 2.0

    def test_magic_bytes(self, tmp_path):
        p = tmp_path / "i.bin"
        write_instance(p, gen_cqk("cqk-correlated", 4, 1), binary=True)
        assert p.read_bytes()[:4] == b"CQKB"
        q = tmp_path / "s.bin"
        write_instance(q, SimplexInstance(y=np.ones(3), r=1.0), binary=True)
        assert q.read_bytes()[:4] == b"SPXB"

    def test_truncated_rejected(self, tmp_path):
        p = tmp_path / "i.bin"
        write_instance(p, gen_cqk("cqk-correlated", 8, 1), binary=True)
        (tmp_path / "t.bin").write_bytes(p.read_bytes()[:-16])
        with pytest.raises(FormatError):
            read_instance(tmp_path / "t.bin")


def test_round_trip_solve_identical(tmp_path):
    inst = gen_cqk("cqk-uncorrelated", 200, 77)
    mem = solve_cqk(inst)
    p = tmp_path / "i.bin"
    write_instance(p, inst, binary=True)
    disk = solve_cqk(read_instance(p))
    assert mem.lam == disk.lam
    assert np.array_equal(mem.x, disk.x)
