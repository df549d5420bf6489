import json
import struct

import numpy as np
import pytest

from alphaherd import io
from alphaherd.errors import FormatError
from alphaherd.kernel import Dataset


def _random_dataset(seed, labels=False):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 40)), int(rng.integers(1, 6))
    x = rng.normal(size=(n, d)) * 10.0 ** rng.integers(-8, 8, size=(n, d))
    return Dataset(x, rng.integers(0, 5, size=n) if labels else None)


class TestCSV:
    def test_plain(self):
        ds = io.parse_csv("x0,x1\n0,0\n1,0\n0,1")
        assert (ds.n, ds.d) == (3, 2)
        assert ds.labels is None
        np.testing.assert_array_equal(ds.features, [[0, 0], [1, 0], [0, 1]])

    def test_headerless(self):
        assert io.parse_csv("1.5,2\n3,4\n").features.tolist() == [[1.5, 2.0], [3.0, 4.0]]

    def test_label_column(self):
        ds = io.parse_csv("a,label,b\n1,0,2\n3,1,4\n")
        assert ds.d == 2
        assert ds.labels.tolist() == [0, 1]
        assert ds.features.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        ds = _random_dataset(seed, labels=seed % 2 == 0)
        back = io.parse_csv(io.format_csv(ds))
        assert back == ds
        assert back.features.tobytes() == ds.features.tobytes()

    def test_errors(self):
        with pytest.raises(FormatError, match="row 1"):
            io.parse_csv("x0,x1\n0,0\n1\n")
        with pytest.raises(FormatError, match="row 0"):
            io.parse_csv("x0\nnan\n")
        with pytest.raises(FormatError):
            io.parse_csv("")
        with pytest.raises(FormatError):
            io.parse_csv("x0,label\n1,0.5\n")


class TestRDSB:
    def test_minimal_size(self):
        blob = io.encode_rdsb(Dataset(np.zeros((1, 1))))
        assert len(blob) == 22
        assert blob[:4] == b"RDSB" and blob[4] == 1
        assert struct.unpack("<II", blob[5:13]) == (1, 1)
        assert blob[-1] == 0

    def test_labels_size(self):
        blob = io.encode_rdsb(Dataset(np.zeros((3, 2)), labels=[0, 1, 2]))
        assert len(blob) == 13 + 48 + 1 + 12

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        ds = _random_dataset(seed, labels=seed % 2 == 1)
        blob = io.encode_rdsb(ds)
        back = io.decode_rdsb(blob)
        assert back == ds
        assert io.encode_rdsb(back) == blob

    def test_bad_magic(self):
        blob = bytearray(io.encode_rdsb(Dataset(np.ones((2, 2)))))
        blob[0:4] = b"XXXX"
        with pytest.raises(FormatError, match="offset 0"):
            io.decode_rdsb(bytes(blob))

    def test_truncated(self):
        blob = io.encode_rdsb(Dataset(np.ones((2, 2))))
        with pytest.raises(FormatError, match="offset"):
            io.decode_rdsb(blob[:20])
        with pytest.raises(FormatError):
            io.decode_rdsb(blob + b"\x00")

    def test_non_finite(self):
        blob = bytearray(io.encode_rdsb(Dataset(np.ones((3, 2)))))
        blob[13 + 8 * 3 : 13 + 8 * 4] = struct.pack("<d", float("inf"))
        with pytest.raises(FormatError, match="row 1") as info:
            io.decode_rdsb(bytes(blob))
        assert info.value.offset == 37


class TestFiles:
    def test_suffix_detection(self, tmp_path):
        ds = _random_dataset(9, labels=True)
        for name in ("a.csv", "b.rdsb"):
            io.save_dataset(ds, tmp_path / name)
            assert io.load_dataset(tmp_path / name) == ds
        assert (tmp_path / "b.rdsb").read_bytes()[:4] == b"RDSB"

    def test_atomic_write_leaves_no_temp(self, tmp_path):
        io.atomic_write(tmp_path / "out.json", "{}")
        assert [p.name for p in tmp_path.iterdir()] == ["out.json"]

    def test_fingerprint(self):
        ds = Dataset(np.arange(6.0).reshape(3, 2))
        fp = io.fingerprint(ds)
        assert fp["n"] == 3 and fp["d"] == 2 and len(fp["sha256"]) == 64
        assert fp == io.fingerprint(Dataset(np.arange(6.0).reshape(3, 2)))

    def test_json_rejects_nan(self):
        with pytest.raises(ValueError):
            io.dump_json({"x": float("nan")})


class TestSelectionRecord:
    def _record(self, **kw):
        base = dict(
            dataset={"sha256": "0" * 64, "n": 5, "d": 2},
            kernel={"kind": "gaussian", "sigma": 1.25, "sigma_rule": "median"},
            alpha={"value": 0.95, "rule": "auto_budget"},
            algorithm="gkhr",
            indices=[3, 0, 4],
            final_alpha_mmd_sq=0.012345678901234567,
            seed=0,
            wall_time_ms=17,
        )
        base.update(kw)
        return io.SelectionRecord(**base)

    def test_round_trip(self):
        rec = self._record(bound={"rhs": 1.5, "satisfied": True})
        back = io.SelectionRecord.loads(rec.dumps())
        assert back == rec
        assert back.dumps() == rec.dumps()
        assert back.sorted_indices == [0, 3, 4]

    def test_wall_time_ignored_by_equality(self):
        assert self._record(wall_time_ms=1) == self._record(wall_time_ms=999)

    def test_schema_checks(self):
        data = json.loads(self._record().dumps())
        data["schema_version"] = "2"
        with pytest.raises(FormatError, match="schema"):
            io.SelectionRecord.from_dict(data)
        with pytest.raises(FormatError):
            io.SelectionRecord.loads("[1, 2]")
        with pytest.raises(FormatError):
            io.SelectionRecord.loads('{"schema_version": "1"}')
