import json
import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from qcorr.measurements import povm_from_matrix, vn_from_unitary
from qcorr.measures import classical_correlation, eof
from qcorr.qcore import (BipartiteState, DimensionError, DensityMatrix,
                         depolarizing_channel, random_bipartite_state, random_pure_state,
                         random_unitary)
from qcorr.serialize import (SchemaError, atomic_write_text, channel_from_json, channel_to_json,
                             decode_complex, digest, dumps, encode_complex, measurement_from_json,
                             measurement_to_json, read_json, result_to_json, state_from_json,
                             state_to_json, to_jsonable, write_json)


def test_complex_round_trip_is_exact():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    z[0, 0] = complex(-0.0, -0.0)
    back = decode_complex(json.loads(json.dumps(encode_complex(z))))
    assert_array_equal(back, z)
    assert math.copysign(1, back[0, 0].imag) == -1
    with pytest.raises(SchemaError):
        decode_complex([1.0, 2.0, 3.0])


def test_state_round_trip():
    s = random_bipartite_state(2, 3, seed=1)
    back = state_from_json(json.loads(dumps(state_to_json(s))))
    assert isinstance(back, BipartiteState)
    assert back.dims == (2, 3)
    assert_array_equal(back.matrix, s.matrix)
    single = DensityMatrix(np.eye(3) / 3, (3,))
    assert not isinstance(state_from_json(state_to_json(single)), BipartiteState)


def test_pure_state_json_gives_density():
    p = random_pure_state(4, seed=2, dims=(2, 2))
    d = state_to_json(p)
    assert "vector" in d
    back = state_from_json(d)
    np.testing.assert_allclose(back.matrix, np.outer(p.vector, p.vector.conj()), atol=1e-15)


def test_state_schema_errors():
    with pytest.raises(SchemaError):
        state_from_json({"matrix": [[[1, 0]]]})
    with pytest.raises(SchemaError):
        state_from_json({"dims": [1]})
    with pytest.raises(DimensionError):
        state_from_json({"dims": [2, 2], "matrix": encode_complex(np.eye(2) / 2)})


def test_channel_and_measurement_round_trip():
    ch = depolarizing_channel(2)
    back = channel_from_json(json.loads(dumps(channel_to_json(ch))))
    assert_array_equal(back.kraus, ch.kraus)
    bad = channel_to_json(ch)
    bad["dim_out"] = 3
    with pytest.raises(DimensionError):
        channel_from_json(bad)
    vn = vn_from_unitary(random_unitary(3, seed=1))
    assert_array_equal(measurement_from_json(measurement_to_json(vn)).elements, vn.elements)
    rng = np.random.default_rng(3)
    pv = povm_from_matrix(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
    back = measurement_from_json(measurement_to_json(pv))
    assert back.kind == "povm" and len(back.elements) == 4
    with pytest.raises(SchemaError):
        measurement_from_json({"type": "weird", "elements": []})


def test_to_jsonable_handles_numpy_and_nonfinite():
    obj = {"a": np.float64(1.5), "b": np.int64(3), "c": np.array([1.0, math.inf]),
           "d": math.nan, "e": np.bool_(True), 4: (1, 2)}
    out = to_jsonable(obj)
    assert out == {"a": 1.5, "b": 3, "c": [1.0, "inf"], "d": "nan", "e": True, "4": [1, 2]}
    json.dumps(out, allow_nan=False)


def test_digest_is_canonical():
    assert digest({"b": 1, "a": [1.0, 2.0]}) == digest({"a": [1.0, 2.0], "b": 1})
    assert digest({"a": 1}) != digest({"a": 2})
    assert len(digest({})) == 64


def test_result_to_json(fast):
    s = random_bipartite_state(2, 2, rank=2, seed=4)
    for res in (classical_correlation(s, "povm", fast), eof(s, cfg=fast)):
        d = json.loads(dumps(result_to_json(res)))
        assert d["value"] == res.value
        assert d["bound_direction"] == res.bound_direction
        assert d["certificate"]["kind"] in ("measurement", "ensemble")


def test_atomic_write(tmp_path):
    path = write_json(tmp_path / "sub" / "x.json", {"v": 1})
    assert read_json(path) == {"v": 1}
    atomic_write_text(path, "{broken")
    with pytest.raises(SchemaError):
        read_json(path)
    assert [p.name for p in path.parent.iterdir()] == ["x.json"]
