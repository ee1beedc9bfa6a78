import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import newton_sample, slice_sample
from monadlab.io import (
    FormatError,
    RunReport,
    dumps,
    load_report,
    load_tensor,
    save_report,
    save_tensor,
    tensor_from_json,
    tensor_to_json,
)
from monadlab.pencils import random_S_of_rank


def test_exact_roundtrip_k5(tmp_path):
    A = slice_sample(5).A
    path = tmp_path / "a.json"
    save_tensor(path, A, {"seed": 0})
    tf = load_tensor(path)
    assert tf.kind == "ATensor" and tf.k == 5 and tf.field == "rational"
    assert tf.tensor.equals(A)
    assert tf.metadata["seed"] == 0 and "tool_version" in tf.metadata


def test_canonical_file_is_fixed_point(tmp_path):
    path = tmp_path / "a.json"
    save_tensor(path, slice_sample(3).A.scaled(Fraction(2, 7)))
    text = path.read_text()
    tf = load_tensor(path)
    assert dumps(tensor_to_json(tf.tensor, tf.metadata)) == text


def test_complex_roundtrip(tmp_path):
    A = newton_sample(2).A
    path = tmp_path / "n.json"
    save_tensor(path, A)
    B = load_tensor(path).tensor
    assert np.array_equal(A.a, B.a)


def test_stensor_roundtrip(tmp_path):
    S = random_S_of_rank(4, 6, seed=0, bias="b")
    path = tmp_path / "s.json"
    save_tensor(path, S)
    tf = load_tensor(path)
    assert tf.kind == "STensor"
    assert np.all(tf.tensor.upper == S.upper)


def test_wrong_shape_rejected():
    obj = tensor_to_json(slice_sample(4).A)
    obj["k"] = 5
    with pytest.raises(FormatError):
        tensor_from_json(obj)


def test_bad_fields_rejected():
    obj = tensor_to_json(slice_sample(2).A)
    for key, val in [("format", "other"), ("version", 9), ("field", "reals"), ("kind", "CTensor"), ("k", 0)]:
        bad = dict(obj)
        bad[key] = val
        with pytest.raises(FormatError):
            tensor_from_json(bad)
    bad = json.loads(json.dumps(obj))
    bad["entries"][0][0][0] = "1/0"
    with pytest.raises(FormatError):
        tensor_from_json(bad)
    bad["entries"][0][0][0] = 3
    with pytest.raises(FormatError):
        tensor_from_json(bad)


def test_prime_field_entries():
    p = 2**61 - 1
    obj = tensor_to_json(slice_sample(2).A)
    obj["field"] = f"prime({p})"
    obj["entries"] = json.loads(json.dumps(obj["entries"]), parse_int=int)
    residues = (np.vectorize(lambda x: str(int(x) % p), otypes=[object])(np.array(obj["entries"], dtype=object)))
    obj["entries"] = residues.tolist()
    tf = tensor_from_json(obj)
    assert tf.prime == p
    obj["entries"][0][0][0] = "-1"
    with pytest.raises(FormatError):
        tensor_from_json(obj)


def test_stensor_blocks_must_be_opposite():
    obj = tensor_to_json(random_S_of_rank(3, 2, seed=1))
    obj["entries"][1][0][0][0] = "12345"
    with pytest.raises(FormatError):
        tensor_from_json(obj)


def test_invalid_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(FormatError):
        load_tensor(p)


def test_report_roundtrip(tmp_path):
    r = RunReport(command=["x"], config={"seed": 1}, results={"v": np.int64(3), "c": 1 + 2j})
    r.fail("something")
    p = tmp_path / "r.json"
    save_report(p, r, with_timings=False)
    obj = load_report(p)
    assert obj["summary"] == {"passed": False, "failures": ["something"]}
    assert obj["results"] == {"v": 3, "c": [1.0, 2.0]}
    assert "timings" not in obj
