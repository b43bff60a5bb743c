import json
import math

import numpy as np
import pytest

import latentpara as lp


def test_version():
    assert lp.__version__.count(".") == 2


def test_softplus_and_ppo_algebra():
    assert lp.softplus(0.0) == pytest.approx(math.log(2.0), abs=1e-15)
    assert lp.compute_reward(0.25) == -0.25
    assert lp.importance_ratio(1.5, 1.5) == 1.0
    assert lp.clipped_surrogate(2.0, 1.0, 0.2) == pytest.approx(1.2)
    assert lp.clipped_surrogate(0.5, -1.0, 0.2) == pytest.approx(-0.8)
    a = lp.normalize_advantages([-0.1, -0.5, -0.9], [0.0, 0.0, 0.0])
    assert abs(sum(a)) < 1e-9
    assert float(np.std(a)) == pytest.approx(1.0, abs=1e-6)


def test_mask_iou():
    a = np.array([[1, 1, 0], [0, 0, 0]], dtype=bool)
    b = np.array([[0, 1, 1], [0, 0, 1]], dtype=np.uint8)
    assert lp.mask_iou(a, b) == pytest.approx(1.0 / 4.0)
    empty = np.zeros((2, 3))
    assert lp.mask_iou(empty, empty) == 1.0
    with pytest.raises(ValueError):
        lp.mask_iou(np.zeros(3), np.zeros(3))


def test_filters_and_curve():
    assert not lp.regex_consistency("a person is calling someone", "A person is calling someone.")
    assert lp.regex_consistency("Find the cup.", "Locate the cup.")
    assert lp.cosine_similarity([1.0, 0.0], [0.0, 2.0]) == 0.0
    assert lp.relative_iou_drop(0.8, 0.6) == pytest.approx(25.0)
    curve = lp.sr_curve([100.0, 50.0, None])
    assert len(curve["grid"]) == 101
    assert curve["msr"] == pytest.approx(0.50165, abs=1e-5)
    with pytest.raises(ValueError):
        lp.sr_curve([])


def test_geometry():
    v = np.array([[1.0, 0.0], [1.0, 0.01], [0.0, 1.0], [0.01, 1.0]])
    labels = ["a", "a", "b", "b"]
    assert lp.nnr(v, labels) == 1.0
    assert lp.csr(np.array([[0.0, 0.0], [3.0, 4.0]]), ["a", "b"]) == 0.0
    r = lp.pearson_all_dims(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]), [1.0, 2.0, 3.0], normalize=False)
    assert r[0] == pytest.approx(1.0)
    assert math.isnan(r[1])


def test_configs():
    default = lp.default_config()
    assert default["schema_version"] == 1
    assert default["eval"]["cosine_threshold"] == 0.825
    bench = lp.synth_bench_config()
    assert bench["attack"]["seed"] == 123
    assert bench["attack"]["lambda_sim"] == 0.0


def test_synth_bench(tmp_path):
    status, out, err = lp.synth_bench(str(tmp_path / "bench"))
    assert status == 0, err
    assert "mSR=" in out
    report = json.loads((tmp_path / "bench" / "report.json").read_text())
    assert report["seed"] == 123
    for sample in report["samples"]:
        assert sample["final_mean_iou"] <= 0.5 * sample["original_iou"]
    status, _, err = lp.synth_bench(str(tmp_path / "bench"))
    assert status == 1
    assert "force" in err
