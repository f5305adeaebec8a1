import math
import os
from pathlib import Path

import numpy as np
import pytest

import qdfair

ROOT = Path(__file__).resolve().parents[2]
SCHEMA = ROOT / "experiments" / "schemas" / "promotion.cfg"


@pytest.fixture(scope="module")
def promotion(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "promotion.csv"
    qdfair.write_synthetic_table(str(path), rows=20000, seed=3)
    return qdfair.load_dataset(str(path), str(SCHEMA))


def test_genome_length():
    assert qdfair.genome_length(qdfair.Architecture.parse("14,35,15,1")) == 1081
    assert qdfair.genome_length(qdfair.Architecture([55, 64, 32, 1])) == 5697


def test_deviation_and_zone():
    assert qdfair.deviation(1.0, 1.0) == 0.0
    assert math.isclose(qdfair.deviation(0.8, 1.25), math.hypot(0.2, 0.25))
    assert qdfair.in_fair_zone(0.8, 1.25)
    assert not qdfair.in_fair_zone(0.79, 1.0)


def test_pearson():
    assert math.isclose(qdfair.pearson([1, 2, 3], [2, 4, 6]), 1.0)


def test_forward_shapes():
    arch = qdfair.Architecture([3, 4, 1])
    g = np.zeros(qdfair.genome_length(arch))
    probs, preds = qdfair.forward(g, arch, np.ones((5, 3)))
    assert np.allclose(probs, 0.5)
    assert list(preds) == [0] * 5


def test_sample_and_evaluate(promotion):
    ds, report, rows = qdfair.sample(promotion, "unbiased", seed=1)
    assert ds.n_cases == 4 * 1432 and len(rows) == ds.n_cases
    arch = qdfair.Architecture.parse("14,35,15,1")
    rng = np.random.default_rng(0)
    ev = qdfair.evaluate(rng.normal(size=1081), arch, ds)
    assert 0.0 <= ev.accuracy <= 1.0
    assert ev.ratio_x >= 0.0 and ev.ratio_y >= 0.0


def test_run_roundtrip(promotion, tmp_path):
    ds, _, _ = qdfair.sample(promotion, "male_biased", seed=1)
    arch = qdfair.Architecture.parse("14,35,15,1")
    seen = []
    archive = qdfair.run(ds, arch, evals=200, seed=4, progress=lambda e, a, b: seen.append(e))
    assert 0 < len(archive) <= 900
    assert seen[-1] == 200
    path = tmp_path / "archive.txt"
    archive.save(str(path))
    again = qdfair.Archive.load(str(path))
    assert again == archive
    report = qdfair.tradeoff(again)
    assert report["best"]["accuracy"] == archive.best()["accuracy"]
    grid = qdfair.heatmap(again)
    assert len(grid) == 30 and sum(v is not None for row in grid for v in row) == len(archive)


def test_errors(tmp_path):
    with pytest.raises(qdfair.ConfigError):
        qdfair.Architecture.parse("14,x,1")
    with pytest.raises(qdfair.DataError):
        qdfair.load_dataset(str(tmp_path / "missing.csv"), str(SCHEMA))


def test_cli_entry():
    assert qdfair.main(["--help"]) == 0
    assert qdfair.main(["run", "--bogus"]) == 2
