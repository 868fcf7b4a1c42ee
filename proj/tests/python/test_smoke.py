import math
from pathlib import Path

import numpy as np
import pytest

import bgsa

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def test_version():
    assert bgsa.__version__ == "0.1.0"


def test_maxmean_worked_example():
    a = np.r_[np.full(50, -2.0), np.zeros(50)]
    b = np.r_[np.full(50, -2.0), np.full(50, 1.5)]
    assert bgsa.maxmean(a) == 1.0
    assert bgsa.maxmean(b) == 1.0
    assert bgsa.mean_z([1.0, -1.0]) == 0.0
    assert bgsa.mean_abs_z([1.0, -1.0]) == 1.0
    assert bgsa.ks_signed([10.0, 11.0, 12.0], [0.0, 1.0, 2.0]) == 1.0


def test_pooled_t_and_auc():
    z = bgsa.gene_zscores(np.array([[0.0, 2.0, 1.0, 3.0]]), [0, 0, 1, 1])
    assert z[0] == pytest.approx(1 / math.sqrt(2))
    assert bgsa.auc([2.0, 1.0, 3.0, 0.0], [0, 1]) == 0.5


def test_simulate_is_deterministic():
    a = bgsa.simulate("illustrative", seed=7)
    b = bgsa.simulate("illustrative", seed=7)
    assert a["values"].shape == (1000, 30)
    assert np.array_equal(a["values"], b["values"])
    assert len(a["sets"]) == 50
    assert sum(len(s) for s in a["truth"]["shifted_genes"]) == 37


def test_fit_ranks_shifted_set_first():
    sim = bgsa.simulate("illustrative", seed=3)
    out = bgsa.fit(sim["values"], sim["labels"], sim["sets"], set_names=sim["set_names"], iters=600, burnin=100, seed=1)
    sets = out["sets"]
    assert len(sets) == 50 and out["retained"] == 500
    best = min(sets, key=lambda s: s["prob_null"])
    assert best["set_name"] == sim["set_names"][0]
    assert max(sets, key=lambda s: s["mean_tau_sq"])["set_name"] == sim["set_names"][0]
    again = bgsa.fit(sim["values"], sim["labels"], sim["sets"], set_names=sim["set_names"], iters=600, burnin=100, seed=1)
    assert again == out


def test_simple_variant_has_no_null_probability():
    sim = bgsa.simulate("sim1", seed=2)
    out = bgsa.fit(sim["values"], sim["labels"], sim["sets"], variant="simple", iters=200, burnin=50)
    assert all(s["prob_null"] is None for s in out["sets"])


def test_baseline_pvalues_in_range():
    sim = bgsa.simulate("illustrative", seed=4)
    res = bgsa.baseline(sim["values"], sim["labels"], sim["sets"], perms=200, seed=2)
    p = np.array(res["perm_pvalue"])
    assert p.shape == (50,)
    assert (p >= 1 / 201).all() and (p <= 1).all()
    assert p.argmin() == 0


def test_fit_files_on_fixture():
    d = FIXTURES / "toy"
    out = bgsa.fit_files(d / "matrix.tsv", d / "labels.tsv", d / "sets.gmt", iters=300, burnin=100, seed=5)
    assert [s["set_name"] for s in out["sets"]] == ["shifted_set", "null_set"]
    assert len(out["genes"]) == 8


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        bgsa.fit(np.zeros((2, 4)), [0, 0, 1, 2], [[0, 1]])
    with pytest.raises(ValueError):
        bgsa.fit(np.zeros((2, 4)), [0, 0, 1, 1], [[0, 1]], iters=10, burnin=10)
    with pytest.raises(ValueError):
        bgsa.load(str(FIXTURES / "missing.tsv"), str(FIXTURES / "toy" / "labels.tsv"), str(FIXTURES / "toy" / "sets.gmt"))


def test_prior_demo():
    within, between = bgsa.prior_correlation_demo(reps=200, draws=100, seed=1)
    assert len(within) == 200
    assert np.mean(within) - np.mean(between) > 0.05
