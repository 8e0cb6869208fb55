import math

import numpy as np
import pytest

import boxcast as bc


def test_pr_box_table_and_divergence():
    pr = bc.pr_box()
    t = pr.table
    assert t.shape == (2, 2, 2, 2)
    assert t[1, 1, 0, 1] == 0.5 and t[1, 1, 1, 1] == 0.0
    u = bc.uniform_box(bc.Scenario.bipartite())
    value, per_setting = bc.box_kl(pr, u)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert per_setting == pytest.approx([1.0] * 4, abs=1e-12)


def test_membership_and_elr():
    pr = bc.pr_box()
    r = bc.membership(pr, "local")
    assert not r["inside"]
    assert bc.membership(bc.uniform_box(bc.Scenario.bipartite()))["inside"]
    e = bc.relative_entropy_nl(pr)
    assert e["lower_bound"] <= e["value"] <= e["upper_bound"]
    # 2 - log2(3), a known closed form for the PR box
    assert e["value"] == pytest.approx(2 - math.log2(3), abs=1e-4)


def test_json_round_trip():
    b = bc.product(bc.pr_box(), bc.pr_box())
    back = bc.Behavior.from_json(b.to_json())
    assert np.array_equal(back.table, b.table)
    assert bc.is_broadcast_of(b, bc.pr_box())
    with pytest.raises(bc.ParseError):
        bc.Behavior.from_json({"scenario": {}})


def test_invalid_table_raises():
    t = np.full((2, 2, 2, 2), 0.3)
    with pytest.raises(bc.Error):
        bc.Behavior(bc.Scenario.bipartite(), t)


def test_werner_steering():
    assert bc.is_unsteerable(bc.werner_assemblage(0.3))["status"] == "model-found"
    assert bc.is_unsteerable(bc.werner_assemblage(0.9))["steerable"]
    w = bc.werner_assemblage(0.9)
    e = w.element(0, 0)
    assert e.shape == (2, 2) and np.allclose(e, e.conj().T)
    r = bc.relative_entropy_steering_ub(w)
    assert r["lower_bound"] <= r["upper_bound"] and r["upper_bound"] > 0.05
    ww = bc.product_assemblage(w, w)
    assert bc.is_broadcast_assemblage(ww, w)
    assert bc.relative_entropy_steering_ub(bc.werner_assemblage(0.3))["upper_bound"] <= 1e-4


def test_verify_quick_scope():
    rep = bc.verify(seed=3, scope="assemblages", scale=0.05)
    assert rep["failed"] == 0
    assert {c["criterion"] for c in rep["checks"]} == {0, 6, 7, 8, 9}
