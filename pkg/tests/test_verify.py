"""Verification-harness checks: pointwise bounds, chains, campaigns, audits."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszkit import (AtomParams, Ball, CampaignSpec, ExponentProfile,
                      HypothesisFailed, MisclassifiedSample, PowerWeight,
                      check_containment_step, check_critical_index_chains,
                      check_maximal_inequalities, check_pointwise_atom_bound,
                      check_quasi_norm_assembly, check_rh_ball_inequality,
                      equal_split, identity_family, run_theorem_campaign,
                      scalar_family)

UNIT = PowerWeight(0.0)

SMALL_SPEC = CampaignSpec(count=4, seed=17, centers=((0.0,), (1.0,)),
                          radii=(0.5, 2.0), p=1.0, p0=2.0, outer_octaves=6,
                          inner_resolution=128, outer_resolution=32)


# ---------------------------------------------------------------------------
# containment
# ---------------------------------------------------------------------------


def test_containment_examples():
    ball = Ball([1.0], 0.1)
    fam = scalar_family([1.0, -1.0])
    rep = check_containment_step(ball, fam, [[1.05]], [[2.0]])
    assert rep.passed()
    # |2 - 1.05| = 0.95 against half of |2 - 1| = 0.5
    assert rep.worst == pytest.approx(0.95 / 0.5)
    # xi at the ball center gives slack factor exactly 2 (>= 1)
    rep = check_containment_step(ball, fam, [[1.0]], [[2.0]])
    assert rep.worst == pytest.approx(2.0)


def test_containment_random_pairs():
    rng = np.random.default_rng(0)
    ball = Ball([0.0], 1.0)
    fam = scalar_family([1.0, -1.0])
    xi = (2.0 * rng.random((100, 1)) - 1.0)
    xs = []
    for t in np.geomspace(2.1, 64.0, 10):
        xs += [[t], [-t]]
    rep = check_containment_step(ball, fam, xi, xs)
    assert rep.passed()


def test_containment_rejects_inner_points():
    ball = Ball([1.0], 0.1)
    fam = scalar_family([1.0, -1.0])
    with pytest.raises(MisclassifiedSample):
        check_containment_step(ball, fam, [[1.0]], [[1.05]])


# ---------------------------------------------------------------------------
# reverse Holder ball inequality
# ---------------------------------------------------------------------------


def test_rh_ball_unit_weight_is_equality(small_family):
    rep = check_rh_ball_inequality(UNIT, 1.0, 0.5, small_family)
    assert rep.passed()
    assert abs(rep.worst) < 1e-8
    assert abs(rep.extras["max_slack"]) < 1e-8


def test_rh_ball_weighted_configurations(small_family):
    rep = check_rh_ball_inequality(PowerWeight(-0.125), 0.75, 0.5, small_family)
    assert rep.passed()
    assert rep.worst >= -1e-10
    assert rep.extras["max_slack"] > 1e-3
    rep = check_rh_ball_inequality(PowerWeight(0.25), 1.0, 0.5, small_family)
    assert rep.passed()
    assert rep.extras["max_slack"] > 1e-3


def test_rh_ball_hypothesis_failure_skips(small_family):
    # w^p = |x|^{-0.75} fails RH_{q/p} when (q/p) * 0.75 >= 1
    rep = check_rh_ball_inequality(PowerWeight(-0.75), 1.0, 0.75, small_family)
    assert rep.verdict == "skipped"


# ---------------------------------------------------------------------------
# critical-index chains
# ---------------------------------------------------------------------------


def test_chain_two_sided(small_family):
    rep = check_critical_index_chains(PowerWeight(-0.125), 0.5, None, small_family)
    assert rep.passed()
    idx = rep.extras["indices"]
    assert idx["r_w"] == pytest.approx(8.0, abs=0.2)
    assert idx["r_wp"] == pytest.approx(16.0, abs=0.4)


def test_chain_comparison(small_family):
    rep = check_critical_index_chains(PowerWeight(-0.125), 0.5, 1.0, small_family)
    assert rep.passed()
    assert rep.extras["indices"]["r_wq"] == pytest.approx(8.0, abs=0.2)


def test_chain_vacuous_for_unit_weight(small_family):
    rep = check_critical_index_chains(UNIT, 0.5, None, small_family)
    assert rep.passed()
    assert rep.extras["indices"]["r_w"] == "inf"


def test_chain_hypothesis_gate(small_family):
    # w^{1/p} = |x|^{2.4} is far from A_1, so the check must be skipped
    rep = check_critical_index_chains(PowerWeight(0.6), 0.25, None, small_family)
    assert rep.verdict == "skipped"


# ---------------------------------------------------------------------------
# quasi-norm assembly
# ---------------------------------------------------------------------------


def test_quasi_norm_examples():
    out = check_quasi_norm_assembly([1.0], 2.0, 1.0)
    assert out["assembly"] == pytest.approx(1.0) and out["holds"]
    out = check_quasi_norm_assembly([1.0, 1.0], 1.5, 0.75)
    assert out["assembly"] == pytest.approx(2.0)
    assert out["p_bound"] == pytest.approx(2.0 ** (4.0 / 3.0))
    assert out["holds"]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=10),
       st.floats(min_value=0.3, max_value=3.0), st.floats(min_value=0.2, max_value=1.0))
def test_quasi_norm_random(lams, q, p):
    if not any(abs(v) > 1e-9 for v in lams):
        return
    p = min(p, min(1.0, q))
    out = check_quasi_norm_assembly(lams, q, p)
    assert out["holds"]


# ---------------------------------------------------------------------------
# pointwise atom bound
# ---------------------------------------------------------------------------


def test_pointwise_bound_identity_case():
    params = AtomParams(1.0, 2.0, 0, UNIT, 1)
    prof = ExponentProfile(0.5, (0.5,), 1)
    rep = check_pointwise_atom_bound(params, prof, identity_family(1), [0.0], seed=3)
    assert rep.passed()
    assert math.isfinite(rep.worst) and rep.worst > 0
    assert rep.stability["drift_radii"] < 4.0
    lo, hi = rep.extras["form_agreement"]["min"], rep.extras["form_agreement"]["max"]
    assert 1e-2 < lo <= hi < 1e2


def test_pointwise_bound_witnesses_reassert():
    """The stored witnesses re-certify lhs <= C* rhs for both bound forms."""
    params = AtomParams(1.0, 2.0, 0, UNIT, 1)
    prof = ExponentProfile(0.5, (0.25, 0.25), 1)
    rep = check_pointwise_atom_bound(params, prof, scalar_family([1.0, -1.0]),
                                     [0.0], seed=3)
    assert rep.passed()
    cstar = rep.worst
    for row in rep.witnesses:
        rhs = row["rhs_maximal"] if row["rhs_maximal"] is not None else row["rhs_decay"]
        assert row["lhs"] <= cstar * rhs * (1 + 1e-9)
        assert row["lhs"] <= max(cstar, 1.0) * row["rhs_decay"] * (1 + 1e-9) * 10


def test_pointwise_bound_zero_order():
    params = AtomParams(1.0, 2.0, 0, PowerWeight(0.5), 1)
    prof = equal_split(0.0, 2, 1)
    fam = scalar_family([1.0, -1.0], pairwise_invertible=True)
    rep = check_pointwise_atom_bound(params, prof, fam, [0.0], seed=5)
    assert rep.passed()
    assert "form_agreement" not in rep.extras  # decay form only at order zero


def test_pointwise_bound_rejects_inner_samples():
    params = AtomParams(1.0, 2.0, 0, UNIT, 1)
    prof = ExponentProfile(0.5, (0.5,), 1)
    with pytest.raises(MisclassifiedSample):
        check_pointwise_atom_bound(params, prof, identity_family(1), [0.0], seed=3,
                                   radii=(1.0,), samples=[[0.5]])


# ---------------------------------------------------------------------------
# maximal-operator inequalities
# ---------------------------------------------------------------------------


def test_maximal_inequality_pass_and_diverge():
    balls = [Ball([0.0], 1.0), Ball([0.0], 0.5), Ball([1.0], 2.0)]
    rep = check_maximal_inequalities(PowerWeight(0.5), 2.0, balls, levels=3)
    assert rep.passed()
    # growth must be observed across 3 successive refinements (4 levels)
    rep = check_maximal_inequalities(PowerWeight(0.9), 1.0, balls, levels=4)
    assert not rep.passed()
    assert rep.extras["verdict"] == "diverging"
    assert rep.stability["monotone_growth"]


def test_maximal_inequality_fractional():
    balls = [Ball([0.0], 1.0), Ball([1.0], 2.0)]
    rep = check_maximal_inequalities(PowerWeight(-1.0 / 12.0), 2.0, balls,
                                     alpha=0.25, levels=3)
    assert rep.passed()


# ---------------------------------------------------------------------------
# theorem campaigns
# ---------------------------------------------------------------------------


def test_campaign_zero_order_smoke():
    prof = equal_split(0.0, 2, 1)
    fam = scalar_family([1.0, -1.0], pairwise_invertible=True)
    rep = run_theorem_campaign("thm-zero", PowerWeight(0.5), prof, fam, SMALL_SPEC)
    assert rep.passed()
    assert rep.stability["drift"] < 4.0
    assert all(r["inner"] >= 0 and r["outer"] >= 0 for r in rep.witnesses)
    assert "lp0_spot_check" in rep.extras
    assert math.isfinite(rep.extras["lp0_spot_check"])


def test_campaign_positive_order_and_corollary():
    spec = CampaignSpec(count=4, seed=23, centers=((0.0,), (1.0,)), radii=(0.5, 2.0),
                        p=0.75, p0=1.5, s=0.75, outer_octaves=6,
                        inner_resolution=128, outer_resolution=32)
    w = PowerWeight(-0.125)
    prof = ExponentProfile(0.5, (0.25, 0.25), 1)
    rep = run_theorem_campaign("thm-positive", w, prof, scalar_family([1.0, -1.0]), spec)
    assert rep.passed()
    assert rep.extras["q"] == pytest.approx(1.0 / (1.0 / 0.75 - 0.5))

    # the corollary is the identity-family case of the same pipeline
    prof1 = ExponentProfile(0.5, (0.5,), 1)
    r1 = run_theorem_campaign("thm-positive", w, prof1, identity_family(1), spec)
    r2 = run_theorem_campaign("thm-positive", w, prof1, identity_family(1), spec)
    assert r1.passed()
    assert json.dumps(r1.to_dict(), sort_keys=True) == json.dumps(r2.to_dict(),
                                                                  sort_keys=True)


def test_campaign_hypothesis_gates():
    spec = CampaignSpec(count=2, seed=1, p=0.75, p0=1.5, s=0.75)
    w = PowerWeight(-0.125)
    with pytest.raises(HypothesisFailed):
        run_theorem_campaign("thm-positive", w, ExponentProfile(0.9, (0.05, 0.05), 1),
                             scalar_family([1.0, -1.0]), spec)
    with pytest.raises(HypothesisFailed) as err:
        run_theorem_campaign("thm-zero", PowerWeight(0.5), equal_split(0.0, 2, 1),
                             scalar_family([1.0, 1.0]), SMALL_SPEC)
    assert "pairwise" in err.value.item
    # p0 at or below the threshold is rejected
    bad = CampaignSpec(count=2, seed=1, p=0.75, p0=1.1, s=0.75)
    with pytest.raises(HypothesisFailed) as err:
        run_theorem_campaign("thm-positive", w, ExponentProfile(0.5, (0.25, 0.25), 1),
                             scalar_family([1.0, -1.0]), bad)
    assert "p0" in err.value.item


def test_campaign_parallel_matches_serial():
    prof = equal_split(0.0, 2, 1)
    fam = scalar_family([1.0, -1.0], pairwise_invertible=True)
    spec = CampaignSpec(count=4, seed=9, centers=((0.0,),), radii=(0.5, 1.0, 2.0, 4.0),
                        p=1.0, p0=2.0, outer_octaves=5, inner_resolution=64,
                        outer_resolution=16)
    serial = run_theorem_campaign("thm-zero", PowerWeight(0.5), prof, fam, spec, jobs=1)
    parallel = run_theorem_campaign("thm-zero", PowerWeight(0.5), prof, fam, spec, jobs=2)
    assert json.dumps(serial.to_dict(), sort_keys=True) == json.dumps(
        parallel.to_dict(), sort_keys=True)


def test_campaign_reproducible_bitwise():
    prof = equal_split(0.0, 2, 1)
    fam = scalar_family([1.0, -1.0], pairwise_invertible=True)
    spec = CampaignSpec(count=2, seed=5, centers=((0.0,),), radii=(0.5, 1.0, 2.0, 4.0),
                        p=1.0, p0=2.0, outer_octaves=5, inner_resolution=64,
                        outer_resolution=16)
    a = run_theorem_campaign("thm-zero", PowerWeight(0.5), prof, fam, spec)
    b = run_theorem_campaign("thm-zero", PowerWeight(0.5), prof, fam, spec)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(),
                                                                 sort_keys=True)
