import json

import numpy as np
import pytest

from latticecollapse import functionals as F
from latticecollapse import kernel
from latticecollapse.events import cylinder
from latticecollapse.model import build_model
from latticecollapse.sampler import (
    CollapseSampler, ZeroMeasureError, binomial_sigma, conditioned_state, frequency_summary,
    sample_trajectory, step_distribution, summary_csv, trajectory_rng,
)

from conftest import SUPERPOSED_N2, all_bits, reference_branch

OUTCOMES = ("00", "10", "01", "11")


def test_step_distribution_matches_measure_ratio(superposed_model):
    for prefix in ("", "10", "0111"):
        probs = step_distribution(prefix, superposed_model)
        parent = F.mu_c(cylinder(prefix), superposed_model)
        expect = [F.mu_c(cylinder(prefix + o), superposed_model) / parent for o in OUTCOMES]
        np.testing.assert_allclose(probs, expect, atol=1e-13)
        assert abs(probs.sum() - 1) < 1e-12


@pytest.mark.parametrize("preset", ["identity", "swap", "random"])
def test_unit_coupling_is_uniform(preset):
    m = build_model(2, 4, unitaries=preset, initial=SUPERPOSED_N2, X=1.0)
    s = CollapseSampler(m)
    for prefix in ("", "11", "0100", "100111"):
        np.testing.assert_allclose(s.step_distribution(prefix), 0.25, atol=1e-15)


def test_zero_coupling_identity_is_deterministic():
    m = build_model(2, 4, unitaries="identity", X=0.0)
    s = CollapseSampler(m)
    prefix = ""
    for _ in range(4):
        probs = s.step_distribution(prefix)
        np.testing.assert_array_equal(probs, [1, 0, 0, 0])
        prefix += "00"
    rec = s.sample(4, seed=5)
    assert rec.bits == "00000000"


def test_zero_measure_prefix_reported():
    m = build_model(2, 4, unitaries="identity", X=0.0)
    with pytest.raises(ZeroMeasureError):
        step_distribution("10", m)
    with pytest.raises(ZeroMeasureError):
        conditioned_state("01", m)


def test_prefix_at_depth_rejected(default_model):
    with pytest.raises(ValueError):
        step_distribution("0" * 8, default_model)
    with pytest.raises(ValueError):
        CollapseSampler(default_model).sample(5, seed=1)


def test_same_seed_same_record(superposed_model):
    a = sample_trajectory(superposed_model, 3, seed=17, index=4)
    b = sample_trajectory(superposed_model, 3, seed=17, index=4)
    assert a.to_json() == b.to_json()


def test_records_independent_of_order(superposed_model):
    s1, s2 = CollapseSampler(superposed_model), CollapseSampler(superposed_model)
    forward = [s1.sample(3, 9, j).to_json() for j in range(20)]
    backward = [s2.sample(3, 9, j).to_json() for j in reversed(range(20))]
    assert forward == backward[::-1]


def test_trajectory_rng_is_pcg64_from_seed_sequence():
    a = trajectory_rng(3, 7).random(4)
    b = np.random.Generator(np.random.PCG64(np.random.SeedSequence([3, 7]))).random(4)
    np.testing.assert_array_equal(a, b)


def test_chain_rule_per_trajectory(superposed_model):
    s = CollapseSampler(superposed_model)
    for j in range(200):
        rec = s.sample(3, seed=1, index=j)
        assert abs(rec.probability - F.mu_c(cylinder(rec.bits), superposed_model)) < 1e-10


def test_conditioned_state_is_normalized_branch(superposed_model):
    for prefix in ("10", "0110"):
        psi = conditioned_state(prefix, superposed_model)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12
        ref = reference_branch(superposed_model, prefix, "c")
        np.testing.assert_allclose(psi, ref / np.linalg.norm(ref), atol=1e-14)


def test_conditioned_state_at_zero_coupling_is_projected_branch(superposed_model):
    m = superposed_model.with_X(0.0)
    for prefix in all_bits(2):
        try:
            psi = conditioned_state(prefix, m)
        except ZeroMeasureError:
            continue
        b = F.branch_q(prefix, m)
        np.testing.assert_allclose(psi, b / np.linalg.norm(b), atol=1e-14)


def test_hit_sharpens_field_value():
    # field on slot 0 in an equal superposition; identity R; a hit reading 0 on l1 (slot 0)
    m = build_model(2, 4, unitaries="identity", initial=SUPERPOSED_N2, X=0.3)
    P0 = kernel.make_projector(0)

    def prob_zero(psi):
        return np.linalg.norm(kernel.apply_link_operator(psi, 0, P0)) ** 2

    before = prob_zero(m.initial[0][1])
    for second in "01":
        after = prob_zero(conditioned_state("0" + second, m))
        assert after > before
        assert after == pytest.approx(1 / (1 + 0.3 ** 2), abs=1e-14)


def test_mixture_has_no_conditioned_state(mixed_model):
    with pytest.raises(ValueError):
        conditioned_state("10", mixed_model)
    rec = CollapseSampler(mixed_model).sample(2, seed=3)
    assert rec.state is None
    assert abs(rec.probability - F.mu_c(cylinder(rec.bits), mixed_model)) < 1e-10


def test_record_json_is_plain(superposed_model):
    rec = sample_trajectory(superposed_model, 2, seed=1)
    doc = json.loads(rec.to_json())
    assert doc["config"] == rec.bits and len(doc["outcomes"]) == 2
    assert all(isinstance(p, float) for p in doc["conditionals"])
    psi = np.array([complex(re, im) for re, im in doc["state"]])
    np.testing.assert_array_equal(psi, rec.state)
    assert "np." not in rec.to_json()


def test_frequency_summary_counts(superposed_model):
    s = CollapseSampler(superposed_model)
    recs = list(s.ensemble(2, 50, seed=2, keep_state=False))
    rows = frequency_summary(superposed_model, 2, recs)
    assert len(rows) == 16 and sum(r["count"] for r in rows) == 50
    assert sum(r["mu_c"] for r in rows) == pytest.approx(1, abs=1e-12)
    text = summary_csv(rows)
    assert text.splitlines()[0] == "config,count,frequency,mu_c,sigma,z"
    assert "np." not in text


def test_frequency_summary_empty(superposed_model):
    rows = frequency_summary(superposed_model, 2, [])
    assert all(r["count"] == 0 and r["frequency"] is None and r["z"] is None for r in rows)
    assert binomial_sigma(0.5, 0) == 0.0


@pytest.mark.slow
def test_unit_coupling_frequencies_within_three_sigma():
    m = build_model(2, 4, X=1.0)
    s = CollapseSampler(m)
    rows = frequency_summary(m, 2, s.ensemble(2, 20000, seed=8, keep_state=False))
    for r in rows:
        assert r["mu_c"] == pytest.approx(1 / 16, abs=1e-15)
        assert abs(r["z"]) < 4.5
