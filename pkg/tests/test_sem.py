import numpy as np
import pytest

from pseid.counterfactual import Const, Term
from pseid.regime import InterventionRegime, classical_term, total_effect_term
from pseid.sem import (
    DiscreteSem,
    Mechanism,
    NoiseMode,
    counterfactual_joint,
    interventional_law,
    mechanism_from_cpt,
    observational_distribution,
    oracle_interventional,
    oracle_nested,
    random_sem,
    sample,
)

from conftest import one_mediator_graph


def test_mechanism_from_cpt_reproduces_the_cpt():
    cpt = np.array([[0.2, 0.8], [0.65, 0.35]])
    m = mechanism_from_cpt(cpt, ("A",))
    assert np.allclose(m.cpt_for(2), cpt, atol=1e-15)


def test_observational_law_is_normalized(g2):
    law = observational_distribution(random_sem(g2, 0))
    assert law.probs.sum() == pytest.approx(1.0, abs=1e-14)
    assert set(law.variables) == set(g2.names)


def test_consistency_with_observed_exposure(g2):
    # P(Y(z), Z=z) = P(Y, Z=z)
    sem = random_sem(g2, 4)
    law = observational_distribution(sem)
    for z in (0, 1):
        joint = counterfactual_joint(sem, [total_effect_term(g2, z), Term("Z")], ["Yz", "Z"])
        assert joint.prob({"Yz": 1, "Z": z}) == pytest.approx(law.prob({"Y": 1, "Z": z}), abs=1e-14)


def test_total_effect_matches_the_g_formula(g2):
    sem = random_sem(g2, 5)
    law = observational_distribution(sem)
    for z in (0, 1):
        g_formula = sum(
            law.prob({"C": c}) * law.prob({"Y": 1, "Z": z, "C": c}) / law.prob({"Z": z, "C": c}) for c in (0, 1)
        )
        assert oracle_nested(sem, total_effect_term(g2, z), 1) == pytest.approx(g_formula, abs=1e-14)
        assert interventional_law(sem, {"Z": z}, ["Y"]).prob({"Y": 1}) == pytest.approx(g_formula, abs=1e-14)


def test_shared_noise_couples_worlds():
    g = one_mediator_graph()
    shared = random_sem(g, 2, {"M": "shared"})
    fresh = random_sem(g, 2, {"M": "fresh"})
    terms = [Term("M", (("Z", Const(0, "z")),)), Term("M", (("Z", Const(1, "z'")),))]
    j_shared = counterfactual_joint(shared, terms, ["a", "b"])
    j_fresh = counterfactual_joint(fresh, terms, ["a", "b"])
    # fresh draws factorize across worlds, shared ones do not
    ind = np.outer(j_fresh.marginal(["a"]).probs, j_fresh.marginal(["b"]).probs)
    assert np.allclose(j_fresh.probs, ind, atol=1e-15)
    assert not np.allclose(j_shared.probs, np.outer(j_shared.marginal(["a"]).probs,
                                                   j_shared.marginal(["b"]).probs), atol=1e-6)
    # same single-world marginals either way
    assert np.allclose(j_shared.marginal(["a"]).probs, j_fresh.marginal(["a"]).probs, atol=1e-15)


def test_interventional_oracle_equals_nested_without_cross_world_coupling(g2):
    sem = random_sem(g2, 8)
    reg = InterventionRegime("node", {"0": 1, "1": 0, "2": 1})
    assert oracle_interventional(sem, reg, 1) == pytest.approx(oracle_nested(sem, classical_term(g2, reg), 1),
                                                               abs=1e-12)


def test_deterministic_mechanism():
    g = one_mediator_graph()
    ident = np.arange(2)[:, None]
    sem = DiscreteSem(g, {
        "Z": Mechanism((), (0.3, 0.7), np.array([0, 1])),
        "M": Mechanism(("Z",), (1.0,), ident),
        "Y": Mechanism(("M", "Z"), (1.0,), np.array([[[0], [0]], [[0], [1]]])),
    }, {})
    assert oracle_nested(sem, total_effect_term(g, 1), 1) == 1.0
    assert oracle_nested(sem, total_effect_term(g, 0), 1) == 0.0
    assert sem.mechanisms["M"].mode is NoiseMode.FRESH


def test_sampling_is_seed_deterministic(g2):
    sem = random_sem(g2, 1)
    a, b = sample(sem, 500, seed=9), sample(sem, 500, seed=9)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, sample(sem, 500, seed=10).data)
    head = a.to_csv().splitlines()[0].split(",")
    assert sorted(head) == sorted(g2.names)


def test_sample_rejects_empty():
    with pytest.raises(ValueError):
        sample(random_sem(one_mediator_graph(), 0), 0)
