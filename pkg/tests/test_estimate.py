import pytest

from pseid.errors import EmptyDatasetError, PositivityError, VariableMismatchError
from pseid.estimate import (
    PositivityWarning,
    evaluate,
    evaluate_distribution,
    empirical_law,
    evaluate_plugin,
    pse_contrast,
    telescoping_regimes,
)
from pseid.identify import EstimandSpec, identify
from pseid.regime import InterventionRegime
from pseid.sem import Dataset, observational_distribution, random_sem, sample

NODE = InterventionRegime("node", {"0": 1, "1": 0, "2": 1})


@pytest.fixture
def setup(g2):
    sem = random_sem(g2, 21)
    ast = identify(EstimandSpec("classical", NODE, g2, 1))
    return sem, ast


def test_distribution_sums_to_one(setup):
    sem, ast = setup
    dist = evaluate_distribution(ast, observational_distribution(sem))
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-14)


def test_plugin_converges(setup):
    sem, ast = setup
    exact = evaluate(ast, observational_distribution(sem))
    est = evaluate_plugin(ast, sample(sem, 200_000, seed=1))
    assert abs(est - exact) < 0.01


def test_plugin_is_deterministic_per_seed(setup):
    sem, ast = setup
    assert evaluate_plugin(ast, sample(sem, 20000, seed=4)) == evaluate_plugin(ast, sample(sem, 20000, seed=4))


def test_empty_strata_warn_or_raise(setup, g2):
    sem, ast = setup
    data = sample(sem, 3, seed=0)
    with pytest.warns(PositivityWarning):
        evaluate_plugin(ast, data)
    with pytest.raises(PositivityError):
        evaluate_plugin(ast, data, strict=True)
    # smoothing fills every cell
    v = evaluate_plugin(ast, data, smoothing=1.0)
    assert 0.0 < v < 1.0


def test_dataset_errors(setup):
    sem, ast = setup
    data = sample(sem, 10, seed=0)
    empty = Dataset(data.variables, data.domains, data.data[:0])
    with pytest.raises(EmptyDatasetError):
        evaluate_plugin(ast, empty)
    narrow = Dataset(data.variables[:2], data.domains[:2], data.data[:, :2])
    with pytest.raises(VariableMismatchError):
        evaluate_plugin(ast, narrow)


def test_contrast_reports_differing_labels(g2):
    sem = random_sem(g2, 3)
    spec = EstimandSpec("classical", NODE, g2, 1)
    ref = InterventionRegime("node", {"0": 0, "1": 0, "2": 1})
    c = pse_contrast(spec, NODE, ref, observational_distribution(sem))
    assert c.differing == ("0",)
    assert c.provenance == "exactLaw"
    assert c.to_json()["differing_labels"] == ["0"]
    c2 = pse_contrast(spec, NODE, ref, sample(sem, 20000, seed=0))
    assert c2.provenance == "plugIn(20000)"


def test_telescoping_regimes():
    steps = telescoping_regimes(("0", "1", "2"), 1, 0)
    assert steps[0] == {"0": 0, "1": 0, "2": 0}
    assert steps[-1] == {"0": 1, "1": 1, "2": 1}
    assert all(sum(a[k] != b[k] for k in a) == 1 for a, b in zip(steps, steps[1:]))


def test_plugin_equals_exact_evaluation_of_the_empirical_law(setup):
    sem, ast = setup
    data = sample(sem, 5000, seed=2)
    assert evaluate_plugin(ast, data) == pytest.approx(evaluate(ast, empirical_law(data)), abs=1e-12)
