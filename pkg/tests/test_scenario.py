import pytest

from boomerang.errors import ScenarioError
from boomerang.sim.scenario import Policy, Scenario, load_scenario, parse_override, parse_policy, REVIEW_POLICIES


def test_defaults_validate():
    s = Scenario()
    assert (s.n_workers, s.n_requesters, s.ticks) == (20, 5, 200)
    assert s.requester_strategies() == ["Truthful", "InflateAll"] * 2 + ["Truthful"]


@pytest.mark.parametrize(
    "field, value, path",
    [
        ("n_workers", 0, "n_workers"),
        ("T", 2.5, "T"),
        ("lam", 1.0, "lambda"),
        ("decay", 0.0, "decay"),
        ("seed", -1, "seed"),
        ("worker_quality", [0.5], "worker_quality"),
        ("worker_quality", {"normal": [0, 1]}, "worker_quality.normal"),
        ("rating_strategy", {"workers": ["Truthful", "Lying"]}, "rating_strategy.workers[1]"),
        ("review_policy", "ThresholdOnQuality", "review_policy[0]"),
        ("review_policy", ["AcceptAll", "RejectHarsh(x)"], "review_policy[1]"),
        ("worker_task_policy", "TopOfFeed(3)", "worker_task_policy[0]"),
        ("rejection_buckets", "yes", "rejection_buckets"),
    ],
)
def test_errors_name_the_field(field, value, path):
    with pytest.raises(ScenarioError) as err:
        Scenario(**{field: value})
    assert err.value.path == path
    assert str(err.value).startswith(path + ":")


def test_unknown_key():
    with pytest.raises(ScenarioError) as err:
        Scenario.from_dict({"n_wokers": 3})
    assert err.value.path == "n_wokers"


def test_lambda_alias():
    assert Scenario.from_dict({"lambda": 0.4}).lam == 0.4
    assert Scenario().to_dict()["lambda"] == 0.3
    with pytest.raises(ScenarioError):
        Scenario.from_dict({"lambda": 0.4, "lam": 0.4})


def test_round_trip():
    s = Scenario(n_workers=7, worker_quality={"beta": [2, 5]}, review_policy=["AcceptAll", "RejectHarsh(0.4)"])
    assert Scenario.from_dict(s.to_dict()) == s


def test_yaml_file(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("n_workers: 6\nlambda: 0.25\nrating_strategy: {workers: InflateAll}\n")
    s = load_scenario(path)
    assert s.n_workers == 6 and s.lam == 0.25
    assert s.worker_strategies() == ["InflateAll"] * 6
    assert s.requester_strategies() == ["Truthful"] * 5
    assert load_scenario_text(tmp_path, s.dumps()) == s


def load_scenario_text(tmp_path, text):
    p = tmp_path / "again.yaml"
    p.write_text(text)
    return load_scenario(p)


def test_bad_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("n_workers: [1,\n")
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_overrides():
    s = Scenario().with_overrides(dict([parse_override("lam=0.2"), parse_override("rating_strategy.workers=[InflateAll]")]))
    assert s.lam == 0.2 and s.worker_strategies() == ["InflateAll"] * 20
    with pytest.raises(ScenarioError):
        parse_override("noequals")
    with pytest.raises(ScenarioError):
        Scenario().with_overrides({"T.x": 1})


def test_policy_parsing():
    assert parse_policy("ThresholdOnQuality(0.3)", REVIEW_POLICIES, "p") == Policy("ThresholdOnQuality", 0.3)
    assert parse_policy(" AcceptAll ", REVIEW_POLICIES, "p") == Policy("AcceptAll")
    assert str(Policy("RejectHarsh", 0.5)) == "RejectHarsh(0.5)"
    with pytest.raises(ScenarioError):
        parse_policy("ThresholdOnQuality(2)", REVIEW_POLICIES, "p")
