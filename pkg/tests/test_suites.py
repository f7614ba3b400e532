import pytest

from brnr import suites
from brnr.base import SizeLimitExceeded, SuiteResult, UnknownCommand
from brnr.catalog import CatalogSpec, catalog
from brnr.config import settings
from brnr.gerbe import oracle_vanishes
from brnr.suites import CatalogSuite, EvaluationSuite, SuiteCollection, default_suites


@pytest.fixture
def tiny_catalog():
    spec = CatalogSpec(
        families=["abelian", "dihedral"],
        max_f_order=6,
        max_order=12,
        gammas=["1", "Z2"],
        n_values=[2, 3],
        max_actions=2,
        max_characters=1,
    )
    return catalog(spec)


class AlwaysCapped(CatalogSuite):
    name = "capped"

    def check(self, entry):
        raise SizeLimitExceeded("too big", order=entry.gerb.E.order)


def test_default_suite_names():
    assert default_suites().names == [
        "main-theorem",
        "prop-abelian",
        "shapiro",
        "res-cores",
        "wang-oracle",
        "ev-constancy",
    ]


@pytest.mark.parametrize("name", ["main-theorem", "prop-abelian", "shapiro", "res-cores", "wang-oracle"])
def test_suites_find_no_counterexamples(name, tiny_catalog):
    result = default_suites().run(name, tiny_catalog)
    assert result.suite == name
    assert not result.counterexamples
    assert result.checked + result.skipped == len(tiny_catalog)
    assert result


def test_evaluation_suite_without_models(tiny_catalog):
    result = default_suites().run("ev-constancy", tiny_catalog, models=False)
    assert not result.counterexamples
    assert result.checked == len(tiny_catalog)


def test_negative_control_only_reports():
    suite = default_suites().suite_map["ev-constancy"]
    result = suite.negative_control()
    assert result.checked == 0
    assert not result.counterexamples
    assert result.notes[0].startswith("negative control")


def test_workers_do_not_change_suite_results(tiny_catalog):
    suites = default_suites()
    serial = suites.run("main-theorem", tiny_catalog, workers=1)
    parallel = suites.run("main-theorem", tiny_catalog, workers=3)
    assert serial.to_dict() == parallel.to_dict()


def test_oracle_over_the_cap_at_k_n_fails(tiny_catalog, monkeypatch):
    monkeypatch.setattr(settings, "cochain_cap", 1)
    result = default_suites().run("wang-oracle", tiny_catalog[:3])
    assert len(result.counterexamples) == 3
    assert all("size cap at k = n" in c["reason"] for c in result.counterexamples)


def test_oracle_reports_skips_at_n_squared(tiny_catalog, monkeypatch):
    def capped_above_n(alpha, pair, k):
        if k > 3:
            raise SizeLimitExceeded("too big", order=k)
        return oracle_vanishes(alpha, pair, k)

    monkeypatch.setattr(suites, "oracle_vanishes", capped_above_n)
    entries = [e for e in tiny_catalog if e.n == 2][:2]
    result = default_suites().run("wang-oracle", entries)
    assert not result.counterexamples
    assert result.checked == 2
    assert all(d["oracle_skipped_n2"] > 0 for d in result.details)
    assert all("k = n²" in note for note in result.notes)


def test_capped_entries_are_skipped(tiny_catalog):
    result = SuiteCollection(AlwaysCapped()).run("capped", tiny_catalog[:2])
    assert result.skipped == 2
    assert result.checked == 0
    assert len(result.notes) == 2


def test_unknown_suite():
    with pytest.raises(UnknownCommand) as info:
        default_suites().run("no-such-suite", [])
    assert "main-theorem" in info.value.witness["choices"]


def test_suite_results_add():
    a = SuiteResult(suite="x", checked=1, counterexamples=({"entry": "a"},))
    b = SuiteResult(suite="x", checked=2, skipped=1, notes=("n",))
    total = a + b
    assert total.checked == 3
    assert total.skipped == 1
    assert not total
    assert total.to_dict()["notes"] == ["n"]
    with pytest.raises(ValueError):
        a + SuiteResult(suite="y")


def test_res_cores_with_zero_h1():
    spec = CatalogSpec(families=["abelian"], max_f_order=3, gammas=["1"], n_values=[2], max_actions=1)
    entries = [e for e in catalog(spec) if e.name.startswith("Z3:1#0 n=2")]
    assert entries
    result = default_suites().run("res-cores", entries)
    assert result.checked == len(entries)
    assert not result.counterexamples


def test_tame_scan_is_constant():
    suite = EvaluationSuite()
    suite.tame_parameters = [(2, 2, 3)]
    suite.tame_groups = ("Z3",)
    suite.n_values = (3,)
    result = suite.tame_scan()
    assert result.checked > 0
    assert not result.counterexamples
    assert all(d["entry"].startswith("tame q=2 a=2 b=3 F=Z3") for d in result.details)


def test_real_scan_is_constant():
    suite = EvaluationSuite()
    suite.real_groups = ("Z2", "Z3")
    suite.n_values = (2,)
    result = suite.real_scan()
    assert result.checked > 0
    assert not result.counterexamples
