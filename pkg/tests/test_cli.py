import json

import pytest

import cli

INVERSION = {"F": {"named": "Z3"}, "gamma": {"named": "Z2"}, "action": [[0, 1, 2], [0, 2, 1]]}
NON_SPLIT = {"E": {"named": "Z4"}, "gamma": {"named": "Z2"}, "kernel": [0, 2], "projection": [0, 1, 0, 1]}


@pytest.fixture
def gerb_file(tmp_path):
    path = tmp_path / "gerb.json"
    path.write_text(json.dumps(INVERSION))
    return path


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def run_json(capsys, argv):
    code = cli.main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_brnr_reports_all_formulas(capsys, gerb_file):
    code, report = run_json(capsys, ["brnr", "--gerb", str(gerb_file), "--mu", "3", "--character", "2"])
    assert code == cli.EXIT_OK
    assert report["schema_version"] == 1
    assert report["command"] == "brnr"
    assert report["options"]["character"] == [2]
    assert set(report["inputs"]) == {"gerb"}
    assert report["results"]["agree"] is True
    assert "normalized" in report["results"]
    assert "timing" not in report


def test_reports_are_byte_identical(tmp_path, gerb_file):
    argv = ["brnr", "--gerb", str(gerb_file), "--mu", "3", "--character", "2"]
    outputs = []
    for name, extra in (("cold", []), ("warm", []), ("uncached", ["--no-cache"]), ("parallel", ["--workers", "2"])):
        path = tmp_path / f"{name}.json"
        assert cli.main([*argv, *extra, "--output", str(path)]) == cli.EXIT_OK
        outputs.append(path.read_bytes())
    assert all(out == outputs[0] for out in outputs)


def test_timing_is_opt_in(capsys, gerb_file, tmp_path):
    argv = ["sha", "--gerb", str(gerb_file), "--mu", "3", "--cache-dir", str(tmp_path / "c"), "--timing"]
    cli.main(argv + ["--output", str(tmp_path / "first.json")])
    code, report = run_json(capsys, argv)
    assert code == cli.EXIT_OK
    assert set(report["timing"]["stages"]) == {"load", "sha"}
    assert report["timing"]["job"]["cache_hits"] > 0


def test_cohomology_on_gamma_with_sha1_cyc(capsys, gerb_file):
    code, report = run_json(
        capsys, ["cohomology", "--gerb", str(gerb_file), "--mu", "3", "--on", "gamma", "--degree", "1", "--sha1-cyc"]
    )
    assert code == cli.EXIT_OK
    assert report["results"]["sha1_cyc"] == []
    assert report["results"]["sha1_cyc_dual"] == []


def test_sections_command(capsys, gerb_file):
    code, report = run_json(capsys, ["sections", "--gerb", str(gerb_file)])
    assert code == cli.EXIT_OK
    assert report["results"]["count"] == 3
    assert len(report["results"]["classes"]) == 1


def test_sections_of_non_split_gerb_fail(write_json):
    assert cli.main(["sections", "--gerb", write_json("nonsplit.json", NON_SPLIT)]) == cli.EXIT_ERROR


def test_evaluate_command(capsys, write_json):
    spec = write_json(
        "evaluation.json",
        {"model": {"kind": "tame", "n": 3, "q": 2, "a": 2, "b": 3}, "F": {"named": "Z3"}, "sigma_action": [0, 2, 1]},
    )
    code, report = run_json(capsys, ["evaluate", "--spec", spec])
    assert code == cli.EXIT_OK
    assert report["results"]["all_zero"] is True
    assert report["results"]["model"]["kind"] == "tame"


def test_verify_suite(capsys):
    code, report = run_json(capsys, ["verify", "main-theorem", "--families", "abelian"])
    assert code == cli.EXIT_OK
    assert report["results"]["suite"] == "main-theorem"
    assert report["results"]["counterexamples"] == []
    assert report["results"]["checked"] > 0


def test_catalog_scan(capsys):
    code, report = run_json(capsys, ["catalog", "--families", "dihedral", "--scan", "sha"])
    assert code == cli.EXIT_OK
    assert report["results"]
    assert all("result" in row or "skipped" in row for row in report["results"])


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        [],
        ["verify", "no-such-suite"],
        ["brnr", "--gerb", "missing.json", "--mu", "2"],
        ["brnr", "--mu", "2"],
        ["sha", "--gerb", "missing.json", "--mu", "2", "--family", "ab,1"],
        ["catalog", "--catalog", "enormous"],
        ["brnr", "--bogus-flag"],
    ],
)
def test_usage_errors_exit_with_one(argv):
    assert cli.main(argv) == cli.EXIT_ERROR


def test_essentially_real_needs_odd_part_only(write_json):
    gerb = write_json("real.json", {**INVERSION, "essentially_real": True})
    assert cli.main(["brnr", "--gerb", gerb, "--mu", "2"]) == cli.EXIT_ERROR
    assert cli.main(["brnr", "--gerb", gerb, "--mu", "2", "--odd-part-only"]) == cli.EXIT_OK


def test_parse_job_echoes_only_result_options(gerb_file):
    job = cli.parse_job(["brnr", "--gerb", str(gerb_file), "--mu", "2", "--workers", "3", "--no-cache"])
    assert job.workers == 3
    assert job.no_cache
    assert "workers" not in job.echo()
    assert "no_cache" not in job.echo()


def test_brnr_with_zero_ambient_h2(capsys, write_json):
    gerb = write_json("z3.json", {"F": {"named": "Z3"}, "gamma": {"named": "1"}})
    code, report = run_json(capsys, ["brnr", "--gerb", gerb, "--mu", "2"])
    assert code == cli.EXIT_OK
    assert report["results"]["kernel"]["invariant_factors"] == []


def test_catalog_scan_brnr_over_abelian_family(capsys):
    code, report = run_json(capsys, ["catalog", "--families", "abelian", "--scan", "brnr"])
    assert code == cli.EXIT_OK
    assert all("result" in row or "skipped" in row for row in report["results"])


def test_coefficients_from_the_gerb_document(capsys, write_json):
    gerb = write_json("s3_mu.json", {**INVERSION, "mu": 3, "character": {"1": 2}})
    code, report = run_json(capsys, ["brnr", "--gerb", gerb])
    assert code == cli.EXIT_OK
    assert report["results"]["agree"] is True
    assert cli.main(["brnr", "--gerb", write_json("bare.json", INVERSION)]) == cli.EXIT_ERROR


def test_explicit_gerb_without_gamma(capsys, write_json):
    gerb = write_json("z4.json", {"E": {"named": "Z4"}, "F": [0, 2], "pi": [0, 1, 0, 1]})
    code, report = run_json(capsys, ["sha", "--gerb", gerb, "--mu", "2"])
    assert code == cli.EXIT_OK
