import json
from pathlib import Path

import pytest

from brnr.base import JobFileNotFound, SchemaViolation
from models.schemas import (
    EvaluationSpec,
    GerbSpec,
    GroupSpec,
    JobSpec,
    ModelSpec,
    ModuleSpec,
    json_pointer,
    load_spec,
    parse_spec,
)

INVERSION = {"F": {"named": "Z3"}, "gamma": {"named": "Z2"}, "action": [[0, 1, 2], [0, 2, 1]]}


def pointer_of(data, spec_class):
    with pytest.raises(SchemaViolation) as info:
        parse_spec(data, spec_class).build()
    return info.value.pointer


def test_json_pointer_escapes():
    assert json_pointer(("a", 1, "b/c", "d~e")) == "/a/1/b~1c/d~0e"
    assert json_pointer(()) == ""


def test_type_errors_point_at_the_value():
    data = {**INVERSION, "action": [[0, 1, 2], [0, "x", 1]]}
    assert pointer_of(data, GerbSpec) == "/action/1/1"


def test_missing_and_unknown_fields():
    assert pointer_of({"F": {"named": "Z3"}}, GerbSpec) == "/gamma"
    assert pointer_of({**INVERSION, "colour": "red"}, GerbSpec) == "/colour"


def test_form_violations_point_at_the_object():
    data = {**INVERSION, "E": {"named": "S3"}, "kernel": [0], "projection": [0] * 6}
    with pytest.raises(SchemaViolation) as info:
        parse_spec(data, GerbSpec)
    assert info.value.pointer == ""
    assert "either F" in info.value.message


def test_action_shape_is_checked():
    assert pointer_of({**INVERSION, "action": [[0, 1, 2]]}, GerbSpec) == "/action"
    assert pointer_of({**INVERSION, "action": [[0, 1, 2], [0, 2]]}, GerbSpec) == "/action/1"


def test_group_forms():
    assert parse_spec({"named": "Q8"}, GroupSpec).build().order == 8
    assert parse_spec({"table": [[0, 1], [1, 0]]}, GroupSpec).build().order == 2
    assert parse_spec({"degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}, GroupSpec).build().order == 6
    with pytest.raises(SchemaViolation):
        parse_spec({"generators": [[1, 0]]}, GroupSpec)
    with pytest.raises(SchemaViolation) as info:
        parse_spec({"table": [[0, 1], [1]]}, GroupSpec).build("/F")
    assert info.value.pointer == "/F/table/1"


def test_split_and_explicit_gerbs():
    split = parse_spec(INVERSION, GerbSpec).build()
    assert split.split and split.E.order == 6
    explicit = parse_spec(
        {"E": {"named": "Z4"}, "gamma": {"named": "Z2"}, "kernel": [0, 2], "projection": [0, 1, 0, 1]}, GerbSpec
    ).build()
    assert not explicit.split
    generated = parse_spec({**INVERSION, "action": None, "action_generators": [[0, 2, 1]]}, GerbSpec).build()
    assert generated.E.same_as(split.E)


def test_module_forms():
    gerb = parse_spec(INVERSION, GerbSpec).build()
    base, M = parse_spec({"mu": 3, "character_generators": [2]}, ModuleSpec).build(gerb)
    assert base.action[:, 0, 0].tolist() == [1, 2]
    assert M.group.same_as(gerb.E)
    explicit, _ = parse_spec({"factors": [2], "action": [[[1]], [[1]]]}, ModuleSpec).build(gerb)
    assert explicit.is_trivial_action
    with pytest.raises(SchemaViolation):
        parse_spec({"mu": 3, "factors": [3]}, ModuleSpec)


def test_model_and_evaluation_specs():
    with pytest.raises(SchemaViolation):
        parse_spec({"kind": "tame", "n": 3}, ModelSpec)
    assert parse_spec({"kind": "real", "n": 2}, ModelSpec).build().gamma.order == 2
    spec = {"model": {"kind": "tame", "n": 3, "q": 2, "a": 2, "b": 3}, "F": {"named": "Z3"}, "sigma_action": [0, 2, 1]}
    model, gerb = parse_spec(spec, EvaluationSpec).build()
    assert model.p == 2
    assert gerb.E.order == 18
    assert pointer_of({**spec, "sigma_action": [0, 1]}, EvaluationSpec) == "/sigma_action"


def test_load_spec_reports_missing_files_and_bad_json(tmp_path: Path):
    with pytest.raises(JobFileNotFound):
        load_spec(tmp_path / "absent.json", GerbSpec)
    bad = tmp_path / "bad.json"
    bad.write_text('{"gamma": \n')
    with pytest.raises(SchemaViolation) as info:
        load_spec(bad, GerbSpec)
    assert info.value.message.startswith("invalid JSON")
    good = tmp_path / "good.json"
    good.write_text(json.dumps(INVERSION))
    assert load_spec(good, GerbSpec).build().F.order == 3


def test_job_spec_validation():
    with pytest.raises(SchemaViolation) as info:
        parse_spec({"command": "sha", "gerb": "g.json", "mu": 2, "family": "ab,1"}, JobSpec)
    assert info.value.pointer == "/family"
    with pytest.raises(SchemaViolation):
        parse_spec({"command": "brnr", "mu": 2}, JobSpec)
    with pytest.raises(SchemaViolation):
        parse_spec({"command": "verify"}, JobSpec)


def test_job_echo_leaves_out_paths_and_runtime_options():
    job = parse_spec(
        {"command": "brnr", "gerb": "g.json", "mu": 2, "workers": 4, "timing": True, "output": "r.json"}, JobSpec
    )
    echo = job.echo()
    assert echo["command"] == "brnr"
    assert echo["mu"] == 2
    for key in ("gerb", "workers", "timing", "output"):
        assert key not in echo
    assert job.input_files() == {"gerb": Path("g.json")}


Z3_TABLE = {"type": "table", "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}
Z2_PERM = {"type": "perm", "degree": 2, "generators": [[1, 0]]}


def test_typed_group_forms():
    assert parse_spec(Z3_TABLE, GroupSpec).build().order == 3
    assert parse_spec({"type": "perm", "degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}, GroupSpec).build().order == 6
    with pytest.raises(SchemaViolation) as info:
        parse_spec({"type": "perm", "table": [[0]]}, GroupSpec)
    assert "does not match" in info.value.message


def test_split_gerb_document_with_coefficients():
    data = {"F": Z3_TABLE, "Gamma": Z2_PERM, "action": [[0, 1, 2], [0, 2, 1]], "mu": 3, "character": {"1": 2}}
    spec = parse_spec(data, GerbSpec)
    gerb = spec.build()
    assert gerb.split and gerb.E.order == 6
    base, M = spec.coefficients().build(gerb)
    assert base.action[:, 0, 0].tolist() == [1, 2]
    # the command line takes precedence
    assert spec.coefficients(mu=2).mu == 2
    assert parse_spec({"F": {"named": "Z3"}, "Gamma": {"named": "1"}}, GerbSpec).coefficients() is None


def test_explicit_gerb_reads_gamma_off_pi():
    gerb = parse_spec({"E": {"named": "Z4"}, "F": [0, 2], "pi": [0, 1, 0, 1]}, GerbSpec).build()
    assert not gerb.split
    assert gerb.gamma.order == 2
    assert gerb.F.order == 2
    assert pointer_of({"E": {"named": "Z4"}, "F": [0, 2], "pi": [1, 0, 1, 0]}, GerbSpec) == "/pi/0"
    assert pointer_of({"E": {"named": "Z4"}, "F": [0, 2], "pi": [0, 2, 0, 2]}, GerbSpec) == "/pi"


def test_kernel_lists_only_in_explicit_form():
    with pytest.raises(SchemaViolation):
        parse_spec({"F": [0, 2], "Gamma": {"named": "Z2"}}, GerbSpec)
    with pytest.raises(SchemaViolation):
        parse_spec({"E": {"named": "Z4"}, "F": [0, 2], "kernel": [0, 2], "pi": [0, 1, 0, 1]}, GerbSpec)


def test_module_maps_keyed_by_element():
    gerb = parse_spec(INVERSION, GerbSpec).build()
    base, _ = parse_spec({"mu": 3, "character": {"1": 2}}, ModuleSpec).build(gerb)
    assert base.action[:, 0, 0].tolist() == [1, 2]
    swap, _ = parse_spec({"factors": [2, 2], "action": {"1": [[0, 1], [1, 0]]}}, ModuleSpec).build(gerb)
    assert swap.action[0].tolist() == [[1, 0], [0, 1]]
    assert swap.action[1].tolist() == [[0, 1], [1, 0]]
    with pytest.raises(SchemaViolation) as info:
        parse_spec({"factors": [2], "action": {"5": [[1]]}}, ModuleSpec).build(gerb)
    assert info.value.pointer == "/action/5"
