import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Type, TypeVar, Union

import numpy as np
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from brnr.base import JobFileNotFound, SchemaViolation
from brnr.catalog import named_group
from brnr.gerbe import Gerb, gerb_from_explicit, gerb_from_split
from brnr.groups import FiniteGroup, GroupHom, action_from_generators, group_from_permutations, group_from_table
from brnr.modules import GModule, character_from_generators, mu_module, pull_back_module
from brnr.pairing import LocalGaloisModel, model_gerb, real_model, tame_local_model

SCHEMA_VERSION = 1

Spec = TypeVar("Spec", bound=BaseModel)

Character = Union[List[int], Dict[int, int]]


def _is_union_tag(part) -> bool:
    return isinstance(part, str) and ("[" in part or part.endswith("Spec"))


def json_pointer(loc) -> str:
    """RFC 6901 pointer for a pydantic error location."""
    parts = [str(p).replace("~", "~0").replace("/", "~1") for p in loc if not _is_union_tag(p)]
    return "/" + "/".join(parts) if parts else ""


def _check_rows(rows, width: int, pointer: str, what: str):
    for i, row in enumerate(rows):
        if len(row) != width:
            raise SchemaViolation(f"{what} must have {width} entries", pointer=f"{pointer}/{i}", got=len(row))


class GroupSpec(BaseModel):
    """A group by name, by multiplication table, or by permutation generators"""
    model_config = ConfigDict(extra="forbid")

    type: Optional[Literal["named", "table", "perm"]] = None
    named: Optional[str] = None
    table: Optional[List[List[int]]] = None
    degree: Optional[int] = Field(None, ge=1)
    generators: Optional[List[List[int]]] = None

    @model_validator(mode="after")
    def one_form(self):
        given = {"named": self.named is not None, "table": self.table is not None, "perm": self.generators is not None}
        if sum(given.values()) != 1:
            raise ValueError("give exactly one of named, table or generators")
        if self.type is not None and not given[self.type]:
            raise ValueError(f"type {self.type!r} does not match the fields given")
        if self.generators is not None and self.degree is None:
            raise ValueError("permutation generators need a degree")
        return self

    def build(self, pointer: str = "") -> FiniteGroup:
        if self.named is not None:
            return named_group(self.named)
        if self.table is not None:
            _check_rows(self.table, len(self.table), f"{pointer}/table", "table row")
            return group_from_table(self.table)
        _check_rows(self.generators, self.degree, f"{pointer}/generators", "generator")
        return group_from_permutations(self.degree, self.generators)


def _image_group(E: FiniteGroup, pi: List[int]) -> FiniteGroup:
    """Γ read off a surjection onto 0..m-1 sending the identity to 0."""
    values = np.asarray(pi, dtype=np.int64)
    m = int(values.max()) + 1 if values.size else 0
    if values.min(initial=0) < 0 or set(values.tolist()) != set(range(m)):
        raise SchemaViolation("pi must map onto 0..m-1", pointer="/pi")
    if values[0] != 0:
        raise SchemaViolation("pi must send the identity to 0", pointer="/pi/0")
    preimages = np.asarray([np.flatnonzero(values == g)[0] for g in range(m)], dtype=np.int64)
    return group_from_table(values[E.table[np.ix_(preimages, preimages)]])


class ModuleSpec(BaseModel):
    """A Γ-module, pulled back to E: μ_n with a character, or explicit matrices"""
    model_config = ConfigDict(extra="forbid")

    mu: Optional[int] = Field(None, ge=2)
    character: Optional[Character] = None
    character_generators: Optional[List[int]] = None
    factors: Optional[List[int]] = None
    action: Optional[Union[List[List[List[int]]], Dict[int, List[List[int]]]]] = None

    @model_validator(mode="after")
    def one_form(self):
        if (self.mu is None) == (self.factors is None):
            raise ValueError("give either mu or factors")
        if self.factors is not None and self.action is None:
            raise ValueError("explicit modules need an action")
        if self.character is not None and self.character_generators is not None:
            raise ValueError("give at most one of character and character_generators")
        return self

    def _matrices(self, gamma: FiniteGroup) -> list:
        if isinstance(self.action, dict):
            # unlisted elements act trivially
            identity = np.eye(len(self.factors), dtype=np.int64).tolist()
            for g in self.action:
                if not 0 <= g < gamma.order:
                    raise SchemaViolation(f"no element {g} in Γ", pointer=f"/action/{g}")
            return [self.action.get(g, identity) for g in range(gamma.order)]
        if len(self.action) != gamma.order:
            raise SchemaViolation(f"action must have {gamma.order} matrices", pointer="/action")
        return self.action

    def build_base(self, gamma: FiniteGroup) -> GModule:
        if self.mu is not None:
            character = self.character
            if self.character_generators is not None:
                character = character_from_generators(gamma, self.mu, self.character_generators)
            return mu_module(self.mu, gamma, character)
        return GModule(gamma, self.factors, self._matrices(gamma))

    def build(self, gerb: Gerb) -> tuple[GModule, GModule]:
        base = self.build_base(gerb.gamma)
        return base, pull_back_module(base, gerb.pi)


class GerbSpec(BaseModel):
    """Either F, Γ and an action (split), or E, the kernel F and the projection pi"""
    model_config = ConfigDict(extra="forbid")

    F: Optional[Union[GroupSpec, List[int]]] = None
    gamma: Optional[GroupSpec] = Field(None, validation_alias=AliasChoices("gamma", "Gamma"))
    action: Optional[List[List[int]]] = None
    action_generators: Optional[List[List[int]]] = None
    E: Optional[GroupSpec] = None
    kernel: Optional[List[int]] = None
    projection: Optional[List[int]] = Field(None, validation_alias=AliasChoices("projection", "pi"))
    mu: Optional[int] = Field(None, ge=2)
    character: Optional[Character] = None
    essentially_real: bool = False

    @model_validator(mode="after")
    def one_form(self):
        if self.E is None:
            if not isinstance(self.F, GroupSpec):
                raise ValueError("give either F (split gerb) or E (explicit extension)")
            if self.kernel is not None or self.projection is not None:
                raise ValueError("kernel and projection belong to an explicit extension")
        else:
            if isinstance(self.F, GroupSpec):
                raise ValueError("give either F (split gerb) or E (explicit extension)")
            if self.F is not None and self.kernel is not None:
                raise ValueError("give the kernel once, as F or as kernel")
            if (self.F is None and self.kernel is None) or self.projection is None:
                raise ValueError("an explicit extension needs its kernel and projection")
        if self.action is not None and self.action_generators is not None:
            raise ValueError("give at most one of action and action_generators")
        if self.character is not None and self.mu is None:
            raise ValueError("a character needs mu")
        return self

    def coefficients(self, mu: int | None = None, character_generators: List[int] | None = None) -> ModuleSpec | None:
        """μ_n from the command line when given, else from the gerb document."""
        if mu is not None:
            return ModuleSpec(mu=mu, character_generators=character_generators)
        if self.mu is None:
            return None
        if character_generators is not None:
            return ModuleSpec(mu=self.mu, character_generators=character_generators)
        return ModuleSpec(mu=self.mu, character=self.character)

    def _build_explicit(self) -> Gerb:
        E = self.E.build("/E")
        if len(self.projection) != E.order:
            raise SchemaViolation(f"projection must have {E.order} entries", pointer="/pi")
        gamma = self.gamma.build("/gamma") if self.gamma is not None else _image_group(E, self.projection)
        pi = GroupHom(E, gamma, tuple(self.projection))
        kernel = self.F if self.F is not None else self.kernel
        return gerb_from_explicit(E, E.subgroup(kernel), pi, self.essentially_real)

    def build(self) -> Gerb:
        if self.E is not None:
            return self._build_explicit()
        if self.gamma is None:
            raise SchemaViolation("a split gerb needs Gamma", pointer="/gamma")
        gamma = self.gamma.build("/gamma")
        F = self.F.build("/F")
        if self.action is not None:
            if len(self.action) != gamma.order:
                raise SchemaViolation(f"action must have {gamma.order} rows", pointer="/action")
            _check_rows(self.action, F.order, "/action", "action row")
            action = np.asarray(self.action, dtype=np.int64)
        elif self.action_generators is not None:
            _check_rows(self.action_generators, F.order, "/action_generators", "automorphism")
            action = action_from_generators(F, gamma, self.action_generators)
        else:
            action = np.broadcast_to(np.arange(F.order), (gamma.order, F.order)).copy()
        return gerb_from_split(F, gamma, action, self.essentially_real)


class ModelSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["tame", "real"]
    n: int = Field(ge=2)
    p: Optional[int] = Field(None, ge=2)
    q: Optional[int] = Field(None, ge=2)
    a: int = Field(1, ge=1)
    b: int = Field(1, ge=1)

    @model_validator(mode="after")
    def tame_needs_q(self):
        if self.kind == "tame" and self.q is None:
            raise ValueError("tame models need q")
        return self

    def build(self) -> LocalGaloisModel:
        if self.kind == "real":
            return real_model(self.n)
        return tame_local_model(self.q, self.a, self.b, self.n, self.p)


class EvaluationSpec(BaseModel):
    """A split gerb F ⋊ Γ over a local model and the classes to evaluate"""
    model_config = ConfigDict(extra="forbid")

    model: ModelSpec
    F: GroupSpec
    sigma_action: Optional[List[int]] = None
    tau_action: Optional[List[int]] = None
    classes: Literal["normalized", "constant", "all"] = "normalized"
    bypass: bool = False

    def build(self) -> tuple[LocalGaloisModel, Gerb]:
        model = self.model.build()
        F = self.F.build("/F")
        identity = list(range(F.order))
        for name in ("sigma_action", "tau_action"):
            row = getattr(self, name)
            if row is not None and len(row) != F.order:
                raise SchemaViolation(f"{name} must have {F.order} entries", pointer=f"/{name}")
        return model, model_gerb(model, F, self.sigma_action or identity, self.tau_action)


def parse_spec(data, spec_class: Type[Spec]) -> Spec:
    try:
        return spec_class.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise SchemaViolation(first["msg"], pointer=json_pointer(first["loc"])) from e


def load_spec(path: str | Path, spec_class: Type[Spec]) -> Spec:
    path = Path(path)
    if not path.is_file():
        raise JobFileNotFound("input file not found", path=str(path))
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise SchemaViolation(f"invalid JSON: {e.msg}", pointer="", line=e.lineno) from e
    return parse_spec(data, spec_class)


COMMANDS = ("cohomology", "sha", "brnr", "sections", "evaluate", "verify", "catalog")
SCAN_COMMANDS = ("brnr", "sha", "cohomology", "sections")


class JobSpec(BaseModel):
    """One CLI invocation after argument parsing"""
    model_config = ConfigDict(extra="forbid")

    command: Literal[COMMANDS]
    gerb: Optional[Path] = None
    module: Optional[Path] = None
    mu: Optional[int] = Field(None, ge=2)
    character: Optional[List[int]] = None
    spec: Optional[Path] = None
    degree: int = Field(2, ge=0, le=2)
    on: Literal["E", "gamma"] = "E"
    family: str = "ab,scyc"
    suite: Optional[str] = None
    catalog: str = "small"
    families: Optional[List[str]] = None
    scan: Literal[SCAN_COMMANDS] = "brnr"
    odd_part_only: bool = False
    sha1_cyc: bool = False
    output: Optional[Path] = None
    cache_dir: Optional[Path] = None
    no_cache: bool = False
    workers: Optional[int] = Field(None, ge=1, le=64)
    max_order: Optional[int] = Field(None, ge=1)
    timing: bool = False
    json_output: bool = False

    @field_validator("family")
    @classmethod
    def family_pair(cls, value: str) -> str:
        x, _, y = value.partition(",")
        if x not in ("ab", "bic", "cyc") or y not in ("scyc", "0"):
            raise ValueError("family must be x,y with x in ab|bic|cyc and y in scyc|0")
        return value

    @model_validator(mode="after")
    def inputs_present(self):
        needs_gerb = self.command in ("cohomology", "sha", "brnr", "sections")
        if needs_gerb and self.gerb is None:
            raise ValueError(f"{self.command} needs --gerb")
        if self.command == "evaluate" and self.spec is None:
            raise ValueError("evaluate needs --spec")
        if self.command == "verify" and self.suite is None:
            raise ValueError("verify needs a suite name")
        return self

    def input_files(self) -> dict:
        files = {"gerb": self.gerb, "module": self.module, "spec": self.spec}
        return {name: path for name, path in files.items() if path is not None}

    def echo(self) -> dict:
        """The options that determine the results"""
        skip = {"output", "cache_dir", "no_cache", "workers", "timing", "json_output", *self.input_files()}
        return {key: value for key, value in self.model_dump().items() if key not in skip and value is not None}
