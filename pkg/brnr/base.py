from abc import ABCMeta, abstractmethod
from dataclasses import dataclass, field, fields, replace
from typing import Any


class BrnrError(Exception):
    """Raised when an operation rejects its input."""

    def __init__(self, message, **witness):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def __str__(self):
        if not self.witness:
            return self.message
        detail = ", ".join(f"{key}={value!r}" for key, value in self.witness.items())
        return f"{self.message} ({detail})"


class NotAssociative(BrnrError):
    pass


class NoIdentity(BrnrError):
    pass


class NoInverse(BrnrError):
    pass


class NotAPermutation(BrnrError):
    pass


class OrderLimitExceeded(BrnrError):
    pass


class ActionNotHomomorphic(BrnrError):
    pass


class NotNormal(BrnrError):
    pass


class NotAHomomorphism(BrnrError):
    pass


class CharacterNotMultiplicative(BrnrError):
    pass


class NonUnitValue(BrnrError):
    pass


class TargetMismatch(BrnrError):
    pass


class ExponentMismatch(BrnrError):
    pass


class SizeLimitExceeded(BrnrError):
    pass


class NotSurjective(BrnrError):
    pass


class ModuleMismatch(BrnrError):
    pass


class NotACocycle(BrnrError):
    pass


class NotExact(BrnrError):
    pass


class NoSection(BrnrError):
    pass


class NotAbelian(BrnrError):
    pass


class EssentiallyRealUnsupported(BrnrError):
    pass


class InconsistentParameters(BrnrError):
    pass


class HypothesesViolated(BrnrError):
    pass


class UnknownCommand(BrnrError):
    pass


class SchemaViolation(BrnrError):
    """Input JSON rejected; `pointer` locates the offending value."""

    def __init__(self, message, pointer: str = "", **witness):
        super().__init__(message, pointer=pointer, **witness)
        self.pointer = pointer


class JobFileNotFound(BrnrError):
    pass


class CacheCorrupt(BrnrError):
    pass


@dataclass(kw_only=True, frozen=True)
class SuiteResult:
    """Outcome of a verification suite run."""

    suite: str
    checked: int = 0
    skipped: int = 0
    counterexamples: tuple[dict[str, Any], ...] = ()
    notes: tuple[str, ...] = ()
    details: tuple[dict[str, Any], ...] = field(default=(), compare=False)

    def __bool__(self):
        return not self.counterexamples

    def __add__(self, other: "SuiteResult"):
        if self.suite != other.suite:
            raise ValueError("Cannot combine results of different suites")
        return SuiteResult(
            suite=self.suite,
            checked=self.checked + other.checked,
            skipped=self.skipped + other.skipped,
            counterexamples=self.counterexamples + other.counterexamples,
            notes=self.notes + other.notes,
            details=self.details + other.details,
        )

    def replace(self, **kwargs):
        """Returns a new SuiteResult with the given fields replaced."""
        return replace(self, **kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            f.name: list(getattr(self, f.name))
            if isinstance(getattr(self, f.name), tuple)
            else getattr(self, f.name)
            for f in fields(self)
        }


class BaseSuite(metaclass=ABCMeta):
    """Abstract base class for named verification suites."""

    name: str

    @abstractmethod
    def __call__(self, entries, **options) -> SuiteResult:
        """Runs the suite over catalog entries."""
        ...
