from .base import BrnrError, SuiteResult
from .catalog import CatalogEntry, CatalogSpec, catalog, named_group
from .cohomology import CohomologyClass, CohomologyGroup, cohomology_group
from .gerbe import Gerb, ProcyclicPair, gerb_from_explicit, gerb_from_split
from .groups import FiniteGroup, GroupHom, Subgroup
from .modules import GModule, mu_module
from .pairing import constancy_check, enumerate_sections, evaluate_class
from .sha import sha2, unramified_brauer
from .suites import SuiteCollection, default_suites

__version__ = "0.1.0"

__ALL__ = [
    BrnrError,
    CatalogEntry,
    CatalogSpec,
    CohomologyClass,
    CohomologyGroup,
    FiniteGroup,
    Gerb,
    GModule,
    GroupHom,
    ProcyclicPair,
    Subgroup,
    SuiteCollection,
    SuiteResult,
    catalog,
    cohomology_group,
    constancy_check,
    default_suites,
    enumerate_sections,
    evaluate_class,
    gerb_from_explicit,
    gerb_from_split,
    mu_module,
    named_group,
    sha2,
    unramified_brauer,
]
