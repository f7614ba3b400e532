import numpy as np
import pytest

from brnr import cohomology, groups
from brnr.catalog import abelian_group, dihedral_group, gamma_group, named_group, symmetric_group
from brnr.config import settings
from brnr.gerbe import gerb_from_explicit, gerb_from_split
from brnr.groups import cyclic_group, quotient_by_normal
from brnr.modules import mu_module, pull_back_module


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """No test reads or writes the user's cache directory."""
    monkeypatch.setenv("BRNR_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setattr(settings, "cache_dir", tmp_path / "cache")
    # cli.main calls configure(), which mutates the shared settings
    monkeypatch.setattr(settings, "workers", settings.workers)
    monkeypatch.setattr(settings, "max_order", settings.max_order)
    yield
    cohomology.attach_store(None)
    groups.attach_lattice_store(None)
    cohomology.clear_cache()


def trivial_action(F, gamma):
    return np.broadcast_to(np.arange(F.order), (gamma.order, F.order)).copy()


@pytest.fixture
def z2():
    return cyclic_group(2)


@pytest.fixture
def s3():
    return symmetric_group(3)


@pytest.fixture
def d4():
    return dihedral_group(4)


@pytest.fixture
def inversion_gerb():
    """Z/3 ⋊ Z/2 with the generator inverting, i.e. S3 over Z/2."""
    F, gamma = cyclic_group(3), gamma_group("Z2")
    return gerb_from_split(F, gamma, [[0, 1, 2], [0, 2, 1]])


@pytest.fixture
def klein_gerb():
    """Z/2 × Z/2 split over Z/2 with trivial action."""
    F, gamma = cyclic_group(2), gamma_group("Z2")
    return gerb_from_split(F, gamma, trivial_action(F, gamma))


@pytest.fixture
def s3_geometric():
    """S3 over the trivial group with μ_6."""
    F, gamma = named_group("S3"), gamma_group("1")
    g = gerb_from_split(F, gamma, trivial_action(F, gamma))
    return g, pull_back_module(mu_module(6, gamma), g.pi)


@pytest.fixture
def cyclic4_gerb():
    """1 -> Z/2 -> Z/4 -> Z/2 -> 1, which has no section."""
    E = cyclic_group(4)
    F = E.subgroup([0, 2])
    Q, projection = quotient_by_normal(E, F)
    return gerb_from_explicit(E, F, projection)


@pytest.fixture
def klein():
    return abelian_group((2, 2))
