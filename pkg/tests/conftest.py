import numpy as np
import pytest

from ncparab.assembly import assemble_forms
from ncparab.meshing import build_mesh
from ncparab.presets import get_preset
from ncparab.problem import factorize_principal, sample_interior_points
from ncparab.spectral import generalized_eigenbasis


def build_pipeline(preset_name, resolution=None, k=None):
    """Assemble mesh, forms and eigenbasis for a preset; shared helper."""
    preset = get_preset(preset_name)
    spec = preset.build()
    resolution = resolution or preset.default_resolution
    mesh = build_mesh(spec.domain, resolution, spec.dirichlet_selector)
    factorized = factorize_principal(spec, sample_interior_points(spec.domain, 8))
    forms = assemble_forms(mesh, spec, factorized)
    k = min(k or preset.default_k, forms.N)
    basis = generalized_eigenbasis(forms.k_plus, forms.mass, k)
    return spec, mesh, forms, basis, k


def nodal_initial(spec, forms):
    nodes = forms.mesh.nodes
    coords = tuple(nodes[:, i] for i in range(forms.mesh.dim))
    u0 = np.asarray(spec.initial(*coords), dtype=complex)
    return forms.dofmap.reduce(u0)


@pytest.fixture(scope="session")
def heat_pipeline():
    return build_pipeline("heat1d", resolution=50, k=20)


@pytest.fixture(scope="session")
def disk_pipeline():
    return build_pipeline("disk", resolution=6, k=30)
