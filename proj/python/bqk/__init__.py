"""Discrete Borel quantization: homology, classification, connections, spectra."""

import json as _json

from ._bqk import (
    Connection,
    InputError,
    InvariantError,
    Mesh,
    SolverError,
    aharonov_bohm_connection,
    catalogue,
    chern,
    cohomology_h2,
    connection_from_phases,
    flat_connection,
    fourier_circle,
    homology,
    is_flat,
    load_mesh,
    monopole_connection,
    refine,
    spectrum,
    trivial_connection,
)
from . import _bqk


def classification_card(mesh):
    return _json.loads(_bqk.classification_card(mesh))


def classify(connection, c=0.0):
    return _json.loads(_bqk.classify(connection, c))


def mesh_from_json(doc):
    return _bqk.mesh_from_json(doc if isinstance(doc, str) else _json.dumps(doc))


__all__ = [
    "Connection", "InputError", "InvariantError", "Mesh", "SolverError",
    "aharonov_bohm_connection", "catalogue", "chern", "classification_card", "classify",
    "cohomology_h2", "connection_from_phases", "flat_connection", "fourier_circle",
    "homology", "is_flat", "load_mesh", "mesh_from_json", "monopole_connection",
    "refine", "spectrum", "trivial_connection",
]
