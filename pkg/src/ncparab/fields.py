"""Coefficient fields: vectorized callables over spatial coordinates.

Conventions used throughout the package:

* a scalar field is called as ``f(x)`` in 1D or ``f(x, y)`` in 2D, where the
  coordinates are numpy arrays of a common shape, and returns an array of
  that shape (complex or real);
* a matrix field returns shape ``coords + (n, n)``;
* a source term takes a trailing float time argument, ``f(x, t)`` or
  ``f(x, y, t)``.

Named presets cover the configurations used by the shipped experiments;
tabulated fields can be loaded from CSV for anything else.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import ConfigError

# Matrix with real ellipticity constant 1 whose complex Hermitian form is
# degenerate (eigenvalues 0 and 2): annihilates holomorphic directions.
DEGENERATE_DISK_MATRIX = np.array([[1.0, 1.0j], [-1.0j, 1.0]], dtype=complex)


def constant_scalar(value):
    """Constant scalar field of any arity."""
    value = complex(value)

    def field(*coords):
        return np.full(np.shape(coords[0]), value)

    return field


def constant_matrix(mat):
    """Constant n-by-n matrix field of any arity."""
    mat = np.asarray(mat, dtype=complex)

    def field(*coords):
        shape = np.shape(coords[0])
        return np.broadcast_to(mat, shape + mat.shape)

    return field


def zero_source(*coords_and_t):
    return np.zeros(np.shape(coords_and_t[0]), dtype=complex)


def tabulated_scalar(path):
    """Scalar field from a CSV table with columns x[,y],re,im.

    1D tables are interpolated linearly in x; 2D tables use the nearest
    sample point. Rows may be in any order.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip().lower() for c in next(reader)]
        rows = [[float(v) for v in row] for row in reader if row]
    if header[:3] == ["x", "re", "im"]:
        data = np.array(sorted(rows))
        xs, re, im = data[:, 0], data[:, 1], data[:, 2]

        def field(x):
            return np.interp(x, xs, re) + 1j * np.interp(x, xs, im)

        return field
    if header[:4] == ["x", "y", "re", "im"]:
        data = np.array(rows)
        pts, vals = data[:, :2], data[:, 2] + 1j * data[:, 3]

        def field(x, y):
            x = np.asarray(x, dtype=float)
            q = np.stack([np.ravel(x), np.ravel(y)], axis=1)
            d2 = ((q[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
            out = vals[np.argmin(d2, axis=1)]
            return out.reshape(x.shape)

        return field
    raise ConfigError(f"unsupported CSV field header {header!r} in {path}")


def matrix_field_from_name(name, dim):
    """Resolve a named principal-matrix preset.

    Recognized names: ``identity``, ``paper_disk`` (alias ``degenerate_disk``,
    the matrix [[1, i], [-i, 1]]), and ``diag(d1,d2)`` with real entries.
    """
    key = name.strip().lower()
    if key == "identity":
        return constant_matrix(np.eye(dim))
    if key in ("paper_disk", "degenerate_disk"):
        if dim != 2:
            raise ConfigError("disk principal matrix requires a 2D domain")
        return constant_matrix(DEGENERATE_DISK_MATRIX)
    if key.startswith("diag(") and key.endswith(")"):
        entries = [float(v) for v in key[5:-1].split(",")]
        if len(entries) != dim:
            raise ConfigError(f"diag(...) needs {dim} entries, got {len(entries)}")
        return constant_matrix(np.diag(entries))
    raise ConfigError(f"unknown principal-matrix preset {name!r}")


def scalar_field_from_spec(text, dim):
    """Scalar field from a config token: complex literal or ``csv:PATH``."""
    token = text.strip()
    if token.startswith("csv:"):
        field = tabulated_scalar(token[4:])
        return field
    try:
        return constant_scalar(complex(token.replace(" ", "")))
    except ValueError as exc:
        raise ConfigError(f"cannot parse scalar field {text!r}") from exc
