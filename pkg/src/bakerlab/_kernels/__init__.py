"""Hot-kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementations in ``_pure`` take over. Set ``BAKERLAB_BACKEND=python`` to
force the fallback.
"""
import os

import numpy as np

from . import _pure

_FUNCS = ("centered_dft", "shift", "apply_1q", "baker", "perturbed_step")


def _load(name):
    if name == "python":
        return _pure, "python"
    try:
        from . import _ckernels
    except ImportError:
        if name == "cython":
            raise
        return _pure, "python"
    return _ckernels, "cython"


_impl, BACKEND = _load(os.environ.get("BAKERLAB_BACKEND", "auto").lower())


def available_backends():
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Module implementing the kernels for ``name`` ('python' or 'cython')."""
    return _load(name)[0]


def _rows(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def centered_dft(rows, m, inverse=False):
    return _impl.centered_dft(_rows(rows), int(m), bool(inverse))


def shift(rows, N, n):
    return _impl.shift(_rows(rows), int(N), int(n))


def apply_1q(rows, N, q, gate):
    return _impl.apply_1q(_rows(rows), int(N), int(q), _rows(gate))


def baker(rows, N, n):
    return _impl.baker(_rows(rows), int(N), int(n))


def perturbed_step(rows, N, n, u0, u1, q):
    return _impl.perturbed_step(_rows(rows), int(N), int(n), _rows(u0), _rows(u1), int(q))
