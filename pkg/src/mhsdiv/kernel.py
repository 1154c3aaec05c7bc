"""Backend selection for the scaled partial-sum scan.

The compiled kernel is used for moduli below 2**64 when the extension is
importable. Everything else goes through the pure-Python kernel, which is
exact at any size. Set ``MHSDIV_PURE=1`` to force the Python kernel.
"""
import os

from . import _pykernel
from .arith import FAST_LIMIT
from .errors import ModulusTooLarge

try:
    if os.environ.get("MHSDIV_PURE"):
        raise ImportError("pure-Python backend forced")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"


def scan(parts, p, t, modulus, n_start, n_end, psum, test_modulus=0,
         backend=None, allow_bigint=True):
    """Dispatch to a kernel; see :func:`mhsdiv._pykernel.scan` for the contract."""
    if n_end <= n_start:
        return []
    fits = modulus < FAST_LIMIT
    if not fits and not allow_bigint:
        raise ModulusTooLarge(f"modulus {modulus} exceeds 2**64 and the bigint fallback is off")
    if backend is None:
        backend = "cython" if (_ckernel is not None and fits) else "python"
    if backend == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not built")
        if not fits:
            raise ModulusTooLarge(f"modulus {modulus} exceeds the compiled kernel")
        return _ckernel.scan(tuple(parts), p, t, modulus, n_start, n_end, psum, test_modulus)
    return _pykernel.scan(tuple(parts), p, t, modulus, n_start, n_end, psum, test_modulus)
