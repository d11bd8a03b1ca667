"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``SCENT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SCENT_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

phase_residual_jac = _impl.phase_residual_jac
# numpy's BLAS matmul beats the compiled loop here (see benchmarks/)
mixture_state = _pykernels.mixture_state
separable_forward = _impl.separable_forward
separable_backward = _impl.separable_backward

__all__ = ["BACKEND", "phase_residual_jac", "mixture_state", "separable_forward", "separable_backward"]
