"""Kernel backend selection.

The compiled Cython kernels are used when importable; otherwise the
pure-Python twins take over.  Setting the environment variable
``PRIMECYCLES_PURE`` (to any non-empty value) forces the fallback, which
is handy for the backend-parity tests and the benchmark.
"""

import os

if os.environ.get("PRIMECYCLES_PURE"):
    from . import _kernels_py as kernels

    USING_COMPILED = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        USING_COMPILED = True
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        USING_COMPILED = False


def backend_name() -> str:
    return "compiled" if USING_COMPILED else "pure-python"
