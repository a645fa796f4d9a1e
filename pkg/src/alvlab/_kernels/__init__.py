"""Backend selection: compiled Cython kernels when available, pure Python
otherwise. Set ALVLAB_BACKEND=pure or =compiled to force a lane (the
default, also spelled "auto", prefers the compiled one).
"""

import os

_choice = os.environ.get("ALVLAB_BACKEND", "auto").strip().lower() or "auto"

if _choice == "auto":
    try:
        from . import _cy as impl
        BACKEND = "compiled"
    except ImportError:
        from . import _py as impl
        BACKEND = "pure"
elif _choice == "compiled":
    from . import _cy as impl
    BACKEND = "compiled"
elif _choice == "pure":
    from . import _py as impl
    BACKEND = "pure"
else:
    raise RuntimeError(
        f"ALVLAB_BACKEND must be 'auto', 'pure' or 'compiled', got {_choice!r}"
    )

STATUS_T_END = 0
STATUS_CONVERGED = 1
STATUS_CORRECTION_BREACH = 2


def load_backend(name):
    """Load a specific kernel module by name ('pure' or 'compiled').

    Used by the parity tests and the benchmark; everything else goes
    through `impl`.
    """
    if name == "pure":
        from . import _py
        return _py
    if name == "compiled":
        from . import _cy
        return _cy
    raise ValueError(f"unknown backend {name!r}")
