"""Kernel backend selection.

Imports the compiled extension when present, otherwise the pure-Python
mirror.  `BACKEND` reports which one is live; `AELFORGE_FORCE_PURE=1`
forces the fallback (used by the backend-parity tests and the benchmark).
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("AELFORGE_FORCE_PURE") == "1":
    impl = pure
else:
    try:
        from . import _kernels as impl  # type: ignore[no-redef]
    except ImportError:
        impl = pure

BACKEND: str = impl.BACKEND

rref_inplace = impl.rref_inplace
rank_of = impl.rank_of
matmul = impl.matmul
codeword_table = impl.codeword_table
min_nonzero_weight = impl.min_nonzero_weight
rim_agreement_scan = impl.rim_agreement_scan
