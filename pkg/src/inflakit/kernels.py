"""Backend selection for the hot numerical loops.

The numba backend is used when available; set ``INFLAKIT_NUMBA=0`` in the
environment to force the pure-numpy fallback.  The flag is a performance
knob only: both backends implement identical arithmetic and are compared
against each other in the test suite and in ``benchmarks/``.
"""

import os

from . import _kernels_np

_flag = os.environ.get("INFLAKIT_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "off", "no")

if _want_numba:
    try:
        from . import _kernels_nb as _impl

        BACKEND = "numba"
    except ImportError:
        _impl = _kernels_np
        BACKEND = "numpy"
else:
    _impl = _kernels_np
    BACKEND = "numpy"

SCHEME_EXACT = _kernels_np.SCHEME_EXACT
SCHEME_EULER = _kernels_np.SCHEME_EULER
SCHEME_MILSTEIN = _kernels_np.SCHEME_MILSTEIN

gbm_paths = _impl.gbm_paths
cir_paths = _impl.cir_paths
ou_exact_paths = _impl.ou_exact_paths
jy_exact_paths = _impl.jy_exact_paths
jy_euler_paths = _impl.jy_euler_paths
exp_martingale_paths = _impl.exp_martingale_paths
binomial_backward = _impl.binomial_backward
ho_lee_forward_induction = _impl.ho_lee_forward_induction
