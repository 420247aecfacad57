"""Kernel backend selection.

The sampler's inner loops are compiled with numba when it is importable.
Setting ``TRAIT_NO_NUMBA=1`` forces the pure-Python fallback: the same
source functions run uncompiled, so both paths produce bit-identical
results (only speed differs). ``TRAIT_THREADS`` caps the numba thread
pool; our Gibbs chains are sequential, so this mostly matters for
library-level parallelism.
"""

import os


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


NUMBA_DISABLED = _env_flag("TRAIT_NO_NUMBA")
NUMBA_ACTIVE = False

if not NUMBA_DISABLED:
    try:
        import numba as _numba

        NUMBA_ACTIVE = True
    except ImportError:
        _numba = None


def _identity_jit(*args, **kwargs):
    """Stand-in for ``numba.njit`` that returns functions unchanged."""
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap


if NUMBA_ACTIVE:
    njit = _numba.njit
    _threads = os.environ.get("TRAIT_THREADS", "").strip()
    if _threads.isdigit() and int(_threads) >= 1:
        try:
            _numba.set_num_threads(min(int(_threads), _numba.config.NUMBA_NUM_THREADS))
        except ValueError:
            pass
else:
    njit = _identity_jit
