"""Backend selection for the hot mixture-query kernels.

The compiled Cython backend (``_fast``) is preferred; if the extension was
not built (pure-python install, missing compiler) the numpy reference
backend (``_ref``) is used.  Both expose the same three entry points with
identical semantics:

- ``mix_batch(x, v, inv2sig, nodes, weights)``
- ``bettor_run(coins, inv2sig, use_round_count, nodes, weights)``
- ``experts_run(losses, pi, inv2sig, use_round_count, nodes, weights)``

The two backends agree to ~1e-12 relative but not bitwise (different
summation order); each backend is individually deterministic.
``BACKEND`` records which one is active.
"""

try:
    from . import _fast as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover - exercised on pure-python installs
    from . import _ref as _impl

    BACKEND = "python"

mix_batch = _impl.mix_batch
bettor_run = _impl.bettor_run
experts_run = _impl.experts_run

__all__ = ["BACKEND", "mix_batch", "bettor_run", "experts_run"]
