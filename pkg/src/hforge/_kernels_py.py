"""Pure-Python (numpy) fallback for the hot convolution kernel.

Same contract as the compiled extension in ``_speedups``: scatter-style
group-ring convolution over a Cayley table, accumulating
``out[mul[h, k]] += a[h] * b[k]`` for ``h`` in the support of ``a`` and
``k`` in the support of ``b``.
"""

from __future__ import annotations

import numpy as np


def convolve_into(out, a, b, mul, a_support, b_support):
    if len(a_support) == 0 or len(b_support) == 0:
        return
    bs = b_support
    bvals = b[bs]
    for h in a_support:
        # mul[h, bs] has no duplicate targets (row of a Latin square), so
        # fancy-index accumulation is safe.
        out[mul[h, bs]] += a[h] * bvals


def scatter_map(out, a, images, support):
    """out[images[g]] += a[g] for g in support (pushforward along a map)."""
    np.add.at(out, images[support], a[support])
