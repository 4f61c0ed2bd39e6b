# -*- coding: utf-8 -*-
#  This file is part of kdmltc.
#
#  kdmltc is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  kdmltc is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with kdmltc.  If not, see <http://www.gnu.org/licenses/>.
#
# Copyright 2026 the kdmltc developers

"""
Greedy iterative stratification of multi-label data into parts of prescribed size.

Documents are visited label by label, always taking the label with the fewest
unassigned positives. Each document of that label goes to the part with the largest
remaining demand for the label, among parts that still have room; ties go to the part
with the smallest current size and then to the lowest part index. Documents without any
label are placed last, into the part with the most room left.
"""

from __future__ import division, print_function

import numpy as np


def part_sizes(n, k):
    """Sizes of k parts of n items differing by at most one, larger parts first."""
    base, rem = divmod(n, k)
    return np.array([base + (1 if f < rem else 0) for f in range(k)], dtype=np.int64)


def _pick(candidates, demand, size):
    # largest demand, then smallest current size, then lowest index
    best = None
    for p in candidates:
        key = (-demand[p], size[p], p)
        if best is None or key < best[0]:
            best = (key, p)
    return best[1]


def iterative_stratification(Y, sizes, rng):
    """
    Assign documents to parts of the given sizes while preserving per-label prevalence.

    Parameters
    ----------
    Y : array_like
        boolean label matrix of shape (n_docs, n_labels)
    sizes : array_like
        target size of every part, must sum to n_docs
    rng : np.random.Generator
        generator used for the initial document order

    Returns
    -------
    part : np.ndarray
        part index per document
    """
    Y = np.asarray(Y, dtype=bool)
    sizes = np.asarray(sizes, dtype=np.int64)
    n, L = Y.shape
    assert sizes.sum() == n, "part sizes must add up to the number of documents"
    k = sizes.size
    ratios = sizes / float(n) if n else np.zeros(k)
    # label demand per part, may go negative
    demand = np.outer(ratios, Y.sum(axis=0).astype(float))
    room = sizes.copy()
    size = np.zeros(k, dtype=np.int64)
    part = np.full(n, -1, dtype=np.int64)
    order = rng.permutation(n)
    remaining = Y.sum(axis=0).astype(np.int64)
    while True:
        active = np.flatnonzero(remaining > 0)
        if active.size == 0:
            break
        lab = active[np.argmin(remaining[active])]
        for d in order:
            if part[d] >= 0 or not Y[d, lab]:
                continue
            candidates = np.flatnonzero(room > 0)
            p = _pick(candidates, demand[:, lab], size)
            part[d] = p
            room[p] -= 1
            size[p] += 1
            labs = np.flatnonzero(Y[d])
            demand[p, labs] -= 1.
            remaining[labs] -= 1
    for d in order:
        if part[d] >= 0:
            continue
        candidates = np.flatnonzero(room > 0)
        p = _pick(candidates, room.astype(float), size)
        part[d] = p
        room[p] -= 1
        size[p] += 1
    return part
