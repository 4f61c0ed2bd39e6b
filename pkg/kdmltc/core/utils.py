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

from __future__ import division, print_function

import os
import tempfile
import contextlib
import multiprocessing

import numpy as np

""" a number of convenience functions"""

_UINT64 = 2**64


def _as_uint64(value):
    return int(value) % _UINT64


def make_rng(*keys):
    """
    Create a numpy random generator deterministically derived from a tuple of integer keys.

    Parameters
    ----------
    keys : int
        integers identifying the stream, e.g. (seed, fold, label, role)

    Returns
    -------
    rng : np.random.Generator
        generator backed by a Philox counter-based bit generator
    """
    ss = np.random.SeedSequence([_as_uint64(k) for k in keys])
    return np.random.Generator(np.random.Philox(ss))


def particle_rng(seed, index):
    """
    Random stream for one swarm particle. The Philox key is (seed, particle index), so
    the stream of a particle does not depend on how many other particles exist or on the
    order in which they are evaluated.
    """
    key = np.array([_as_uint64(seed), _as_uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(*keys):
    """Derive a single 63 bit integer seed from a tuple of integer keys."""
    ss = np.random.SeedSequence([_as_uint64(k) for k in keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def round_half_away(x):
    """
    Round to the nearest integer, with halves rounded away from zero (4.5 -> 5, -4.5 -> -5).
    Note that np.round rounds halves to even.
    """
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def map_workers(fct, items, workers=1):
    """
    Map fct over items using up to workers processes. The result order always matches
    the input order. Falls back to a serial map inside daemonic pool workers, which
    cannot spawn children.

    Parameters
    ----------
    fct : callable
        picklable function of one argument
    items : list
        arguments
    workers : int, optional
        maximum number of processes

    Returns
    -------
    out : list
        fct(item) for every item
    """
    items = list(items)
    workers = min(int(workers or 1), len(items))
    if workers <= 1 or multiprocessing.current_process().daemon:
        return [fct(it) for it in items]
    with multiprocessing.Pool(workers) as pool:
        return pool.map(fct, items)


@contextlib.contextmanager
def atomic_path(path):
    """
    Context manager yielding a temporary file name next to path. On a clean exit the
    temporary file is renamed onto path, otherwise it is removed and path is untouched.
    """
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix="-" + os.path.basename(path), dir=dirname)
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def atomic_write_text(path, text):
    """Write text to path through a temporary file and an atomic rename."""
    with atomic_path(path) as tmp:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(text)
    return path


def peak_memory_mb():
    """Peak resident set size of this process in MiB, None where the platform does not report it."""
    try:
        import resource
    except ImportError:
        return None
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # kilobytes on linux
    return rss / 1024.
