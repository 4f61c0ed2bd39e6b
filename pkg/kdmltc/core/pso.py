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
Particle swarm arithmetic on plain arrays. Scores are maximised.
"""

from __future__ import division, print_function

import numpy as np

from kdmltc.core.utils import particle_rng


def init_particle(lb, ub, seed, index):
    """
    Random start of one particle.

    Parameters
    ----------
    lb, ub : array_like
        lower and upper bounds per dimension
    seed : int
        swarm seed
    index : int
        particle index

    Returns
    -------
    x : np.ndarray
        position, uniform in [lb, ub]
    v : np.ndarray
        velocity, uniform in [-(ub-lb)/2, (ub-lb)/2]
    rng : np.random.Generator
        the particle's own stream, used for all later draws of this particle
    """
    lb = np.asarray(lb, dtype=np.float64)
    ub = np.asarray(ub, dtype=np.float64)
    rng = particle_rng(seed, index)
    x = rng.uniform(lb, ub)
    half = (ub - lb) / 2.
    v = rng.uniform(-half, half)
    # uniform(lb, ub) may return ub for tiny intervals
    x = np.clip(x, lb, ub)
    return x, v, rng


def velocity_update(x, v, pbest, gbest, w, c1, c2, r1, r2):
    """
    v' = w v + c1 r1 (pbest - x) + c2 r2 (gbest - x) and x' = x + v'.

    Parameters
    ----------
    x, v, pbest : np.ndarray
        position, velocity and personal best of the particle
    gbest : np.ndarray or None
        global best position, no social term if None
    w, c1, c2 : float
        inertia, cognitive and social weights
    r1, r2 : np.ndarray
        random factors per dimension in [0, 1]

    Returns
    -------
    x, v : np.ndarray
        new position and velocity, not constrained
    """
    v_new = w * v + c1 * r1 * (pbest - x)
    if gbest is not None:
        v_new = v_new + c2 * r2 * (gbest - x)
    return x + v_new, v_new


def apply_constraints(x, v, lb, ub):
    """
    Clamp a position to its box and zero the velocity on every clamped dimension.

    Returns
    -------
    x, v : np.ndarray
        constrained copies
    """
    x = np.asarray(x, dtype=np.float64)
    v = np.array(v, dtype=np.float64)
    xc = np.clip(x, lb, ub)
    v[xc != x] = 0.
    return xc, v


def improvement_below(gbest, prev_best, threshold, relative=False):
    """
    True if the step from prev_best to gbest counts as no improvement. A NaN improvement
    (both scores -inf) counts as no improvement. With relative=True the threshold is a
    fraction of |prev_best|. A threshold of 0 never reports a stall.
    """
    if threshold <= 0:
        return False
    with np.errstate(invalid="ignore"):
        improvement = gbest - prev_best
    if np.isnan(improvement):
        return True
    if relative and np.isfinite(prev_best):
        threshold = threshold * abs(prev_best)
    return improvement < threshold


def sphere(x):
    """Negative sphere function -sum(x**2), maximal at the origin."""
    return -float(np.sum(np.asarray(x, dtype=np.float64)**2))
