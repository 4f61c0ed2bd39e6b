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
Particle swarm optimisation of hyperparameters.

Every iteration evaluates all particles (in parallel if requested), updates the personal
and global bests, moves the particles and checks for early stopping. Each particle owns
a random stream keyed by (seed, particle index), so results do not depend on the number
of worker processes.
"""

from __future__ import division, print_function

import logging
import warnings
from collections import OrderedDict, namedtuple

import numpy as np

from kdmltc.core import pso
from kdmltc.core.io import render_ini, read_ini, comment_block
from kdmltc.core.utils import round_half_away, map_workers
from kdmltc.distill import DistillConfig
from kdmltc.exceptions import InvariantError, DataError

logger = logging.getLogger(__name__)

KINDS = ["continuous", "integer"]

Dimension = namedtuple("Dimension", ["name", "lb", "ub", "kind"])


class HyperSpace(object):
    """
    Box shaped search space.

    Parameters
    ----------
    dimensions : list of Dimension
        name, lower bound, upper bound and kind of every dimension
    """
    def __init__(self, dimensions):
        dims = []
        for d in dimensions:
            d = Dimension(str(d[0]), float(d[1]), float(d[2]), str(d[3]))
            if d.kind not in KINDS:
                raise ValueError("kind '%s' of dimension '%s' unknown has to be one of %s" % (d.kind, d.name, KINDS))
            if not d.lb < d.ub:
                raise ValueError("dimension '%s' needs lb < ub, got [%r, %r]" % (d.name, d.lb, d.ub))
            dims.append(d)
        if not dims:
            raise ValueError("empty search space")
        self.dimensions = dims

    @classmethod
    def default(cls):
        return cls([Dimension("temperature", 2., 4., "continuous"),
                    Dimension("alpha", 0.1, 0.9, "continuous"),
                    Dimension("learning_rate", 1e-4, 1e-3, "continuous"),
                    Dimension("batch_size", 8, 64, "integer"),
                    Dimension("epochs", 3, 5, "integer"),
                    Dimension("max_length", 128, 512, "integer")])

    @classmethod
    def from_file(cls, fn):
        """Read a space from an INI file with one [dimension:<name>] section per dimension."""
        cp = read_ini(fn)
        dims = []
        for sec in cp.sections():
            if not sec.startswith("dimension:"):
                continue
            s = cp[sec]
            try:
                dims.append(Dimension(sec.split(":", 1)[1], float(s["lb"]), float(s["ub"]),
                                      s.get("kind", "continuous")))
            except (KeyError, ValueError) as err:
                raise DataError("bad search space section [%s]: %s" % (sec, err))
        return cls(dims)

    def to_ini(self, header=None):
        out = render_ini(OrderedDict(("dimension:%s" % d.name,
                                      OrderedDict([("lb", d.lb), ("ub", d.ub), ("kind", d.kind)]))
                                     for d in self.dimensions))
        if header:
            out = comment_block(header) + out
        return out

    @property
    def names(self):
        return [d.name for d in self.dimensions]

    @property
    def lb(self):
        return np.array([d.lb for d in self.dimensions])

    @property
    def ub(self):
        return np.array([d.ub for d in self.dimensions])

    @property
    def integer(self):
        return np.array([d.kind == "integer" for d in self.dimensions])

    def __len__(self):
        return len(self.dimensions)

    def __eq__(self, other):
        return isinstance(other, HyperSpace) and self.dimensions == other.dimensions


class SwarmConfig(object):
    """
    Swarm settings.

    Parameters
    ----------
    n : int
        number of particles
    w : float
        inertia weight
    c1, c2 : float
        cognitive and social weights
    max_iters : int
        maximum number of iterations
    threshold : float
        minimum improvement of the global best per iteration, 0 disables early stopping
    patience : int
        number of consecutive iterations below threshold that stop the search
    seed : int
        random seed
    parallelism : int
        number of worker processes evaluating particles
    relative_threshold : bool
        take threshold as a fraction of the previous best score
    """
    def __init__(self, n=10, w=0.7, c1=1.5, c2=1.5, max_iters=10, threshold=1e-3, patience=1,
                 seed=0, parallelism=1, relative_threshold=False):
        if int(n) < 1 or int(max_iters) < 1 or int(patience) < 1:
            raise ValueError("n, max_iters and patience have to be at least 1")
        if min(w, c1, c2) < 0 or threshold < 0:
            raise ValueError("w, c1, c2 and threshold have to be nonnegative")
        self.n = int(n)
        self.w = float(w)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.max_iters = int(max_iters)
        self.threshold = float(threshold)
        self.patience = int(patience)
        self.seed = int(seed)
        self.parallelism = max(int(parallelism), 1)
        self.relative_threshold = bool(relative_threshold)

    @classmethod
    def tuning_default(cls, **kwargs):
        """Ten particles, w = 0.7, c1 = c2 = 1.5, ten iterations, 0.001 threshold, patience 1."""
        d = dict(n=10, w=0.7, c1=1.5, c2=1.5, max_iters=10, threshold=1e-3, patience=1)
        d.update(kwargs)
        return cls(**d)


class Particle(object):
    """Position, velocity and personal best of one particle, with its random stream."""
    def __init__(self, x, v, rng):
        self.x = x
        self.v = v
        self.pbest_pos = x.copy()
        self.pbest_score = -np.inf
        self.rng = rng


class SwarmState(object):
    def __init__(self, particles):
        self.particles = particles
        self.gbest_pos = None
        self.gbest_score = -np.inf
        self.prev_best = -np.inf
        self.no_improv_count = 0
        self.iteration = 0

    def check(self):
        best = max(p.pbest_score for p in self.particles)
        if not best == self.gbest_score:
            raise InvariantError("global best %r is not the best personal best %r"
                                 % (self.gbest_score, best))


PSOResult = namedtuple("PSOResult", ["best_position", "best_score", "best_values", "trace",
                                     "iterations", "stopped_early"])


def init_swarm(space, cfg):
    """Particles uniform in the box with velocities uniform in +-(ub - lb)/2."""
    parts = [Particle(*pso.init_particle(space.lb, space.ub, cfg.seed, i)) for i in range(cfg.n)]
    return SwarmState(parts)


def decode_position(position, space):
    """Position with integer dimensions rounded half away from zero and clamped to bounds."""
    x = np.array(position, dtype=np.float64)
    ints = space.integer
    x[ints] = np.clip(round_half_away(x[ints]), space.lb[ints], space.ub[ints])
    return x


def decode_values(position, space):
    """Decoded position as an ordered name -> value mapping, integers as int."""
    x = decode_position(position, space)
    return OrderedDict((d.name, int(v) if d.kind == "integer" else float(v))
                       for d, v in zip(space.dimensions, x))


def decode(position, space, base=None):
    """
    Hyperparameter configuration of a position.

    Parameters
    ----------
    position : array_like
        particle position
    space : HyperSpace
        dimensions named after DistillConfig fields
    base : DistillConfig, optional
        values of fields that are not searched

    Returns
    -------
    cfg : DistillConfig
    """
    base = DistillConfig() if base is None else base
    return base.replace(**decode_values(position, space))


def velocity_update(p, gbest_pos, cfg, rng=None, r=None):
    """
    Move a particle: v = w v + c1 r1 (pbest - x) + c2 r2 (gbest - x), x = x + v.

    Parameters
    ----------
    p : Particle
        updated in place
    gbest_pos : np.ndarray or None
        global best position, the social term is left out while there is none
    cfg : SwarmConfig
        weights
    rng : np.random.Generator, optional
        source of r1 and r2, the particle's own stream by default
    r : tuple, optional
        fixed (r1, r2) instead of random draws

    Returns
    -------
    p : Particle
    """
    if r is None:
        rng = p.rng if rng is None else rng
        r1 = rng.random(p.x.size)
        r2 = rng.random(p.x.size)
    else:
        r1, r2 = r
    p.x, p.v = pso.velocity_update(p.x, p.v, p.pbest_pos, gbest_pos, cfg.w, cfg.c1, cfg.c2, r1, r2)
    return p


def apply_constraints(position, space, velocity=None):
    """
    Clamp a position to the box of space.

    Returns
    -------
    position : np.ndarray
        if velocity is given a (position, velocity) pair with the velocity zeroed on
        every clamped dimension
    """
    v = np.zeros(len(space)) if velocity is None else velocity
    x, v = pso.apply_constraints(position, v, space.lb, space.ub)
    return x if velocity is None else (x, v)


def early_stop_check(state, threshold, patience, relative=False):
    """
    Count iterations whose improvement of the global best stays below threshold.

    Returns
    -------
    stop : bool
        True once patience consecutive iterations improved by less than threshold
    """
    if pso.improvement_below(state.gbest_score, state.prev_best, threshold, relative):
        state.no_improv_count += 1
    else:
        state.no_improv_count = 0
    state.prev_best = state.gbest_score
    return state.no_improv_count >= patience


def pso_optimize(space, objective, cfg):
    """
    Maximise objective over space.

    Parameters
    ----------
    space : HyperSpace
        search box
    objective : callable
        maps a decoded position (np.ndarray) to a score, has to be picklable for
        cfg.parallelism > 1
    cfg : SwarmConfig
        swarm settings

    Returns
    -------
    result : PSOResult
        best position and score, decoded best values, the per-iteration trace, the number
        of iterations run and whether early stopping fired
    """
    state = init_swarm(space, cfg)
    trace = []
    stopped = False
    for it in range(cfg.max_iters):
        positions = [decode_position(p.x, space) for p in state.particles]
        values = map_workers(objective, positions, cfg.parallelism)
        flagged = []
        for i, (p, s) in enumerate(zip(state.particles, values)):
            s = float(s)
            if not np.isfinite(s):
                warnings.warn("objective returned %r for particle %d, scored as -inf" % (s, i))
                flagged.append(i)
                s = -np.inf
            if s > p.pbest_score:
                p.pbest_score = s
                p.pbest_pos = p.x.copy()
            if s > state.gbest_score:
                state.gbest_score = s
                state.gbest_pos = p.x.copy()
        state.check()
        state.iteration = it + 1
        trace.append(OrderedDict([
            ("iteration", state.iteration), ("gbest_score", state.gbest_score),
            ("gbest", None if state.gbest_pos is None else decode_values(state.gbest_pos, space)),
            ("nonfinite", flagged)]))
        logger.info("iteration %d, best score %r", state.iteration, state.gbest_score)
        for p in state.particles:
            velocity_update(p, state.gbest_pos, cfg)
            p.x, p.v = apply_constraints(p.x, space, p.v)
        if early_stop_check(state, cfg.threshold, cfg.patience, cfg.relative_threshold):
            stopped = True
            break
    best = state.gbest_pos
    return PSOResult(None if best is None else decode_position(best, space), state.gbest_score,
                     None if best is None else decode_values(best, space), trace,
                     state.iteration, stopped)
