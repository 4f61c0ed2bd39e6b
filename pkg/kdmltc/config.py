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
Run configuration as a flat mapping of dotted keys ('section.key') backed by INI files.

Values are resolved in the order built-in defaults, named preset, configuration file,
explicit overrides (command line flags); later sources win.
"""

from __future__ import division, print_function

from collections import OrderedDict

from kdmltc.core.io import render_ini, read_ini
from kdmltc.distill import DistillConfig, TrainingMode, VARIANTS
from kdmltc.hypertune import SwarmConfig
from kdmltc.model import EncoderSpec

PRESETS = OrderedDict([
    ("trial_and_error", OrderedDict([("distill.temperature", 2.), ("distill.alpha", 0.5),
                                     ("distill.learning_rate", 2e-5), ("distill.batch_size", 16),
                                     ("distill.max_length", 128), ("distill.epochs", 5)])),
    ("pso_selected", OrderedDict([("distill.temperature", 2.79), ("distill.alpha", 0.1),
                                  ("distill.learning_rate", 1e-5), ("distill.batch_size", 8),
                                  ("distill.max_length", 512), ("distill.epochs", 5)])),
    ("custom", OrderedDict()),
])


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % (s,))


def _int_list(s):
    if isinstance(s, (list, tuple)):
        return [int(v) for v in s]
    return [int(v) for v in str(s).split(",") if v.strip()]


def _str_list(s):
    if isinstance(s, (list, tuple)):
        return [str(v) for v in s]
    return [v.strip() for v in str(s).split(",") if v.strip()]


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ",".join(str(x) for x in v)
    return str(v)


# key -> (parser, default)
DEFAULTS = OrderedDict([
    ("paths.corpus", (str, "")),
    ("paths.vocab", (str, "")),
    ("paths.out", (str, "out")),
    ("paths.space", (str, "")),
    ("paths.predictions", (str, "")),
    ("paths.replications", (str, "")),
    ("run.mode", (str, "sequential_kd")),
    ("run.preset", (str, "trial_and_error")),
    ("run.k", (int, 5)),
    ("run.seed", (int, 0)),
    ("run.workers", (int, 1)),
    ("run.label_order", (_str_list, [])),
    ("run.contrastive_weight", (float, 0.5)),
    ("features.dim", (int, 2**15)),
    ("distill.temperature", (float, 2.)),
    ("distill.alpha", (float, 0.5)),
    ("distill.learning_rate", (float, 2e-5)),
    ("distill.batch_size", (int, 16)),
    ("distill.epochs", (int, 5)),
    ("distill.max_length", (int, 128)),
    ("distill.lr_scale", (float, 5e3)),
    ("distill.max_grad_norm", (float, 1.)),
    ("teacher.hidden_sizes", (_int_list, [128, 64])),
    ("teacher.activation", (str, "tanh")),
    ("student.hidden_sizes", (_int_list, [32])),
    ("student.activation", (str, "tanh")),
    ("swarm.n", (int, 10)),
    ("swarm.w", (float, 0.7)),
    ("swarm.c1", (float, 1.5)),
    ("swarm.c2", (float, 1.5)),
    ("swarm.max_iters", (int, 10)),
    ("swarm.threshold", (float, 1e-3)),
    ("swarm.patience", (int, 1)),
    ("swarm.relative_threshold", (_bool, False)),
    ("sample.size", (int, 300)),
    ("synthetic.num_docs", (int, 1000)),
    ("synthetic.num_labels", (int, 10)),
    ("synthetic.prevalence", (float, 0.3)),
    ("synthetic.correlation", (float, 0.)),
    ("synthetic.filler_vocab", (int, 200)),
    ("synthetic.doc_length", (int, 12)),
    ("synthetic.keyword_repeats", (int, 2)),
    ("metrics.threshold", (float, 0.5)),
    ("metrics.literal_weights", (_bool, False)),
    ("stats.equal_var", (_bool, False)),
])


class RunConfig(object):
    """
    Resolved configuration.

    Parameters
    ----------
    values : mapping, optional
        dotted key -> value (strings are parsed) applied on top of the defaults
    """
    def __init__(self, values=None):
        self._values = OrderedDict((k, d) for k, (_, d) in DEFAULTS.items())
        if values:
            self.update(values)

    def __getitem__(self, key):
        return self._values[key]

    def __contains__(self, key):
        return key in self._values

    def set(self, key, value):
        if key not in DEFAULTS:
            raise ValueError("unknown configuration key '%s'" % key)
        parser = DEFAULTS[key][0]
        try:
            self._values[key] = parser(value)
        except (TypeError, ValueError):
            raise ValueError("bad value %r for configuration key '%s'" % (value, key))

    def update(self, values):
        for k, v in values.items():
            self.set(k, v)
        return self

    def items(self):
        return self._values.items()

    def apply_preset(self, name):
        if name not in PRESETS:
            raise ValueError("preset '%s' unknown has to be one of %s" % (name, list(PRESETS)))
        self._values["run.preset"] = name
        return self.update(PRESETS[name])

    @staticmethod
    def file_values(fn):
        """Dotted key -> raw string of an INI configuration file."""
        cp = read_ini(fn)
        return OrderedDict(("%s.%s" % (sec, k), v) for sec in cp.sections() for k, v in cp[sec].items())

    @classmethod
    def resolve(cls, config_file=None, overrides=None):
        """
        Build a configuration from defaults, preset, configuration file and overrides.

        Parameters
        ----------
        config_file : str, optional
            INI file
        overrides : mapping, optional
            dotted key -> value, typically from the command line

        Returns
        -------
        cfg : RunConfig
        """
        overrides = OrderedDict(overrides or {})
        from_file = cls.file_values(config_file) if config_file else OrderedDict()
        preset = overrides.get("run.preset", from_file.get("run.preset", DEFAULTS["run.preset"][1]))
        cfg = cls().apply_preset(str(preset))
        cfg.update(from_file)
        cfg.update(overrides)
        return cfg

    def sections(self):
        out = OrderedDict()
        for k, v in self._values.items():
            sec, key = k.split(".", 1)
            out.setdefault(sec, OrderedDict())[key] = _fmt(v)
        return out

    def to_ini(self):
        return render_ini(self.sections())

    def distill_config(self):
        return DistillConfig(self["distill.temperature"], self["distill.alpha"],
                             self["distill.learning_rate"], self["distill.batch_size"],
                             self["distill.epochs"], self["distill.max_length"],
                             self["distill.lr_scale"], self["distill.max_grad_norm"])

    def mode(self):
        v = self["run.mode"]
        if v not in VARIANTS:
            raise ValueError("run.mode '%s' unknown has to be one of %s" % (v, VARIANTS))
        return TrainingMode(v, self["run.contrastive_weight"] if v.endswith("_contrastive") else None)

    def teacher_spec(self):
        return EncoderSpec(self["features.dim"], self["teacher.hidden_sizes"], self["teacher.activation"], "teacher")

    def student_spec(self):
        return EncoderSpec(self["features.dim"], self["student.hidden_sizes"], self["student.activation"], "student")

    def swarm_config(self):
        return SwarmConfig(self["swarm.n"], self["swarm.w"], self["swarm.c1"], self["swarm.c2"],
                           self["swarm.max_iters"], self["swarm.threshold"], self["swarm.patience"],
                           self["run.seed"], self["run.workers"], self["swarm.relative_threshold"])

    def label_order(self, vocab):
        """Label indices in training order, None for vocabulary order."""
        names = self["run.label_order"]
        if not names:
            return None
        try:
            return [vocab.index[l] for l in names]
        except KeyError as err:
            raise ValueError("run.label_order names unknown label %s" % err)
