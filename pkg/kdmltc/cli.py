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
Command line interface.

Every configuration key is available as a flag of the same name, e.g.
``kdmltc run --paths.corpus c.jsonl --paths.vocab v.txt --distill.alpha 0.3``.
Exit codes are 0 on success, 1 for usage errors, 2 for bad input data and 3 for
internal errors.
"""

from __future__ import division, print_function

import os
import sys
import time
import logging
import argparse
import contextlib
import configparser
import warnings
from collections import OrderedDict

from kdmltc import __version__
from kdmltc import corpus as kcorpus
from kdmltc import distill, metrics, hypertune, stats, synthetic
from kdmltc.config import RunConfig, DEFAULTS, PRESETS
from kdmltc.core.io import render_ini, comment_block
from kdmltc.core.utils import atomic_write_text, peak_memory_mb
from kdmltc.exceptions import KdmltcError, DataError, InvariantError, PredictionFormatError
from kdmltc.io import save_predictions, load_predictions, save_trace

logger = logging.getLogger("kdmltc")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

COMMANDS = ["generate-synthetic", "sample", "run", "tune", "evaluate", "ablate", "stats"]

# keys left out of the headers of result files, they must not change the results
_VOLATILE = ("run.workers", "paths.out")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@contextlib.contextmanager
def stage(name):
    """Tag any exception raised in the block with the stage name."""
    logger.info("stage %s", name)
    try:
        yield
    except Exception as err:
        if not hasattr(err, "stage"):
            err.stage = name
        raise


def _out_dir(cfg):
    out = cfg["paths.out"]
    os.makedirs(out, exist_ok=True)
    return out


def _header(cfg, command):
    sections = cfg.sections()
    for k in _VOLATILE:
        sec, key = k.split(".", 1)
        sections[sec].pop(key, None)
    return "kdmltc %s %s\n%s" % (__version__, command, render_ini(sections))


def write_manifest(cfg, command, started, extra=None):
    """Write manifest.ini with version, command, timing, memory and the full configuration."""
    sections = OrderedDict()
    sections["manifest"] = OrderedDict([("version", __version__), ("command", command),
                                        ("seed", cfg["run.seed"]),
                                        ("wall_clock_seconds", "%.3f" % (time.perf_counter() - started)),
                                        ("peak_memory_mb", peak_memory_mb())])
    if extra:
        for sec, items in extra.items():
            sections[sec] = items
    for sec, items in cfg.sections().items():
        sections["config:%s" % sec] = items
    fn = os.path.join(_out_dir(cfg), "manifest.ini")
    atomic_write_text(fn, render_ini(sections))
    return fn


def _load(cfg):
    if not cfg["paths.corpus"] or not cfg["paths.vocab"]:
        raise UsageError("--paths.corpus and --paths.vocab are required")
    with stage("load"):
        return kcorpus.load_corpus(cfg["paths.corpus"], cfg["paths.vocab"])


def cmd_generate_synthetic(cfg):
    """Write a synthetic keyword separable corpus and its vocabulary."""
    started = time.perf_counter()
    out = _out_dir(cfg)
    with stage("generate"):
        c = synthetic.generate_synthetic(cfg["synthetic.num_docs"], cfg["synthetic.num_labels"],
                                         cfg["run.seed"], cfg["synthetic.prevalence"],
                                         cfg["synthetic.correlation"], cfg["synthetic.filler_vocab"],
                                         cfg["synthetic.doc_length"], cfg["synthetic.keyword_repeats"])
    with stage("write"):
        cfn = os.path.join(out, "corpus.jsonl")
        vfn = os.path.join(out, "vocab.txt")
        kcorpus.save_corpus(c, cfn, vfn, _header(cfg, "generate-synthetic"))
        man = write_manifest(cfg, "generate-synthetic", started,
                             {"prevalence": OrderedDict(zip(c.vocab, map(repr, c.prevalence().tolist())))})
    return {"corpus": cfn, "vocab": vfn, "manifest": man}


def cmd_sample(cfg):
    """Write a stratified sample of sample.size documents."""
    started = time.perf_counter()
    c = _load(cfg)
    with stage("sample"):
        s = kcorpus.stratified_sample(c, cfg["sample.size"], cfg["run.seed"])
    with stage("write"):
        out = _out_dir(cfg)
        cfn = os.path.join(out, "sample.jsonl")
        vfn = os.path.join(out, "vocab.txt")
        kcorpus.save_corpus(s, cfn, vfn, _header(cfg, "sample"))
        prev = OrderedDict()
        for l, pc, ps in zip(c.vocab, c.prevalence().tolist(), s.prevalence().tolist()):
            prev[l] = "corpus %r sample %r" % (pc, ps)
        man = write_manifest(cfg, "sample", started, {"prevalence": prev})
    return {"sample": cfn, "vocab": vfn, "manifest": man}


def _train(cfg, c, folds, mode, dcfg=None, workers=None):
    dcfg = cfg.distill_config() if dcfg is None else dcfg
    return distill.run_training(c, folds, mode, cfg.teacher_spec(), cfg.student_spec(), dcfg,
                                cfg["run.seed"], cfg.label_order(c.vocab),
                                cfg["run.workers"] if workers is None else workers)


def _report(cfg, p):
    return metrics.full_report(p, cfg["metrics.threshold"], cfg["metrics.literal_weights"])


def cmd_run(cfg):
    """Train the configured mode over stratified folds, write predictions and metrics."""
    started = time.perf_counter()
    c = _load(cfg)
    with stage("split"):
        folds = kcorpus.stratified_kfold(c, cfg["run.k"], cfg["run.seed"])
    with stage("train"):
        mode = cfg.mode()
        p = _train(cfg, c, folds, mode)
    with stage("evaluate"):
        rep = _report(cfg, p)
    with stage("write"):
        out = _out_dir(cfg)
        header = _header(cfg, "run")
        pfn = save_predictions(p, os.path.join(out, "predictions.jsonl"), header)
        mfn = os.path.join(out, "metrics.ini")
        atomic_write_text(mfn, rep.to_ini(header))
        man = write_manifest(cfg, "run", started,
                             {"run": OrderedDict([("mode", mode.variant), ("preset", cfg["run.preset"]),
                                                  ("fold_digest", folds.digest()),
                                                  ("example_f1", "%.6f" % rep.example_f1)])})
    logger.info("example F1 %.4f", rep.example_f1)
    return {"predictions": pfn, "metrics": mfn, "manifest": man, "report": rep}


class RunObjective(object):
    """
    Example based F1 of a cross-validated training run as a function of a decoded
    position. Picklable, so particles can be evaluated in worker processes.
    """
    def __init__(self, cfg, corpus, folds, space):
        self.cfg = cfg
        self.corpus = corpus
        self.folds = folds
        self.space = space

    def __call__(self, x):
        dcfg = hypertune.decode(x, self.space, self.cfg.distill_config())
        p = _train(self.cfg, self.corpus, self.folds, self.cfg.mode(), dcfg, workers=1)
        return metrics.example_f1(p, self.cfg["metrics.threshold"])


def cmd_tune(cfg, objective=None):
    """
    Particle swarm search of the distillation hyperparameters. Writes the per-iteration
    trace and the best configuration as a configuration file.

    Parameters
    ----------
    cfg : RunConfig
    objective : callable, optional
        replaces the training run objective
    """
    started = time.perf_counter()
    space = hypertune.HyperSpace.from_file(cfg["paths.space"]) if cfg["paths.space"] \
        else hypertune.HyperSpace.default()
    base = cfg.distill_config()
    if "learning_rate" in space.names:
        d = space.dimensions[space.names.index("learning_rate")]
        if not d.lb <= base.learning_rate <= d.ub:
            warnings.warn("configured learning rate %r lies outside the search range [%r, %r]"
                          % (base.learning_rate, d.lb, d.ub))
    if objective is None:
        c = _load(cfg)
        with stage("split"):
            folds = kcorpus.stratified_kfold(c, cfg["run.k"], cfg["run.seed"])
        objective = RunObjective(cfg, c, folds, space)
    with stage("tune"):
        res = hypertune.pso_optimize(space, objective, cfg.swarm_config())
    with stage("write"):
        out = _out_dir(cfg)
        header = _header(cfg, "tune")
        tfn = save_trace(res.trace, os.path.join(out, "trace.jsonl"), header)
        best = RunConfig(dict(cfg.items()))
        best.set("run.preset", "custom")
        if res.best_values is not None:
            for k, v in res.best_values.items():
                if "distill.%s" % k in best:
                    best.set("distill.%s" % k, v)
        bfn = os.path.join(out, "best.ini")
        atomic_write_text(bfn, comment_block("%s\nbest score %r" % (header, res.best_score))
                          + best.to_ini())
        sfn = os.path.join(out, "space.ini")
        atomic_write_text(sfn, space.to_ini(header))
        man = write_manifest(cfg, "tune", started,
                             {"tune": OrderedDict([("best_score", repr(res.best_score)),
                                                   ("iterations", res.iterations),
                                                   ("stopped_early", res.stopped_early)])})
    return {"trace": tfn, "best": bfn, "space": sfn, "manifest": man, "result": res}


def cmd_evaluate(cfg):
    """Compute the metrics report of a prediction file."""
    started = time.perf_counter()
    if not cfg["paths.predictions"]:
        raise UsageError("--paths.predictions is required")
    with stage("load"):
        p = load_predictions(cfg["paths.predictions"])
        if not p.is_complete():
            raise PredictionFormatError("predictions do not cover every (document, label) pair")
    with stage("evaluate"):
        rep = _report(cfg, p)
    with stage("write"):
        mfn = os.path.join(_out_dir(cfg), "metrics.ini")
        atomic_write_text(mfn, rep.to_ini(_header(cfg, "evaluate")))
        man = write_manifest(cfg, "evaluate", started)
    return {"metrics": mfn, "manifest": man, "report": rep}


def cmd_ablate(cfg):
    """
    Run the four distillation variants on shared folds and write their scores side by
    side.
    """
    started = time.perf_counter()
    c = _load(cfg)
    with stage("split"):
        folds = kcorpus.stratified_kfold(c, cfg["run.k"], cfg["run.seed"])
    rows = OrderedDict()
    digests = set()
    for variant in distill.ABLATION_VARIANTS:
        with stage("train %s" % variant):
            beta = cfg["run.contrastive_weight"] if variant.endswith("_contrastive") else None
            p = _train(cfg, c, folds, distill.TrainingMode(variant, beta))
            rep = _report(cfg, p)
        digests.add(folds.digest())
        rows[variant] = OrderedDict([("f1", "%.6f" % rep.example_f1), ("micro_f1", "%.6f" % rep.micro_f1),
                                     ("macro_f1", "%.6f" % rep.macro_f1),
                                     ("weighted_f1", "%.6f" % rep.weighted_f1),
                                     ("fold_digest", folds.digest())])
    if len(digests) != 1:
        raise InvariantError("ablation variants did not share their folds")
    with stage("write"):
        afn = os.path.join(_out_dir(cfg), "ablation.ini")
        atomic_write_text(afn, comment_block(_header(cfg, "ablate")) + render_ini(rows))
        man = write_manifest(cfg, "ablate", started, {"ablate": OrderedDict([("fold_digest", digests.pop())])})
    return {"ablation": afn, "manifest": man, "rows": rows}


def cmd_stats(cfg):
    """Descriptive statistics, t-tests and ANOVA of a replication file."""
    started = time.perf_counter()
    if not cfg["paths.replications"]:
        raise UsageError("--paths.replications is required")
    with stage("load"):
        reps = stats.load_replications(cfg["paths.replications"])
    with stage("stats"):
        text = stats.stats_report(reps, cfg["stats.equal_var"])
    with stage("write"):
        sfn = os.path.join(_out_dir(cfg), "stats.ini")
        atomic_write_text(sfn, comment_block(_header(cfg, "stats")) + text)
        man = write_manifest(cfg, "stats", started)
    return {"stats": sfn, "manifest": man}


DISPATCH = OrderedDict([("generate-synthetic", cmd_generate_synthetic), ("sample", cmd_sample),
                        ("run", cmd_run), ("tune", cmd_tune), ("evaluate", cmd_evaluate),
                        ("ablate", cmd_ablate), ("stats", cmd_stats)])

# short flags for the most used keys
_ALIASES = OrderedDict([("--seed", "run.seed"), ("--workers", "run.workers"), ("--out", "paths.out"),
                        ("--corpus", "paths.corpus"), ("--vocab", "paths.vocab"),
                        ("--predictions", "paths.predictions"),
                        ("--replications", "paths.replications"), ("--space", "paths.space"),
                        ("--preset", "run.preset"), ("--mode", "run.mode")])


def _options_parser():
    p = _Parser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="INI configuration file")
    p.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS, help="only log warnings")
    for flag, key in _ALIASES.items():
        p.add_argument(flag, dest=key, default=argparse.SUPPRESS, help="same as --%s" % key)
    for key in DEFAULTS:
        p.add_argument("--" + key, dest=key, default=argparse.SUPPRESS, metavar=key.split(".")[-1].upper())
    return p


def build_parser():
    opts = _options_parser()
    parser = _Parser(prog="kdmltc", description="knowledge distillation for multi-label text classification",
                     parents=[opts])
    parser.add_argument("--version", action="version", version="kdmltc %s" % __version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[opts], help=DISPATCH[name].__doc__.strip().split("\n")[0])
    return parser


def parse_config(argv):
    """
    Parse a command line.

    Returns
    -------
    command : str
    cfg : RunConfig
    quiet : bool
    """
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command", None)
    if command is None:
        raise UsageError("a command is required, one of %s" % ", ".join(COMMANDS))
    quiet = ns.pop("quiet", False)
    config_file = ns.pop("config", None)
    if "run.preset" in ns and ns["run.preset"] not in PRESETS:
        raise UsageError("unknown preset '%s'" % ns["run.preset"])
    try:
        cfg = RunConfig.resolve(config_file, ns)
    except configparser.Error as err:
        raise UsageError("malformed configuration file: %s" % err)
    return command, cfg, quiet


def _setup_logging(quiet):
    if not logger.handlers:
        h = logging.StreamHandler(sys.stderr)
        h.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        logger.addHandler(h)
    logger.setLevel(logging.WARNING if quiet else logging.INFO)


def main(argv=None):
    """Entry point, returns the exit code."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        command, cfg, quiet = parse_config(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else EXIT_USAGE
    except (UsageError, ValueError) as err:
        print("kdmltc: usage error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print("kdmltc: can not read configuration: %s" % err, file=sys.stderr)
        return EXIT_DATA
    _setup_logging(quiet)
    try:
        DISPATCH[command](cfg)
    except UsageError as err:
        logger.error("usage error: %s", err)
        return EXIT_USAGE
    except (DataError, OSError) as err:
        logger.error("data error in stage '%s': %s", getattr(err, "stage", command), err)
        return EXIT_DATA
    except (InvariantError, KdmltcError) as err:
        logger.error("internal error in stage '%s': %s", getattr(err, "stage", command), err)
        return EXIT_INTERNAL
    except ValueError as err:
        logger.error("usage error in stage '%s': %s", getattr(err, "stage", command), err)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
