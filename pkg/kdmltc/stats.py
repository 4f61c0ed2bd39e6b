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
Statistics over replicated runs: descriptive summaries with 95% confidence intervals,
two-sample t-tests and one-way ANOVA with eta squared.

Zero variance is detected exactly (all values equal) and handled with sentinels instead
of errors: a t-test between two constant samples gives t = 0, p = 1 for equal means and
t = +-inf, p = 0 otherwise; an ANOVA with constant groups of different means gives
F = inf, p = 0, eta^2 = 1.
"""

from __future__ import division, print_function

import io
import itertools
from collections import namedtuple, OrderedDict

import numpy as np

from kdmltc.core.special_fcts import t_sf2, t_ppf, f_sf
from kdmltc.core.io import render_ini
from kdmltc.exceptions import DataError

SIGNIFICANCE = 0.05
CONFIDENCE = 0.95

Describe = namedtuple("Describe", ["n", "mean", "sd", "min", "max", "ci_low", "ci_high"])
TTestResult = namedtuple("TTestResult", ["mean_difference", "t_statistic", "p_value", "significant", "df"])
AnovaResult = namedtuple("AnovaResult", ["f_statistic", "p_value", "eta_squared", "df_between", "df_within"])


def _sample(scores, name="scores"):
    x = np.asarray(scores, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("%s must not be empty" % name)
    return x


def _mean_var(x):
    # constant samples get their exact value and zero variance
    if np.ptp(x) == 0:
        return float(x[0]), 0.
    return float(np.mean(x)), float(np.var(x, ddof=1))


def confidence_interval(mean, sd, n, confidence=CONFIDENCE):
    """mean -+ t_{(1+confidence)/2, n-1} sd / sqrt(n), None for n < 2."""
    if n < 2:
        return None, None
    h = float(t_ppf(0.5 + confidence / 2., n - 1)) * sd / np.sqrt(n)
    return mean - h, mean + h


def describe(scores):
    """
    Mean, sample standard deviation, range and 95% confidence interval.

    Returns
    -------
    d : Describe
        sd and the interval are None for a single score
    """
    x = _sample(scores)
    m, v = _mean_var(x)
    sd = np.sqrt(v) if x.size > 1 else None
    lo, hi = confidence_interval(m, sd, x.size) if x.size > 1 else (None, None)
    return Describe(x.size, m, sd, float(x.min()), float(x.max()), lo, hi)


def describe_from_summary(mean, sd, n):
    """Describe with the interval computed from a reported mean, sd and sample size."""
    lo, hi = confidence_interval(mean, sd, n)
    return Describe(n, mean, sd, None, None, lo, hi)


def five_number_summary(scores):
    """Minimum, lower quartile, median, upper quartile and maximum."""
    x = _sample(scores)
    return tuple(float(q) for q in np.percentile(x, [0, 25, 50, 75, 100]))


def t_test(a, b, equal_var=False):
    """
    Two-sided two-sample t-test of mean(a) = mean(b).

    Parameters
    ----------
    a, b : array_like
        samples of at least two scores each
    equal_var : bool, optional
        Student's pooled variance test instead of Welch's test

    Returns
    -------
    result : TTestResult
    """
    a = _sample(a, "a")
    b = _sample(b, "b")
    if a.size < 2 or b.size < 2:
        raise ValueError("t-test needs at least two scores per sample")
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    diff = ma - mb
    na, nb = a.size, b.size
    if equal_var:
        df = na + nb - 2.
        se2 = ((na - 1) * va + (nb - 1) * vb) / df * (1. / na + 1. / nb)
    else:
        sa, sb = va / na, vb / nb
        se2 = sa + sb
        df = se2**2 / (sa**2 / (na - 1) + sb**2 / (nb - 1)) if se2 > 0 else na + nb - 2.
    if se2 == 0:
        if diff == 0:
            return TTestResult(0., 0., 1., False, df)
        return TTestResult(diff, np.copysign(np.inf, diff), 0., True, df)
    t = diff / np.sqrt(se2)
    p = float(t_sf2(t, df))
    return TTestResult(diff, t, p, p < SIGNIFICANCE, df)


def anova(groups):
    """
    One-way analysis of variance.

    Parameters
    ----------
    groups : list of array_like
        at least two non-empty groups with more scores in total than groups

    Returns
    -------
    result : AnovaResult
        F = (SSB/df_b) / (SSW/df_w), its F distribution tail probability and
        eta^2 = SSB / (SSB + SSW)
    """
    groups = [_sample(g, "group") for g in groups]
    k = len(groups)
    N = sum(g.size for g in groups)
    if k < 2 or N <= k:
        raise ValueError("anova needs at least two groups and more scores than groups")
    df_b, df_w = k - 1, N - k
    means = np.array([_mean_var(g)[0] for g in groups])
    if np.ptp(means) == 0:
        return AnovaResult(0., 1., 0., df_b, df_w)
    grand = np.sum(np.concatenate(groups)) / N
    ssb = float(sum(g.size * (m - grand)**2 for g, m in zip(groups, means)))
    if all(np.ptp(g) == 0 for g in groups):
        return AnovaResult(np.inf, 0., 1., df_b, df_w)
    ssw = float(sum(np.sum((g - m)**2) for g, m in zip(groups, means)))
    F = (ssb / df_b) / (ssw / df_w)
    return AnovaResult(F, float(f_sf(F, df_b, df_w)), ssb / (ssb + ssw), df_b, df_w)


def load_replications(fn):
    """
    Read replication scores, one '<approach> <score>' pair per line. The approach name
    may contain blanks, the score is the last field. '#' starts a comment line.

    Returns
    -------
    replications : OrderedDict
        approach -> list of scores, in order of first appearance
    """
    reps = OrderedDict()
    with io.open(fn, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.rsplit(None, 1)
            try:
                name, score = parts[0].strip(), float(parts[1])
            except (IndexError, ValueError):
                raise DataError("line %d: expected '<approach> <score>', got %r" % (lineno, line))
            if not np.isfinite(score):
                raise DataError("line %d: score is not finite" % lineno)
            reps.setdefault(name, []).append(score)
    return reps


def _pct(x):
    return "" if x is None else "%.2f%%" % (100. * x)


def _num(x):
    return "" if x is None else repr(float(x))


def stats_report(replications, equal_var=False, selfcheck=(0.8270, 0.0089, 5)):
    """
    Render descriptive statistics, pairwise t-tests in both orders, a one-way ANOVA and
    five number summaries as INI text.

    Parameters
    ----------
    replications : mapping
        approach -> list of scores
    equal_var : bool, optional
        use the pooled variance t-test instead of Welch's
    selfcheck : tuple, optional
        (mean, sd, n) whose confidence interval is reported in a [selfcheck] section,
        None to leave it out

    Returns
    -------
    text : str
    """
    if not replications:
        raise DataError("no replications")
    sections = OrderedDict()
    for name, s in replications.items():
        d = describe(s)
        sec = OrderedDict([("n", d.n)])
        for f in ("mean", "sd", "min", "max", "ci_low", "ci_high"):
            sec[f] = _num(getattr(d, f))
            sec[f + "_pct"] = _pct(getattr(d, f))
        sections["describe:%s" % name] = sec
    for name, s in replications.items():
        sections["boxplot:%s" % name] = OrderedDict(zip(("min", "q1", "median", "q3", "max"),
                                                        map(_num, five_number_summary(s))))
    testable = [n for n, s in replications.items() if len(s) >= 2]
    for a, b in itertools.permutations(testable, 2):
        r = t_test(replications[a], replications[b], equal_var)
        sections["ttest:%s - %s" % (a, b)] = OrderedDict([
            ("mean_difference", _num(r.mean_difference)),
            ("mean_difference_pct", _pct(r.mean_difference)),
            ("t_statistic", _num(r.t_statistic)), ("df", _num(r.df)),
            ("p_value", _num(r.p_value)), ("p_value_2f", "%.2f" % r.p_value),
            ("significant", "yes" if r.significant else "no")])
    groups = list(replications.values())
    if len(groups) >= 2 and sum(len(g) for g in groups) > len(groups):
        r = anova(groups)
        sections["anova"] = OrderedDict([("f_statistic", _num(r.f_statistic)),
                                         ("p_value", _num(r.p_value)),
                                         ("p_value_2f", "%.2f" % r.p_value),
                                         ("eta_squared", _num(r.eta_squared)),
                                         ("eta_squared_2f", "%.2f" % r.eta_squared),
                                         ("df_between", r.df_between), ("df_within", r.df_within)])
    if selfcheck is not None:
        d = describe_from_summary(*selfcheck)
        sections["selfcheck"] = OrderedDict([("mean", _num(d.mean)), ("sd", _num(d.sd)), ("n", d.n),
                                             ("ci_low", _num(d.ci_low)), ("ci_high", _num(d.ci_high)),
                                             ("ci_low_pct", _pct(d.ci_low)),
                                             ("ci_high_pct", _pct(d.ci_high))])
    return render_ini(sections)
