"""Agreement metrics and significance tests for annotation analysis.

Cohen's kappa (optionally weighted for ordinal scales), binary F1,
balanced accuracy, agreement recall, one-way ANOVA, and Tukey's HSD.
The F-distribution tail uses a continued-fraction evaluation of the
regularized incomplete beta function; the studentized-range tail is
evaluated by Gauss-Legendre quadrature.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class StatsError(Exception):
    pass


class ShapeError(StatsError):
    pass


class UndefinedKappa(StatsError):
    """Expected disagreement is zero; kappa is not defined."""


class UndefinedF1(StatsError):
    """No positive predictions or no positive gold; precision/recall undefined."""


class Weighting(Enum):
    NONE = "none"
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass
class RatingTable:
    rater_a: list
    rater_b: list

    def __post_init__(self):
        if len(self.rater_a) != len(self.rater_b):
            raise ShapeError(
                f"rater lengths differ: {len(self.rater_a)} vs {len(self.rater_b)}"
            )
        if not self.rater_a:
            raise ShapeError("empty rating table")


@dataclass
class GroupedSamples:
    groups: dict[str, list[float]]

    def __post_init__(self):
        if len(self.groups) < 2:
            raise ShapeError("need at least 2 groups")
        for name, obs in self.groups.items():
            if len(obs) < 2:
                raise ShapeError(f"group {name!r} needs at least 2 observations")


# --- agreement --------------------------------------------------------------


def cohen_kappa(table: RatingTable, weighting: Weighting = Weighting.NONE) -> float:
    """Cohen's kappa: 1 minus observed over expected (weighted) disagreement.

    Linear weights are the default choice for 1-5 ordinal scales; with
    ``Weighting.NONE`` on nominal data this reduces to classic kappa.
    """
    cats = sorted(set(table.rater_a) | set(table.rater_b), key=lambda c: (str(type(c)), c))
    numeric = all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in cats)
    if numeric:
        cats = sorted(cats)
    idx = {c: i for i, c in enumerate(cats)}
    c = len(cats)
    n = len(table.rater_a)

    observed = np.zeros((c, c))
    for a, b in zip(table.rater_a, table.rater_b):
        observed[idx[a], idx[b]] += 1
    observed /= n
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0))

    if weighting is Weighting.NONE:
        dist = (np.arange(c)[:, None] != np.arange(c)[None, :]).astype(float)
    else:
        if numeric:
            vals = np.asarray(cats, dtype=float)
        else:
            vals = np.arange(c, dtype=float)
        span = vals.max() - vals.min()
        if span == 0:
            raise UndefinedKappa("single category; expected disagreement is zero")
        dist = np.abs(vals[:, None] - vals[None, :]) / span
        if weighting is Weighting.QUADRATIC:
            dist = dist**2

    expected_disagreement = float((dist * expected).sum())
    if expected_disagreement == 0:
        raise UndefinedKappa("expected disagreement is zero")
    observed_disagreement = float((dist * observed).sum())
    return 1.0 - observed_disagreement / expected_disagreement


def f1_binary(pred: list, gold: list) -> float:
    if len(pred) != len(gold):
        raise ShapeError(f"length mismatch: {len(pred)} vs {len(gold)}")
    tp = sum(1 for p, g in zip(pred, gold) if p and g)
    fp = sum(1 for p, g in zip(pred, gold) if p and not g)
    fn = sum(1 for p, g in zip(pred, gold) if not p and g)
    if tp + fp == 0 or tp + fn == 0:
        raise UndefinedF1("no positive predictions or no positive gold labels")
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def balanced_accuracy(pred: list, gold: list) -> float:
    """Unweighted mean of per-class recall over classes present in gold."""
    if len(pred) != len(gold):
        raise ShapeError(f"length mismatch: {len(pred)} vs {len(gold)}")
    if not gold:
        raise ShapeError("empty label lists")
    recalls = []
    for cls in sorted(set(gold), key=str):
        total = sum(1 for g in gold if g == cls)
        hit = sum(1 for p, g in zip(pred, gold) if g == cls and p == cls)
        recalls.append(hit / total)
    return sum(recalls) / len(recalls)


def agreement_recall(a: list, b: list) -> float:
    """Fraction of A's positive marks that B shares, averaged both ways."""
    if len(a) != len(b):
        raise ShapeError(f"length mismatch: {len(a)} vs {len(b)}")
    pos_a = sum(1 for x in a if x)
    pos_b = sum(1 for x in b if x)
    both = sum(1 for x, y in zip(a, b) if x and y)
    if pos_a == 0 or pos_b == 0:
        raise UndefinedF1("a rater marked no positives; recall undefined")
    return 0.5 * (both / pos_a + both / pos_b)


# --- incomplete beta (for the F-distribution tail) --------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz)."""
    max_iter = 500
    eps = 1e-16
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ShapeError(f"x must be in [0,1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f_stat: float, df1: float, df2: float) -> float:
    """Upper tail P(F > f) of the F-distribution."""
    if f_stat <= 0:
        return 1.0
    x = df2 / (df2 + df1 * f_stat)
    return reg_inc_beta(df2 / 2.0, df1 / 2.0, x)


# --- ANOVA ------------------------------------------------------------------


@dataclass
class AnovaResult:
    F: float
    p: float
    df_between: int
    df_within: int
    ms_between: float
    ms_within: float
    degenerate_variance: bool = False


def one_way_anova(samples: GroupedSamples) -> AnovaResult:
    groups = [np.asarray(obs, dtype=float) for obs in samples.groups.values()]
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    grand_mean = sum(g.sum() for g in groups) / n_total

    ss_between = sum(len(g) * (g.mean() - grand_mean) ** 2 for g in groups)
    ss_within = sum(((g - g.mean()) ** 2).sum() for g in groups)
    df_between = k - 1
    df_within = n_total - k
    ms_between = ss_between / df_between
    ms_within = ss_within / df_within

    if ms_within == 0.0:
        if ms_between == 0.0:
            return AnovaResult(0.0, 1.0, df_between, df_within, 0.0, 0.0)
        # differing means with no within-group variance
        return AnovaResult(
            math.inf, 0.0, df_between, df_within, ms_between, 0.0,
            degenerate_variance=True,
        )
    f_stat = ms_between / ms_within
    return AnovaResult(
        f_stat, f_sf(f_stat, df_between, df_within),
        df_between, df_within, ms_between, ms_within,
    )


# --- studentized range (for Tukey HSD) --------------------------------------

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _norm_pdf(z):
    return np.exp(-0.5 * z * z) / _SQRT_2PI


def _norm_cdf(z):
    return 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))


def _range_cdf_std(x: float, k: int, z_nodes, z_weights) -> float:
    """P(range of k iid standard normals <= x)."""
    if x <= 0:
        return 0.0
    phi = _norm_pdf(z_nodes)
    inner = np.clip(_norm_cdf(z_nodes) - _norm_cdf(z_nodes - x), 0.0, 1.0)
    return float(k * np.sum(z_weights * phi * inner ** (k - 1)))


def studentized_range_cdf(q: float, k: int, df: float, n_nodes: int = 240) -> float:
    """CDF of the studentized range via nested Gauss-Legendre quadrature."""
    if q <= 0:
        return 0.0
    if k < 2:
        raise ShapeError("studentized range needs k >= 2")
    zn, zw = np.polynomial.legendre.leggauss(n_nodes)
    z_nodes = zn * 9.0  # normal mass beyond |z|=9 is negligible
    z_weights = zw * 9.0

    # outer integral over the scale s = sqrt(chi2_df / df)
    lo = max(0.0, 1.0 - 12.0 / math.sqrt(df))
    hi = 1.0 + 12.0 / math.sqrt(df) + 6.0 / df
    sn, sw = np.polynomial.legendre.leggauss(max(n_nodes, 160))
    s_nodes = 0.5 * (sn + 1.0) * (hi - lo) + lo
    s_weights = sw * 0.5 * (hi - lo)

    ln_norm = (
        math.log(2.0)
        + (df / 2.0) * math.log(df / 2.0)
        - math.lgamma(df / 2.0)
    )
    total = 0.0
    for s, w in zip(s_nodes, s_weights):
        if s <= 0:
            continue
        ln_density = ln_norm + (df - 1.0) * math.log(s) - df * s * s / 2.0
        if ln_density < -745.0:
            continue
        total += w * math.exp(ln_density) * _range_cdf_std(q * s, k, z_nodes, z_weights)
    return float(min(1.0, max(0.0, total)))


def studentized_range_sf(q: float, k: int, df: float) -> float:
    return 1.0 - studentized_range_cdf(q, k, df)


@dataclass
class TukeyPair:
    pair: tuple[str, str]
    mean_diff: float
    p_adj: float
    significant: bool


def tukey_hsd(samples: GroupedSamples, alpha: float = 0.05) -> list[TukeyPair]:
    """Pairwise studentized-range tests after one-way ANOVA.

    Unbalanced groups use the Tukey-Kramer harmonic-mean sample size.
    """
    if not 0.0 < alpha < 1.0:
        raise ShapeError(f"alpha must be in (0,1), got {alpha}")
    anova = one_way_anova(samples)
    names = list(samples.groups)
    k = len(names)
    means = {n: float(np.mean(samples.groups[n])) for n in names}
    sizes = {n: len(samples.groups[n]) for n in names}

    results = []
    for i in range(k):
        for j in range(i + 1, k):
            a, b = names[i], names[j]
            diff = means[a] - means[b]
            n_h = 2.0 / (1.0 / sizes[a] + 1.0 / sizes[b])
            if anova.ms_within == 0.0:
                p_adj = 1.0 if diff == 0.0 else 0.0
            else:
                q_stat = abs(diff) / math.sqrt(anova.ms_within / n_h)
                p_adj = studentized_range_sf(q_stat, k, anova.df_within)
            results.append(TukeyPair((a, b), diff, p_adj, p_adj < alpha))
    return results


# --- annotation CSV ingestion -----------------------------------------------


def load_annotations(path) -> dict[str, RatingTable]:
    """Read an annotation CSV with header ``item,rater,question,answer``.

    Returns one RatingTable per question; exactly two raters are expected.
    Answers that look like integers are parsed as such (ordinal scales).
    """
    by_question: dict[str, dict[str, dict[str, object]]] = {}
    raters: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"item", "rater", "question", "answer"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ShapeError(f"annotation CSV must have columns {sorted(required)}")
        for row in reader:
            answer: object = row["answer"]
            try:
                answer = int(answer)  # type: ignore[arg-type]
            except (TypeError, ValueError):
                pass
            if row["rater"] not in raters:
                raters.append(row["rater"])
            by_question.setdefault(row["question"], {}).setdefault(
                row["item"], {}
            )[row["rater"]] = answer
    if len(raters) != 2:
        raise ShapeError(f"expected exactly 2 raters, found {len(raters)}")
    a, b = raters
    tables = {}
    for question, items in by_question.items():
        col_a, col_b = [], []
        for item in sorted(items):
            marks = items[item]
            if a not in marks or b not in marks:
                raise ShapeError(f"item {item!r} missing a rating for question {question!r}")
            col_a.append(marks[a])
            col_b.append(marks[b])
        tables[question] = RatingTable(col_a, col_b)
    return tables
