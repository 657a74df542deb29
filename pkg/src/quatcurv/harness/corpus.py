"""Seeded random field corpora.

Each field component is a sum of up to four terms ``c * F`` or ``c * F * G``
where F and G are drawn from ``q^k`` (k <= 3), ``sin(q)`` and ``cos(q)`` for
bare coordinates q, total polynomial degree at most 3, ``|c| <= 2``.  Fields
are generated as text and parsed, so a corpus is fully described by its
component strings and regenerating from the same seed gives identical trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..geometry import BUILTIN_CHARTS, QuatField, builtin_chart, component

REGIONS: dict[str, tuple[tuple[float, float], ...]] = {
    "cartesian": ((-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)),
    "spherical": ((0.5, 3.0), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)),
    "cylindrical": ((0.5, 3.0), (0.0, 2 * math.pi), (-2.0, 2.0)),
}

COMPONENT_KEYS = ("f0_re", "f1_re", "f2_re", "f3_re", "f0_im", "f1_im", "f2_im", "f3_im")
IMAG_PROBABILITY = 0.3
SCREEN_POINTS = 50


@dataclass(frozen=True, eq=False)
class FieldCorpus:
    seed: int
    count: int
    chart: str
    texts: tuple[dict, ...]
    fields: tuple[QuatField, ...]

    @property
    def region(self) -> tuple[tuple[float, float], ...]:
        return REGIONS[self.chart]

    def sample_points(self, n: int, salt: int = 0) -> np.ndarray:
        """``n`` deterministic points in the chart's sampling region."""
        return sample_region(self.chart, n, np.random.default_rng([self.seed, 7919, salt]))


def sample_region(chart: str, n: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = np.array(REGIONS[chart]).T
    return lo + (hi - lo) * rng.random((n, 3))


def _factor(rng: np.random.Generator, names, max_degree: int) -> tuple[str, int]:
    kind = rng.integers(3)
    var = names[rng.integers(3)]
    if kind == 1:
        return f"sin({var})", 0
    if kind == 2:
        return f"cos({var})", 0
    k = int(rng.integers(1, max_degree + 1)) if max_degree > 0 else 0
    if k == 0:
        return "", 0
    return (var if k == 1 else f"{var}^{k}"), k


def _term(rng: np.random.Generator, names) -> str:
    c = 0.0
    while c == 0.0:
        c = round(float(rng.uniform(-2.0, 2.0)), 3)
    first, deg = _factor(rng, names, 3)
    factors = [first]
    if rng.random() < 0.5:
        second, _ = _factor(rng, names, 3 - deg)
        factors.append(second)
    body = "*".join(f for f in factors if f)
    coeff = repr(abs(c))
    text = f"{coeff}*{body}" if body else coeff
    return ("-" if c < 0 else "") + text


def random_component(rng: np.random.Generator, names) -> str:
    terms = [_term(rng, names) for _ in range(int(rng.integers(1, 5)))]
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


def _random_texts(rng: np.random.Generator, names) -> dict:
    texts = {}
    for key in COMPONENT_KEYS:
        if key.endswith("_im") and rng.random() >= IMAG_PROBABILITY:
            texts[key] = "0"
        else:
            texts[key] = random_component(rng, names)
    return texts


def field_from_texts(chart_name: str, texts: dict) -> QuatField:
    chart = builtin_chart(chart_name)
    re = [component(chart, texts[f"f{k}_re"]) for k in range(4)]
    im = [component(chart, texts[f"f{k}_im"]) for k in range(4)]
    return QuatField.from_parts(chart, re, im)


def _screen(field: QuatField, points: np.ndarray) -> bool:
    try:
        vals = field.values(points)
    except DomainError:
        return False
    return bool(np.all(np.isfinite(vals)))


def generate_corpus(seed: int, count: int, chart: str) -> FieldCorpus:
    """Deterministic corpus of ``count`` random fields on a built-in chart."""
    if count < 1:
        raise ValueError(f"corpus count must be at least 1, got {count}")
    if chart not in REGIONS:
        builtin_chart(chart)  # raises UnknownChart
        raise ValueError(f"no sampling region for chart {chart!r}")
    names = builtin_chart(chart).coord_names
    rng = np.random.default_rng([seed, sorted(BUILTIN_CHARTS).index(chart)])
    screen_pts = sample_region(chart, SCREEN_POINTS, np.random.default_rng([seed, 104729]))
    texts, fields = [], []
    while len(fields) < count:
        t = _random_texts(rng, names)
        f = field_from_texts(chart, t)
        if _screen(f, screen_pts):
            texts.append(t)
            fields.append(f)
    return FieldCorpus(seed=seed, count=count, chart=chart, texts=tuple(texts), fields=tuple(fields))
