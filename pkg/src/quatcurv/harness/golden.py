"""Closed-form operator expansions for the Cartesian and spherical charts.

The expansions are stored as expression strings in ``data/golden_forms.json``
over the chart coordinates and derivative symbols: ``f2`` is component 2,
``f2_r`` its r-derivative and ``f2_r_theta`` the mixed second derivative.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from ..errors import DefinitionError
from ..expr import Expr, diff, evaluate_many, parse
from ..geometry import QuatField, builtin_chart

GOLDEN_OPERATORS = ("mt", "lap0", "lapv", "bitsv")

# quaternion slots filled by each form's components
SLOTS = {"mt": (0, 1, 2, 3), "lap0": (0,), "lapv": (1, 2, 3), "bitsv": (1, 2, 3)}

_SYMBOL = re.compile(r"^f([0-3])((?:_[A-Za-z][A-Za-z0-9]*)*)$")


@dataclass(frozen=True, eq=False)
class GoldenForm:
    chart: str
    operator: str
    components: tuple[Expr, ...]
    texts: tuple[str, ...]

    @property
    def slots(self) -> tuple[int, ...]:
        return SLOTS[self.operator]

    def field_symbols(self) -> set[str]:
        coords = set(builtin_chart(self.chart).coord_names)
        return {s for c in self.components for s in c.free_symbols} - coords

    def evaluate(self, field: QuatField, points: np.ndarray) -> np.ndarray:
        """Complex values of the form for ``field``, shape (N, len(slots))."""
        chart = field.chart
        pts = chart.require_domain(points)
        env = dict(chart.env(pts))
        names = sorted(self.field_symbols())
        out = np.zeros((len(pts), len(self.components)), dtype=complex)
        for part, scale in ((field.real_parts, 1.0), (field.imag_parts, 1j)):
            exprs = [_derivative(part, name, chart.coord_names) for name in names]
            vals = evaluate_many(exprs, env)
            env_f = dict(env)
            env_f.update({n: np.broadcast_to(v, (len(pts),)) for n, v in zip(names, vals)})
            comp_vals = evaluate_many(list(self.components), env_f)
            for j, v in enumerate(comp_vals):
                out[:, j] += scale * np.broadcast_to(v, (len(pts),))
        return out


def _derivative(parts, symbol: str, coords) -> Expr:
    m = _SYMBOL.match(symbol)
    if not m:
        raise DefinitionError(f"bad golden-form symbol {symbol!r}")
    e = parts[int(m.group(1))]
    for name in filter(None, m.group(2).split("_")):
        if name not in coords:
            raise DefinitionError(f"golden-form symbol {symbol!r} names unknown coordinate {name!r}")
        e = diff(e, name)
    return e


def _check(form: GoldenForm) -> None:
    coords = builtin_chart(form.chart).coord_names
    for name in form.field_symbols():
        _derivative((parse("0"),) * 4, name, coords)
    if len(form.components) != len(SLOTS[form.operator]):
        raise DefinitionError(f"golden form {form.chart}/{form.operator} has the wrong number of components")


def load_golden_forms(text: Optional[str] = None) -> dict[tuple[str, str], GoldenForm]:
    """Golden forms keyed by (chart, operator)."""
    if text is None:
        text = resources.files("quatcurv.harness").joinpath("data/golden_forms.json").read_text("utf-8")
    doc = json.loads(text)
    out = {}
    for item in doc["forms"]:
        comps = tuple(item["components"])
        form = GoldenForm(item["chart"], item["operator"], tuple(parse(t) for t in comps), comps)
        _check(form)
        out[(form.chart, form.operator)] = form
    return out


GOLDEN_FORMS = load_golden_forms()
