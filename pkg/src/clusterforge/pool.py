"""Candidate pool: pruning, derived metrics and heuristic selection."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .expr import ExprError, Formula, as_metric_value, eval_formula, is_number, parse_formula

log = logging.getLogger(__name__)


class PoolError(Exception):
    pass


@dataclass(frozen=True)
class CandidatePool:
    configurations: tuple = ()
    definitions: tuple = ()        # (name, Formula) in registration order
    selected: frozenset = frozenset()  # origin indices
    warnings: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.configurations)

    def __iter__(self):
        return iter(self.configurations)

    @property
    def selected_configs(self):
        return [c for c in self.configurations if c.origin_index in self.selected]

    def values(self, metric):
        return [c.metrics.get(metric) for c in self.configurations]


def _warned(warnings, msg):
    log.warning(msg)
    return warnings + (msg,)


def _as_formula(f) -> Formula:
    return parse_formula(f) if isinstance(f, str) else f


def apply_constraint(pool: CandidatePool, f) -> CandidatePool:
    """Keep configurations for which the boolean formula holds.

    A configuration on which the formula cannot be evaluated (typically a
    missing metric) fails the constraint and a warning is recorded.
    """
    f = _as_formula(f)
    if f.is_definition:
        raise PoolError(f"constraint must be a boolean expression, not a definition of '{f.target}'")
    kept, failed = [], []
    for c in pool.configurations:
        try:
            v = eval_formula(f, c.metrics)
        except ExprError as exc:
            failed.append((c.origin_index, str(exc)))
            continue
        if not isinstance(v, bool):
            raise PoolError(f"constraint {f.source!r} is not boolean (gave {v!r} on configuration {c.origin_index})")
        if v:
            kept.append(c)
    warnings = pool.warnings
    if failed:
        idx, why = failed[0]
        msg = (f"constraint {f.source!r} could not be evaluated on {len(failed)} configuration(s), "
               f"treated as failing (first: #{idx}: {why})")
        warnings = _warned(warnings, msg)
    if pool.configurations and not kept:
        warnings = _warned(warnings, f"constraint {f.source!r} removed every configuration")
    ids = {c.origin_index for c in kept}
    return replace(pool, configurations=tuple(kept), selected=pool.selected & ids, warnings=warnings)


def _evaluate_definition(configs, name, f):
    out = []
    for c in configs:
        try:
            v = eval_formula(f, c.metrics)
        except ExprError as exc:
            raise PoolError(f"metric '{name}' failed on configuration {c.origin_index}: {exc}") from exc
        m = dict(c.metrics)
        m[name] = as_metric_value(v)
        out.append(c.with_metrics(m))
    return tuple(out)


def define_metric(pool: CandidatePool, source) -> CandidatePool:
    """Evaluate ``name = formula`` on every configuration and register it."""
    f = _as_formula(source)
    if not f.is_definition:
        raise PoolError(f"metric definition must have the form 'name = expression': {f.source!r}")
    configs = _evaluate_definition(pool.configurations, f.target, f)
    defs = tuple(d for d in pool.definitions if d[0] != f.target) + ((f.target, f),)
    return replace(pool, configurations=configs, definitions=defs)


def set_metric(pool: CandidatePool, name: str, values) -> CandidatePool:
    """Store plain values (one per configuration, or one for all).

    Any registered definition of ``name`` is dropped so that a later
    :func:`update_metrics` does not overwrite the stored values.
    """
    if not isinstance(values, (list, tuple)):
        values = [values] * len(pool.configurations)
    configs = []
    for c, v in zip(pool.configurations, values):
        m = dict(c.metrics)
        m[name] = as_metric_value(v)
        configs.append(c.with_metrics(m))
    defs = tuple(d for d in pool.definitions if d[0] != name)
    return replace(pool, configurations=tuple(configs), definitions=defs)


def update_metrics(pool: CandidatePool) -> CandidatePool:
    configs = pool.configurations
    for name, f in pool.definitions:
        configs = _evaluate_definition(configs, name, f)
    return replace(pool, configurations=configs)


def _numeric_values(pool, metric):
    if not pool.configurations:
        raise PoolError("candidate pool is empty")
    vals = []
    for c in pool.configurations:
        v = c.metrics.get(metric)
        if v is None:
            raise PoolError(f"metric '{metric}' missing on configuration {c.origin_index}")
        if not is_number(v):
            raise PoolError(f"metric '{metric}' is not numeric on configuration {c.origin_index}")
        vals.append(float(v))
    return vals


def select_best(pool: CandidatePool, metric: str, direction: str = "min") -> CandidatePool:
    """Mark the single best configuration; ties go to the lowest origin index."""
    if direction not in ("min", "max"):
        raise PoolError(f"direction must be 'min' or 'max', got {direction!r}")
    vals = _numeric_values(pool, metric)
    sign = 1.0 if direction == "min" else -1.0
    best = min(zip(pool.configurations, vals), key=lambda cv: (sign * cv[1], cv[0].origin_index))[0]
    return replace(pool, selected=frozenset([best.origin_index]))


def delete(pool: CandidatePool) -> CandidatePool:
    if not pool.selected:
        raise PoolError("delete() needs a selection; call select_best() first")
    return replace(pool, configurations=tuple(pool.selected_configs))


def rank_and_trim(pool: CandidatePool, metric: str, keep_fraction: float) -> CandidatePool:
    """Keep the best ``ceil(keep_fraction * len(pool))`` configurations (smallest metric)."""
    if not 0 < keep_fraction <= 1:
        raise PoolError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    vals = _numeric_values(pool, metric)
    # Fraction of the decimal literal so 0.3 * 10 is 3, not 3.0000000000000004
    keep = math.ceil(Fraction(repr(float(keep_fraction))) * len(vals))
    order = sorted(range(len(vals)), key=lambda i: (vals[i], pool.configurations[i].origin_index))
    chosen = sorted(order[:keep])
    configs = tuple(pool.configurations[i] for i in chosen)
    ids = {c.origin_index for c in configs}
    return replace(pool, configurations=configs, selected=pool.selected & ids)
