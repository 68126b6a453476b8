"""Post-enumeration filtering of final paths on container fact states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .engine import RealityPath, occupancy_snapshots
from .model import EntityId, NetworkModel


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class Filter:
    container: EntityId
    constraints: tuple[tuple[EntityId, bool], ...] = ()


def check_filters(filters: Iterable[Filter], model: NetworkModel) -> None:
    """Raise FilterError on a repeated container or an id the model does not define."""
    seen: set[EntityId] = set()
    for flt in filters:
        if flt.container in seen:
            raise FilterError(f"container referenced by multiple filters: {flt.container}")
        seen.add(flt.container)
        if flt.container not in model.containers:
            raise FilterError(f"filter names unknown container {flt.container}")
        props = [p for p, _ in flt.constraints]
        if len(set(props)) != len(props):
            raise FilterError(f"filter on {flt.container} constrains a property twice")
        for pid in props:
            if pid not in model.properties:
                raise FilterError(f"filter on {flt.container} names unknown property {pid}")


def _satisfied(model: NetworkModel, flt: Filter, state) -> bool:
    for pid, value in flt.constraints:
        fid = model.fact_index.get((flt.container, pid))
        if fid is None or state[fid] != value:
            return False
    return True


def path_passes(model: NetworkModel, path: RealityPath, filters: list[Filter], apply_rules: bool = True) -> bool:
    pending = {flt.container: flt for flt in filters}
    for container, state in occupancy_snapshots(model, path, apply_rules):
        flt = pending.get(container)
        if flt is not None and _satisfied(model, flt, state):
            del pending[container]
            if not pending:
                return True
    return not pending


def apply_filters(
    paths: Iterable[RealityPath], filters: list[Filter], model: NetworkModel, apply_rules: bool = True
) -> list[RealityPath]:
    """Keep the paths in which every filtered container has at least one occupancy
    whose fact values meet all of that filter's constraints. Order is preserved.
    """
    filters = list(filters)
    check_filters(filters, model)
    if not filters:
        return list(paths)
    return [p for p in paths if path_passes(model, p, filters, apply_rules)]
