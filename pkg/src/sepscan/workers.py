from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

from tqdm import tqdm  # type: ignore

TUnit = TypeVar("TUnit")
TResult = TypeVar("TResult")


def map_units(
    func: Callable[[TUnit], TResult],
    units: Sequence[TUnit],
    *,
    workers: int = 1,
    progress: bool = False,
    desc: str | None = None,
    chunksize: int = 1,
) -> list[TResult]:
    """Evaluates `func` on every work unit and returns the results in unit order.

    Every unit carries everything it needs to seed its own streams, so the results do not
    depend on `workers`. `func` must be picklable when `workers > 1`.

    Args:
      func (Callable[[TUnit], TResult]):
        A module-level function (or a functools.partial of one).

      units (Sequence[TUnit]):
        The work units.

      workers (int, optional):
        The number of processes. 1 runs inline. Defaults to 1.

      progress (bool, optional):
        Whether to show a tqdm progress bar. Defaults to False.

      desc (str | None, optional):
        The progress bar label. Defaults to None.

      chunksize (int, optional):
        Units handed to a process at a time. Defaults to 1.

    Returns:
        list[TResult]: One result per unit.
    """
    total = len(units)
    if workers <= 1:
        return [func(unit) for unit in tqdm(units, total=total, desc=desc, disable=not progress)]

    results: list[TResult] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        mapped = executor.map(func, units, chunksize=chunksize)
        for result in tqdm(mapped, total=total, desc=desc, disable=not progress):
            results.append(result)
    return results
