"""Monte-Carlo reproduction of the rejection-frequency and bandwidth tables.

Tables 1-2: independent FAR(1, d) pairs, plain statistic, n = 1024 / 4096.
Table 3:    mean adaptive bandwidth for the Table 2 simulations.
Table 4:    FARIMA(0, d_i, 0) with innovations mixed by p, residualized.
Tables 5-6: FARIMA(3, d, 0) with AR 1 + 0.7 z^3, resp. FARIMA(0, d, 2) with
            MA 1 - z/6 + z^2/6, against FARIMA(0, d, 0); residualized.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import LMTestError
from .nulldist import QuantileModel
from .parallel import parallel_map
from .pipeline import run_test
from .simgen import BivariateNoiseSpec, FarimaSpec, gen_bivariate

D_VALUES = (0.0, 0.1, 0.2, 0.3, 0.4)
AR_VALUES = (0.0, 0.4, 0.8)
P_VALUES = (0.0, 0.15, 0.35, 0.45)
DESK_REPS = 400
FULL_REPS = 1000
TABLE5_AR = (0.0, 0.0, -0.7)
TABLE6_MA = (-1.0 / 6.0, 1.0 / 6.0)
_REP_CHUNK = 50


@dataclass(frozen=True)
class Cell:
    table: int
    index: int
    n: int
    d1: float
    d2: float
    variant: str
    a1: float = 0.0
    a2: float = 0.0
    p: Optional[float] = None

    @property
    def block(self) -> str:
        if self.table in (1, 2, 3):
            return f"a1={self.a1:g},a2={self.a2:g}"
        if self.table == 4:
            return f"p={self.p:g},n={self.n}"
        return "all"

    def specs(self):
        if self.table in (1, 2, 3):
            ar1 = (self.a1,) if self.a1 else ()
            ar2 = (self.a2,) if self.a2 else ()
            return FarimaSpec(self.d1, ar1), FarimaSpec(self.d2, ar2), None
        if self.table == 4:
            return (FarimaSpec(self.d1), FarimaSpec(self.d2),
                    BivariateNoiseSpec.from_p(self.p))
        if self.table == 5:
            return FarimaSpec(self.d1, TABLE5_AR), FarimaSpec(self.d2), None
        return FarimaSpec(self.d1, ma=TABLE6_MA), FarimaSpec(self.d2), None

    def matches(self, **params) -> bool:
        return all(abs(getattr(self, k) - float(v)) < 1e-9
                   for k, v in params.items())


@dataclass
class CellResult:
    cell: Cell
    reps: int
    rejections: int
    failures: int
    mean_q: float
    q_values: List[int] = field(default_factory=list, repr=False)

    @property
    def valid(self) -> int:
        return self.reps - self.failures

    @property
    def reject_pct(self) -> float:
        return 100.0 * self.rejections / self.valid if self.valid else float("nan")


def _triangle():
    return [(d1, d2) for d1 in D_VALUES for d2 in D_VALUES if d2 <= d1]


def table_cells(table_id: int) -> List[Cell]:
    """All cells of a table in a fixed order (the order keys the seeds)."""
    cells = []
    if table_id in (1, 2, 3):
        n = 1024 if table_id == 1 else 4096
        for a1 in AR_VALUES:
            for a2 in AR_VALUES:
                if a2 > a1:
                    continue
                for d1, d2 in _triangle():
                    cells.append(Cell(table_id, len(cells), n, d1, d2, "plain",
                                      a1=a1, a2=a2))
    elif table_id == 4:
        for p in P_VALUES:
            for n in (1024, 4096):
                for d1, d2 in _triangle():
                    cells.append(Cell(4, len(cells), n, d1, d2, "residualized",
                                      p=p))
    elif table_id in (5, 6):
        for d1, d2 in _triangle():
            cells.append(Cell(table_id, len(cells), 4096, d1, d2,
                              "residualized"))
    else:
        raise ValueError(f"unknown table {table_id}")
    return cells


def select_cells(table_id: int, **params) -> List[Cell]:
    return [c for c in table_cells(table_id) if c.matches(**params)]


def _seed_table(table_id: int) -> int:
    # Table 3 reports bandwidths of the Table 2 simulations
    return 2 if table_id == 3 else table_id


def _run_chunk(job):
    cell, reps, seed, model = job
    spec1, spec2, noise = cell.specs()
    rejections = failures = 0
    qs = []
    for r in reps:
        ss = np.random.SeedSequence(
            seed, spawn_key=(_seed_table(cell.table), cell.index, r))
        pair = gen_bivariate(spec1, spec2, noise, cell.n,
                             seed=np.random.default_rng(ss))
        try:
            rep = run_test(pair, variant=cell.variant, quantile_model=model)
        except LMTestError:
            failures += 1
            continue
        rejections += rep.reject
        qs.append(rep.q_used)
    return cell.index, rejections, failures, qs


def run_cells(cells: Sequence[Cell], reps: int = DESK_REPS, seed: int = 0,
              quantile_model: Optional[QuantileModel] = None,
              workers: Optional[int] = None) -> List[CellResult]:
    """Simulate each cell ``reps`` times; deterministic in ``(seed, reps)``."""
    jobs = []
    for cell in cells:
        for start in range(0, reps, _REP_CHUNK):
            jobs.append((cell, range(start, min(start + _REP_CHUNK, reps)),
                         seed, quantile_model))
    outputs = parallel_map(_run_chunk, jobs, workers)
    acc: Dict[int, list] = {c.index: [0, 0, []] for c in cells}
    for index, rej, fail, qs in outputs:
        acc[index][0] += rej
        acc[index][1] += fail
        acc[index][2].extend(qs)
    results = []
    for cell in sorted(cells, key=lambda c: c.index):
        rej, fail, qs = acc[cell.index]
        results.append(CellResult(cell, reps, rej, fail,
                                   float(np.mean(qs)) if qs else float("nan"),
                                   qs))
    return results


def reproduce_table(table_id: int, reps: int = DESK_REPS, seed: int = 0,
                    quantile_model: Optional[QuantileModel] = None,
                    workers: Optional[int] = None, **params
                    ) -> List[CellResult]:
    return run_cells(select_cells(table_id, **params), reps, seed,
                     quantile_model, workers)


CSV_FIELDS = ["table", "block", "n", "d1", "d2", "a1", "a2", "p", "reps",
              "failures", "reject_pct", "mean_q"]


def to_csv(results: Iterable[CellResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in results:
        c = r.cell
        w.writerow([c.table, c.block, c.n, f"{c.d1:g}", f"{c.d2:g}",
                    f"{c.a1:g}", f"{c.a2:g}",
                    "" if c.p is None else f"{c.p:g}", r.reps, r.failures,
                    f"{r.reject_pct:.1f}", f"{r.mean_q:.2f}"])
    return buf.getvalue()


def _grid_text(results: List[CellResult], value) -> List[str]:
    lines = ["d1\\d2 " + "".join(f"{d:>8g}" for d in D_VALUES)]
    lookup = {(round(r.cell.d1, 2), round(r.cell.d2, 2)): r for r in results}
    for d1 in D_VALUES:
        row = f"{d1:>5g} "
        for d2 in D_VALUES:
            r = lookup.get((d1, d2))
            row += f"{value(r):>8.1f}" if r is not None else " " * 8
        lines.append(row.rstrip())
    return lines


def format_table(table_id: int, results: List[CellResult]) -> str:
    """Aligned triangular grids, one per block."""
    blocks: Dict[str, List[CellResult]] = {}
    for r in results:
        blocks.setdefault(r.cell.block, []).append(r)
    out = []
    for block, rs in blocks.items():
        if table_id == 3:
            out.append(f"Table 3 [{block}] mean q_hat, n={rs[0].cell.n}")
            out += _grid_text(rs, lambda r: r.mean_q)
        else:
            out.append(f"Table {table_id} [{block}] rejection %, "
                       f"n={rs[0].cell.n}, reps={rs[0].reps}")
            out += _grid_text(rs, lambda r: r.reject_pct)
            if table_id in (5, 6):
                out.append(f"Table {table_id} [{block}] mean q_hat")
                out += _grid_text(rs, lambda r: r.mean_q)
        out.append("")
    return "\n".join(out)
