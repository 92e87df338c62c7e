"""Two-column data files and run configuration."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidInput
from .series import BivariatePair
from .simgen import BivariateNoiseSpec, FarimaSpec

_SPLIT = re.compile(r"[\s,;]+")


def _split(line: str) -> List[str]:
    if "," in line:
        return [t.strip() for t in line.split(",")]
    return _SPLIT.split(line.strip())


def parse_pair(text: str) -> Tuple[BivariatePair, Optional[List[str]]]:
    """Parse comma- or whitespace-delimited two-column text.

    Lines starting with ``#`` are comments; at most one leading header row
    is allowed.
    """
    rows, header = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = _split(line)
        if len(fields) != 2:
            raise InvalidInput(f"line {lineno}: expected 2 columns, "
                               f"got {len(fields)}")
        try:
            rows.append((float(fields[0]), float(fields[1])))
        except ValueError:
            if rows or header is not None:
                raise InvalidInput(f"line {lineno}: non-numeric value") from None
            header = fields
    if not rows:
        raise InvalidInput("no data rows")
    data = np.asarray(rows)
    return BivariatePair.from_arrays(data[:, 0], data[:, 1]), header


def read_pair(path) -> Tuple[BivariatePair, Optional[List[str]]]:
    with open(path) as fh:
        return parse_pair(fh.read())


def format_pair(pair: BivariatePair, comment: Optional[str] = None,
                header: Tuple[str, str] = ("x1", "x2")) -> str:
    lines = []
    if comment:
        lines += ["# " + c for c in comment.splitlines()]
    lines.append(",".join(header))
    lines += [f"{a!r},{b!r}" for a, b in
              zip(pair.x1.values.tolist(), pair.x2.values.tolist())]
    return "\n".join(lines) + "\n"


@dataclass
class SimulationConfig:
    """Everything needed to regenerate a simulated pair."""

    spec1: FarimaSpec = field(default_factory=FarimaSpec)
    spec2: FarimaSpec = field(default_factory=FarimaSpec)
    noise: BivariateNoiseSpec = field(default_factory=BivariateNoiseSpec)
    n: int = 1024
    burn_in: Optional[int] = None
    seed: int = 0

    def to_dict(self) -> dict:
        return {"spec1": self.spec1.to_dict(), "spec2": self.spec2.to_dict(),
                "noise": self.noise.to_dict(), "n": self.n,
                "burn_in": self.burn_in, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        noise = data.get("noise") or {}
        if "p" in noise:
            noise_spec = BivariateNoiseSpec.from_p(float(noise["p"]))
        elif "mixing" in noise:
            noise_spec = BivariateNoiseSpec(np.asarray(noise["mixing"]))
        else:
            noise_spec = BivariateNoiseSpec()
        return cls(spec1=FarimaSpec.from_dict(data.get("spec1", {})),
                   spec2=FarimaSpec.from_dict(data.get("spec2", {})),
                   noise=noise_spec, n=int(data.get("n", 1024)),
                   burn_in=data.get("burn_in"), seed=int(data.get("seed", 0)))


@dataclass
class RunConfig:
    inputs: List[str] = field(default_factory=list)
    simulation: Optional[SimulationConfig] = None
    alpha: float = 0.05
    variant: str = "plain"
    q: Optional[int] = None
    estimator: str = "fexp"
    p_max: int = 10
    replications: int = 400
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InvalidInput("alpha must lie in (0, 1)")
        if self.replications < 1:
            raise InvalidInput("replications must be at least 1")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["simulation"] = (self.simulation.to_dict()
                              if self.simulation else None)
        return data


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
