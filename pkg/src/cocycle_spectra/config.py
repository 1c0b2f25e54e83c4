"""Experiment configuration: a versioned JSON document.

Example::

    {
      "schema_version": 1,
      "system": {"preset": "reference"},
      "n": 16,
      "delta": 0.05,
      "q_grid": {"start": -40, "stop": 40, "num": 321},
      "x_policy": "MaxOverFiber",
      "seed": 0
    }

``system`` is one of ``{"preset": "reference"}``, ``{"matrices": [[a, b,
c, d], ...], "normalize": bool}`` or ``{"fibers": [...]}`` with fiber
entries ``{"kind": "RigidRotation", "angle": a}``, ``{"kind":
"MorseSmale", "attractor": a, "repeller": r, "contraction": c}`` or
``{"kind": "MatrixProjective", "matrix": [a, b, c, d]}``. Angles are in
half-turns. Omitted fields take the defaults below.
"""

from dataclasses import asdict, dataclass, field, fields
import json
import math

from . import linalg2 as la
from .errors import CocycleSpectraError
from .skewproduct import MATRIX, MORSE_SMALE, ROTATION, FiberSystem, matrix_map, morse_smale, rigid_rotation
from .thermo import MAX_OVER_FIBER, MIN_OVER_FIBER, FixedPoint

SCHEMA_VERSION = 1


class ConfigError(CocycleSpectraError):
    pass


@dataclass
class SyncSection:
    samples: int = 100
    steps: int = 200
    grid_points: int = 100
    sync_tol: float = 1e-6
    weights: list | None = None


@dataclass
class AxiomSection:
    J: list = field(default_factory=lambda: [0.45, 0.55])
    H: list | None = None
    side: str = "Forward"
    max_len: int = 12
    acc_grid: int = 64
    ladder: list = field(default_factory=lambda: [0.1, 0.05, 0.025, 0.0125, 0.00625])


@dataclass
class PerturbSection:
    max_depth: int = 8
    t: float = 0.1
    h: float = 1e-4
    irrationality_tol: float = 1e-3


@dataclass
class TrackSection:
    word: str | None = None
    length: int = 30
    checkpoints: list | None = None
    threshold: float = 0.05


@dataclass
class ExperimentConfig:
    system: dict = field(default_factory=lambda: {"preset": "reference"})
    n: int = 16
    delta: float | None = None
    q_grid: dict = field(default_factory=lambda: {"start": -40.0, "stop": 40.0, "num": 321})
    alpha_grid: dict | None = None
    x_policy: object = MAX_OVER_FIBER
    seed: int = 0
    budget: int | None = None
    partitions: int | None = None
    output_dir: str = "out"
    sync: SyncSection = field(default_factory=SyncSection)
    axioms: AxiomSection = field(default_factory=AxiomSection)
    perturb: PerturbSection = field(default_factory=PerturbSection)
    track: TrackSection = field(default_factory=TrackSection)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        raw = dict(raw)
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}")
        sections = {"sync": SyncSection, "axioms": AxiomSection,
                    "perturb": PerturbSection, "track": TrackSection}
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown fields: {sorted(unknown)}")
        kwargs = {}
        for key, value in raw.items():
            if key in sections:
                sec = sections[key]
                extra = set(value) - {f.name for f in fields(sec)}
                if extra:
                    raise ConfigError(f"unknown fields in {key}: {sorted(extra)}")
                value = sec(**value)
            kwargs[key] = value
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(isinstance(self.n, int) and self.n >= 1, "n must be a positive integer")
        need(self.delta is None or (isinstance(self.delta, (int, float)) and self.delta > 0),
             "delta must be positive")
        q = self.q_grid
        need(isinstance(q, dict) and q.get("num", 0) >= 3 and q.get("start", 0) < q.get("stop", 0),
             "q_grid needs start < stop and num >= 3")
        if self.alpha_grid is not None:
            a = self.alpha_grid
            need(a.get("num", 0) >= 2 and a.get("start", 0) < a.get("stop", 0),
                 "alpha_grid needs start < stop and num >= 2")
        parse_policy(self.x_policy)
        need(isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64, "seed must be a u64")
        need(self.budget is None or self.budget >= 1, "budget must be positive")
        need(self.partitions is None or self.partitions >= 1, "partitions must be positive")
        s = self.sync
        need(s.samples >= 1 and s.steps >= 1 and s.grid_points >= 2 and s.sync_tol > 0,
             "sync needs samples >= 1, steps >= 1, grid_points >= 2, sync_tol > 0")
        ax = self.axioms
        need(len(ax.J) == 2 and 1 <= ax.max_len <= 24 and ax.acc_grid >= 64,
             "axioms needs J=[lo, hi], 1 <= max_len <= 24, acc_grid >= 64")
        need(ax.side in ("Forward", "Backward"), "axioms.side must be Forward or Backward")
        p = self.perturb
        need(1 <= p.max_depth <= 14 and p.t > -1 and 0 < p.h <= 1e-3 and p.irrationality_tol > 0,
             "perturb needs 1 <= max_depth <= 14, t > -1, 0 < h <= 1e-3")
        t = self.track
        need(t.word is not None or t.length >= 1, "track needs a word or a positive length")
        build_system(self.system)


def parse_policy(raw):
    if raw in (MAX_OVER_FIBER, MIN_OVER_FIBER):
        return raw
    if isinstance(raw, dict) and set(raw) == {"FixedPoint"}:
        x = raw["FixedPoint"]
        if isinstance(x, (int, float)) and math.isfinite(x):
            return FixedPoint(float(la.wrap(x)))
    raise ConfigError(f"bad x_policy {raw!r}")


def _mat(entries):
    if not isinstance(entries, (list, tuple)) or len(entries) != 4:
        raise ConfigError(f"matrix needs 4 entries, got {entries!r}")
    return la.Mat2(*entries)


def build_matrices(spec):
    """The matrices of a ``matrices`` system entry, normalized if asked."""
    from .cocycle_spectrum import reference_cocycle

    if spec.get("preset") == "reference":
        return list(reference_cocycle().mats)
    mats = spec.get("matrices")
    if not mats:
        raise ConfigError("system has no matrices")
    out = [_mat(e) for e in mats]
    if spec.get("normalize"):
        for m in out:
            if m.det <= 0:
                raise ConfigError(f"cannot normalize det={m.det!r}")
        out = [la.normalize_glplus(m) for m in out]
    return out


def build_system(spec):
    from .cocycle_spectrum import reference_cocycle

    if not isinstance(spec, dict):
        raise ConfigError("system must be an object")
    try:
        if spec.get("preset") is not None:
            if spec["preset"] != "reference":
                raise ConfigError(f"unknown preset {spec['preset']!r}")
            return reference_cocycle().fiber_system()
        if "fibers" in spec:
            maps = []
            for f in spec["fibers"]:
                kind = f.get("kind")
                if kind == ROTATION:
                    maps.append(rigid_rotation(f["angle"]))
                elif kind == MORSE_SMALE:
                    maps.append(morse_smale(f["attractor"], f["repeller"], f["contraction"]))
                elif kind == MATRIX:
                    maps.append(matrix_map(_mat(f["matrix"])))
                else:
                    raise ConfigError(f"unknown fiber kind {kind!r}")
            return FiberSystem(tuple(maps))
        return FiberSystem.from_matrices(build_matrices(spec))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad system entry: {exc}") from exc
    except CocycleSpectraError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad system entry: {exc}") from exc


def load(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


def save(cfg, path):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
