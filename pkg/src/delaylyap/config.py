"""Run configuration files.

A run is described by one JSON document::

    {
      "system": {
        "A0": [[...]], "A1": [[...]], "h": 1.0,
        "kernel": {"Ad": [[...]], "Bd": [[...]], "Cd": [[...]]}
      },
      "Q": [[...]],
      "tau": {"points": 201},
      "simulation": {"T": null, "dt": null, "histories": [[1.0, 0.0]]},
      "tolerances": {"singular": 1e-12, "borderline": 1e-08,
                     "quadrature": 1e-10, "tail": 1e-05}
    }

Matrices are row-major nested arrays. The kernel accepts either the
factored form above or the sine/cosine shorthand ``{"B0": ..., "B1":
..., "frequency": w}`` for kernels ``sin(w th) B0 + cos(w th) B1``. The
tau section may list explicit ``"values"`` instead of a point count.
Null ``T``/``dt`` mean automatic choices. Parsing fills every default,
so a dumped config re-parses to an equal object.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .model import TimeDelaySystem, Weight, sincos_kernel
from .sim import HistorySpec

DEFAULT_TOLERANCES = {
    "singular": 1e-12,
    "borderline": 1e-8,
    "quadrature": 1e-10,
    "tail": 1e-5,
}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _require(mapping, key, where):
    if not isinstance(mapping, dict):
        raise ConfigError("%s must be an object" % where)
    if key not in mapping:
        raise ConfigError("%s is missing the %r key" % (where, key))
    return mapping[key]


def _matrix(obj, name):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("%s must be a numeric matrix" % name)
    if arr.ndim != 2 or arr.size == 0:
        raise ConfigError("%s must be a nonempty 2-d array" % name)
    return [[float(v) for v in row] for row in arr]


def _number(obj, name, allow_none=False):
    if obj is None and allow_none:
        return None
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError("%s must be a number" % name)
    return float(obj)


@dataclass
class KernelConfig:
    Ad: list = None
    Bd: list = None
    Cd: list = None
    B0: list = None
    B1: list = None
    frequency: float = None

    @property
    def form(self):
        return "factored" if self.Ad is not None else "sincos"

    def to_dict(self):
        if self.form == "factored":
            return {"Ad": self.Ad, "Bd": self.Bd, "Cd": self.Cd}
        return {"B0": self.B0, "B1": self.B1, "frequency": self.frequency}


@dataclass
class SystemConfig:
    A0: list
    A1: list
    h: float
    kernel: KernelConfig

    def to_dict(self):
        return {"A0": self.A0, "A1": self.A1, "h": self.h,
                "kernel": self.kernel.to_dict()}


@dataclass
class TauConfig:
    points: int = 201
    values: list = None

    def to_dict(self):
        if self.values is not None:
            return {"values": self.values}
        return {"points": self.points}


@dataclass
class SimConfig:
    T: float = None
    dt: float = None
    histories: list = field(default_factory=list)

    def to_dict(self):
        return {"T": self.T, "dt": self.dt, "histories": self.histories}


@dataclass
class RunConfig:
    system: SystemConfig
    Q: list
    tau: TauConfig
    simulation: SimConfig
    tolerances: dict

    def to_dict(self):
        return {
            "system": self.system.to_dict(),
            "Q": self.Q,
            "tau": self.tau.to_dict(),
            "simulation": self.simulation.to_dict(),
            "tolerances": dict(self.tolerances),
        }


def _parse_kernel(obj):
    if not isinstance(obj, dict):
        raise ConfigError("system.kernel must be an object")
    factored = {"Ad", "Bd", "Cd"} & set(obj)
    shorthand = {"B0", "B1", "frequency"} & set(obj)
    if factored and shorthand:
        raise ConfigError("system.kernel mixes the factored and sincos forms")
    if factored:
        return KernelConfig(
            Ad=_matrix(_require(obj, "Ad", "system.kernel"), "kernel.Ad"),
            Bd=_matrix(_require(obj, "Bd", "system.kernel"), "kernel.Bd"),
            Cd=_matrix(_require(obj, "Cd", "system.kernel"), "kernel.Cd"),
        )
    if shorthand:
        return KernelConfig(
            B0=_matrix(_require(obj, "B0", "system.kernel"), "kernel.B0"),
            B1=_matrix(_require(obj, "B1", "system.kernel"), "kernel.B1"),
            frequency=_number(_require(obj, "frequency", "system.kernel"),
                              "kernel.frequency"),
        )
    raise ConfigError("system.kernel must give Ad/Bd/Cd or B0/B1/frequency")


def parse_config(source):
    """Load and normalize a run configuration.

    ``source`` is a file path, an open file object, or an already-decoded
    dictionary. Defaults are materialized so dumping the result and
    parsing it again yields an equal configuration.
    """
    if isinstance(source, dict):
        raw = source
    elif hasattr(source, "read"):
        try:
            raw = json.load(source)
        except json.JSONDecodeError as exc:
            raise ConfigError("invalid JSON: %s" % exc)
    else:
        try:
            with open(source) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError("cannot read config: %s" % exc)
        except json.JSONDecodeError as exc:
            raise ConfigError("invalid JSON in %s: %s" % (source, exc))
    if not isinstance(raw, dict):
        raise ConfigError("top level of the config must be an object")

    sys_raw = _require(raw, "system", "config")
    A0 = _matrix(_require(sys_raw, "A0", "system"), "system.A0")
    A1 = _matrix(_require(sys_raw, "A1", "system"), "system.A1")
    h = _number(_require(sys_raw, "h", "system"), "system.h")
    kernel = _parse_kernel(_require(sys_raw, "kernel", "system"))
    system = SystemConfig(A0=A0, A1=A1, h=h, kernel=kernel)
    n = len(A0)

    Q = _matrix(_require(raw, "Q", "config"), "Q")

    tau_raw = raw.get("tau", {})
    if not isinstance(tau_raw, dict):
        raise ConfigError("tau must be an object")
    if "values" in tau_raw and tau_raw["values"] is not None:
        values = tau_raw["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("tau.values must be a nonempty list")
        tau = TauConfig(values=[_number(v, "tau.values entry") for v in values])
    else:
        points = tau_raw.get("points", 201)
        if isinstance(points, bool) or not isinstance(points, int) or points < 2:
            raise ConfigError("tau.points must be an integer >= 2")
        tau = TauConfig(points=points)

    sim_raw = raw.get("simulation", {})
    if not isinstance(sim_raw, dict):
        raise ConfigError("simulation must be an object")
    T = _number(sim_raw.get("T"), "simulation.T", allow_none=True)
    dt = _number(sim_raw.get("dt"), "simulation.dt", allow_none=True)
    histories = sim_raw.get("histories")
    if histories is None:
        histories = [[1.0 if j == i else 0.0 for j in range(n)] for i in range(n)]
    if not isinstance(histories, list) or not histories:
        raise ConfigError("simulation.histories must be a nonempty list")
    norm_hist = []
    for k, vec in enumerate(histories):
        if not isinstance(vec, list) or len(vec) != n:
            raise ConfigError(
                "simulation.histories[%d] must be a vector of length %d" % (k, n)
            )
        norm_hist.append([_number(v, "history entry") for v in vec])
    simulation = SimConfig(T=T, dt=dt, histories=norm_hist)

    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ConfigError("tolerances must be an object")
    unknown = set(tol_raw) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError("unknown tolerance keys: %s" % ", ".join(sorted(unknown)))
    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in tol_raw.items():
        tolerances[key] = _number(val, "tolerances.%s" % key)

    return RunConfig(system=system, Q=Q, tau=tau, simulation=simulation,
                     tolerances=tolerances)


def dump_config(cfg, fp=None):
    """Serialize a configuration to JSON (returned, or written to ``fp``)."""
    text = json.dumps(cfg.to_dict(), indent=2) + "\n"
    if fp is not None:
        fp.write(text)
    return text


def build_system(cfg):
    """Materialize the TimeDelaySystem described by a configuration."""
    k = cfg.system.kernel
    try:
        if k.form == "factored":
            Ad, Bd, Cd = np.array(k.Ad), np.array(k.Bd), np.array(k.Cd)
        else:
            Ad, Bd, Cd = sincos_kernel(k.B0, k.B1, k.frequency)
        return TimeDelaySystem(cfg.system.A0, cfg.system.A1, Ad, Bd, Cd,
                               cfg.system.h)
    except ValueError as exc:
        raise ConfigError(str(exc))


def build_weight(cfg):
    try:
        return Weight(cfg.Q)
    except ValueError as exc:
        raise ConfigError(str(exc))


def tau_grid(cfg, sys):
    """Evaluation grid for the Lyapunov matrix, all points in ``[0, h]``."""
    if cfg.tau.values is not None:
        taus = np.asarray(cfg.tau.values, dtype=float)
    else:
        taus = np.linspace(0.0, sys.h, cfg.tau.points)
    if np.any(taus < -1e-12) or np.any(taus > sys.h * (1 + 1e-12) + 1e-12):
        raise ConfigError("tau values must lie in [0, h]")
    return taus


def build_histories(cfg):
    """Point-mass histories listed in the simulation section."""
    return [HistorySpec.point_mass(v) for v in cfg.simulation.histories]


def default_config():
    """Bundled demonstration configuration: a rotation-coupled system with
    a sine/cosine distributed kernel."""
    return parse_config({
        "system": {
            "A0": [[-1.0, 0.0], [0.0, -1.0]],
            "A1": [[0.0, 1.0], [-1.0, 0.0]],
            "h": 1.0,
            "kernel": {
                "B0": [[0.3, 0.0], [0.0, 0.3]],
                "B1": [[0.0, 0.3], [-0.3, 0.0]],
                "frequency": 3.141592653589793,
            },
        },
        "Q": [[1.0, 0.0], [0.0, 1.0]],
    })
