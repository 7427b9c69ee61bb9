"""Run configuration: TOML schema, validation, presets and model/IC assembly.

Schema (all sections are tables; keys not listed are rejected)::

    [model]    name = "nls" | "sg" | "kdv"
               beta, energy_sign (nls); phi (sg); alpha, beta (kdv)
    [grid]     bounds = [[lo, hi], ...] or [lo, hi] in 1D; numbers or strings
               such as "2pi", "-pi"; counts = [N, ...] or N
    [initial]  kind = "plane-wave" (A, c1, c2) | "singular"      (nls)
                      "ring" | "four-collision"                   (sg)
                      "one-soliton" (gamma) | "two-soliton"       (kdv)
    [scheme]   name, tau, stages, tol, max_iter, C0
    [run]      t_end, every, output, seed, snapshot_times, snapshot_format
    [study]    taus = [...], counts = [...], schemes = [...]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import InvalidArgumentError
from ..grid import make_grid
from ..integrators import RK_SCHEMES, SCHEMES, SchemeConfig, step_count
from ..models import kdv_model, nls_model, sg_model
from . import exact


class ConfigError(ValueError):
    """The configuration cannot be parsed or is inconsistent."""


MODEL_KEYS = {"nls": {"beta", "energy_sign"}, "sg": {"phi"}, "kdv": {"alpha", "beta"}}
MODEL_DEFAULTS = {
    "nls": {"beta": 1.0, "energy_sign": 1},
    "sg": {"phi": 1.0},
    "kdv": {"alpha": exact.KDV_ONE_ALPHA, "beta": 1.0},
}
INITIAL_KINDS = {
    "nls": {"plane-wave": {"A", "c1", "c2"}, "singular": set()},
    "sg": {"ring": set(), "four-collision": set()},
    "kdv": {"one-soliton": {"gamma"}, "two-soliton": set()},
}
SECTION_KEYS = {
    "model": {"name"},
    "grid": {"bounds", "counts"},
    "initial": {"kind"},
    "scheme": {"name", "tau", "stages", "tol", "max_iter", "C0"},
    "run": {"t_end", "every", "output", "seed", "snapshot_times", "snapshot_format"},
    "study": {"taus", "counts", "schemes"},
}
SNAPSHOT_FORMATS = ("text", "raw")

_PI = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*$")


@dataclass
class RunConfig:
    model: str
    params: dict
    bounds: tuple
    counts: tuple
    initial: dict
    scheme: SchemeConfig
    t_end: float
    every: int = 1
    output: str = "out"
    seed: int = 0
    snapshot_times: tuple = ()
    snapshot_format: str = "text"
    taus: tuple = ()
    study_counts: tuple = ()
    schemes: tuple = ()
    source: str = field(default="", compare=False)

    def with_scheme(self, **changes) -> "RunConfig":
        return replace(self, scheme=replace(self.scheme, **changes))

    def with_counts(self, n: int) -> "RunConfig":
        return replace(self, counts=tuple(n for _ in self.counts))

    def metadata(self) -> dict:
        s = self.scheme
        return {
            "model": self.model,
            "params": dict(self.params),
            "grid": {"bounds": [list(b) for b in self.bounds], "counts": list(self.counts)},
            "initial": dict(self.initial),
            "scheme": {"name": s.scheme, "label": s.label, "tau": s.tau, "stages": s.stages,
                       "tol": s.tol, "max_iter": s.max_iter, "C0": s.C0},
            "t_end": self.t_end,
            "every": self.every,
            "seed": self.seed,
            "source": self.source,
        }


def parse_number(value, what="value") -> float:
    """Accept numbers and strings like ``"2pi"``, ``"-pi"``, ``"0.5*pi"``."""
    if isinstance(value, bool):
        raise ConfigError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _PI.match(value)
        if m:
            coeff = float(m.group(2)) if m.group(2) else 1.0
            return (-coeff if m.group(1) == "-" else coeff) * np.pi
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"{what}: cannot read {value!r} as a number")


def parse_scheme_label(label: str) -> tuple[str, int]:
    """``"ESAV-GAUSS-PC3"`` -> ``("ESAV-GAUSS-PC", 3)``; CN labels get stages 1."""
    m = re.fullmatch(r"([A-Za-z-]+?)(\d?)", label.strip())
    if not m:
        raise ConfigError(f"bad scheme label {label!r}")
    name = m.group(1).upper()
    if name not in SCHEMES:
        raise ConfigError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}")
    if name in RK_SCHEMES:
        return name, int(m.group(2) or 2)
    if m.group(2):
        raise ConfigError(f"scheme {name} takes no stage count")
    return name, 1


def _table(data, name, required=True):
    sec = data.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing [{name}] section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _check_keys(sec, name, allowed):
    extra = set(sec) - allowed
    if extra:
        raise ConfigError(f"[{name}] has unknown keys: {', '.join(sorted(extra))}")


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def parse_config(data: dict, source: str = "") -> RunConfig:
    """Validate a parsed TOML document and build a ``RunConfig``."""
    unknown = set(data) - set(SECTION_KEYS)
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")

    msec = _table(data, "model")
    model = str(msec.get("name", "")).lower()
    if model not in MODEL_KEYS:
        raise ConfigError(f"[model] name must be one of {sorted(MODEL_KEYS)}, got {model!r}")
    _check_keys(msec, "model", SECTION_KEYS["model"] | MODEL_KEYS[model])
    params = dict(MODEL_DEFAULTS[model])
    for key in MODEL_KEYS[model]:
        if key in msec:
            params[key] = msec[key] if key == "energy_sign" else parse_number(msec[key], key)
    if model == "nls" and params["energy_sign"] not in (1, -1):
        raise ConfigError("[model] energy_sign must be 1 or -1")

    gsec = _table(data, "grid")
    _check_keys(gsec, "grid", SECTION_KEYS["grid"])
    if "bounds" not in gsec or "counts" not in gsec:
        raise ConfigError("[grid] needs bounds and counts")
    raw_bounds = gsec["bounds"]
    if raw_bounds and not isinstance(raw_bounds[0], (list, tuple)):
        raw_bounds = [raw_bounds]
    bounds = tuple(tuple(parse_number(v, "bounds") for v in b) for b in raw_bounds)
    counts = tuple(int(n) for n in _as_list(gsec["counts"]))
    if len(counts) == 1 and len(bounds) > 1:
        counts = counts * len(bounds)
    want_dim = 1 if model == "kdv" else 2
    if len(bounds) != want_dim or len(counts) != want_dim or any(len(b) != 2 for b in bounds):
        raise ConfigError(f"{model} needs a {want_dim}D grid")
    try:
        make_grid(bounds, counts)
    except InvalidArgumentError as exc:
        raise ConfigError(f"[grid] {exc}") from exc

    isec = _table(data, "initial")
    kind = str(isec.get("kind", ""))
    kinds = INITIAL_KINDS[model]
    if kind not in kinds:
        raise ConfigError(f"[initial] kind for {model} must be one of {sorted(kinds)}, got {kind!r}")
    _check_keys(isec, "initial", {"kind"} | kinds[kind])
    initial = {"kind": kind, **{k: parse_number(v, k) for k, v in isec.items() if k != "kind"}}
    if kind == "two-soliton" and (params["alpha"] != 1.0 or params["beta"] != 1.0):
        raise ConfigError("two-soliton data is exact only for alpha = beta = 1")

    ssec = _table(data, "scheme")
    _check_keys(ssec, "scheme", SECTION_KEYS["scheme"])
    if "name" not in ssec or "tau" not in ssec:
        raise ConfigError("[scheme] needs name and tau")
    name, stages = parse_scheme_label(str(ssec["name"]))
    try:
        scheme = SchemeConfig(
            scheme=name,
            tau=parse_number(ssec["tau"], "tau"),
            stages=int(ssec.get("stages", stages if name in RK_SCHEMES else 2)),
            tol=parse_number(ssec.get("tol", 1e-12), "tol"),
            max_iter=int(ssec.get("max_iter", 50)),
            C0=None if "C0" not in ssec else parse_number(ssec["C0"], "C0"),
        )
    except InvalidArgumentError as exc:
        raise ConfigError(f"[scheme] {exc}") from exc

    rsec = _table(data, "run")
    _check_keys(rsec, "run", SECTION_KEYS["run"])
    if "t_end" not in rsec:
        raise ConfigError("[run] needs t_end")
    t_end = parse_number(rsec["t_end"], "t_end")
    if t_end < 0:
        raise ConfigError("[run] t_end must be non-negative")
    every = int(rsec.get("every", 1))
    if every < 1:
        raise ConfigError("[run] every must be >= 1")
    fmt = str(rsec.get("snapshot_format", "text"))
    if fmt not in SNAPSHOT_FORMATS:
        raise ConfigError(f"[run] snapshot_format must be one of {SNAPSHOT_FORMATS}")
    snaps = tuple(parse_number(t, "snapshot_times") for t in rsec.get("snapshot_times", []))

    stsec = _table(data, "study", required=False)
    _check_keys(stsec, "study", SECTION_KEYS["study"])
    taus = tuple(parse_number(t, "taus") for t in stsec.get("taus", []))
    study_counts = tuple(int(n) for n in stsec.get("counts", []))
    schemes = tuple(str(s) for s in stsec.get("schemes", []))
    for label in schemes:
        parse_scheme_label(label)

    cfg = RunConfig(
        model=model, params=params, bounds=bounds, counts=counts, initial=initial,
        scheme=scheme, t_end=t_end, every=every, output=str(rsec.get("output", "out")),
        seed=int(rsec.get("seed", 0)), snapshot_times=snaps, snapshot_format=fmt,
        taus=taus, study_counts=study_counts, schemes=schemes, source=source,
    )
    validate_steps(cfg, (scheme.tau, *taus))
    for t in snaps:
        if not 0 <= t <= t_end:
            raise ConfigError(f"snapshot time {t} outside [0, {t_end}]")
        validate_steps(replace(cfg, t_end=t), (scheme.tau,))
    return cfg


def validate_steps(cfg: RunConfig, taus) -> None:
    for tau in taus:
        if not tau > 0:
            raise ConfigError(f"time step must be positive, got {tau}")
        try:
            step_count(cfg.t_end, tau)
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    """Read a TOML file or a ``preset:<name>`` reference."""
    text, source = _read_source(str(path))
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return parse_config(data, source=source)


def _read_source(path: str):
    if path.startswith("preset:"):
        name = path.split(":", 1)[1]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
        return PRESETS[name], path
    p = Path(path)
    try:
        return p.read_text(encoding="utf-8"), str(p)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc


# -- assembly -------------------------------------------------------------


def build_grid(cfg: RunConfig):
    return make_grid(cfg.bounds, cfg.counts)


def build_model(cfg: RunConfig, grid=None):
    grid = grid if grid is not None else build_grid(cfg)
    p = cfg.params
    if cfg.model == "nls":
        return nls_model(p["beta"], grid, energy_sign=int(p["energy_sign"]))
    if cfg.model == "sg":
        return sg_model(p["phi"], grid)
    return kdv_model(p["alpha"], p["beta"], grid)


def exact_state(cfg: RunConfig, grid):
    """Callable ``t -> state`` for problems with a closed-form solution, else None."""
    ini, p = cfg.initial, cfg.params
    kind = ini["kind"]
    if kind == "plane-wave":
        A, c1, c2 = ini.get("A", 1.0), ini.get("c1", 1.0), ini.get("c2", 1.0)
        return lambda t: exact.nls_plane_wave_state(grid, A, c1, c2, p["beta"], t)
    if kind == "one-soliton":
        gamma = ini.get("gamma", exact.KDV_ONE_GAMMA)
        x, b = grid.points(0), grid.bounds[0]
        return lambda t: exact.exact_kdv_one_soliton(gamma, p["alpha"], b, x, t)[None]
    if kind == "two-soliton":
        x = grid.points(0)
        return lambda t: exact.exact_kdv_two_soliton(x, t)[None]
    return None


def initial_state(cfg: RunConfig, grid) -> np.ndarray:
    sol = exact_state(cfg, grid)
    if sol is not None:
        return sol(0.0)
    kind = cfg.initial["kind"]
    if kind == "singular":
        return exact.nls_singular_state(grid)
    return exact.sg_initial(kind, grid)


# -- presets --------------------------------------------------------------

_NLS_PLANE = """
[model]
name = "nls"
beta = 1.0
energy_sign = -1

[grid]
bounds = [[0, "2pi"], [0, "2pi"]]
counts = [{n}, {n}]

[initial]
kind = "plane-wave"
A = 1.0
c1 = 1.0
c2 = 1.0
"""

PRESETS = {
    "plane-wave-esav": _NLS_PLANE.format(n=64) + """
[scheme]
name = "ESAV-CN"
tau = 1e-3

[run]
t_end = 1.0
every = 10
output = "out/plane-wave-esav"

[study]
taus = [1e-3, 5e-4, 2.5e-4]
""",
    "plane-wave-sav": _NLS_PLANE.format(n=64) + """
[scheme]
name = "SAV-CN"
tau = 1e-3
C0 = 0.0

[run]
t_end = 1.0
every = 10
output = "out/plane-wave-sav"

[study]
taus = [1e-3, 5e-4, 2.5e-4]
""",
    "plane-wave-space": _NLS_PLANE.format(n=8) + """
[scheme]
name = "ESAV-CN"
tau = 1e-4

[run]
t_end = 0.1
every = 100
output = "out/plane-wave-space"

[study]
counts = [8, 16, 32, 64]
""",
    "plane-wave-iters": _NLS_PLANE.format(n=8) + """
[scheme]
name = "ESAV-GAUSS-PC"
stages = 2
tau = 0.2
tol = 1e-12

[run]
t_end = 100.0
every = 50
output = "out/plane-wave-iters"

[study]
taus = [0.2, 0.1, 0.05, 0.025, 0.0125]
schemes = ["GAUSS-IMPLICIT2", "ESAV-GAUSS-PC2", "GAUSS-IMPLICIT3", "ESAV-GAUSS-PC3"]
""",
    "order-ladder": _NLS_PLANE.format(n=8) + """
[scheme]
name = "ESAV-GAUSS-PC"
stages = 2
tau = 0.125

[run]
t_end = 1.0
output = "out/order-ladder"

[study]
taus = [0.125, 0.0625, 0.03125, 0.015625, 0.0078125]
schemes = ["ESAV-GAUSS2", "ESAV-GAUSS3", "ESAV-GAUSS-PC2", "ESAV-GAUSS-PC3"]
""",
    "nls-singular": """
[model]
name = "nls"
beta = 1.0
energy_sign = -1

[grid]
bounds = [[0, "2pi"], [0, "2pi"]]
counts = [128, 128]

[initial]
kind = "singular"

[scheme]
name = "ESAV-CN"
tau = 1e-4

[run]
t_end = 0.2
every = 10
snapshot_times = [0.0, 0.1, 0.2]
output = "out/nls-singular"

[study]
schemes = ["SAV-CN", "ESAV-CN", "ESAV-GAUSS2", "ESAV-GAUSS-PC2"]
""",
    "sg-ring": """
[model]
name = "sg"
phi = 1.0

[grid]
bounds = [[-7, 7], [-7, 7]]
counts = [128, 128]

[initial]
kind = "ring"

[scheme]
name = "ESAV-CN"
tau = 0.01

[run]
t_end = 50.0
every = 10
snapshot_times = [0.0, 4.0, 8.0, 11.5]
output = "out/sg-ring"

[study]
schemes = ["SAV-CN", "ESAV-CN", "ESAV-GAUSS2", "ESAV-GAUSS-PC2"]
""",
    "sg-collision": """
[model]
name = "sg"
phi = 1.0

[grid]
bounds = [[-30, 10], [-30, 10]]
counts = [128, 128]

[initial]
kind = "four-collision"

[scheme]
name = "ESAV-CN"
tau = 0.01

[run]
t_end = 12.5
every = 10
snapshot_times = [0.0, 2.5, 5.0, 7.5, 10.0, 12.5]
output = "out/sg-collision"

[study]
schemes = ["SAV-CN", "ESAV-CN", "ESAV-GAUSS2", "ESAV-GAUSS-PC2"]
""",
    "kdv-one": """
[model]
name = "kdv"
alpha = 0.0013020833
beta = 1.0

[grid]
bounds = [-3, 5]
counts = 128

[initial]
kind = "one-soliton"
gamma = 0.3333333333333333

[scheme]
name = "ESAV-CN"
tau = 0.01

[run]
t_end = 24.0
every = 10
snapshot_times = [0.0, 24.0]
output = "out/kdv-one"

[study]
schemes = ["SAV-CN", "ESAV-CN", "ESAV-GAUSS2", "ESAV-GAUSS-PC2"]
""",
    "kdv-one-t50": """
[model]
name = "kdv"
alpha = 0.0013020833
beta = 1.0

[grid]
bounds = [-3, 5]
counts = 128

[initial]
kind = "one-soliton"
gamma = 0.3333333333333333

[scheme]
name = "ESAV-CN"
tau = 0.01

[run]
t_end = 50.0
every = 10
snapshot_times = [0.0, 24.0, 48.0, 50.0]
output = "out/kdv-one-t50"

[study]
schemes = ["SAV-CN", "ESAV-CN", "ESAV-GAUSS2", "ESAV-GAUSS-PC2"]
""",
    "kdv-two": """
[model]
name = "kdv"
alpha = 1.0
beta = 1.0

[grid]
bounds = [-40, 40]
counts = 256

[initial]
kind = "two-soliton"

[scheme]
name = "ESAV-CN"
tau = 0.01

[run]
t_end = 120.0
every = 100
snapshot_times = [0.0, 40.0, 80.0, 120.0]
output = "out/kdv-two"

[study]
schemes = ["SAV-CN", "ESAV-CN", "ESAV-GAUSS2", "ESAV-GAUSS-PC2"]
""",
}
