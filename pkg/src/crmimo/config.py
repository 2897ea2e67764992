"""Config-file parsing for the CLI: flat INI sections, strictly validated.

Unknown sections or keys are hard errors so typos never fall back to
silent defaults; missing keys take the documented defaults.
"""

import configparser

from .estimation import EstimationConfig
from .geometry import GeometryConfig
from .harness import SOLVER_ORDER, SWEEPABLE, ExperimentConfig

_INT_SWEEPS = ("K", "M_b")


class ConfigError(ValueError):
    """Unreadable, unknown, or inconsistent config content."""


_SCHEMA = {
    "geometry": ("preset", "side", "K", "M_b", "M_u", "gamma"),
    "estimation": ("variance_fraction", "noise_mode"),
    "constraints": ("P0_dbm", "I0_dbm", "R0", "sigma_w_sq_dbm"),
    "sweep": ("variable", "values"),
    "runtime": ("trials", "seed", "solvers", "threads"),
    "admission": ("redistribute_after_interference", "ilp_exhaustive_limit"),
}


def _get(section, key, cast, default):
    if key not in section:
        return default
    raw = section[key].strip()
    try:
        if cast is bool:
            if raw.lower() in ("true", "yes", "1", "on"):
                return True
            if raw.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {section.name}.{key}: {raw!r}") from exc


def parse_config(path) -> tuple:
    """Read a config file into (ExperimentConfig, threads)."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys like K and M_b are case-sensitive
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if not read:
        raise ConfigError(f"cannot read config file {path}")

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key {section}.{key}")

    def section(name):
        return parser[name] if parser.has_section(name) else parser["DEFAULT"]

    geo = section("geometry")
    try:
        geometry = GeometryConfig(
            side=_get(geo, "side", float, 100.0),
            num_ue=_get(geo, "K", int, 10),
            m_bs=_get(geo, "M_b", int, 128),
            m_ue=_get(geo, "M_u", int, 4),
            gamma=_get(geo, "gamma", float, 3.6),
            preset=_get(geo, "preset", str, "default"),
        )
        est = section("estimation")
        estimation = EstimationConfig(
            variance_fraction=_get(est, "variance_fraction", float, 0.01),
            noise_mode=_get(est, "noise_mode", str, "std"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    sweep = section("sweep")
    variable = _get(sweep, "variable", str, "K")
    if variable not in SWEEPABLE:
        raise ConfigError(
            f"sweep.variable must be one of {SWEEPABLE}, got {variable!r}"
        )
    raw_values = _get(sweep, "values", str, "")
    if not raw_values:
        raise ConfigError("sweep.values is required")
    cast = int if variable in _INT_SWEEPS else float
    try:
        values = tuple(cast(v.strip()) for v in raw_values.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad sweep.values entry in {raw_values!r}") from exc

    run = section("runtime")
    solvers_raw = _get(run, "solvers", str, "all")
    if solvers_raw.strip() == "all":
        solvers = SOLVER_ORDER
    else:
        solvers = tuple(s.strip() for s in solvers_raw.split(","))
        for s in solvers:
            if s not in SOLVER_ORDER:
                raise ConfigError(f"unknown solver {s!r} in runtime.solvers")

    con = section("constraints")
    adm = section("admission")
    try:
        config = ExperimentConfig(
            geometry=geometry,
            estimation=estimation,
            p0_dbm=_get(con, "P0_dbm", float, 60.0),
            i0_dbm=_get(con, "I0_dbm", float, 0.0),
            r0=_get(con, "R0", float, 1.0),
            sigma_w_sq_dbm=_get(con, "sigma_w_sq_dbm", float, 0.0),
            sweep_var=variable,
            sweep_values=values,
            trials=_get(run, "trials", int, 1000),
            seed=_get(run, "seed", int, 1),
            solvers=solvers,
            redistribute_after_interference=_get(
                adm, "redistribute_after_interference", bool, False
            ),
            ilp_exhaustive_limit=_get(adm, "ilp_exhaustive_limit", int, 16),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    # every sweep point must itself be a valid configuration
    from .harness import resolve_point

    for value in values:
        try:
            resolve_point(config, value)
        except ValueError as exc:
            raise ConfigError(f"sweep value {value}: {exc}") from exc

    threads = _get(run, "threads", int, 1)
    if threads < 1:
        raise ConfigError("runtime.threads must be >= 1")
    return config, threads


def resolved_table(config: ExperimentConfig, threads: int):
    """Every consumed key with its resolved value, for `validate` output."""
    g, e = config.geometry, config.estimation
    return [
        ("geometry.preset", g.preset),
        ("geometry.side", g.side),
        ("geometry.K", g.num_ue),
        ("geometry.M_b", g.m_bs),
        ("geometry.M_u", g.m_ue),
        ("geometry.gamma", g.gamma),
        ("estimation.variance_fraction", e.variance_fraction),
        ("estimation.noise_mode", e.noise_mode),
        ("constraints.P0_dbm", config.p0_dbm),
        ("constraints.I0_dbm", config.i0_dbm),
        ("constraints.R0", config.r0),
        ("constraints.sigma_w_sq_dbm", config.sigma_w_sq_dbm),
        ("sweep.variable", config.sweep_var),
        ("sweep.values", ", ".join(str(v) for v in config.sweep_values)),
        ("runtime.trials", config.trials),
        ("runtime.seed", config.seed),
        ("runtime.solvers", ", ".join(config.solvers)),
        ("runtime.threads", threads),
        ("admission.redistribute_after_interference",
         config.redistribute_after_interference),
        ("admission.ilp_exhaustive_limit", config.ilp_exhaustive_limit),
    ]
