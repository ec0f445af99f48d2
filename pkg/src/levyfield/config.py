"""Flat key=value configuration shared by the CLI and provenance sidecars.

A simulation is fully described by scalar fields, vectors and enum tags,
so the format is a plain-text file of ``key = value`` lines (# comments
allowed).  Floats serialize with 17 significant digits, which round-trips
binary64 exactly; re-running a sidecar therefore reproduces the field
bit for bit.
"""

from __future__ import annotations

from typing import Mapping

from .dirops import DirFactor, FracFactor, OperatorSpec
from .levy import (
    CompoundPoisson,
    Dirac,
    GaussianLaw,
    LevyTriplet,
    ProbabilityLaw,
    SAlphaStable,
    TwoPoint,
    Uniform,
    VarianceGamma,
)

__all__ = [
    "ConfigError",
    "parse_config_text",
    "format_config",
    "triplet_to_config",
    "triplet_from_config",
    "operator_to_config",
    "operator_from_config",
    "fmt_float",
]


class ConfigError(ValueError):
    """Invalid configuration; the message carries the line or field."""


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key] = value
    return out


def format_config(cfg: Mapping[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.items())


def _get(cfg: Mapping[str, str], key: str, source: str) -> str:
    if key not in cfg:
        raise ConfigError(f"{source}: missing field {key!r}")
    return cfg[key]


def _get_float(cfg, key, source) -> float:
    raw = _get(cfg, key, source)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{source}: field {key!r} is not a number: {raw!r}") from None


# ---------------------------------------------------------------------------
# amplitude laws
# ---------------------------------------------------------------------------

def _law_to_str(law: ProbabilityLaw) -> str:
    if isinstance(law, Dirac):
        return f"dirac:{fmt_float(law.atom)}"
    if isinstance(law, Uniform):
        return f"uniform:{fmt_float(law.lo)},{fmt_float(law.hi)}"
    if isinstance(law, GaussianLaw):
        return f"gaussian:{fmt_float(law.mean)},{fmt_float(law.var)}"
    if isinstance(law, TwoPoint):
        return (
            f"twopoint:{fmt_float(law.a_minus)},{fmt_float(law.a_plus)},"
            f"{fmt_float(law.p_plus)}"
        )
    raise ConfigError(f"amplitude law {type(law).__name__} has no config form")


def _law_from_str(raw: str, source: str) -> ProbabilityLaw:
    name, _, rest = raw.partition(":")
    try:
        args = [float(x) for x in rest.split(",")] if rest else []
    except ValueError:
        raise ConfigError(f"{source}: bad amplitude arguments {rest!r}") from None
    try:
        if name == "dirac" and len(args) == 1:
            return Dirac(args[0])
        if name == "uniform" and len(args) == 2:
            return Uniform(args[0], args[1])
        if name == "gaussian" and len(args) == 2:
            return GaussianLaw(args[0], args[1])
        if name == "twopoint" and len(args) == 3:
            return TwoPoint(args[0], args[1], args[2])
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid amplitude law {raw!r}: {exc}") from None
    raise ConfigError(f"{source}: unknown amplitude law {raw!r}")


# ---------------------------------------------------------------------------
# triplets
# ---------------------------------------------------------------------------

def triplet_to_config(t: LevyTriplet) -> dict[str, str]:
    cfg: dict[str, str] = {}
    v = t.measure
    if v is None:
        cfg["family"] = "gaussian"
    elif isinstance(v, SAlphaStable):
        cfg["family"] = "sas"
        cfg["alpha"] = fmt_float(v.alpha)
        cfg["stable_scale"] = fmt_float(v.scale)
    elif isinstance(v, VarianceGamma):
        cfg["family"] = "variance_gamma"
        cfg["vg_lambda"] = fmt_float(v.lam)
    elif isinstance(v, CompoundPoisson):
        cfg["family"] = "compound_poisson"
        cfg["poisson_rate"] = fmt_float(v.rate)
        cfg["amplitude"] = _law_to_str(v.amplitude)
    else:
        raise ConfigError(f"measure {type(v).__name__} has no config form")
    cfg["mu"] = fmt_float(t.mu)
    cfg["sigma2"] = fmt_float(t.sigma2)
    return cfg


def triplet_from_config(cfg: Mapping[str, str], source: str = "<config>") -> LevyTriplet:
    family = _get(cfg, "family", source)
    mu = _get_float(cfg, "mu", source) if "mu" in cfg else 0.0
    sigma2 = _get_float(cfg, "sigma2", source) if "sigma2" in cfg else 0.0
    try:
        if family == "gaussian":
            return LevyTriplet(mu, sigma2, None)
        if family == "sas":
            return LevyTriplet(
                mu, sigma2,
                SAlphaStable(
                    _get_float(cfg, "alpha", source),
                    _get_float(cfg, "stable_scale", source)
                    if "stable_scale" in cfg else 1.0,
                ),
            )
        if family == "variance_gamma":
            return LevyTriplet(
                mu, sigma2, VarianceGamma(_get_float(cfg, "vg_lambda", source))
            )
        if family == "compound_poisson":
            return LevyTriplet(
                mu, sigma2,
                CompoundPoisson(
                    _get_float(cfg, "poisson_rate", source),
                    _law_from_str(_get(cfg, "amplitude", source), source),
                ),
            )
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid triplet: {exc}") from None
    raise ConfigError(f"{source}: unknown family {family!r}")


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _factor_to_str(f: DirFactor) -> str:
    direction = ",".join(str(c) for c in f.direction)
    a = f.alpha
    return f"({direction}):{fmt_float(a.real)}{a.imag:+.17g}j"


def _factor_from_str(raw: str, source: str) -> DirFactor:
    raw = raw.strip()
    if not raw.startswith("("):
        raise ConfigError(f"{source}: factor must look like (2,1):-1.0, got {raw!r}")
    head, _, tail = raw.partition(":")
    try:
        direction = tuple(int(x) for x in head.strip("() ").split(","))
        alpha = complex(tail.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{source}: cannot parse factor {raw!r}") from None
    try:
        return DirFactor(direction, alpha)
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid factor {raw!r}: {exc}") from None


def operator_to_config(spec: OperatorSpec | None, gamma: float | None = None) -> dict[str, str]:
    """Serialize the whitening operator; None means raw innovation."""
    if spec is None:
        return {"operator": "none"}
    if spec.frac is not None and not spec.factors:
        cfg = {"operator": "self_similar", "gamma": fmt_float(spec.frac.gamma)}
        if spec.frac.k is not None:
            cfg["correction_k"] = str(spec.frac.k)
        return cfg
    cfg = {
        "operator": "directional",
        "factors": " ; ".join(_factor_to_str(f) for f in spec.factors),
    }
    if spec.frac is not None:
        cfg["gamma"] = fmt_float(spec.frac.gamma)
        if spec.frac.k is not None:
            cfg["correction_k"] = str(spec.frac.k)
    return cfg


def operator_from_config(
    cfg: Mapping[str, str], source: str = "<config>"
) -> OperatorSpec | None:
    kind = cfg.get("operator", "none")
    if kind == "none":
        return None
    frac = None
    if "gamma" in cfg:
        k = int(cfg["correction_k"]) if "correction_k" in cfg else None
        frac = FracFactor(_get_float(cfg, "gamma", source), k)
    if kind == "self_similar":
        if frac is None:
            raise ConfigError(f"{source}: self_similar operator needs gamma")
        return OperatorSpec((), frac)
    if kind == "directional":
        raw = _get(cfg, "factors", source)
        factors = tuple(
            _factor_from_str(part, source) for part in raw.split(";") if part.strip()
        )
        if not factors:
            raise ConfigError(f"{source}: directional operator needs factors")
        return OperatorSpec(factors, frac)
    raise ConfigError(f"{source}: unknown operator {kind!r}")
