"""Heavy-tailed families with closed-form quantiles and known extreme value index."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# family -> number of parameters
FAMILIES = {"pareto": 1, "frechet": 1, "burr": 2, "half_cauchy": 0}


@dataclass(frozen=True)
class DistributionSpec:
    """A heavy-tailed law.

    Parameters per family: ``pareto`` (gamma,), ``frechet`` (alpha,),
    ``burr`` (tau, lam) with cdf ``1 - (1 + x**tau)**(-lam)``, and
    ``half_cauchy`` ().
    """

    family: str
    params: tuple[float, ...] = ()
    true_gamma: float = field(init=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown distribution family {self.family!r}; "
                f"expected one of {sorted(FAMILIES)}"
            )
        params = tuple(float(p) for p in self.params)
        if len(params) != FAMILIES[self.family]:
            raise ValueError(
                f"{self.family} takes {FAMILIES[self.family]} parameter(s), "
                f"got {len(params)}"
            )
        if any(not (math.isfinite(p) and p > 0) for p in params):
            raise ValueError(f"{self.family} parameters must be positive, got {params}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "true_gamma", _gamma_of(self.family, params))


def _gamma_of(family, params):
    if family == "pareto":
        return params[0]
    if family == "frechet":
        return 1.0 / params[0]
    if family == "burr":
        tau, lam = params
        return 1.0 / (tau * lam)
    return 1.0


def parse_distribution(name: str, params=()) -> DistributionSpec:
    """Build a :class:`DistributionSpec` from a family name and parameter list."""
    return DistributionSpec(name.strip().lower(), tuple(params))


def quantile(spec: DistributionSpec, p):
    """Closed-form inverse cdf on ``[0, 1)``.

    Returns a float for scalar ``p`` and an array otherwise.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr >= 0) & (arr < 1))):
        raise ValueError("quantile level must lie in [0, 1)")
    fam, par = spec.family, spec.params
    with np.errstate(divide="ignore"):
        if fam == "pareto":
            out = np.exp(-par[0] * np.log1p(-arr))
        elif fam == "frechet":
            # p = 0 maps to the lower endpoint 0
            out = np.power(-np.log(arr), -1.0 / par[0])
        elif fam == "burr":
            tau, lam = par
            out = np.power(np.expm1(-np.log1p(-arr) / lam), 1.0 / tau)
        else:
            out = np.tan(0.5 * np.pi * arr)
    if out.ndim == 0:
        return float(out)
    return out


def upper_quantile(spec: DistributionSpec, p):
    """Quantile at level ``1 - p``, computed from ``p`` to keep precision for tiny ``p``."""
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr <= 1))):
        raise ValueError("exceedance probability must lie in (0, 1]")
    fam, par = spec.family, spec.params
    with np.errstate(divide="ignore"):
        if fam == "pareto":
            out = np.power(arr, -par[0])
        elif fam == "frechet":
            out = np.power(-np.log1p(-arr), -1.0 / par[0])
        elif fam == "burr":
            tau, lam = par
            out = np.power(np.expm1(-np.log(arr) / lam), 1.0 / tau)
        else:
            out = 1.0 / np.tan(0.5 * np.pi * arr)
    if out.ndim == 0:
        return float(out)
    return out


def cdf(spec: DistributionSpec, x):
    """Distribution function; used for round-trip checks and true tail probabilities."""
    arr = np.asarray(x, dtype=float)
    fam, par = spec.family, spec.params
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam == "pareto":
            out = np.where(arr > 1, -np.expm1(-np.log(np.maximum(arr, 1.0)) / par[0]), 0.0)
        elif fam == "frechet":
            pos = np.maximum(arr, np.finfo(float).tiny)
            out = np.where(arr > 0, np.exp(-np.power(pos, -par[0])), 0.0)
        elif fam == "burr":
            tau, lam = par
            pos = np.maximum(arr, 0.0)
            out = np.where(arr > 0, -np.expm1(-lam * np.log1p(np.power(pos, tau))), 0.0)
        else:
            out = np.where(arr > 0, 2.0 / np.pi * np.arctan(np.maximum(arr, 0.0)), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class RngStream:
    """Identifies an independent, reproducible uniform stream.

    The generator is seeded from ``(master_seed, stream_id)`` only, so the
    variates do not depend on which worker consumes the stream.
    """

    master_seed: int
    stream_id: int

    @classmethod
    def for_machine(cls, master_seed: int, rep: int, machine: int, n_machines: int):
        if not 0 <= machine < n_machines:
            raise ValueError("machine index out of range")
        return cls(master_seed, rep * n_machines + machine)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def sample(spec: DistributionSpec, n: int, stream: RngStream) -> np.ndarray:
    """Draw ``n`` i.i.d. values by inverse transform of uniforms on ``[0, 1)``."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    u = stream.generator().random(n)
    return quantile(spec, u)
