"""Model parameters and derived constants.

The model is a two-type branching population: a declining drug-sensitive
population (birth rate ``r0`` < death rate ``d0``) that seeds a growing
drug-resistant population (birth rate ``r1`` > death rate ``d1``) through
mutations arriving at per-cell rate ``mu_x = mu * x**-alpha``, where ``x``
is the initial sensitive population size.

Every other module consumes a validated, immutable :class:`ModelParams`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

YAGLOM_MODES = ("paper", "fitted")

_CONFIG_KEYS = {"x", "r0", "d0", "r1", "d1", "mu", "alpha", "mu_x", "yaglom_mode"}


@dataclass(frozen=True)
class ModelParams:
    """All rate/size parameters plus derived constants.

    Derived fields:

    - ``lambda0 = r0 - d0`` (negative), ``lambda1 = r1 - d1`` (positive),
      ``r = -lambda0`` (decay rate of the sensitive population),
    - ``mu_x = mu * x**-alpha`` (per-cell mutation rate),
    - ``c``: constant in the single-cell survival tail
      ``P(T > t) ~ c * exp(-r t)``, which sets the location of the
      extinction-time law.  ``yaglom_mode="paper"`` uses ``(d0-r0)/r0``,
      ``"fitted"`` uses ``(d0-r0)/d0`` (the value the Monte Carlo fit
      selects; see the acceptance suite),
    - ``p_extinct_resistant = d1/r1``: extinction probability of one
      resistant lineage.
    """

    x: int
    r0: float
    d0: float
    r1: float
    d1: float
    mu: float
    alpha: float
    lambda0: float
    lambda1: float
    r: float
    mu_x: float
    c: float
    p_extinct_resistant: float
    yaglom_mode: str = "paper"

    def with_yaglom_mode(self, mode: str) -> "ModelParams":
        """Same parameters with the other survival-constant convention."""
        return derive_params(
            x=self.x, r0=self.r0, d0=self.d0, r1=self.r1, d1=self.d1,
            mu=self.mu, alpha=self.alpha, yaglom_mode=mode,
        )

    def raw_dict(self) -> dict:
        """Primitive inputs only; sufficient to reconstruct the instance."""
        return {
            "x": self.x, "r0": self.r0, "d0": self.d0, "r1": self.r1,
            "d1": self.d1, "mu": self.mu, "alpha": self.alpha,
            "yaglom_mode": self.yaglom_mode,
        }


@dataclass(frozen=True)
class ScaledQuery:
    """A point on the sped-up clock: fraction ``u`` of ``s_x(t) = log(x)/r + t``."""

    u: float
    t: float
    s_x_t: float


def s_x(params: ModelParams, t: float) -> float:
    """The sped-up clock ``s_x(t) = log(x)/r + t``."""
    return math.log(params.x) / params.r + t


def scaled_query(params: ModelParams, u: float, t: float) -> ScaledQuery:
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u out of range [0, 1]: {u}")
    return ScaledQuery(u=u, t=t, s_x_t=s_x(params, t))


def derive_params(x, r0, d0, r1, d1, mu, alpha, yaglom_mode="paper") -> ModelParams:
    """Validate raw inputs and populate every derived field.

    Raises ValueError naming the violated invariant:
    the sensitive type must be subcritical (``d0 > r0 >= 0``), the
    resistant type supercritical (``r1 > d1 >= 0``), and the mutation
    exponent must satisfy ``0 < alpha < 1`` with ``mu > 0``.
    """
    for name, value in (("x", x), ("r0", r0), ("d0", d0), ("r1", r1),
                        ("d1", d1), ("mu", mu), ("alpha", alpha)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    if x < 1 or int(x) != x:
        raise ValueError(f"x must be a positive integer, got {x}")
    if r0 < 0:
        raise ValueError(f"r0 must be >= 0, got {r0}")
    if d0 <= r0:
        raise ValueError(
            f"sensitive not subcritical: need d0 > r0, got d0={d0}, r0={r0}")
    if d1 < 0:
        raise ValueError(f"d1 must be >= 0, got {d1}")
    if r1 <= d1:
        raise ValueError(
            f"resistant not supercritical: need r1 > d1, got r1={r1}, d1={d1}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha out of range (0, 1): {alpha}")
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    if yaglom_mode not in YAGLOM_MODES:
        raise ValueError(f"yaglom_mode must be one of {YAGLOM_MODES}, got {yaglom_mode!r}")

    if yaglom_mode == "paper":
        c = (d0 - r0) / r0 if r0 > 0 else math.inf
    else:
        c = (d0 - r0) / d0
    return ModelParams(
        x=int(x), r0=float(r0), d0=float(d0), r1=float(r1), d1=float(d1),
        mu=float(mu), alpha=float(alpha),
        lambda0=float(r0 - d0), lambda1=float(r1 - d1), r=float(d0 - r0),
        mu_x=float(mu) * float(x) ** -float(alpha),
        c=c, p_extinct_resistant=float(d1) / float(r1),
        yaglom_mode=yaglom_mode,
    )


def params_from_mu_x(x, r0, d0, r1, d1, mu_x, yaglom_mode="paper") -> ModelParams:
    """Construct parameters from a directly specified per-cell mutation rate.

    Canonicalizes to ``mu = 1`` and ``alpha = -log(mu_x)/log(x)`` so that
    ``mu * x**-alpha == mu_x`` exactly.  Requires ``mu_x`` in the open
    interval ``(1/x, 1)`` so the implied exponent stays in ``(0, 1)``.
    """
    if x < 2:
        raise ValueError(f"x must be >= 2 to infer an exponent, got {x}")
    if not 0.0 < mu_x < 1.0:
        raise ValueError(f"mu_x must lie in (0, 1), got {mu_x}")
    alpha = -math.log(mu_x) / math.log(x)
    if not 0.0 < alpha < 1.0:
        raise ValueError(
            f"implied alpha={alpha:.6g} out of range (0, 1); "
            f"admissible mu_x for x={x} is ({1.0 / x:.6g}, 1)")
    return derive_params(x=x, r0=r0, d0=d0, r1=r1, d1=d1, mu=1.0, alpha=alpha,
                         yaglom_mode=yaglom_mode)


def params_from_config(source) -> ModelParams:
    """Build parameters from a JSON config file path or an already-parsed dict.

    Exact keys: ``x, r0, d0, r1, d1`` plus either (``mu``, ``alpha``) or
    ``mu_x``; optional ``yaglom_mode``.  Unknown keys are an error.
    """
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            cfg = json.load(fh)
    else:
        cfg = dict(source)
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")

    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted({"x", "r0", "d0", "r1", "d1"} - set(cfg))
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")

    has_mu_pair = "mu" in cfg or "alpha" in cfg
    has_mu_x = "mu_x" in cfg
    if has_mu_pair and has_mu_x:
        raise ValueError("config must specify either (mu, alpha) or mu_x, not both")
    if has_mu_pair and not ("mu" in cfg and "alpha" in cfg):
        raise ValueError("config must specify mu and alpha together")
    if not has_mu_pair and not has_mu_x:
        raise ValueError("config must specify either (mu, alpha) or mu_x")

    common = dict(x=cfg["x"], r0=cfg["r0"], d0=cfg["d0"], r1=cfg["r1"], d1=cfg["d1"],
                  yaglom_mode=cfg.get("yaglom_mode", "paper"))
    if has_mu_x:
        return params_from_mu_x(mu_x=cfg["mu_x"], **common)
    return derive_params(mu=cfg["mu"], alpha=cfg["alpha"], **common)
