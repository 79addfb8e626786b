"""Parametric isotropic model families and their coefficient representations.

Families (radial correlation psi, or a direct spectrum):

  * multiquadric: psi(s) = ((1-delta)^2 / (1+delta^2-2 delta cos s))^tau,
    the negative-binomial Schoenberg family with p = 2 delta/(1+delta^2);
  * spectral: eigenvalues lambda_(l,d) = 1/(1 + beta exp((l/alpha)^kappa));
  * most_repulsive: eigenvalues filled to 1 level by level until the
    target expected count eta is reached;
  * matern: psi(s) = 2^(1-nu)/Gamma(nu) (s/c)^nu K_nu(s/c), nu in (0, 1/2];
  * circular_matern (d=1): lambda_(l,1) = sigma^2 / (alpha^2 + l^2)^(nu+1/2);
  * askey / c2_wendland / c4_wendland / spherical: compactly supported
    correlations with closed-form 1-Schoenberg coefficients (spherical:
    numeric only).

A DPP is specified either through its kernel C_0 = rho * psi with
rho <= rho_max ("kernel" mode) or through the density kernel
C~_0 = chi * psi with any chi > 0 ("density" mode).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kv
from scipy.stats import nbinom

from .harmonics import multiplicities, multiplicity
from .spectra import (
    DSchoenbergSeq,
    ExistenceError,
    MercerSpectrum,
    QuadratureSpec,
    SchoenbergSeq,
    TruncationPolicy,
    beta_from_kernel,
    correlation_mercer,
    d_schoenberg_from_psi,
    from_density_kernel,
    mercer_from_d,
    schoenberg_to_d,
    to_density_kernel,
)
from .sphere import surface_measure

TWO_PI = 2.0 * math.pi


class TruncationError(RuntimeError):
    """The level cap was reached before the series tail fell below the
    truncation tolerance."""


# ---------------------------------------------------------------------------
# Multiquadric
# ---------------------------------------------------------------------------


def multiquadric_psi(tau: float, delta: float):
    """Closed-form radial correlation of the multiquadric family."""
    _check_multiquadric(tau, delta)

    def psi(s):
        s = np.asarray(s, dtype=float)
        return ((1.0 - delta) ** 2 / (1.0 + delta * delta - 2.0 * delta * np.cos(s))) ** tau

    return psi


def _check_multiquadric(tau, delta):
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def multiquadric_schoenberg(
    tau: float, delta: float, trunc: TruncationPolicy = TruncationPolicy()
) -> SchoenbergSeq:
    """Schoenberg coefficients beta_l = binom(tau+l-1, l) p^l (1-p)^tau.

    This is the negative binomial pmf with p = 2 delta / (1 + delta^2);
    the sequence is truncated at the level where the NB survival mass
    drops below the policy's tail tolerance.
    """
    _check_multiquadric(tau, delta)
    p = 2.0 * delta / (1.0 + delta * delta)
    L = int(nbinom.ppf(1.0 - trunc.tail_tol, tau, 1.0 - p))
    L = min(max(L, 8), trunc.max_level)
    values = nbinom.pmf(np.arange(L + 1), tau, 1.0 - p)
    tail = float(nbinom.sf(L, tau, 1.0 - p))
    return SchoenbergSeq(values, tail_bound=tail)


def multiquadric_beta0_s2(tau: float, delta: float) -> float:
    """Closed-form maximal 2-Schoenberg coefficient beta_(0,2)."""
    _check_multiquadric(tau, delta)
    if tau == 1.0:
        return (1.0 - delta) ** 2 / (2.0 * delta) * math.log((1.0 + delta) / (1.0 - delta))
    return (
        (1.0 - delta) ** (2.0 * tau)
        / (4.0 * delta * (1.0 - tau))
        * ((1.0 + delta) ** (2.0 * (1.0 - tau)) - (1.0 - delta) ** (2.0 * (1.0 - tau)))
    )


def multiquadric_d_schoenberg(
    tau: float,
    delta: float,
    dim: int,
    trunc: TruncationPolicy = TruncationPolicy(),
) -> DSchoenbergSeq:
    """d-Schoenberg coefficients of the multiquadric correlation.

    For tau = (d-1)/2 (d >= 2) the exact geometric-type closed form
    beta_(l,d) = binom(l+d-2, l) delta^l (1-delta)^(d-1) applies and no
    conversion truncation is involved.  Otherwise the Schoenberg
    sequence is converted level by level; for d=2 the level-0 entry is
    replaced by its closed form.
    """
    _check_multiquadric(tau, delta)
    if dim >= 2 and tau == (dim - 1) / 2.0:
        L = int(nbinom.ppf(1.0 - trunc.tail_tol, dim - 1, 1.0 - delta))
        L = min(max(L, 8), trunc.max_level)
        values = nbinom.pmf(np.arange(L + 1), dim - 1, 1.0 - delta)
        tail = float(nbinom.sf(L, dim - 1, 1.0 - delta))
        return DSchoenbergSeq(dim, values, tail_bound=tail)
    sch = multiquadric_schoenberg(tau, delta, trunc)
    out = schoenberg_to_d(sch, dim, n_max=min(trunc.max_level, len(sch) - 1))
    values = np.array(out.values)
    if dim == 2:
        values[0] = multiquadric_beta0_s2(tau, delta)
    tail = min(1.0, max(0.0, 1.0 - float(np.sum(values))))
    return DSchoenbergSeq(dim, values, tail_bound=tail)


@dataclass(frozen=True)
class MultiquadricCoeffs:
    psi: object
    schoenberg: SchoenbergSeq
    d_schoenberg: DSchoenbergSeq


def multiquadric_coeffs(
    tau: float,
    delta: float,
    dim: int,
    trunc: TruncationPolicy = TruncationPolicy(),
) -> MultiquadricCoeffs:
    """Bundle the closed-form psi with both coefficient sequences."""
    return MultiquadricCoeffs(
        psi=multiquadric_psi(tau, delta),
        schoenberg=multiquadric_schoenberg(tau, delta, trunc),
        d_schoenberg=multiquadric_d_schoenberg(tau, delta, dim, trunc),
    )


def multiquadric_eta_max(tau: float, delta: float, dim: int) -> float:
    """Largest expected count eta_max = 1/beta_(0,d) (psi is positive).

    Equals (1-delta)^(1-d) when tau = (d-1)/2; for d=2 the closed-form
    beta_(0,2) is used; other dimensions fall back to the converted
    coefficient.
    """
    _check_multiquadric(tau, delta)
    if dim >= 2 and tau == (dim - 1) / 2.0:
        return (1.0 - delta) ** (1 - dim)
    if dim == 2:
        return 1.0 / multiquadric_beta0_s2(tau, delta)
    beta_d = multiquadric_d_schoenberg(tau, delta, dim, TruncationPolicy(tail_tol=1e-10))
    return 1.0 / float(beta_d.values[0])


# ---------------------------------------------------------------------------
# Flexible spectral model
# ---------------------------------------------------------------------------


def _spectral_lambda(ells: np.ndarray, alpha: float, beta: float, kappa: float):
    """1 / (1 + beta exp((l/alpha)^kappa)), evaluated overflow-safely."""
    out = np.zeros(len(ells))
    logb = math.log(beta)
    for i, ell in enumerate(ells):
        if ell == 0:
            g = logb
        else:
            t = kappa * math.log(ell / alpha)
            if t > 709.0:
                continue  # lambda underflows to 0
            expt = math.exp(t)
            if expt > 709.0 - logb:
                continue
            g = logb + expt
        out[i] = 1.0 / (1.0 + math.exp(g)) if g > -709.0 else 1.0
    return out


def spectral_model_spectrum(
    alpha: float,
    beta: float,
    kappa: float,
    dim: int,
    trunc: TruncationPolicy = TruncationPolicy(),
) -> MercerSpectrum:
    """Kernel spectrum of the flexible spectral family.

    All eigenvalues lie strictly inside (0, 1), so the DPP always
    exists and has a density.  Levels are accumulated until the
    remaining tail of sum m*lambda is below the truncation tolerance;
    hitting the level cap first is an error because the expected count
    would be misstated.
    """
    if alpha <= 0 or beta <= 0 or kappa <= 0:
        raise ValueError("alpha, beta, kappa must all be positive")
    chunk = 128
    values = np.array([])
    start = 0
    while True:
        ells = np.arange(start, min(start + chunk, trunc.max_level + 1))
        if len(ells) == 0:
            raise TruncationError(
                f"spectral model tail exceeds tolerance at max_level={trunc.max_level}"
            )
        values = np.concatenate([values, _spectral_lambda(ells, alpha, beta, kappa)])
        start = len(values)
        m = multiplicities(len(values) - 1, dim)
        terms = m * values
        eta_acc = float(np.sum(terms))
        if terms[-1] == 0.0:
            return MercerSpectrum(dim, "kernel", values, tail_bound=0.0)
        # geometric tail bound; valid once the term ratios are below 1 and
        # decreasing (the eigenvalues decay faster than exponentially)
        if len(terms) >= 4 and np.all(terms[-4:] > 0):
            r1, r2, r3 = terms[-3:] / terms[-4:-1]
            if r3 < 1.0 - 1e-9 and r3 <= r2 <= r1:
                tail = terms[-1] * r3 / (1.0 - r3)
                if tail < trunc.tail_tol * max(eta_acc, 1e-300):
                    return MercerSpectrum(dim, "kernel", values, tail_bound=tail)
        if start > trunc.max_level:
            raise TruncationError(
                f"spectral model tail exceeds tolerance at max_level={trunc.max_level}"
            )


# ---------------------------------------------------------------------------
# Most repulsive family
# ---------------------------------------------------------------------------


def most_repulsive_spectrum(eta: float, dim: int) -> MercerSpectrum:
    """Eigenvalues of the most repulsive DPP with expected count eta.

    lambda = 1 below the boundary level n, a fractional value at n so
    that sum m*lambda = eta, and 0 above; n is the level with
    cum(n-1) < eta <= cum(n) of cumulative multiplicities.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    values = []
    cum = 0.0
    n = 0
    while True:
        m = multiplicity(n, dim)
        if cum + m >= eta:
            values.append((eta - cum) / m)
            break
        values.append(1.0)
        cum += m
        n += 1
    return MercerSpectrum(dim, "kernel", np.array(values))


# ---------------------------------------------------------------------------
# Matern
# ---------------------------------------------------------------------------


def matern_psi(nu: float, c: float):
    """Matern correlation psi(s) = 2^(1-nu)/Gamma(nu) (s/c)^nu K_nu(s/c).

    nu is restricted to (0, 1/2], the range in which the function stays
    a valid correlation under the great-circle metric; psi(0) = 1 is
    the removable limit.  nu = 1/2 gives exp(-s/c).
    """
    if not 0.0 < nu <= 0.5:
        raise ValueError(f"nu must lie in (0, 1/2], got {nu}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    if nu == 0.5:

        def psi(s):
            return np.exp(-np.asarray(s, dtype=float) / c)

        return psi

    pref = 2.0 ** (1.0 - nu) / math.gamma(nu)

    def psi(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.ones_like(s)
        pos = s > 0
        z = s[pos] / c
        out[pos] = pref * z**nu * kv(nu, z)
        return out if out.shape != (1,) else float(out[0])

    return psi


def matern_d1_coefficients(c: float, n_max: int) -> DSchoenbergSeq:
    """Exact 1-Schoenberg coefficients of the exponential correlation
    (nu = 1/2): beta_(0,1) = (c/pi)(1 - e^(-pi/c)) and
    beta_(l,1) = (2/pi)(1 + (-1)^(l+1) e^(-pi/c)) c/(1 + c^2 l^2)."""
    if c <= 0:
        raise ValueError("c must be positive")
    e = math.exp(-math.pi / c)
    ells = np.arange(1, n_max + 1)
    values = np.empty(n_max + 1)
    values[0] = c / math.pi * (1.0 - e)
    values[1:] = (2.0 / math.pi) * (1.0 + (-1.0) ** (ells + 1) * e) * c / (1.0 + c * c * ells**2)
    # 1/l^2 tail of the coefficient series
    tail = (2.0 / math.pi) * (1.0 + e) / (c * n_max)
    return DSchoenbergSeq(1, values, tail_bound=min(tail, 1.0 - float(np.sum(values))))


def matern_eta_max_d1(c: float) -> float:
    """eta_max = (pi/c) / (1 - exp(-pi/c)) for nu = 1/2, d = 1."""
    return math.pi / c / (1.0 - math.exp(-math.pi / c))


def matern_d_schoenberg(
    nu: float,
    c: float,
    dim: int,
    n_max: int = 256,
    quad: QuadratureSpec = QuadratureSpec(),
) -> DSchoenbergSeq:
    """Matern d-Schoenberg coefficients; exact for nu=1/2 on S^1, else
    by quadrature.  The series decays like l^(-2 nu - d), so the
    recorded tail bound is not small for small nu."""
    if nu == 0.5 and dim == 1:
        return matern_d1_coefficients(c, n_max)
    return d_schoenberg_from_psi(matern_psi(nu, c), dim, n_max, quad)


def matern_pcf_slope(nu: float, c: float) -> float:
    """g_0'(0) of the Matern DPP: 2/c for nu = 1/2, +inf for nu < 1/2."""
    if not 0.0 < nu <= 0.5:
        raise ValueError(f"nu must lie in (0, 1/2], got {nu}")
    return 2.0 / c if nu == 0.5 else math.inf


# ---------------------------------------------------------------------------
# Circular Matern (d = 1)
# ---------------------------------------------------------------------------


def circular_matern_spectrum(
    sigma: float,
    nu: float,
    alpha: float,
    trunc: TruncationPolicy = TruncationPolicy(),
) -> MercerSpectrum:
    """Kernel spectrum lambda_(l,1) = sigma^2 / (alpha^2 + l^2)^(nu + 1/2).

    The DPP exists exactly when sigma <= alpha^(nu + 1/2) (the level-0
    eigenvalue is the largest).  The algebraic tail is bounded by
    sigma^2 L^(-2 nu) / nu and recorded, not erred on.
    """
    if sigma <= 0 or nu <= 0 or alpha <= 0:
        raise ValueError("sigma, nu, alpha must all be positive")
    lam0 = sigma**2 / alpha ** (2.0 * nu + 1.0)
    if lam0 > 1.0 + 1e-12:
        raise ExistenceError(
            f"circular Matern DPP requires sigma <= alpha^(nu+1/2); "
            f"lambda_0 = {lam0:.6g} > 1"
        )
    L = trunc.max_level
    ells = np.arange(L + 1)
    values = np.minimum(sigma**2 / (alpha**2 + ells**2) ** (nu + 0.5), 1.0)
    tail = sigma**2 * float(L) ** (-2.0 * nu) / nu
    return MercerSpectrum(1, "kernel", values, tail_bound=tail)


# ---------------------------------------------------------------------------
# Compactly supported families (Askey, Wendland, spherical), d = 1
# ---------------------------------------------------------------------------

COMPACT_VARIANTS = ("askey", "c2_wendland", "c4_wendland", "spherical")


def _askey_base_psi(u):
    return np.where(u < 1.0, (1.0 - u) ** 3, 0.0)


def _c2w_base_psi(u):
    return np.where(u < 1.0, (1.0 - u) ** 4 * (4.0 * u + 1.0), 0.0)


def _c4w_base_psi(u):
    return np.where(u < 1.0, (1.0 - u) ** 6 * (u * (35.0 * u + 18.0) + 3.0) / 3.0, 0.0)


def _spherical_base_psi(u):
    return np.where(u < 1.0, (1.0 + u / 2.0) * (1.0 - u) ** 2, 0.0)


_BASE_PSI = {
    "askey": _askey_base_psi,
    "c2_wendland": _c2w_base_psi,
    "c4_wendland": _c4w_base_psi,
    "spherical": _spherical_base_psi,
}


# Taylor coefficients in u^2 of pi * F(u) for each closed form; the trig
# expressions cancel catastrophically below u ~ 1-2, so the series (exact
# to machine precision for u < 3) takes over there.
_ASKEY_SERIES = [
    1 / 2, -1 / 60, 1 / 3360, -1 / 302400, 1 / 39916800, -1 / 7264857600,
    1 / 1743565824000, -1 / 533531142144000, 1 / 202741834014720000,
    -1 / 93666727314800640000, 1 / 51704033477769953280000,
    -1 / 33607621760550469632000000, 1 / 25407362050976155041792000000,
]
_C2W_SERIES = [
    2 / 3, -1 / 42, 1 / 2520, -1 / 249480, 1 / 36324288, -1 / 7264857600,
    1 / 1905468364800, -1 / 633568231296000, 1 / 260185353652224000,
    -1 / 129260083694424883200, 1 / 76380958546705612800000,
    -1 / 52932004272866989670400000, 1 / 42508471123748567089152000000,
]
_C4W_SERIES = [
    16 / 27, -8 / 495, 4 / 19305, -2 / 1216215, 1 / 110270160, -1 / 26937424800,
    1 / 8485288812000, -1 / 3339432552456000, 1 / 1602927625178880000,
    -1 / 920663339625469440000, 1 / 622982193146567654400000,
    -1 / 490239064299183623424000000, 1 / 443736387342803919716352000000,
]

_SERIES_RADIUS = 3.0


def _eval_even_series(coeffs, u):
    u2 = u * u
    acc = np.zeros_like(u)
    for c in reversed(coeffs):
        acc = acc * u2 + c
    return acc / math.pi


def _askey_base_beta(u):
    small = np.abs(u) < _SERIES_RADIUS
    u2 = u * u
    with np.errstate(divide="ignore", invalid="ignore"):
        full = 6.0 * (u2 + 2.0 * np.cos(u) - 2.0) / (math.pi * u2 * u2)
    return np.where(small, _eval_even_series(_ASKEY_SERIES, u), full)


def _c2w_base_beta(u):
    small = np.abs(u) < _SERIES_RADIUS
    u2 = u * u
    with np.errstate(divide="ignore", invalid="ignore"):
        full = 240.0 * (u2 + u * np.sin(u) + 4.0 * np.cos(u) - 4.0) / (math.pi * u2**3)
    return np.where(small, _eval_even_series(_C2W_SERIES, u), full)


def _c4w_base_beta(u):
    small = np.abs(u) < _SERIES_RADIUS
    u2 = u * u
    with np.errstate(divide="ignore", invalid="ignore"):
        full = (
            8960.0
            * (4.0 * u * (u2 - 18.0) - 3.0 * (u2 - 35.0) * np.sin(u) - 33.0 * u * np.cos(u))
            / (math.pi * u2**4 * u)
        )
    return np.where(small, _eval_even_series(_C4W_SERIES, u), full)


_BASE_BETA = {
    "askey": (_askey_base_beta, 1.0 / (4.0 * math.pi)),
    "c2_wendland": (_c2w_base_beta, 1.0 / (3.0 * math.pi)),
    "c4_wendland": (_c4w_base_beta, 8.0 / (27.0 * math.pi)),
}


def compact_support_psi(variant: str, c: float):
    """Radial correlation with support [0, c] (scale rule: psi(s/c))."""
    _check_compact(variant, c)
    base = _BASE_PSI[variant]

    def psi(s):
        return base(np.asarray(s, dtype=float) / c)

    return psi


def _check_compact(variant, c):
    if variant not in COMPACT_VARIANTS:
        raise ValueError(f"variant must be one of {COMPACT_VARIANTS}")
    if c <= 0:
        raise ValueError("c must be positive")
    if variant in ("c2_wendland", "c4_wendland") and c > TWO_PI:
        raise ValueError(f"{variant} requires c in (0, 2*pi], got {c}")


def compact_support_coeffs(variant: str, c: float, n_max: int) -> DSchoenbergSeq:
    """1-Schoenberg coefficients of the compactly supported families.

    Closed forms: beta_(l,1)(c) = c * F(c l) with F the unit-scale
    coefficient function, valid while the support [0, c] stays inside
    [0, pi].  The spherical variant (no closed form is reproduced here)
    and any c > pi fall back to quadrature with a panel split at s = c.
    """
    _check_compact(variant, c)
    if variant == "spherical" or c > math.pi:
        quad = QuadratureSpec(split_points=(min(c, math.pi),) if c < math.pi else ())
        return d_schoenberg_from_psi(compact_support_psi(variant, c), 1, n_max, quad)
    beta_fn, beta0 = _BASE_BETA[variant]
    values = np.empty(n_max + 1)
    values[0] = c * beta0
    ells = np.arange(1, n_max + 1, dtype=float)
    values[1:] = c * beta_fn(c * ells)
    values = np.maximum(values, 0.0)
    tail = min(1.0, max(0.0, 1.0 - float(np.sum(values))))
    return DSchoenbergSeq(1, values, tail_bound=tail)


# ---------------------------------------------------------------------------
# Model specification (JSON-facing) and resolution
# ---------------------------------------------------------------------------

SCHEMA_VERSION = 1

PSI_FAMILIES = ("multiquadric", "matern", "askey", "c2_wendland", "c4_wendland", "spherical")
SPECTRUM_FAMILIES = ("spectral", "most_repulsive", "circular_matern")
ALL_FAMILIES = PSI_FAMILIES + SPECTRUM_FAMILIES


@dataclass(frozen=True)
class ModelSpec:
    """Parsed model description: family, parameters, intensity mode."""

    family: str
    params: dict
    dim: int
    mode: str = "kernel"  # "kernel": C0 = rho psi; "density": C~0 = chi psi
    rho: float | None = None
    chi: float | None = None
    trunc: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self):
        if self.family not in ALL_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; known: {ALL_FAMILIES}")
        if self.mode not in ("kernel", "density"):
            raise ValueError("mode must be 'kernel' or 'density'")
        if self.family in PSI_FAMILIES:
            if self.mode == "kernel" and self.rho is None:
                raise ValueError(f"{self.family} in kernel mode needs 'rho' (or 'eta')")
            if self.mode == "density" and (self.chi is None or self.chi <= 0):
                raise ValueError(f"{self.family} in density mode needs 'chi' > 0")

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "family": self.family,
            "params": dict(self.params),
            "dim": self.dim,
            "mode": self.mode,
        }
        if self.rho is not None:
            out["rho"] = self.rho
        if self.chi is not None:
            out["chi"] = self.chi
        out["trunc"] = {"max_level": self.trunc.max_level, "tail_tol": self.trunc.tail_tol}
        return out


def load_model(source) -> ModelSpec:
    """Build a ModelSpec from a dict, JSON text, or a path to a JSON file."""
    if isinstance(source, ModelSpec):
        return source
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    if data.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema {data.get('schema')}")
    trunc = TruncationPolicy(**data["trunc"]) if "trunc" in data else TruncationPolicy()
    rho = data.get("rho")
    if rho is None and "eta" in data:
        rho = float(data["eta"]) / surface_measure(int(data["dim"]))
    return ModelSpec(
        family=data["family"],
        params={k: float(v) for k, v in data.get("params", {}).items()},
        dim=int(data["dim"]),
        mode=data.get("mode", "kernel"),
        rho=None if rho is None else float(rho),
        chi=None if data.get("chi") is None else float(data["chi"]),
        trunc=trunc,
    )


@dataclass(frozen=True)
class ResolvedModel:
    """A model spec resolved to spectra ready for simulation/inference."""

    spec: ModelSpec
    kernel: MercerSpectrum
    correlation_beta: DSchoenbergSeq
    psi: object | None = None
    density: MercerSpectrum | None = None
    pcf_slope_override: float | None = None

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def eta(self) -> float:
        return self.kernel.eta


def _psi_family_beta(spec: ModelSpec):
    """(psi, beta_d, slope_override) for the closed-form psi families."""
    p = spec.params
    if spec.family == "multiquadric":
        coeffs = multiquadric_coeffs(p["tau"], p["delta"], spec.dim, spec.trunc)
        return coeffs.psi, coeffs.d_schoenberg, None
    if spec.family == "matern":
        nu, c = p["nu"], p["c"]
        beta_d = matern_d_schoenberg(nu, c, spec.dim, n_max=min(spec.trunc.max_level, 512))
        return matern_psi(nu, c), beta_d, matern_pcf_slope(nu, c)
    # compactly supported families are implemented on the circle
    if spec.dim != 1:
        raise ValueError(f"{spec.family} coefficients are implemented for d=1 only")
    c = p["c"]
    n_max = min(spec.trunc.max_level, 512)
    return compact_support_psi(spec.family, c), compact_support_coeffs(spec.family, c, n_max), None


def resolve(spec: ModelSpec) -> ResolvedModel:
    """Turn a model description into kernel/density spectra.

    Kernel mode checks the existence bound rho <= rho_max; density mode
    maps lambda~ = chi alpha back to kernel eigenvalues, which always
    exist.
    """
    sigma = surface_measure(spec.dim)
    if spec.family in PSI_FAMILIES:
        psi, beta_d, slope = _psi_family_beta(spec)
        if spec.mode == "kernel":
            eta = spec.rho * sigma
            kernel = mercer_from_d(beta_d, eta)
            density = None
            if np.all(kernel.values < 1.0):
                density = to_density_kernel(kernel)
            return ResolvedModel(spec, kernel, beta_d, psi, density, slope)
        alpha = correlation_mercer(beta_d)
        density = MercerSpectrum(
            spec.dim, "density-kernel", spec.chi * alpha.values, alpha.tail_bound
        )
        kernel = from_density_kernel(density)
        return ResolvedModel(
            spec, kernel, beta_from_kernel(kernel), psi, density, slope
        )

    if spec.family == "spectral":
        p = spec.params
        kernel = spectral_model_spectrum(p["alpha"], p["beta"], p["kappa"], spec.dim, spec.trunc)
    elif spec.family == "most_repulsive":
        kernel = most_repulsive_spectrum(spec.params["eta"], spec.dim)
    else:  # circular_matern
        if spec.dim != 1:
            raise ValueError("circular_matern is defined on S^1")
        p = spec.params
        kernel = circular_matern_spectrum(p["sigma"], p["nu"], p["alpha"], spec.trunc)
    density = to_density_kernel(kernel) if np.all(kernel.values < 1.0) else None
    return ResolvedModel(spec, kernel, beta_from_kernel(kernel), None, density, None)
