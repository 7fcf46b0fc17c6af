"""Deterministic evaluators for connection and secrecy outage probabilities.

Connection outage (COP): the user's channel capacity falls below the
codeword rate, so decoding fails. Secrecy outage (SOP): some eavesdropper's
capacity exceeds the rate redundancy, so perfect secrecy is compromised.
Each of the three delivery schemes gets its own COP and SOP evaluator;
closed forms are used where they exist, otherwise fixed-budget quadrature
whose determinism makes every result reproducible.

Eavesdroppers form a Poisson field, so every SOP has the shape
1 - exp(-lambda_e * I) where I integrates the per-position breach
probability over the plane. The integrals are truncated at a radius beyond
which the integrand is below 1e-12 and evaluated on a tensorized
Gauss-Legendre grid, with one radial refinement to certify convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from .channel import ChannelParams, SchemeId, dist_pow_neg
from .layout import NetworkLayout

METHOD_EXACT = "analytic-exact"
METHOD_ASYMPTOTIC = "analytic-asymptotic"
METHOD_APPROX = "analytic-approx"
METHOD_MC = "monte-carlo"

# Quasi-random budget for the beamforming COP integral (2**18 points).
SIMPLEX_LOG2_BUDGET = 18
# Gauss-Legendre grid for the secrecy integrals.
RADIAL_NODES = 256
ANGULAR_NODES = 128
# The integrand is below exp(-TAIL_LOG) = 1e-12 beyond the cut radius.
TAIL_LOG = math.log(1e12)
QUAD_CERT_TOL = 1e-6


@dataclass(frozen=True)
class WiretapCode:
    """Rates of a wiretap code and their linear SNR thresholds.

    The codeword rate splits into the secrecy rate plus the redundancy
    sacrificed to confuse eavesdroppers: Rt = Rs + Re, and each threshold is
    beta = 2**R - 1, which chains into beta_t = beta_e + (1 + beta_e) * beta_s.
    """

    Rt: float
    Rs: float
    Re: float
    beta_t: float
    beta_s: float
    beta_e: float

    def __post_init__(self):
        if min(self.Rt, self.Rs, self.Re) < 0.0:
            raise ValueError("rates must be nonnegative")
        checks = (
            (self.Rt, self.Rs + self.Re),
            (self.beta_t, 2.0 ** self.Rt - 1.0),
            (self.beta_s, 2.0 ** self.Rs - 1.0),
            (self.beta_e, 2.0 ** self.Re - 1.0),
            (self.beta_t, self.beta_e + (1.0 + self.beta_e) * self.beta_s),
        )
        for got, want in checks:
            if abs(got - want) > 1e-9 * (1.0 + abs(want)):
                raise ValueError("inconsistent wiretap code fields")

    @classmethod
    def from_rates(cls, Rs: float, Re: float) -> "WiretapCode":
        Rt = Rs + Re
        return cls(Rt=Rt, Rs=Rs, Re=Re, beta_t=2.0 ** Rt - 1.0,
                   beta_s=2.0 ** Rs - 1.0, beta_e=2.0 ** Re - 1.0)

    @classmethod
    def from_thresholds(cls, beta_s: float, beta_e: float) -> "WiretapCode":
        if beta_s < 0.0 or beta_e < 0.0:
            raise ValueError("thresholds must be nonnegative")
        Rs = math.log2(1.0 + beta_s)
        Re = math.log2(1.0 + beta_e)
        return cls(Rt=Rs + Re, Rs=Rs, Re=Re,
                   beta_t=beta_e + (1.0 + beta_e) * beta_s,
                   beta_s=beta_s, beta_e=beta_e)


@dataclass(frozen=True)
class OutageEstimate:
    """A COP or SOP value together with how it was obtained.

    std_error is zero for deterministic methods. flag marks special
    conditions: "clamped" (asymptote exceeded 1 and was clipped),
    "divergent" (secrecy integral diverges, probability pinned at 1) or
    "quadrature-unconverged" (radial refinement moved the value by more
    than the certification tolerance).
    """

    value: float
    method: str
    std_error: float = 0.0
    flag: str | None = None

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"probability out of range: {self.value}")
        if self.std_error < 0.0:
            raise ValueError("std_error must be nonnegative")


# ---------------------------------------------------------------------------
# connection outage
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _simplex_points(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Low-discrepancy points on the simplex {y >= 0, sum(y) <= 1}.

    Sobol points in [0,1]^K are sorted per row and differenced; the spacings
    of K sorted uniforms are uniform on the simplex. Returns the squared
    coordinates and the per-point product prod_k y_k.
    """
    u = qmc.Sobol(d=K, scramble=False).random_base2(SIMPLEX_LOG2_BUDGET)
    u.sort(axis=1)
    y = np.diff(u, axis=1, prepend=0.0)
    return y * y, y.prod(axis=1)


@lru_cache(maxsize=4)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _cop_dbf_two_sbs(c1: float, c2: float) -> float:
    # reduction of the 2-D simplex integral to one smooth 1-D integral:
    # value = (1 - e^{-c1}) - 2 c1 int_0^1 y e^{-c1 y^2 - c2 (1-y)^2} dy
    x, w = _leggauss(200)
    y = 0.5 * (x + 1.0)
    integral = 0.5 * float(np.sum(w * y * np.exp(-c1 * y * y - c2 * (1.0 - y) ** 2)))
    return -math.expm1(-c1) - 2.0 * c1 * integral


def cop_dbf_exact(layout: NetworkLayout, params: ChannelParams,
                  beta_t: float) -> OutageEstimate:
    """Connection outage of the distributed beamforming scheme.

    The decoding SNR is Ps times the squared sum of K independent Rayleigh
    amplitudes weighted by r_k^(-alpha/2). After normalizing the amplitudes,
    the outage probability becomes

        (2 beta_t / Ps)^K * int_{y >= 0, sum y < 1}
            exp(-(beta_t/Ps) sum_k r_k^alpha y_k^2) prod_k (r_k^alpha y_k) dy.

    K = 1 collapses to the exponential tail and K = 2 to a 1-D quadrature;
    larger K uses a fixed quasi-random budget, so the value is deterministic.
    """
    if beta_t < 0.0:
        raise ValueError("beta_t must be nonnegative")
    if beta_t == 0.0:
        return OutageEstimate(0.0, METHOD_EXACT)
    ra = layout.sbs_distances() ** params.alpha
    c = beta_t / params.Ps
    K = layout.K
    if K == 1:
        value = -math.expm1(-c * float(ra[0]))
    elif K == 2:
        value = _cop_dbf_two_sbs(c * float(ra[0]), c * float(ra[1]))
    else:
        y_sq, y_prod = _simplex_points(K)
        mean = float(np.mean(y_prod * np.exp(-c * (y_sq @ ra))))
        value = (2.0 * c) ** K * float(np.prod(ra)) * mean / math.factorial(K)
    return OutageEstimate(min(max(value, 0.0), 1.0), METHOD_EXACT)


def cop_dbf_asymptotic(layout: NetworkLayout, params: ChannelParams,
                       beta_t: float) -> OutageEstimate:
    """High-power beamforming COP: (2^K / (2K)!) (beta_t/Ps)^K prod r_k^alpha.

    Only an asymptote; at low power it can exceed 1 and is then clamped
    (and flagged) so that downstream rate optimizers always receive a valid
    probability.
    """
    if beta_t < 0.0:
        raise ValueError("beta_t must be nonnegative")
    K = layout.K
    ra = layout.sbs_distances() ** params.alpha
    value = (2.0 ** K / math.factorial(2 * K)) * (beta_t / params.Ps) ** K \
        * float(np.prod(ra))
    if value > 1.0:
        return OutageEstimate(1.0, METHOD_ASYMPTOTIC, flag="clamped")
    return OutageEstimate(value, METHOD_ASYMPTOTIC)


def cop_fot(layout: NetworkLayout, params: ChannelParams,
            beta_t: float) -> OutageEstimate:
    """Connection outage of the orthogonal-partition scheme.

    All K partitions must decode, each on 1/K of the band, giving the closed
    form 1 - exp(-(beta_t / (K Ps)) sum_k r_k^alpha).
    """
    if beta_t < 0.0:
        raise ValueError("beta_t must be nonnegative")
    ra_sum = float(np.sum(layout.sbs_distances() ** params.alpha))
    value = -math.expm1(-beta_t * ra_sum / (layout.K * params.Ps))
    return OutageEstimate(min(value, 1.0), METHOD_EXACT)


def cop_bsr(layout: NetworkLayout, params: ChannelParams,
            beta_t: float) -> OutageEstimate:
    """Connection outage of best-SBS relaying.

    The strongest of K independent branches must fail, giving
    prod_k (1 - exp(-beta_t r_k^alpha / Ps)).
    """
    if beta_t < 0.0:
        raise ValueError("beta_t must be nonnegative")
    ra = layout.sbs_distances() ** params.alpha
    value = float(np.prod(-np.expm1(-beta_t * ra / params.Ps)))
    return OutageEstimate(min(value, 1.0), METHOD_EXACT)


def cop(scheme: SchemeId, layout: NetworkLayout, params: ChannelParams,
        beta_t: float) -> OutageEstimate:
    """Scheme-dispatched exact COP."""
    if scheme is SchemeId.DBF:
        return cop_dbf_exact(layout, params, beta_t)
    if scheme is SchemeId.FOT:
        return cop_fot(layout, params, beta_t)
    if scheme is SchemeId.BSR:
        return cop_bsr(layout, params, beta_t)
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# secrecy outage
# ---------------------------------------------------------------------------

def trunc_radius(d_max: float, power: float, beta_e: float, alpha: float) -> float:
    """Radius beyond which a breach-probability integrand is below 1e-12.

    d_max is the largest transmitter-to-origin distance and `power` the
    largest effective transmit power feeding the integrand (K*Ps for the
    schemes where K SBSs radiate, max(Pm, Ps) for the two relaying hops).
    """
    return d_max + (TAIL_LOG * power / beta_e) ** (1.0 / alpha)


def _disc_integral(g, rmax: float, n_radial: int, n_angular: int) -> float:
    """Integrate g(x, y) * r over the disc of radius rmax at the origin."""
    xr, wr = _leggauss(n_radial)
    xt, wt = _leggauss(n_angular)
    r = 0.5 * rmax * (xr + 1.0)
    theta = math.pi * (xt + 1.0)
    px = r[:, None] * np.cos(theta)[None, :]
    py = r[:, None] * np.sin(theta)[None, :]
    per_radius = g(px, py) @ (math.pi * wt)
    return float(np.sum(per_radius * r * wr)) * 0.5 * rmax


def _pgfl_sop(g, rmax: float, lambda_e: float, method: str,
              nodes: tuple[int, int]) -> OutageEstimate:
    """SOP = 1 - exp(-lambda_e * I) with I certified by radial doubling."""
    n_r, n_t = nodes
    coarse = -math.expm1(-lambda_e * _disc_integral(g, rmax, n_r, n_t))
    fine = -math.expm1(-lambda_e * _disc_integral(g, rmax, 2 * n_r, n_t))
    flag = None if abs(fine - coarse) < QUAD_CERT_TOL else "quadrature-unconverged"
    return OutageEstimate(min(max(fine, 0.0), 1.0), method, flag=flag)


def _sop_guards(params: ChannelParams, beta_e: float,
                method: str) -> OutageEstimate | None:
    if beta_e < 0.0:
        raise ValueError("beta_e must be nonnegative")
    if beta_e == 0.0:
        # zero redundancy: any eavesdropper anywhere breaches, the secrecy
        # integral diverges and the outage probability is pinned at 1
        return OutageEstimate(1.0, method, flag="divergent")
    if params.lambda_e == 0.0:
        return OutageEstimate(0.0, method)
    return None


def sop_dbf(layout: NetworkLayout, params: ChannelParams, beta_e: float,
            nodes: tuple[int, int] = (RADIAL_NODES, ANGULAR_NODES)) -> OutageEstimate:
    """Secrecy outage of distributed beamforming.

    An eavesdropper at position e sees an exponential SNR of mean
    Ps * sum_k r_{k,e}^(-alpha) (the beam phases are mismatched there), so
    its breach probability is exp(-(beta_e/Ps) / sum_k r_{k,e}^(-alpha)).
    """
    guard = _sop_guards(params, beta_e, METHOD_EXACT)
    if guard is not None:
        return guard
    sx, sy = layout.sbs_xy()
    r = layout.sbs_distances()
    rmax = trunc_radius(float(r.max()), layout.K * params.Ps, beta_e, params.alpha)

    def g(px, py):
        s = np.zeros_like(px)
        for k in range(layout.K):
            d_sq = (px - sx[k]) ** 2 + (py - sy[k]) ** 2
            s += dist_pow_neg(d_sq, params.alpha)
        return np.exp(-(beta_e / params.Ps) / s)

    return _pgfl_sop(g, rmax, params.lambda_e, METHOD_EXACT, nodes)


def sop_fot(layout: NetworkLayout, params: ChannelParams, beta_e: float,
            nodes: tuple[int, int] = (RADIAL_NODES, ANGULAR_NODES)) -> OutageEstimate:
    """Secrecy outage of the orthogonal-partition scheme.

    Intercepting any single partition breaks secrecy, so the per-position
    breach probability is 1 - prod_k (1 - exp(-beta_e r_{k,e}^alpha / (K Ps))).
    """
    guard = _sop_guards(params, beta_e, METHOD_EXACT)
    if guard is not None:
        return guard
    sx, sy = layout.sbs_xy()
    r = layout.sbs_distances()
    rmax = trunc_radius(float(r.max()), layout.K * params.Ps, beta_e, params.alpha)
    scale = beta_e / (layout.K * params.Ps)

    def g(px, py):
        survive = np.ones_like(px)
        for k in range(layout.K):
            d_sq = (px - sx[k]) ** 2 + (py - sy[k]) ** 2
            survive *= -np.expm1(-scale / dist_pow_neg(d_sq, params.alpha))
        return 1.0 - survive

    return _pgfl_sop(g, rmax, params.lambda_e, METHOD_EXACT, nodes)


def sop_bsr_exact(layout: NetworkLayout, params: ChannelParams, beta_e: float,
                  nodes: tuple[int, int] = (RADIAL_NODES, ANGULAR_NODES)) -> OutageEstimate:
    """Secrecy outage of best-SBS relaying, same eavesdroppers on both hops.

    A position breaches if it decodes either the MBS backhaul hop or the
    serving-SBS hop. The serving SBS is fixed to the nearest one here: the
    true selection depends on fading, but the integrand only uses the SBS
    position and the nearest SBS is the modal choice. The Monte Carlo module
    keeps the fading-dependent selection so the gap can be measured.
    """
    guard = _sop_guards(params, beta_e, METHOD_EXACT)
    if guard is not None:
        return guard
    serving = layout.sbs[0]
    d_max = max(layout.mbs.r, serving.r)
    rmax = trunc_radius(d_max, max(params.Pm, params.Ps), beta_e, params.alpha)
    mx, my = layout.mbs.x, layout.mbs.y
    kx, ky = serving.x, serving.y

    def g(px, py):
        db_sq = (px - mx) ** 2 + (py - my) ** 2
        ds_sq = (px - kx) ** 2 + (py - ky) ** 2
        if params.Pm > 0.0:
            hop1 = np.exp(-(beta_e / params.Pm) / dist_pow_neg(db_sq, params.alpha))
        else:
            hop1 = np.zeros_like(px)
        hop2 = np.exp(-(beta_e / params.Ps) / dist_pow_neg(ds_sq, params.alpha))
        return hop1 + hop2 - hop1 * hop2

    return _pgfl_sop(g, rmax, params.lambda_e, METHOD_EXACT, nodes)


def sop_bsr_approx(params: ChannelParams, beta_e: float) -> OutageEstimate:
    """Layout-free secrecy outage of best-SBS relaying.

    Treating the eavesdropper positions in the two hops as independent
    Poisson fields (they move between hops) gives the closed form
    1 - exp(-pi lambda_e Gamma(1 + 2/alpha) (Pm^(2/alpha) + Ps^(2/alpha))
    beta_e^(-2/alpha)).
    """
    guard = _sop_guards(params, beta_e, METHOD_APPROX)
    if guard is not None:
        return guard
    a = params.alpha
    exponent = math.pi * params.lambda_e * math.gamma(1.0 + 2.0 / a) \
        * (params.Pm ** (2.0 / a) + params.Ps ** (2.0 / a)) * beta_e ** (-2.0 / a)
    return OutageEstimate(-math.expm1(-exponent), METHOD_APPROX)


def sop(scheme: SchemeId, layout: NetworkLayout, params: ChannelParams,
        beta_e: float, bsr_exact: bool = True) -> OutageEstimate:
    """Scheme-dispatched SOP; bsr_exact selects the shared-eavesdropper form."""
    if scheme is SchemeId.DBF:
        return sop_dbf(layout, params, beta_e)
    if scheme is SchemeId.FOT:
        return sop_fot(layout, params, beta_e)
    if scheme is SchemeId.BSR:
        if bsr_exact:
            return sop_bsr_exact(layout, params, beta_e)
        return sop_bsr_approx(params, beta_e)
    raise ValueError(f"unknown scheme {scheme!r}")
