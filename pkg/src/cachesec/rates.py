"""Wiretap-code design for each delivery scheme.

Secrecy throughput is the secrecy rate times the decoding success
probability, subject to a cap epsilon on the secrecy outage probability.
The design runs in two stages: invert the SOP to the smallest redundancy
threshold beta_e that meets epsilon (redundancy only costs throughput, so
the constraint binds), then maximize

    psi(beta_s) = eta * (1 - COP(beta_t)) * log2(1 + beta_s),

over the secrecy threshold beta_s, where beta_t = beta_e + (1+beta_e) beta_s
and eta is 1 except for the relaying scheme, whose two hops halve the
effective rate. Each scheme's objective is unimodal, so a bracketed search
finds the unique stationary point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelParams, SchemeId
from .layout import NetworkLayout
from . import outage

SOP_INVERSION_TOL = 1e-8
DERIVATIVE_TOL = 1e-10
BRACKET_REL_TOL = 1e-12

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateDesign:
    """An optimized wiretap code for one scheme.

    beta_e_circ is the smallest redundancy threshold meeting the SOP cap,
    beta_s_star the throughput-maximizing secrecy threshold, psi_star the
    resulting secrecy throughput in bits/s/Hz.
    """

    scheme: SchemeId
    beta_e_circ: float
    beta_s_star: float
    psi_star: float
    epsilon: float | None = None

    @property
    def rate_secrecy(self) -> float:
        return math.log2(1.0 + self.beta_s_star)

    @property
    def rate_redundancy(self) -> float:
        return math.log2(1.0 + self.beta_e_circ)

    @property
    def rate_codeword(self) -> float:
        return self.rate_secrecy + self.rate_redundancy

    @property
    def beta_t_star(self) -> float:
        return self.beta_e_circ + (1.0 + self.beta_e_circ) * self.beta_s_star


def _sop_value(scheme: SchemeId, layout: NetworkLayout, params: ChannelParams,
               beta_e: float, bsr_exact: bool) -> float:
    if scheme is SchemeId.DBF:
        return outage.sop_dbf(layout, params, beta_e).value
    if scheme is SchemeId.FOT:
        return outage.sop_fot(layout, params, beta_e).value
    if scheme is SchemeId.BSR:
        if bsr_exact:
            return outage.sop_bsr_exact(layout, params, beta_e).value
        return outage.sop_bsr_approx(params, beta_e).value
    raise ValueError(f"unknown scheme {scheme!r}")


def invert_sop(scheme: SchemeId, layout: NetworkLayout, params: ChannelParams,
               epsilon: float, bsr_exact: bool = False,
               max_iter: int = 200) -> float:
    """Smallest redundancy threshold whose SOP equals epsilon.

    The SOP is continuous and strictly decreasing in beta_e with limits 1
    and 0, so a doubling bracket followed by bisection converges; iteration
    stops once |SOP - epsilon| <= 1e-8. The relaying scheme inverts the
    layout-free form by default (bsr_exact switches to the shared-field one).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if params.lambda_e == 0.0:
        return 0.0  # no eavesdroppers: no redundancy needed
    lo = 0.0
    hi = 1.0
    for _ in range(200):
        if _sop_value(scheme, layout, params, hi, bsr_exact) <= epsilon:
            break
        lo = hi
        hi *= 2.0
    else:
        raise RuntimeError("SOP bracket search did not terminate")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        value = _sop_value(scheme, layout, params, mid, bsr_exact)
        if abs(value - epsilon) <= SOP_INVERSION_TOL:
            return mid
        if value > epsilon:
            lo = mid
        else:
            hi = mid
    return mid


def bsr_approx_threshold(params: ChannelParams, epsilon: float) -> float:
    """Algebraic inverse of the layout-free relaying SOP at level epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    a = params.alpha
    coeff = math.pi * params.lambda_e * math.gamma(1.0 + 2.0 / a) \
        * (params.Pm ** (2.0 / a) + params.Ps ** (2.0 / a))
    return (coeff / -math.log1p(-epsilon)) ** (a / 2.0)


# ---------------------------------------------------------------------------
# per-scheme objectives
# ---------------------------------------------------------------------------

def _dbf_coeffs(layout, params, beta_e_circ):
    ra = layout.sbs_distances() ** params.alpha
    K = layout.K
    scale = (2.0 ** K / math.factorial(2 * K)) \
        * ((1.0 + beta_e_circ) / params.Ps) ** K * float(np.prod(ra))
    shift = beta_e_circ / (1.0 + beta_e_circ)
    return scale, shift


def _fot_coeffs(layout, params, beta_e_circ):
    ra_sum = float(np.sum(layout.sbs_distances() ** params.alpha))
    gain = math.exp(-beta_e_circ * ra_sum / (layout.K * params.Ps))
    decay = (1.0 + beta_e_circ) * ra_sum / (layout.K * params.Ps)
    return gain, decay


def _bsr_coeffs(layout, params, beta_e_circ):
    ra = layout.sbs_distances() ** params.alpha
    gains = np.exp(-beta_e_circ * ra / params.Ps)
    decays = (1.0 + beta_e_circ) * ra / params.Ps
    return gains, decays


def secrecy_throughput_curve(scheme: SchemeId, layout: NetworkLayout,
                             params: ChannelParams, beta_e_circ: float,
                             beta_s):
    """Throughput at secrecy threshold(s) beta_s for a fixed redundancy.

    This is exactly the objective each optimizer maximizes: the beamforming
    scheme uses its high-power COP form (clamped into [0, 1]), the others
    their closed-form COPs. Accepts a scalar or an array of beta_s.
    """
    b = np.asarray(beta_s, dtype=float)
    rate = np.log2(1.0 + b)
    if scheme is SchemeId.DBF:
        scale, shift = _dbf_coeffs(layout, params, beta_e_circ)
        success = 1.0 - np.minimum(scale * (b + shift) ** layout.K, 1.0)
        psi = success * rate
    elif scheme is SchemeId.FOT:
        gain, decay = _fot_coeffs(layout, params, beta_e_circ)
        psi = gain * np.exp(-decay * b) * rate
    elif scheme is SchemeId.BSR:
        gains, decays = _bsr_coeffs(layout, params, beta_e_circ)
        survive = np.prod(1.0 - gains * np.exp(-np.outer(b, decays)),
                          axis=-1).reshape(b.shape)
        psi = 0.5 * (1.0 - survive) * rate
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return float(psi) if np.ndim(beta_s) == 0 else psi


def _expand_bracket(deriv, hi0: float = 1.0) -> float:
    """Double hi until the objective stops rising there.

    A derivative of exactly 0.0 also ends the search: past the peak the
    relaying objective can underflow to a flat zero, which still brackets
    the maximum from above.
    """
    hi = hi0
    for _ in range(200):
        if deriv(hi) <= 0.0:
            return hi
        hi *= 2.0
    raise RuntimeError("derivative never turned negative")


def opt_bs_dbf(layout: NetworkLayout, params: ChannelParams,
               beta_e_circ: float) -> RateDesign:
    """Optimal secrecy threshold for distributed beamforming.

    The objective (1 - scale*(b + shift)^K) log2(1+b) is concave, so the
    unique zero of its derivative is found by Newton steps safeguarded by
    the enclosing bisection bracket. If the COP already reaches 1 at zero
    secrecy rate the design is infeasible and (0, 0) is returned.
    """
    scale, shift = _dbf_coeffs(layout, params, beta_e_circ)
    K = layout.K
    if scale * shift ** K >= 1.0:
        return RateDesign(SchemeId.DBF, beta_e_circ, 0.0, 0.0)

    def deriv(b):
        p = (b + shift) ** (K - 1)
        cop = scale * p * (b + shift)
        return (1.0 - cop) / ((1.0 + b) * _LN2) \
            - scale * K * p * math.log2(1.0 + b)

    def deriv2(b):
        p1 = (b + shift) ** (K - 1)
        cop = scale * p1 * (b + shift)
        first = (-scale * K * p1 * (1.0 + b) - (1.0 - cop)) \
            / ((1.0 + b) ** 2 * _LN2)
        cross = scale * K * p1 / ((1.0 + b) * _LN2)
        if K == 1:
            curve = 0.0
        else:
            curve = scale * K * (K - 1) * (b + shift) ** (K - 2) \
                * math.log2(1.0 + b)
        return first - cross - curve

    lo = 0.0
    hi = _expand_bracket(deriv)
    b = 0.5 * (lo + hi)
    for _ in range(200):
        f = deriv(b)
        if abs(f) < DERIVATIVE_TOL:
            break
        if f > 0.0:
            lo = b
        else:
            hi = b
        if hi - lo < BRACKET_REL_TOL * (1.0 + b):
            break
        d2 = deriv2(b)
        step = b - f / d2 if d2 != 0.0 else math.inf
        b = step if lo < step < hi else 0.5 * (lo + hi)
    psi = max(secrecy_throughput_curve(SchemeId.DBF, layout, params,
                                       beta_e_circ, b), 0.0)
    return RateDesign(SchemeId.DBF, beta_e_circ, b, psi)


def opt_bs_fot(layout: NetworkLayout, params: ChannelParams,
               beta_e_circ: float) -> RateDesign:
    """Optimal secrecy threshold for the orthogonal-partition scheme.

    The objective gain * exp(-decay*b) * log2(1+b) is quasi-concave; its
    stationary point solves decay*ln(1+b) = 1/(1+b), a strictly increasing
    equation handled by bisection.
    """
    gain, decay = _fot_coeffs(layout, params, beta_e_circ)

    def resid(b):
        return decay * math.log1p(b) * (1.0 + b) - 1.0

    lo = 0.0
    hi = 1.0
    while resid(hi) < 0.0:
        lo = hi
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if resid(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14 * (1.0 + lo):
            break
    b = 0.5 * (lo + hi)
    psi = gain * math.exp(-decay * b) * math.log2(1.0 + b)
    return RateDesign(SchemeId.FOT, beta_e_circ, b, psi)


def opt_bs_bsr(layout: NetworkLayout, params: ChannelParams,
               beta_e_circ: float) -> RateDesign:
    """Optimal secrecy threshold for best-SBS relaying.

    The derivative of 0.5*(1 - prod_k(1 - g_k e^{-d_k b})) log2(1+b) is
    positive then negative, so its single sign change is bracketed by
    doubling and pinned down by bisection. With one SBS this collapses to
    the orthogonal-partition optimizer at half throughput.
    """
    gains, decays = _bsr_coeffs(layout, params, beta_e_circ)
    K = layout.K
    if 1.0 - float(np.prod(1.0 - gains)) <= 0.0:
        # the required redundancy is so large that decoding never succeeds
        # at any positive secrecy rate (the success probability underflows)
        return RateDesign(SchemeId.BSR, beta_e_circ, 0.0, 0.0)

    def deriv(b):
        t = gains * np.exp(-decays * b)
        survive_terms = 1.0 - t
        q = float(np.prod(survive_terms))
        dq = 0.0
        for k in range(K):
            rest = np.prod(np.delete(survive_terms, k)) if K > 1 else 1.0
            dq += float(decays[k] * t[k] * rest)
        return 0.5 * ((1.0 - q) / ((1.0 + b) * _LN2)
                      - dq * math.log2(1.0 + b))

    lo = 0.0
    hi = _expand_bracket(deriv)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if deriv(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BRACKET_REL_TOL * (1.0 + lo):
            break
    b = 0.5 * (lo + hi)
    psi = secrecy_throughput_curve(SchemeId.BSR, layout, params, beta_e_circ, b)
    return RateDesign(SchemeId.BSR, beta_e_circ, b, float(psi))


def scheme_throughput(scheme: SchemeId, layout: NetworkLayout,
                      params: ChannelParams, epsilon: float,
                      bsr_exact_sop: bool = False) -> RateDesign:
    """Full two-stage design: SOP inversion then throughput maximization.

    COP models feeding the optimizers: the beamforming scheme uses its
    high-power form, the other two their exact closed forms. The relaying
    SOP constraint uses the layout-free form unless bsr_exact_sop is set.
    """
    beta_e_circ = invert_sop(scheme, layout, params, epsilon,
                             bsr_exact=bsr_exact_sop)
    if scheme is SchemeId.DBF:
        design = opt_bs_dbf(layout, params, beta_e_circ)
    elif scheme is SchemeId.FOT:
        design = opt_bs_fot(layout, params, beta_e_circ)
    elif scheme is SchemeId.BSR:
        design = opt_bs_bsr(layout, params, beta_e_circ)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return replace(design, epsilon=epsilon)
