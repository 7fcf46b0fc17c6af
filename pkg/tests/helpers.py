"""Shared fixtures and comparison utilities for the test suite."""

import math

from cachesec import ChannelParams, build_line_layout


def dbw(value: float) -> float:
    """dBw to linear power."""
    return 10.0 ** (value / 10.0)


def standard_layout(K: int):
    """The default experiment geometry: user, nearest SBS and MBS on a
    vertical line, SBSs spaced 0.5 apart horizontally, MBS 2 beyond SBS 1."""
    return build_line_layout(r_s1_o=1.0, r_s=0.5, K=K, r_b_s1=2.0)


def standard_params(Ps_dBw: float = 10.0, Pm_dBw: float = 0.0,
                    lambda_e: float = 0.1, alpha: float = 4.0) -> ChannelParams:
    return ChannelParams(alpha=alpha, Ps=dbw(Ps_dBw), Pm=dbw(Pm_dBw),
                         lambda_e=lambda_e)


def within_3_sigma(analytic: float, mc_value: float, mc_stderr: float,
                   trials: int) -> bool:
    """3-sigma agreement using the larger of the empirical standard error
    and the exact binomial standard error implied by the analytic value
    (the empirical one collapses to zero when no failures are observed)."""
    sigma = max(mc_stderr,
                math.sqrt(max(analytic * (1.0 - analytic), 0.0) / trials))
    return abs(analytic - mc_value) <= 3.0 * sigma + 1e-12
