"""Monte Carlo estimators for every outage probability.

These are the independent cross-checks for the analytic module. Trials are
split into fixed-size chunks; each chunk owns a child seed spawned from the
run seed and the chunk counts are summed in chunk order, so an estimate is
bit-identical across runs and across worker counts.

For secrecy estimates the eavesdropper field is sampled on a disc that at
least covers the analytic truncation radius. Points inside that base radius
are always drawn before any extra annulus points, so enlarging the disc
never perturbs the inner realization; widening the window can only add
(negligible) tail eavesdroppers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, SchemeId, dist_pow_neg
from .layout import NetworkLayout
from .outage import METHOD_MC, OutageEstimate, trunc_radius

COP_CHUNK = 1 << 16
SOP_CHUNK = 1 << 11


@dataclass(frozen=True)
class McSettings:
    """Budget and reproducibility knobs for one Monte Carlo estimate.

    eve_disc_radius of None means "use the analytic truncation radius".
    independent_hops redraws the eavesdropper field between the two relaying
    hops (matching the layout-free closed form). bsr_serving picks how the
    relaying SBS is chosen: "fading" follows the actual channel draw,
    "nearest" pins it to the SBS closest to the user like the analytic
    evaluator does.
    """

    trials: int
    seed: int
    eve_disc_radius: float | None = None
    independent_hops: bool = False
    bsr_serving: str = "fading"

    def __post_init__(self):
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.eve_disc_radius is not None and self.eve_disc_radius <= 0.0:
            raise ValueError("eve_disc_radius must be positive")
        if self.bsr_serving not in ("fading", "nearest"):
            raise ValueError("bsr_serving must be 'fading' or 'nearest'")


def _chunk_plan(trials: int, chunk: int) -> list[int]:
    sizes = [chunk] * (trials // chunk)
    if trials % chunk:
        sizes.append(trials % chunk)
    return sizes


def _run_chunks(worker, sizes, seed: int, threads: int) -> int:
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    if threads <= 1:
        counts = [worker(n, s) for n, s in zip(sizes, seqs)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(worker, sizes, seqs))
    return int(sum(counts))


def _binomial_estimate(failures: int, trials: int) -> OutageEstimate:
    p = failures / trials
    return OutageEstimate(p, METHOD_MC, math.sqrt(p * (1.0 - p) / trials))


def mc_cop(scheme: SchemeId, layout: NetworkLayout, params: ChannelParams,
           beta_t: float, settings: McSettings, threads: int = 1) -> OutageEstimate:
    """Estimate a connection outage probability by direct fading simulation.

    Counts the fraction of draws where the scheme's decoding condition
    fails: the beamformed sum SNR, every orthogonal partition, or the best
    relay branch falls below beta_t.
    """
    if beta_t < 0.0:
        raise ValueError("beta_t must be nonnegative")
    r = layout.sbs_distances()
    K = layout.K
    r_neg = r ** -params.alpha
    r_neg_half = r ** (-params.alpha / 2.0)

    def worker(n: int, seq) -> int:
        rng = np.random.default_rng(seq)
        g = rng.standard_exponential((n, K))
        if scheme is SchemeId.DBF:
            amp = np.sqrt(g) @ r_neg_half
            fail = params.Ps * amp * amp < beta_t
        elif scheme is SchemeId.FOT:
            fail = (K * params.Ps * g * r_neg < beta_t).any(axis=1)
        elif scheme is SchemeId.BSR:
            fail = (params.Ps * g * r_neg).max(axis=1) < beta_t
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        return int(fail.sum())

    failures = _run_chunks(worker, _chunk_plan(settings.trials, COP_CHUNK),
                           settings.seed, threads)
    return _binomial_estimate(failures, settings.trials)


def _mc_disc_radii(scheme: SchemeId, layout: NetworkLayout,
                   params: ChannelParams, beta_e: float,
                   settings: McSettings) -> tuple[float, float]:
    r = layout.sbs_distances()
    if scheme is SchemeId.BSR:
        base = trunc_radius(max(layout.mbs.r, float(r.max())),
                            max(params.Pm, params.Ps), beta_e, params.alpha)
    else:
        base = trunc_radius(float(r.max()), layout.K * params.Ps, beta_e,
                            params.alpha)
    outer = settings.eve_disc_radius if settings.eve_disc_radius is not None else base
    if outer < base * (1.0 - 1e-12):
        raise ValueError(
            f"eve_disc_radius {outer} is below the truncation radius {base}")
    return base, max(outer, base)


def _annulus_points(rng, lam, n_real, r_lo, r_hi):
    """Poisson points on the annulus [r_lo, r_hi): coordinates, counts, index."""
    area = math.pi * (r_hi * r_hi - r_lo * r_lo)
    counts = rng.poisson(lam * area, n_real)
    total = int(counts.sum())
    rad = np.sqrt(r_lo * r_lo + (r_hi * r_hi - r_lo * r_lo) * rng.random(total))
    ang = 2.0 * math.pi * rng.random(total)
    seg = np.repeat(np.arange(n_real), counts)
    return rad * np.cos(ang), rad * np.sin(ang), counts, seg


def _any_per_realization(violated, seg, n_real):
    if violated.size == 0:
        return np.zeros(n_real, dtype=bool)
    return np.bincount(seg, weights=violated, minlength=n_real) > 0.0


def mc_sop(scheme: SchemeId, layout: NetworkLayout, params: ChannelParams,
           beta_e: float, settings: McSettings, threads: int = 1) -> OutageEstimate:
    """Estimate a secrecy outage probability over Poisson eavesdropper fields.

    A realization counts as an outage when any sampled eavesdropper breaches
    the scheme's secrecy condition: its (exponentially faded) SNR on any
    partition, or on either relaying hop, exceeds beta_e. With
    independent_hops the two relaying hops see two independent fields.
    """
    if beta_e <= 0.0:
        raise ValueError("beta_e must be positive")
    lam = params.lambda_e
    r_base, r_outer = _mc_disc_radii(scheme, layout, params, beta_e, settings)
    sx, sy = layout.sbs_xy()
    K = layout.K
    alpha = params.alpha
    r_neg = layout.sbs_distances() ** -alpha
    mx, my = layout.mbs.x, layout.mbs.y

    def eve_distances_sq(px, py):
        return (px[:, None] - sx[None, :]) ** 2 + (py[:, None] - sy[None, :]) ** 2

    def breach(rng, px, py, kstar_rep):
        """Per-point breach indicator(s), consuming rng draws in fixed order."""
        n_pts = px.size
        if scheme is SchemeId.DBF:
            mean = params.Ps * dist_pow_neg(eve_distances_sq(px, py), alpha).sum(axis=1)
            return mean * rng.standard_exponential(n_pts) > beta_e
        if scheme is SchemeId.FOT:
            means = K * params.Ps * dist_pow_neg(eve_distances_sq(px, py), alpha)
            return (means * rng.standard_exponential((n_pts, K)) > beta_e).any(axis=1)
        # relaying: hop 1 from the MBS, hop 2 from the serving SBS
        db_sq = (px - mx) ** 2 + (py - my) ** 2
        hop1 = params.Pm * dist_pow_neg(db_sq, alpha) \
            * rng.standard_exponential(n_pts) > beta_e
        d_sq = eve_distances_sq(px, py)
        ds_sq = d_sq[np.arange(n_pts), kstar_rep]
        hop2 = params.Ps * dist_pow_neg(ds_sq, alpha) \
            * rng.standard_exponential(n_pts) > beta_e
        return hop1, hop2

    two_fields = scheme is SchemeId.BSR and settings.independent_hops

    def field_outage(rng, n, kstar, r_lo, r_hi):
        """Outage indicators contributed by one annulus of the field."""
        px, py, counts, seg = _annulus_points(rng, lam, n, r_lo, r_hi)
        if scheme is not SchemeId.BSR:
            return _any_per_realization(breach(rng, px, py, None), seg, n)
        hop1, hop2 = breach(rng, px, py, np.repeat(kstar, counts))
        if not two_fields:
            return _any_per_realization(hop1 | hop2, seg, n)
        out = _any_per_realization(hop1, seg, n)
        px, py, counts, seg = _annulus_points(rng, lam, n, r_lo, r_hi)
        _, hop2b = breach(rng, px, py, np.repeat(kstar, counts))
        return out | _any_per_realization(hop2b, seg, n)

    def worker(n: int, seq) -> int:
        rng = np.random.default_rng(seq)
        kstar = None
        if scheme is SchemeId.BSR:
            if settings.bsr_serving == "fading":
                kstar = np.argmax(rng.standard_exponential((n, K)) * r_neg, axis=1)
            else:
                kstar = np.zeros(n, dtype=int)
        # all base-disc draws happen before any annulus draw, so the inner
        # realization is independent of the chosen window radius
        out = field_outage(rng, n, kstar, 0.0, r_base)
        if r_outer > r_base:
            out = out | field_outage(rng, n, kstar, r_base, r_outer)
        return int(out.sum())

    failures = _run_chunks(worker, _chunk_plan(settings.trials, SOP_CHUNK),
                           settings.seed, threads)
    return _binomial_estimate(failures, settings.trials)
