"""Experiment runner.

Reproduces the model's standard experiments as CSV data files: outage
sweeps over SBS power, secrecy-throughput curves, cache-allocation sweeps,
and a validation mode pitting every analytic expression against its Monte
Carlo estimate.

Verbs:
    cop-sweep    connection outage vs SBS power for all three schemes
    sop-sweep    secrecy outage vs SBS power (both relaying SOP forms)
    throughput   psi(Rs) curves, or optimized psi*(Ps) when sweeping power
    caching      allocation sweep over N or Ps: hybrid vs all-replicated
                 vs all-partitioned, closed-form vs exhaustive optimum
    validate     analytic-vs-Monte-Carlo agreement table with 3-sigma flags

A scenario file is a flat "key = value" text file (or a JSON object with
the same keys); unknown keys are errors, not warnings, because a silently
ignored setting would invalidate any comparison. Powers are written in dBw
and converted to linear exactly once, on load. Every output embeds the
scenario, tool version and seed, and reruns with the same seed are
byte-identical.

Exit codes: 0 success, 2 configuration error, 3 numerical infeasibility.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import __version__, caching, montecarlo, outage, rates
from .channel import ChannelParams, SchemeId
from .layout import NetworkLayout, build_line_layout


class ConfigError(Exception):
    """Malformed scenario file or invalid option combination."""


@dataclass(frozen=True)
class Scenario:
    """Every knob of an experiment, as read from a scenario file."""

    # geometry
    r_s1_o: float = 1.0
    r_s: float = 0.5
    K: int = 3
    r_b_s1: float = 2.0
    # channel (powers in dBw)
    alpha: float = 4.0
    Ps_dBw: float = 10.0
    Pm_dBw: float = 0.0
    lambda_e: float = 0.1
    # wiretap code / secrecy
    epsilon: float = 0.2
    beta_t: float = 1.0
    beta_e: float = 1.0
    bsr_sop_model: str = "approx"  # "approx" or "exact"
    # caching
    N: int = 100
    tau: float = 1.5
    L: int = 10
    M: str = "optimize"  # integer or "optimize"
    caching_objective: str = "throughput"  # "throughput" or "see"
    # monte carlo
    trials: int | None = None
    seed: int = 12345
    threads: int = 1
    # sweep axis
    sweep_var: str = "Ps_dBw"
    sweep_start: float = 0.0
    sweep_stop: float = 30.0
    sweep_step: float = 5.0

    def layout(self) -> NetworkLayout:
        return build_line_layout(self.r_s1_o, self.r_s, self.K, self.r_b_s1)

    def params(self) -> ChannelParams:
        return ChannelParams(alpha=self.alpha, Ps=dbw_to_linear(self.Ps_dBw),
                             Pm=dbw_to_linear(self.Pm_dBw),
                             lambda_e=self.lambda_e)

    def header_items(self) -> list[str]:
        return [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]


def dbw_to_linear(p_dbw: float) -> float:
    return 10.0 ** (p_dbw / 10.0)


_INT_KEYS = {"K", "N", "L", "seed", "threads", "trials"}
_FLOAT_KEYS = {"r_s1_o", "r_s", "r_b_s1", "alpha", "Ps_dBw", "Pm_dBw",
               "lambda_e", "epsilon", "beta_t", "beta_e", "tau",
               "sweep_start", "sweep_stop", "sweep_step"}
_STR_KEYS = {"M", "bsr_sop_model", "caching_objective", "sweep_var"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def _coerce(key: str, raw, where: str):
    try:
        if key in _INT_KEYS:
            value = int(raw)
        elif key in _FLOAT_KEYS:
            value = float(raw)
        else:
            value = str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {raw!r}") from exc
    return value


def parse_scenario_text(text: str, source: str = "<config>") -> Scenario:
    """Parse a scenario from flat key=value lines or a JSON object."""
    stripped = text.lstrip()
    values: dict = {}
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: JSON scenario must be an object")
        for key, raw in data.items():
            if key not in _ALL_KEYS:
                raise ConfigError(f"{source}: unknown key {key!r}")
            values[key] = _coerce(key, raw, source)
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in body.split("=", 1))
            if key not in _ALL_KEYS:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(key, raw, f"{source}:{lineno}")
    scenario = Scenario(**values)
    if scenario.M != "optimize":
        try:
            m = int(scenario.M)
        except ValueError as exc:
            raise ConfigError(
                f"{source}: M must be an integer or 'optimize'") from exc
        if not 0 <= m <= scenario.L:
            raise ConfigError(f"{source}: M={m} outside 0..L={scenario.L}")
    if scenario.bsr_sop_model not in ("approx", "exact"):
        raise ConfigError(f"{source}: bsr_sop_model must be approx|exact")
    if scenario.caching_objective not in ("throughput", "see"):
        raise ConfigError(f"{source}: caching_objective must be "
                          "throughput|see")
    if scenario.sweep_var not in ("Ps_dBw", "Rs", "N"):
        raise ConfigError(f"{source}: sweep_var must be Ps_dBw|Rs|N")
    if scenario.sweep_step <= 0:
        raise ConfigError(f"{source}: sweep_step must be positive")
    return scenario


def load_scenario(path: str | None) -> Scenario:
    if path is None:
        return Scenario()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_scenario_text(text, source=str(path))


def sweep_values(scn: Scenario) -> list[float]:
    values = []
    v = scn.sweep_start
    while v <= scn.sweep_stop + 1e-9 * max(1.0, abs(scn.sweep_step)):
        values.append(round(v, 12))
        v = scn.sweep_start + (len(values)) * scn.sweep_step
    if scn.sweep_var == "N":
        return [int(x) for x in values]
    return values


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_table(out, command: str, scn: Scenario, columns: list[str],
                rows: list[list]) -> None:
    lines = [f"# cachesec {__version__}",
             f"# command: {command}",
             f"# seed: {scn.seed}"]
    lines += [f"# scenario: {item}" for item in scn.header_items()]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(cell) for cell in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _map_points(fn, points, threads: int) -> list:
    """Evaluate fn over sweep points, preserving point order."""
    if threads <= 1:
        return [fn(i, v) for i, v in enumerate(points)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(len(points)), points))


def _score_sigma(analytic: float, trials: int) -> float:
    return math.sqrt(max(analytic * (1.0 - analytic), 0.0) / trials)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_cop_sweep(scn: Scenario, out) -> int:
    if scn.sweep_var != "Ps_dBw":
        raise ConfigError("cop-sweep sweeps Ps_dBw")
    layout = scn.layout()
    trials = scn.trials if scn.trials is not None else 10 ** 6
    points = sweep_values(scn)

    def compute(i, ps_dbw):
        params = replace(scn.params(), Ps=dbw_to_linear(ps_dbw))
        cells = []
        evaluators = [
            ("dbf", lambda: outage.cop_dbf_exact(layout, params, scn.beta_t),
             SchemeId.DBF),
            ("dbf-asymptote",
             lambda: outage.cop_dbf_asymptotic(layout, params, scn.beta_t),
             None),
            ("fot", lambda: outage.cop_fot(layout, params, scn.beta_t),
             SchemeId.FOT),
            ("bsr", lambda: outage.cop_bsr(layout, params, scn.beta_t),
             SchemeId.BSR),
        ]
        for j, (name, an_fn, scheme) in enumerate(evaluators):
            an = an_fn()
            mc_val = mc_err = None
            if trials > 0 and scheme is not None:
                settings = montecarlo.McSettings(
                    trials=trials, seed=scn.seed + 1000 * i + j)
                mc = montecarlo.mc_cop(scheme, layout, params, scn.beta_t,
                                       settings)
                mc_val, mc_err = mc.value, mc.std_error
            cells.append([ps_dbw, name, an.value, mc_val, mc_err])
        return cells

    rows = [row for cells in _map_points(compute, points, scn.threads)
            for row in cells]
    write_table(out, "cop-sweep", scn,
                ["Ps_dBw", "scheme", "analytic", "mc", "mc_stderr"], rows)
    return 0


def cmd_sop_sweep(scn: Scenario, out) -> int:
    if scn.sweep_var != "Ps_dBw":
        raise ConfigError("sop-sweep sweeps Ps_dBw")
    layout = scn.layout()
    trials = scn.trials if scn.trials is not None else 10 ** 5
    points = sweep_values(scn)

    def compute(i, ps_dbw):
        params = replace(scn.params(), Ps=dbw_to_linear(ps_dbw))
        evaluators = [
            ("dbf", lambda: outage.sop_dbf(layout, params, scn.beta_e),
             SchemeId.DBF, False),
            ("fot", lambda: outage.sop_fot(layout, params, scn.beta_e),
             SchemeId.FOT, False),
            ("bsr-exact",
             lambda: outage.sop_bsr_exact(layout, params, scn.beta_e),
             SchemeId.BSR, False),
            ("bsr-approx",
             lambda: outage.sop_bsr_approx(params, scn.beta_e),
             SchemeId.BSR, True),
        ]
        cells = []
        for j, (name, an_fn, scheme, indep) in enumerate(evaluators):
            an = an_fn()
            mc_val = mc_err = None
            if trials > 0:
                settings = montecarlo.McSettings(
                    trials=trials, seed=scn.seed + 1000 * i + j,
                    independent_hops=indep)
                mc = montecarlo.mc_sop(scheme, layout, params, scn.beta_e,
                                       settings)
                mc_val, mc_err = mc.value, mc.std_error
            cells.append([ps_dbw, name, an.value, mc_val, mc_err])
        return cells

    rows = [row for cells in _map_points(compute, points, scn.threads)
            for row in cells]
    write_table(out, "sop-sweep", scn,
                ["Ps_dBw", "scheme", "analytic", "mc", "mc_stderr"], rows)
    return 0


def cmd_throughput(scn: Scenario, out) -> int:
    layout = scn.layout()
    bsr_exact = scn.bsr_sop_model == "exact"
    if scn.sweep_var == "Rs":
        params = scn.params()
        thresholds = {
            scheme: rates.invert_sop(scheme, layout, params, scn.epsilon,
                                     bsr_exact=bsr_exact)
            for scheme in SchemeId}
        rows = []
        for rs in sweep_values(scn):
            beta_s = 2.0 ** rs - 1.0
            for scheme in SchemeId:
                psi = rates.secrecy_throughput_curve(
                    scheme, layout, params, thresholds[scheme], beta_s)
                rows.append([rs, scheme.value, psi])
        write_table(out, "throughput", scn, ["Rs", "scheme", "psi"], rows)
        return 0
    if scn.sweep_var != "Ps_dBw":
        raise ConfigError("throughput sweeps Rs or Ps_dBw")

    def compute(i, ps_dbw):
        params = replace(scn.params(), Ps=dbw_to_linear(ps_dbw))
        cells = []
        for scheme in SchemeId:
            design = rates.scheme_throughput(scheme, layout, params,
                                             scn.epsilon,
                                             bsr_exact_sop=bsr_exact)
            cells.append([ps_dbw, scheme.value, design.beta_e_circ,
                          design.beta_s_star, design.rate_secrecy,
                          design.psi_star])
        return cells

    rows = [row for cells in _map_points(compute, sweep_values(scn),
                                         scn.threads) for row in cells]
    write_table(out, "throughput", scn,
                ["Ps_dBw", "scheme", "beta_e_circ", "beta_s_star", "Rs_star",
                 "psi_star"], rows)
    return 0


def _per_scheme_psi(scn: Scenario, layout, params) -> dict:
    bsr_exact = scn.bsr_sop_model == "exact"
    return {scheme: rates.scheme_throughput(scheme, layout, params,
                                            scn.epsilon,
                                            bsr_exact_sop=bsr_exact).psi_star
            for scheme in SchemeId}


def cmd_caching(scn: Scenario, out) -> int:
    if scn.sweep_var not in ("N", "Ps_dBw"):
        raise ConfigError("caching sweeps N or Ps_dBw")
    layout = scn.layout()
    objective = scn.caching_objective

    def optimize(psi, lib, params):
        p_d, p_f, p_b = (psi[SchemeId.DBF], psi[SchemeId.FOT],
                         psi[SchemeId.BSR])
        if objective == "see":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                m_closed = caching.opt_m_see(p_d, p_f, p_b, params, lib,
                                             scn.K, scn.L)
        else:
            m_closed = caching.optimal_mpc_allocation(p_d, p_f, p_b, lib,
                                                      scn.K, scn.L)
        m_ex, _ = caching.exhaustive_opt_m(objective, p_d, p_f, p_b, lib,
                                           scn.K, scn.L, params=params)

        def value(m):
            if objective == "see":
                return caching.see(p_d, p_f, p_b, params, lib, scn.K, scn.L, m)
            return caching.overall_throughput(p_d, p_f, p_b, lib, scn.K,
                                              scn.L, m)

        return m_closed, m_ex, value

    def compute(i, v):
        if scn.sweep_var == "N":
            params = scn.params()
            lib = caching.ZipfLibrary(N=int(v), tau=scn.tau)
        else:
            params = replace(scn.params(), Ps=dbw_to_linear(v))
            lib = caching.ZipfLibrary(N=scn.N, tau=scn.tau)
        psi = _per_scheme_psi(scn, layout, params)
        m_closed, m_ex, value = optimize(psi, lib, params)
        return [[v, psi[SchemeId.DBF], psi[SchemeId.FOT], psi[SchemeId.BSR],
                 m_closed, m_ex, value(m_closed), value(scn.L), value(0)]]

    rows = [row for cells in _map_points(compute, sweep_values(scn),
                                         scn.threads) for row in cells]
    write_table(out, "caching", scn,
                [scn.sweep_var, "psi_D", "psi_F", "psi_B", "M_closed",
                 "M_exhaustive", "obj_hybrid", "obj_mpc", "obj_lcd"], rows)
    return 0


def cmd_validate(scn: Scenario, out) -> int:
    """Analytic vs Monte Carlo on the configured power sweep, with verdicts."""
    if scn.sweep_var != "Ps_dBw":
        raise ConfigError("validate sweeps Ps_dBw")
    layout = scn.layout()
    cop_trials = scn.trials if scn.trials is not None else 10 ** 5
    sop_trials = max(cop_trials // 10, 1)
    points = sweep_values(scn)

    def compute(i, ps_dbw):
        params = replace(scn.params(), Ps=dbw_to_linear(ps_dbw))
        cells = []
        for j, scheme in enumerate(SchemeId):
            an = outage.cop(scheme, layout, params, scn.beta_t).value
            mc = montecarlo.mc_cop(
                scheme, layout, params, scn.beta_t,
                montecarlo.McSettings(trials=cop_trials,
                                      seed=scn.seed + 1000 * i + j))
            sigma = max(_score_sigma(an, cop_trials), mc.std_error)
            ok = abs(an - mc.value) <= 3.0 * sigma + 1e-12
            cells.append([ps_dbw, "cop", scheme.value, an, mc.value,
                          mc.std_error, int(ok)])
        for j, scheme in enumerate(SchemeId):
            an = outage.sop(scheme, layout, params, scn.beta_e).value
            mc = montecarlo.mc_sop(
                scheme, layout, params, scn.beta_e,
                montecarlo.McSettings(trials=sop_trials,
                                      seed=scn.seed + 1000 * i + 100 + j))
            sigma = max(_score_sigma(an, sop_trials), mc.std_error)
            ok = abs(an - mc.value) <= 3.0 * sigma + 1e-12
            cells.append([ps_dbw, "sop", scheme.value, an, mc.value,
                          mc.std_error, int(ok)])
        return cells

    rows = [row for cells in _map_points(compute, points, scn.threads)
            for row in cells]
    write_table(out, "validate", scn,
                ["Ps_dBw", "metric", "scheme", "analytic", "mc", "mc_stderr",
                 "within_3sigma"], rows)
    passed = sum(row[-1] for row in rows)
    print(f"validate: {passed}/{len(rows)} cells within 3 sigma",
          file=sys.stderr)
    return 0


_COMMANDS = {
    "cop-sweep": cmd_cop_sweep,
    "sop-sweep": cmd_sop_sweep,
    "throughput": cmd_throughput,
    "caching": cmd_caching,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachesec",
        description="Secrecy outage and caching experiments for a "
                    "cache-enabled heterogeneous network model.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="scenario file (key=value or JSON)")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--trials", type=int,
                        help="override the Monte Carlo budget (0 disables)")
    parser.add_argument("--threads", type=int,
                        help="worker threads for sweep points")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            scn = replace(scn, **overrides)
        return _COMMANDS[args.command](scn, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
