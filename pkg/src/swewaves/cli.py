"""Command-line front end.

``swewaves run CONFIG.json [--out DIR]`` runs one scenario and writes CSV and
JSON artifacts; ``swewaves validate CONFIG.json`` lists violated scenario
invariants without running any solver.

Exit status: 0 on success, 2 when the configuration lies outside the
supported assumptions, 1 on malformed input or numerical failure (with a
message on standard error).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional

from . import curves, fv, penetration
from .interaction_rs import ScenarioRS, classify_rs_case, rs_large_time
from .interaction_ss import ScenarioSS, classify_ss_case, ss_large_time, timing_diagram
from .riemann import ConstructionFailed, WaveFan, check_fan, flat_riemann, step_riemann
from .states import (
    G_DEFAULT,
    DomainError,
    NumericalFailure,
    State,
    UnsupportedConfiguration,
    check_gravity,
)

MODES = ("riemann", "interact_rs", "interact_ss", "ode_trace", "fv_check", "curves")
EXIT_OK, EXIT_FAIL, EXIT_UNSUPPORTED = 0, 1, 2
CURVE_TOL = 1e-10

FAN_HEADER = ["index", "family", "uL", "hL", "uR", "hR", "speed_lo", "speed_hi"]


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field or line."""


# --------------------------------------------------------------------------
# formatting


def fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise NumericalFailure(f"non-finite value {x} in output")
        return f"{x:.17g}"
    return str(x)


def to_json(obj: Any, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and a stable key order."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)) and not isinstance(obj, str):
        return fmt(float(obj) if hasattr(obj, "dtype") else obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if hasattr(obj, "item"):
        return to_json(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_csv(path: Path, header: list[str], rows, preamble: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if preamble:
            fh.write(preamble + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(float(v) if hasattr(v, "dtype") else v) for v in row) + "\n")


def write_json(path: Path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_json(obj) + "\n")


def state_dict(U: State) -> dict:
    return {"u": float(U.u), "h": float(U.h), "a": float(U.a)}


def fan_json(fan: WaveFan) -> dict:
    return {
        "construction": fan.construction,
        "tags": {k: v for k, v in sorted(fan.tags.items())},
        "families": fan.families,
        "waves": [{k: (float(v) if isinstance(v, float) else v) for k, v in r.items()} for r in fan.to_rows()],
    }


def fan_rows(fan: WaveFan):
    return [[r[k] for k in FAN_HEADER] for r in fan.to_rows()]


# --------------------------------------------------------------------------
# config parsing


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    mode = cfg.get("mode")
    if mode not in MODES:
        raise ConfigError(f"field 'mode': expected one of {', '.join(MODES)}, got {mode!r}")
    return cfg


def gravity(cfg: dict) -> float:
    if "g" in cfg:
        g = number(cfg, "g")
    else:
        env = os.environ.get("SWE_GRAVITY")
        if env is None:
            g = G_DEFAULT
        else:
            try:
                g = float(env)
            except ValueError as exc:
                raise ConfigError(f"SWE_GRAVITY={env!r} is not a number") from exc
    try:
        return check_gravity(g)
    except DomainError as exc:
        raise ConfigError(f"field 'g': {exc}") from exc


def number(cfg: dict, key: str, default: Optional[float] = None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing field {key!r}")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"field {key!r}: expected a number, got {v!r}")
    return float(v)


def state(cfg: dict, key: str) -> State:
    if key not in cfg:
        raise ConfigError(f"missing field {key!r}")
    v = cfg[key]
    if isinstance(v, dict):
        v = [v.get("u"), v.get("h"), v.get("a", 0.0)]
    if (not isinstance(v, list) or len(v) != 3
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v)):
        raise ConfigError(f"field {key!r}: expected [u, h, a], got {cfg[key]!r}")
    try:
        return State(float(v[0]), float(v[1]), float(v[2]))
    except DomainError as exc:
        raise ConfigError(f"field {key!r}: {exc}") from exc


def section(cfg: dict, key: str) -> dict:
    v = cfg.get(key, {})
    if not isinstance(v, dict):
        raise ConfigError(f"field {key!r}: expected an object")
    return v


def scenario_rs(cfg: dict, g: float) -> ScenarioRS:
    x1, x2 = number(cfg, "x1", 0.0), number(cfg, "x2", 1.0)
    if "build" in cfg:
        b = section(cfg, "build")
        return ScenarioRS.build(state(b, "U_mid"), number(b, "h_minus"), number(b, "a1"), x1, x2, g)
    return ScenarioRS(state(cfg, "U_minus"), state(cfg, "U_mid"), state(cfg, "U_plus"), x1, x2, g)


def scenario_ss(cfg: dict, g: float) -> ScenarioSS:
    x1, x2 = number(cfg, "x1", 0.0), number(cfg, "x2", 1.0)
    if "build" in cfg:
        b = section(cfg, "build")
        return ScenarioSS.build(state(b, "U_minus"), number(b, "h_mid"), number(b, "a1"), x1, x2, g)
    return ScenarioSS(state(cfg, "U_minus"), state(cfg, "U_mid"), state(cfg, "U_plus"), x1, x2, g)


def scenario_kind(cfg: dict) -> str:
    kind = cfg.get("scenario", "rs")
    if kind not in ("rs", "ss"):
        raise ConfigError(f"field 'scenario': expected 'rs' or 'ss', got {kind!r}")
    return kind


# --------------------------------------------------------------------------
# modes


def run_curves(cfg: dict, g: float, out: Path) -> list[str]:
    U0 = state(cfg, "U0")
    n = int(number(cfg, "n", 101))
    h_max = number(cfg, "h_max", 4.0 * U0.h)
    rows = curves.sample_curves(U0, g, n, h_max)
    write_csv(out / "curves.csv", ["param", "u", "h", "a", "branch"], rows)
    return ["curves.csv"]


def run_riemann(cfg: dict, g: float, out: Path) -> list[str]:
    UL, UR = state(cfg, "U_left"), state(cfg, "U_right")
    construction = cfg.get("construction")
    if UL.a == UR.a:
        fan = flat_riemann(UL, UR, g)
    else:
        fan = step_riemann(UL, UR, g, construction)
    problems = check_fan(fan, UL, UR)
    if problems:
        raise NumericalFailure("fan fails its own checks: " + "; ".join(problems))
    write_csv(out / "fan.csv", FAN_HEADER, fan_rows(fan))
    write_json(out / "fan.json", fan_json(fan))
    return ["fan.csv", "fan.json"]


def run_interact_rs(cfg: dict, g: float, out: Path) -> list[str]:
    scn = scenario_rs(cfg, g)
    case = classify_rs_case(scn)
    fan = rs_large_time(scn, case)
    payload = {"case": case.value, "regions": list(scn.regions()), **fan_json(fan)}
    write_csv(out / "fan.csv", FAN_HEADER, fan_rows(fan))
    write_json(out / "fan.json", payload)
    return ["fan.csv", "fan.json"]


def run_interact_ss(cfg: dict, g: float, out: Path) -> list[str]:
    scn = scenario_ss(cfg, g)
    case = classify_ss_case(scn)
    fan = ss_large_time(scn, case)
    diagram = timing_diagram(scn, fan, number(cfg, "t_after", 1.0))
    payload = {"case": case.value, **fan_json(fan),
               "timing": [{"wave": d["wave"], "family": d["family"],
                           "points": [[float(t), float(x)] for t, x in d["points"]]} for d in diagram]}
    write_csv(out / "fan.csv", FAN_HEADER, fan_rows(fan))
    write_json(out / "fan.json", payload)
    return ["fan.csv", "fan.json"]


def _verdict_json(v) -> dict:
    if isinstance(v, penetration.CrossedAt):
        return {"kind": "CrossedAt", "t5": float(v.t5)}
    return {"kind": "Asymptote", "slope": float(v.slope)}


def run_ode_trace(cfg: dict, g: float, out: Path) -> list[str]:
    side = cfg.get("side")
    try:
        side = penetration.Side(side)
    except ValueError as exc:
        raise ConfigError(f"field 'side': expected one of {[s.value for s in penetration.Side]}") from exc
    n = int(number(cfg, "samples", 200))
    if side is penetration.Side.S1inTransmittedR2:
        scn = scenario_rs(cfg, g)
        traj = penetration.solve_transmitted_shock(scn, n_samples=n)
        E = traj.info["envelope"]
        extra = {"envelope": {"x_e": float(E.x_e), "t_e": float(E.t_e), "inside": bool(E.inside)},
                 "final_speed": float(traj.info["final_speed"])}
    else:
        setup = penetration.FreeBoundarySetup(
            side,
            tuple(float(v) for v in _pair(cfg, "anchor")),
            tuple(float(v) for v in _pair(cfg, "center")),
            state(cfg, "behind_state"), state(cfg, "fan_head"), state(cfg, "fan_tail"), g)
        traj = penetration.trace_penetration(setup, n)
        extra = {}
    write_csv(out / "trajectory.csv", ["t", "x", "h", "u"], traj.samples.tolist())
    write_json(out / "verdict.json", {"side": side.value, "verdict": _verdict_json(traj.verdict), **extra})
    return ["trajectory.csv", "verdict.json"]


def _pair(cfg: dict, key: str):
    v = cfg.get(key)
    if not isinstance(v, list) or len(v) != 2 or not all(isinstance(c, (int, float)) for c in v):
        raise ConfigError(f"field {key!r}: expected [x, t], got {v!r}")
    return v


def run_fv_check(cfg: dict, g: float, out: Path) -> list[str]:
    kind = scenario_kind(cfg)
    params = section(cfg, "fv")
    cells = int(number(params, "cells", 2000))
    end_time = number(params, "end_time", 1.0)
    if kind == "rs":
        scn = scenario_rs(cfg, g)
        fan = rs_large_time(scn)
    else:
        scn = scenario_ss(cfg, g)
        fan = ss_large_time(scn)
    field, report = fv.fv_check(scn, fan, cells, end_time)
    name = str(cfg.get("name", f"{kind}-{fan.tags.get('case', '')}"))
    field.to_csv(out / "field.csv", name)
    report = {"scenario": name, "case": fan.tags.get("case"), **report}
    write_json(out / "report.json", report)
    return ["field.csv", "report.json"]


RUNNERS = {
    "curves": run_curves,
    "riemann": run_riemann,
    "interact_rs": run_interact_rs,
    "interact_ss": run_interact_ss,
    "ode_trace": run_ode_trace,
    "fv_check": run_fv_check,
}


# --------------------------------------------------------------------------
# validation


def _stationary_checks(U0: State, U1: State, g: float, label: str) -> list[str]:
    out = []
    am = curves.a_max(U0, g)
    if U1.a > am:
        out.append(f"no stationary contact: a1={U1.a:.17g} exceeds a_max({label})={am:.17g}")
        return out
    try:
        img = curves.stationary_select(U0, U1.a, g)
    except DomainError as exc:
        out.append(f"no stationary contact from {label}: {exc}")
        return out
    res = max(abs(img.u - U1.u), abs(img.h - U1.h))
    if res > CURVE_TOL * max(1.0, abs(U1.u), U1.h):
        out.append(f"U_plus is not the selected stationary image of {label} (residual {res:.3e})")
    return out


def validate_config(cfg: dict, g: float) -> list[str]:
    """Violated invariants for the configured mode; empty when consistent."""
    mode = cfg["mode"]
    v: list[str] = []
    if mode == "curves":
        state(cfg, "U0")
        return v
    if mode == "riemann":
        UL, UR = state(cfg, "U_left"), state(cfg, "U_right")
        if UL.a < UR.a:
            v.append("unsupported: the step must descend from left to right (a_left >= a_right)")
        am = curves.a_max(UL, g)
        if UR.a > am:
            v.append(f"no stationary contact: a_right={UR.a:.17g} exceeds a_max(U_left)={am:.17g}")
        return v
    if mode == "ode_trace" and cfg.get("side") != "S1inTransmittedR2":
        try:
            side = penetration.Side(cfg.get("side"))
            penetration.FreeBoundarySetup(side, tuple(_pair(cfg, "anchor")), tuple(_pair(cfg, "center")),
                                          state(cfg, "behind_state"), state(cfg, "fan_head"),
                                          state(cfg, "fan_tail"), g)
        except (DomainError, UnsupportedConfiguration, ValueError) as exc:
            v.append(str(exc))
        return v
    kind = "rs" if mode in ("interact_rs", "ode_trace") else ("ss" if mode == "interact_ss" else scenario_kind(cfg))
    if "build" in cfg:
        try:
            scenario_rs(cfg, g) if kind == "rs" else scenario_ss(cfg, g)
        except (DomainError, UnsupportedConfiguration) as exc:
            v.append(str(exc))
        return v
    Ul, Um, Up = state(cfg, "U_minus"), state(cfg, "U_mid"), state(cfg, "U_plus")
    if Ul.a != Um.a:
        v.append("U_minus and U_mid must share the upper bottom level")
    if Up.a > Um.a:
        v.append("unsupported: the step must descend (a1 <= a0)")
    if any(U.u < 0.0 for U in (Ul, Um, Up)):
        v.append("unsupported: velocities must be non-negative")
    if number(cfg, "x2", 1.0) < number(cfg, "x1", 0.0):
        v.append("x2 must not lie left of x1")
    if kind == "rs":
        if not Ul.h <= Um.h:
            v.append("a forward rarefaction needs h_minus <= h_mid")
        res = abs(curves.rarefaction_u(2, Ul, Um.h, g) - Um.u)
        if res > CURVE_TOL * max(1.0, abs(Um.u)):
            v.append(f"U_mid is off the R2 curve of U_minus (residual {res:.3e})")
    else:
        if not Um.h < Ul.h:
            v.append("a forward shock needs h_mid < h_minus")
        else:
            res = abs(curves.shock_u(2, Ul, Um.h, g) - Um.u)
            if res > CURVE_TOL * max(1.0, abs(Um.u)):
                v.append(f"U_mid is off the S2 curve of U_minus (residual {res:.3e})")
    v.extend(_stationary_checks(Um, Up, g, "U_mid"))
    return v


# --------------------------------------------------------------------------
# entry point


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        g = gravity(cfg)
        out = Path(args.out) if args.out else Path(cfg.get("out", "."))
        out.mkdir(parents=True, exist_ok=True)
        written = RUNNERS[cfg["mode"]](cfg, g, out)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_FAIL)
    except UnsupportedConfiguration as exc:
        return _fail(f"unsupported configuration: {exc}", EXIT_UNSUPPORTED)
    except (NumericalFailure, ConstructionFailed) as exc:
        return _fail(f"numerical failure: {exc}", EXIT_FAIL)
    except DomainError as exc:
        return _fail(f"invalid scenario: {exc}", EXIT_FAIL)
    for name in written:
        print(out / name)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
        g = gravity(cfg)
        violations = validate_config(cfg, g)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_FAIL)
    if not violations:
        print("ok")
        return EXIT_OK
    for line in violations:
        print(line)
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swewaves", description="Shallow-water step Riemann and interaction tools.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario and write artifacts")
    r.add_argument("config")
    r.add_argument("--out", default=None, help="output directory (default: config 'out' or .)")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="list violated scenario invariants")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
