"""Command line interface.

Commands:
  analyze GATE       payoff table at basis plays, coefficients, grid equilibrium search
  verify GATE        certify one play as an equilibrium (exit 1 when it is not)
  region GATE        sample deviation-inequality boundaries for both players
  mechanism TARGET   derive constraints, synthesize a unitary, certify it
  gates list/show    inspect the built-in gate library

GATE is a library name or a path to a JSON gate file.  The QGAME_CONFIG
environment variable may point to a JSON file holding RunConfig fields;
command line flags override it.  Exit status: 0 for success (including
"is an equilibrium" and "certified"), 1 for an honest negative result,
2 for invalid input or configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .equilibria import (
    CASE_PAIRS,
    DegenerateCoefficientError,
    EquilibriumCertificate,
    GridSpec,
    feasibility_region,
    feasibility_region_swapped,
    response_coefficients,
    search_equilibria,
    verify_equilibrium,
)
from .game import Play, PreferenceProfile, QuantumGame, StrategyParams, outcome, payoffs
from .gates import LIBRARY, bell_state, gate_to_json_dict, load_gate_file, save_gate_file
from .mechanism import MechanismTarget, certify_mechanism, derive_constraints, synthesize_mechanism
from .qcore import KET0, KET1, GameUnitary, NormalizationError, QGameError, QubitState, TOL, TwoQubitState

CONFIG_ENV_VAR = "QGAME_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    """Run-wide knobs shared by the commands."""

    tolerance: float = 1e-9
    grid_theta: int = 61
    grid_phi: int = 120
    oracle_theta: int = 181
    oracle_phi: int = 360
    prefs: PreferenceProfile = field(default_factory=PreferenceProfile)
    output_format: str = "json"

    def __post_init__(self):
        if not (0.0 < self.tolerance <= 1e-2):
            raise ValueError(f"tolerance must lie in (0, 1e-2], got {self.tolerance!r}")
        for name in ("grid_theta", "grid_phi", "oracle_theta", "oracle_phi"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be at least 2, got {getattr(self, name)!r}")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"output_format must be 'json' or 'csv', got {self.output_format!r}")


_CONFIG_KEYS = ("tolerance", "grid_theta", "grid_phi", "oracle_theta", "oracle_phi", "prefs", "output_format")


def load_run_config(env: dict | None = None) -> RunConfig:
    """RunConfig from defaults, overridden by the QGAME_CONFIG file if set."""
    env = os.environ if env is None else env
    path = env.get(CONFIG_ENV_VAR)
    if not path:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise QGameError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise QGameError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise QGameError(f"config file {path} must hold a JSON object")
    unknown = set(data) - set(_CONFIG_KEYS)
    if unknown:
        raise QGameError(f"config file {path} has unknown keys: {', '.join(sorted(unknown))}")
    kwargs = dict(data)
    if "prefs" in kwargs:
        kwargs["prefs"] = _prefs_profile(kwargs["prefs"])
    return RunConfig(**kwargs)


def _prefs_profile(value) -> PreferenceProfile:
    try:
        first, second = value
        return PreferenceProfile(int(first), int(second))
    except (TypeError, ValueError) as exc:
        raise QGameError(f"prefs must be two distinct outcome indices in 0..3: {exc}") from None


def _config_from_args(args) -> RunConfig:
    cfg = load_run_config()
    updates = {}
    if getattr(args, "tol", None) is not None:
        updates["tolerance"] = args.tol
    if getattr(args, "grid_theta", None) is not None:
        updates["grid_theta"] = args.grid_theta
    if getattr(args, "grid_phi", None) is not None:
        updates["grid_phi"] = args.grid_phi
    if getattr(args, "prefs", None) is not None:
        updates["prefs"] = PreferenceProfile(*args.prefs)
    if getattr(args, "csv", False):
        updates["output_format"] = "csv"
    return replace(cfg, **updates) if updates else cfg


# ---------------------------------------------------------------------------
# argument parsing helpers


def _complex_arg(text: str) -> complex:
    try:
        value = complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a complex literal (examples: 1, 0.5j, 0.6+0.8j)")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise argparse.ArgumentTypeError("amplitudes must be finite")
    return value


def _pair_arg(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")


def _prefs_arg(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated indices, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated indices, got {text!r}")


def _case_pair_arg(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        pair = (int(parts[0]), int(parts[1])) if len(parts) == 2 else None
    except ValueError:
        pair = None
    if pair not in CASE_PAIRS:
        choices = "; ".join(f"{a},{b}" for a, b in CASE_PAIRS)
        raise argparse.ArgumentTypeError(f"case pair must be one of {choices}; got {text!r}")
    return pair


def _strategy_from_amplitudes(x: complex, y: complex, who: str) -> QubitState:
    vec = np.array([x, y], dtype=complex)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > TOL.amplitude_input:
        raise NormalizationError(
            f"{who} amplitudes have norm {norm!r}, more than {TOL.amplitude_input} from 1; refusing to guess"
        )
    if abs(norm - 1.0) > 1e-12:
        print(f"warning: renormalizing {who} amplitudes (norm was {norm!r})", file=sys.stderr)
    return QubitState(vec / norm)


def _bloch_strategy(pair: tuple[float, float], who: str) -> QubitState:
    theta, phi = pair
    phi = phi % (2.0 * math.pi)
    try:
        return StrategyParams(theta, phi).to_state()
    except ValueError as exc:
        raise QGameError(f"{who}: {exc}") from None


def _parse_play(args) -> Play:
    if getattr(args, "play", None) is not None:
        x1, y1, x2, y2 = args.play
        return Play(
            _strategy_from_amplitudes(x1, y1, "player one"),
            _strategy_from_amplitudes(x2, y2, "player two"),
        )
    if getattr(args, "bloch", None) is not None:
        first, second = args.bloch
        return Play(_bloch_strategy(first, "player one"), _bloch_strategy(second, "player two"))
    raise QGameError("a play is required: pass --play X1 Y1 X2 Y2 or --bloch T1,P1 T2,P2")


def _resolve_gate(token: str) -> tuple[str, GameUnitary]:
    if token in LIBRARY:
        entry = LIBRARY[token]
        return entry.name, entry.unitary
    if Path(token).exists():
        return load_gate_file(token)
    raise QGameError(
        f"gate {token!r} is neither a library gate nor an existing file; "
        f"known gates: {', '.join(sorted(LIBRARY))}"
    )


# ---------------------------------------------------------------------------
# report serialization


def _round_angle(x: float) -> float:
    # Angle outputs carry 12 significant digits; amplitudes stay full width.
    return float(f"{x:.12g}")


def _state_pairs(s: QubitState) -> list[list[float]]:
    return [[float(s.vec[i].real), float(s.vec[i].imag)] for i in range(2)]


def _play_dict(p: Play) -> dict:
    return {"player1": _state_pairs(p.a), "player2": _state_pairs(p.b)}


def _certificate_dict(cert: EquilibriumCertificate) -> dict:
    report = {
        "play": _play_dict(cert.play),
        "payoffs": [_round_angle(cert.payoff1), _round_angle(cert.payoff2)],
        "achieved": [cert.achieved1, cert.achieved2],
        "best": [cert.best1, cert.best2],
        "is_equilibrium": cert.is_equilibrium,
        "witness": None,
    }
    if cert.witness is not None:
        report["witness"] = {"player": cert.witness_player, "amplitudes": _state_pairs(cert.witness)}
    return report


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(report, out_path: str | None) -> None:
    _emit(json.dumps(report, indent=2) + "\n", out_path)


# ---------------------------------------------------------------------------
# commands


_BASIS = {0: KET0, 1: KET1}


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    name, unitary = _resolve_gate(args.gate)
    game = QuantumGame(unitary, cfg.prefs)

    canonical = []
    for i in (0, 1):
        for j in (0, 1):
            play = Play(_BASIS[i], _BASIS[j])
            coeffs = response_coefficients(game, play)
            pay = payoffs(game, play)
            out = outcome(game, play)
            canonical.append(
                {
                    "play": f"(|{i}>, |{j}>)",
                    "payoffs": [_round_angle(pay[0]), _round_angle(pay[1])],
                    "achieved": [
                        abs(out.amplitude(cfg.prefs.player1_target)),
                        abs(out.amplitude(cfg.prefs.player2_target)),
                    ],
                    "coefficients": {
                        "p": coeffs.p,
                        "q": coeffs.q,
                        "p_prime": coeffs.p_prime,
                        "q_prime": coeffs.q_prime,
                    },
                }
            )

    certificates = search_equilibria(game, GridSpec(cfg.grid_theta, cfg.grid_phi), cfg.tolerance)

    if cfg.output_format == "csv":
        lines = ["x1_re,x1_im,y1_re,y1_im,x2_re,x2_im,y2_re,y2_im,payoff1,payoff2,best1,best2,achieved1,achieved2"]
        for cert in certificates:
            amps = [cert.play.a.x, cert.play.a.y, cert.play.b.x, cert.play.b.y]
            cells = [f"{part!r}" for amp in amps for part in (amp.real, amp.imag)]
            cells += [
                f"{_round_angle(cert.payoff1)!r}",
                f"{_round_angle(cert.payoff2)!r}",
                f"{cert.best1!r}",
                f"{cert.best2!r}",
                f"{cert.achieved1!r}",
                f"{cert.achieved2!r}",
            ]
            lines.append(",".join(cells))
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    report = {
        "gate": name,
        "preferences": [cfg.prefs.player1_target, cfg.prefs.player2_target],
        "tolerance": cfg.tolerance,
        "grid": {"theta_points": cfg.grid_theta, "phi_points": cfg.grid_phi},
        "canonical_plays": canonical,
        "equilibria": [_certificate_dict(c) for c in certificates],
        "equilibrium_count": len(certificates),
    }
    _emit_json(report, args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    name, unitary = _resolve_gate(args.gate)
    game = QuantumGame(unitary, cfg.prefs)
    play = _parse_play(args)
    cert = verify_equilibrium(game, play, cfg.tolerance)

    report = {
        "gate": name,
        "preferences": [cfg.prefs.player1_target, cfg.prefs.player2_target],
        "tolerance": cfg.tolerance,
    }
    report.update(_certificate_dict(cert))
    _emit_json(report, args.out)
    return 0 if cert.is_equilibrium else 1


def cmd_region(args) -> int:
    cfg = _config_from_args(args)
    name, unitary = _resolve_gate(args.gate)
    game = QuantumGame(unitary, cfg.prefs)
    play = _parse_play(args)
    deviation = _bloch_strategy(args.deviation, "deviation")
    coeffs = response_coefficients(game, play)
    pair = args.case_pair

    players = []
    for player, case in ((1, pair[0]), (2, pair[1])):
        p_side, q_side = (coeffs.p, coeffs.q) if player == 1 else (coeffs.p_prime, coeffs.q_prime)
        info = {"player": player, "case": case}
        if p_side >= TOL.degenerate_coefficient:
            region = feasibility_region(coeffs, player, deviation, args.resolution, pair)
            info.update(form="primary", slope=q_side / p_side, samples=[list(s) for s in region.samples])
        elif q_side >= TOL.degenerate_coefficient:
            region = feasibility_region_swapped(coeffs, player, deviation, args.resolution, pair)
            info.update(form="swapped", slope=p_side / q_side, samples=[list(s) for s in region.samples])
        else:
            info.update(form="degenerate", slope=None, samples=None,
                        note="both coefficients vanish; every play satisfies the inequality")
        players.append(info)

    if all(info["form"] == "degenerate" for info in players):
        print("error: all response coefficients vanish at this play; no region to sample", file=sys.stderr)
        return 2

    if cfg.output_format == "csv":
        lines = []
        for info in players:
            slope_text = "none" if info["slope"] is None else repr(info["slope"])
            lines.append(f"# player={info['player']} case={info['case']} form={info['form']} slope={slope_text}")
        lines.append("h,v,case_pair,slope")
        for info in players:
            if info["samples"] is None:
                continue
            for h, v in info["samples"]:
                lines.append(f"{h!r},{v!r},{info['case']},{info['slope']!r}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    report = {
        "gate": name,
        "case_pair": list(pair),
        "deviation": _state_pairs(deviation),
        "coefficients": {"p": coeffs.p, "q": coeffs.q, "p_prime": coeffs.p_prime, "q_prime": coeffs.q_prime},
        "players": players,
    }
    _emit_json(report, args.out)
    return 0


def _load_target_state(token: str) -> tuple[str, TwoQubitState]:
    if token == "bell":
        return "bell", bell_state()
    path = Path(token)
    if not path.exists():
        raise QGameError(f"mechanism target {token!r} is neither 'bell' nor an existing amplitude file")
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise QGameError(f"cannot read target file {token}: {exc}") from None
    amplitudes = data.get("amplitudes") if isinstance(data, dict) else data
    name = data.get("name", path.stem) if isinstance(data, dict) else path.stem
    if not (isinstance(amplitudes, list) and len(amplitudes) == 4):
        raise QGameError("target file must hold four [re, im] amplitude pairs under 'amplitudes'")
    try:
        vec = np.array([complex(float(entry[0]), float(entry[1])) for entry in amplitudes], dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise QGameError(f"target amplitudes must be [re, im] number pairs: {exc}") from None
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > TOL.amplitude_input:
        raise NormalizationError(f"target state norm {norm!r} is more than {TOL.amplitude_input} from 1")
    if abs(norm - 1.0) > 1e-12:
        print(f"warning: renormalizing target amplitudes (norm was {norm!r})", file=sys.stderr)
    return name, TwoQubitState(vec / norm)


def cmd_mechanism(args) -> int:
    cfg = _config_from_args(args)
    target_name, target_state = _load_target_state(args.target)
    target = MechanismTarget(target_state, Play(KET0, KET0), cfg.prefs)
    deviation = _bloch_strategy(args.deviation, "deviation")

    constraints = derive_constraints(target)
    unitary = synthesize_mechanism(target, args.mode, deviation)
    result = certify_mechanism(unitary, target, cfg.tolerance)

    constraint_reports = []
    for c in constraints:
        entry = {"row": c.row, "col": c.col, "kind": c.kind, "description": c.description}
        if c.value is not None:
            entry["value"] = [c.value.real, c.value.imag]
        if c.bound is not None:
            entry["bound_at_deviation"] = c.bound(abs(deviation.x), abs(deviation.y))
        constraint_reports.append(entry)

    if args.out:
        save_gate_file(args.out, f"{target_name}_{args.mode}", unitary)

    report = {
        "target": target_name,
        "mode": args.mode,
        "preferences": [cfg.prefs.player1_target, cfg.prefs.player2_target],
        "deviation": _state_pairs(deviation),
        "constraints": constraint_reports,
        "unitary": gate_to_json_dict(f"{target_name}_{args.mode}", unitary)["matrix"],
        "fidelity": result.fidelity,
        "certificate": _certificate_dict(result.certificate),
        "certified": result.certified,
        "gate_file": args.out,
    }
    if not result.certified:
        report["note"] = "the synthesized unitary reaches the target but some deviation still improves a player"
    _emit_json(report, None)
    return 0 if result.certified else 1


def cmd_gates(args) -> int:
    if args.gates_command == "list":
        report = [{"name": e.name, "description": e.description} for _, e in sorted(LIBRARY.items())]
        _emit_json(report, getattr(args, "out", None))
        return 0
    entry_name, unitary = _resolve_gate(args.name)
    _emit_json(gate_to_json_dict(entry_name, unitary), getattr(args, "out", None))
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgame", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False, csv=False):
        p.add_argument("--tol", type=float, help="equilibrium slack, default 1e-9")
        p.add_argument("--prefs", type=_prefs_arg, metavar="I,J", help="preferred outcomes, default 0,1")
        p.add_argument("--out", help="write the report to this path instead of stdout")
        if grid:
            p.add_argument("--grid-theta", type=int, help="theta samples for the search grid")
            p.add_argument("--grid-phi", type=int, help="phi samples for the search grid")
        if csv:
            p.add_argument("--csv", action="store_true", help="emit tabular CSV instead of JSON")

    def play_args(p):
        p.add_argument("--play", nargs=4, type=_complex_arg, metavar=("X1", "Y1", "X2", "Y2"),
                       help="raw strategy amplitudes, player one then player two; "
                            "wrap values with a leading minus in parentheses, e.g. (-1+0j)")
        p.add_argument("--bloch", nargs=2, type=_pair_arg, metavar=("T1,P1", "T2,P2"),
                       help="strategies as Bloch angle pairs theta,phi")

    p = sub.add_parser("analyze", help="payoff table, coefficients, and grid equilibrium search")
    p.add_argument("gate", help="library gate name or gate file path")
    common(p, grid=True, csv=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="certify one play; exit 1 when it is not an equilibrium")
    p.add_argument("gate")
    play_args(p)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("region", help="sample deviation-inequality feasibility boundaries")
    p.add_argument("gate")
    play_args(p)
    p.add_argument("--case-pair", type=_case_pair_arg, default=(31, 33), metavar="A,B",
                   help="inequality directions per player, default 31,33")
    p.add_argument("--deviation", type=_pair_arg, default=(math.pi, 0.0), metavar="T,P",
                   help="deviation as Bloch angles theta,phi; default pi,0")
    p.add_argument("--resolution", type=int, default=101, help="boundary samples across [0, 1]")
    common(p, csv=True)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("mechanism", help="derive constraints, synthesize, and certify a mechanism")
    p.add_argument("target", help="'bell' or a JSON file with four [re, im] amplitude pairs")
    p.add_argument("--mode", choices=("strict", "paper_bound"), default="strict")
    p.add_argument("--deviation", type=_pair_arg, default=(math.pi, 0.0), metavar="T,P",
                   help="deviation the paper_bound cap is evaluated at; default pi,0")
    common(p)
    p.set_defaults(func=cmd_mechanism)

    p = sub.add_parser("gates", help="inspect the built-in gate library")
    gates_sub = p.add_subparsers(dest="gates_command", required=True)
    lp = gates_sub.add_parser("list", help="list library gates")
    lp.add_argument("--out")
    lp.set_defaults(func=cmd_gates)
    sp = gates_sub.add_parser("show", help="print one gate in gate-file JSON")
    sp.add_argument("name")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gates)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QGameError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
