"""Best responses, equilibrium certification, and deviation-inequality regions.

A play is a Nash equilibrium of these games exactly when neither player
can raise the amplitude modulus on their own preferred outcome by a
unilateral strategy change.  Because the target amplitude is linear in
the deviating player's two amplitudes, the best achievable modulus
against a fixed opponent has the closed form sqrt(|a|^2 + |b|^2) where
(a, b) are the contraction coefficients of the target row against the
opponent's state; the maximizer is the conjugate coefficient direction.
Equilibrium checking therefore never needs numeric optimization, and the
mini-max value is attained whenever a certificate reports equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import Play, PreferenceProfile, QuantumGame, StrategyParams, outcome, payoff_angle
from .qcore import KET0, QGameError, QubitState, TOL


class DegenerateCoefficientError(QGameError):
    """A region construction divided by a vanishing response coefficient."""


# Identifiers for the four sign combinations of the deviation
# inequalities: 31/32 bound player one's weighted deviation moduli from
# above/below, 33/34 do the same for player two.  A case pair picks one
# direction per player.
CASE_IDS = (31, 32, 33, 34)
CASE_PAIRS = ((31, 33), (31, 34), (32, 33), (32, 34))


@dataclass(frozen=True)
class ResponseCoefficients:
    """Moduli of the target-row contractions that govern best responses.

    p and q are the moduli of player one's coefficient pair (the target
    row contracted against the opponent's kept and flipped components);
    p_prime and q_prime are the same quantities for player two.
    """

    p: float
    q: float
    p_prime: float
    q_prime: float


@dataclass(frozen=True, eq=False)
class EquilibriumCertificate:
    """Outcome of a closed-form equilibrium check at one play.

    best1/best2 are the optimal achievable amplitude moduli against the
    fixed opponent; achieved1/achieved2 are the moduli at the play
    itself.  When the play is not an equilibrium, witness holds the
    deviating strategy of the first player who can improve.
    """

    play: Play
    payoff1: float
    payoff2: float
    achieved1: float
    achieved2: float
    best1: float
    best2: float
    is_equilibrium: bool
    witness: QubitState | None = None
    witness_player: int | None = None


@dataclass(frozen=True)
class GridSpec:
    """Strategy grid resolution: theta samples in [0, pi], phi samples in [0, 2 pi)."""

    theta_points: int = 61
    phi_points: int = 120

    def __post_init__(self):
        if self.theta_points < 2 or self.phi_points < 2:
            raise ValueError("grid needs at least 2 points per angle")


@dataclass(frozen=True)
class RegionSpec:
    """Sampled boundary of a deviation-inequality feasibility region.

    Samples are (h, v) pairs: in the primary form h is the modulus of
    the played strategy's flipped component and v the kept one, and the
    feasible set is on or above the line v = (dev_kept + slope*dev_flip)
    - slope*h, intersected with the closed unit quarter-disc.  The
    swapped form exchanges the two axes.  slope1 and slope2 record the
    coefficient ratios q/p and q'/p' (inf when the denominator is
    degenerate), independent of which player was sampled.
    """

    case_pair: tuple[int, int]
    slope1: float
    slope2: float
    samples: tuple[tuple[float, float], ...]
    player: int
    swapped: bool


def _target_row(g: QuantumGame, player: int) -> int:
    if player == 1:
        return g.prefs.player1_target
    if player == 2:
        return g.prefs.player2_target
    raise ValueError(f"player must be 1 or 2, got {player!r}")


def _coefficient_pair(g: QuantumGame, player: int, opponent: QubitState) -> tuple[complex, complex]:
    """Complex pair (a, b) such that the deviator's target amplitude is a*x + b*y.

    For player one the opponent state multiplies column pairs (0,1) and
    (2,3) of the target row; for player two it multiplies (0,2) and
    (1,3), reflecting the tensor ordering of the joint input.
    """
    u = g.u.mat
    t = _target_row(g, player)
    if player == 1:
        a = u[t, 0] * opponent.x + u[t, 1] * opponent.y
        b = u[t, 2] * opponent.x + u[t, 3] * opponent.y
    else:
        a = u[t, 0] * opponent.x + u[t, 2] * opponent.y
        b = u[t, 1] * opponent.x + u[t, 3] * opponent.y
    return complex(a), complex(b)


def response_coefficients(g: QuantumGame, p: Play) -> ResponseCoefficients:
    """Coefficient moduli (p, q, p', q') at the given play."""
    a1, b1 = _coefficient_pair(g, 1, p.b)
    a2, b2 = _coefficient_pair(g, 2, p.a)
    return ResponseCoefficients(abs(a1), abs(b1), abs(a2), abs(b2))


def best_response_value(g: QuantumGame, player: int, opponent: QubitState) -> float:
    """Largest target-amplitude modulus the player can reach against opponent.

    Cauchy-Schwarz on a*x + b*y over normalized (x, y) gives exactly
    sqrt(|a|^2 + |b|^2), so this is the true optimum, not a bound.
    """
    a, b = _coefficient_pair(g, player, opponent)
    return math.hypot(abs(a), abs(b))


def best_response_strategy(g: QuantumGame, player: int, opponent: QubitState) -> QubitState:
    """A strategy attaining best_response_value; |0> when every strategy ties."""
    a, b = _coefficient_pair(g, player, opponent)
    norm = math.hypot(abs(a), abs(b))
    if norm < 1e-15:
        return KET0
    v = np.array([np.conj(a), np.conj(b)]) / norm
    return QubitState(v / np.linalg.norm(v))


def verify_equilibrium(g: QuantumGame, p: Play, tol: float = TOL.equilibrium) -> EquilibriumCertificate:
    """Closed-form equilibrium check with weak inequalities at slack tol.

    The play is certified when each player's achieved target amplitude
    is within tol of their best response value.  On failure the witness
    is the best-response strategy of the first improving player, so
    applying it raises that player's amplitude by more than tol.
    """
    out = outcome(g, p)
    t1, t2 = g.prefs.player1_target, g.prefs.player2_target
    achieved1 = abs(out.amplitude(t1))
    achieved2 = abs(out.amplitude(t2))
    best1 = best_response_value(g, 1, p.b)
    best2 = best_response_value(g, 2, p.a)

    witness = None
    witness_player = None
    if best1 > achieved1 + tol:
        witness = best_response_strategy(g, 1, p.b)
        witness_player = 1
    elif best2 > achieved2 + tol:
        witness = best_response_strategy(g, 2, p.a)
        witness_player = 2

    return EquilibriumCertificate(
        play=p,
        payoff1=payoff_angle(out, t1),
        payoff2=payoff_angle(out, t2),
        achieved1=achieved1,
        achieved2=achieved2,
        best1=best1,
        best2=best2,
        is_equilibrium=witness is None,
        witness=witness,
        witness_player=witness_player,
    )


def _grid_amplitudes(grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Flattened amplitude arrays (x, y) over the grid, theta-major order."""
    thetas = np.linspace(0.0, math.pi, grid.theta_points)
    phis = np.linspace(0.0, 2.0 * math.pi, grid.phi_points, endpoint=False)
    x = np.repeat(np.cos(thetas / 2.0), grid.phi_points)
    y = (np.sin(thetas / 2.0)[:, None] * np.exp(1j * phis)[None, :]).ravel()
    return thetas, phis, x, y


def search_equilibria(g: QuantumGame, grid: GridSpec, tol: float = TOL.equilibrium) -> list[EquilibriumCertificate]:
    """Exhaustive equilibrium scan over all grid strategy pairs.

    Both players range over the same Bloch grid.  Candidate pairs are
    kept when both closed-form deviation checks pass at slack tol, then
    de-duplicated by payoff-vector proximity (first representative in
    grid order wins), and the survivors are re-certified one by one.
    The scan is blocked over player one's grid index; blocks are
    independent and merged in index order, so any partitioning of the
    work yields an identical result list.
    """
    thetas, phis, x, y = _grid_amplitudes(grid)
    n = x.size
    u = g.u.mat
    t1, t2 = g.prefs.player1_target, g.prefs.player2_target

    # Coefficient pairs of each player against every opposing grid strategy.
    a1 = u[t1, 0] * x + u[t1, 1] * y
    b1 = u[t1, 2] * x + u[t1, 3] * y
    best1 = np.hypot(np.abs(a1), np.abs(b1))
    a2 = u[t2, 0] * x + u[t2, 2] * y
    b2 = u[t2, 1] * x + u[t2, 3] * y
    best2 = np.hypot(np.abs(a2), np.abs(b2))

    cand_index: list[np.ndarray] = []
    cand_payoff1: list[np.ndarray] = []
    cand_payoff2: list[np.ndarray] = []
    block = max(1, (1 << 22) // max(n, 1))
    for start in range(0, n, block):
        stop = min(start + block, n)
        xa, ya = x[start:stop, None], y[start:stop, None]
        achieved1 = np.abs(xa * a1[None, :] + ya * b1[None, :])
        ok = achieved1 >= best1[None, :] - tol
        achieved2 = np.abs(a2[start:stop, None] * x[None, :] + b2[start:stop, None] * y[None, :])
        ok &= achieved2 >= best2[start:stop, None] - tol
        ii, jj = np.nonzero(ok)
        if ii.size:
            p1 = np.arccos(np.clip(achieved1[ii, jj] ** 2, 0.0, 1.0))
            p2 = np.arccos(np.clip(achieved2[ii, jj] ** 2, 0.0, 1.0))
            cand_index.append((start + ii).astype(np.int64) * n + jj)
            cand_payoff1.append(p1)
            cand_payoff2.append(p2)

    if not cand_index:
        return []
    pair_index = np.concatenate(cand_index)
    payoff1 = np.concatenate(cand_payoff1)
    payoff2 = np.concatenate(cand_payoff2)

    # Payoffs live in [0, pi/2], so the rounded keys fit well inside 21 bits.
    step = TOL.payoff_dedup
    key = (np.round(payoff1 / step).astype(np.int64) << 21) | np.round(payoff2 / step).astype(np.int64)
    _, first = np.unique(key, return_index=True)
    reps = np.sort(first)

    accepted: list[int] = []
    accepted_payoffs: list[tuple[float, float]] = []
    for r in reps:
        pv = (float(payoff1[r]), float(payoff2[r]))
        if any(max(abs(pv[0] - q0), abs(pv[1] - q1)) <= step for q0, q1 in accepted_payoffs):
            continue
        accepted.append(int(r))
        accepted_payoffs.append(pv)

    certificates = []
    for r in accepted:
        flat = int(pair_index[r])
        i, j = divmod(flat, n)
        play = Play(
            StrategyParams(float(thetas[i // grid.phi_points]), float(phis[i % grid.phi_points])).to_state(),
            StrategyParams(float(thetas[j // grid.phi_points]), float(phis[j % grid.phi_points])).to_state(),
        )
        certificates.append(verify_equilibrium(g, play, tol))
    return certificates


def _target_amplitude_moduli(g: QuantumGame, p: Play) -> tuple[float, float]:
    out = outcome(g, p)
    return abs(out.amplitude(g.prefs.player1_target)), abs(out.amplitude(g.prefs.player2_target))


def alternating_best_response(
    g: QuantumGame, start: Play, max_iters: int = 100, tol: float = TOL.equilibrium
) -> tuple[Play, bool]:
    """Alternate exact best responses from the given starting play.

    Each round replaces player one's strategy, then player two's against
    the update.  Iteration stops early, reporting convergence, when both
    target amplitude moduli move by less than tol over a round.  The
    dynamics need not converge for every game, so the flag is part of
    the result rather than an error.
    """
    a, b = start.a, start.b
    previous = _target_amplitude_moduli(g, Play(a, b))
    converged = False
    for _ in range(max_iters):
        a = best_response_strategy(g, 1, b)
        b = best_response_strategy(g, 2, a)
        current = _target_amplitude_moduli(g, Play(a, b))
        if max(abs(current[0] - previous[0]), abs(current[1] - previous[1])) < tol:
            converged = True
            break
        previous = current
    return Play(a, b), converged


def case_inequality_holds(case_id: int, coeffs: ResponseCoefficients, play: Play, deviation: QubitState) -> bool:
    """Evaluate one deviation inequality with a 1e-12 comparison slack.

    Cases 31/32 compare player one's weighted deviation moduli
    p|x| + q|y| against the same weighting of the played strategy
    (31: deviation side <=, 32: >=); cases 33/34 are the player two
    analogues with p', q'.  These are triangle-inequality relaxations
    used for region analysis, not equilibrium tests.
    """
    if case_id in (31, 32):
        side, kept, flip = (coeffs.p, coeffs.q), play.a, deviation
    elif case_id in (33, 34):
        side, kept, flip = (coeffs.p_prime, coeffs.q_prime), play.b, deviation
    else:
        raise ValueError(f"case_id must be one of {CASE_IDS}, got {case_id!r}")
    left = side[0] * abs(flip.x) + side[1] * abs(flip.y)
    right = side[0] * abs(kept.x) + side[1] * abs(kept.y)
    if case_id in (31, 33):
        return left <= right + 1e-12
    return left >= right - 1e-12


def _player_coefficients(coeffs: ResponseCoefficients, which_player: int) -> tuple[float, float]:
    if which_player == 1:
        return coeffs.p, coeffs.q
    if which_player == 2:
        return coeffs.p_prime, coeffs.q_prime
    raise ValueError(f"which_player must be 1 or 2, got {which_player!r}")


def _ratio_or_inf(num: float, den: float) -> float:
    return num / den if den >= TOL.degenerate_coefficient else math.inf


def _sample_boundary(constant: float, slope: float, resolution: int) -> tuple[tuple[float, float], ...]:
    # Boundary of {v >= constant - slope*h} clipped to v >= 0, inside the
    # closed unit disc.  Points whose clamped boundary value leaves the
    # disc are dropped rather than projected.
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    hs = np.linspace(0.0, 1.0, resolution)
    samples = []
    for h in hs:
        v = max(constant - slope * float(h), 0.0)
        if h * h + v * v <= 1.0 + TOL.disc:
            samples.append((float(h), v))
    return tuple(samples)


def feasibility_region(
    coeffs: ResponseCoefficients,
    which_player: int,
    deviation: QubitState,
    resolution: int = 101,
    case_pair: tuple[int, int] = (31, 33),
) -> RegionSpec:
    """Boundary samples of the played-moduli region compatible with a deviation.

    Solving the player's case inequality for the kept modulus of the
    played strategy gives v >= (dev_kept + slope*dev_flip) - slope*h
    with slope = q/p (or q'/p'), where h is the played flipped modulus.
    Requires the p-side coefficient to be non-degenerate; otherwise the
    swapped form applies.
    """
    p_side, q_side = _player_coefficients(coeffs, which_player)
    if p_side < TOL.degenerate_coefficient:
        raise DegenerateCoefficientError(
            f"p-side coefficient {p_side!r} is degenerate; use feasibility_region_swapped"
        )
    slope = q_side / p_side
    constant = abs(deviation.x) + slope * abs(deviation.y)
    return RegionSpec(
        case_pair=case_pair,
        slope1=_ratio_or_inf(coeffs.q, coeffs.p),
        slope2=_ratio_or_inf(coeffs.q_prime, coeffs.p_prime),
        samples=_sample_boundary(constant, slope, resolution),
        player=which_player,
        swapped=False,
    )


def feasibility_region_swapped(
    coeffs: ResponseCoefficients,
    which_player: int,
    deviation: QubitState,
    resolution: int = 101,
    case_pair: tuple[int, int] = (31, 33),
) -> RegionSpec:
    """As feasibility_region with the two moduli axes exchanged.

    Solves for the flipped modulus instead: v >= (dev_flip +
    (p/q)*dev_kept) - (p/q)*h with h now the played kept modulus.
    Requires the q-side coefficient to be non-degenerate.
    """
    p_side, q_side = _player_coefficients(coeffs, which_player)
    if q_side < TOL.degenerate_coefficient:
        raise DegenerateCoefficientError(
            f"q-side coefficient {q_side!r} is degenerate; the region is unconstrained in this form"
        )
    slope = p_side / q_side
    constant = abs(deviation.y) + slope * abs(deviation.x)
    return RegionSpec(
        case_pair=case_pair,
        slope1=_ratio_or_inf(coeffs.q, coeffs.p),
        slope2=_ratio_or_inf(coeffs.q_prime, coeffs.p_prime),
        samples=_sample_boundary(constant, slope, resolution),
        player=which_player,
        swapped=True,
    )
