"""Ultimatum Game payoffs and the two-play pairwise interaction.

A pairwise game evaluates two joint plays: proposer mean against responder
mean, and proposer sample against responder sample.  Each learner's payoffs
in those plays are its feedbacks for the automaton update.  When both are
zero the learner gets a directional push instead (zero-feedback avoidance):
proposers towards offering more, responders towards demanding less.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .automaton import clamped_ratio  # noqa: F401  (re-exported)
from .population import Agent, clamp_strategy

STAKE = 10.0

Role = Literal["proposer", "responder"]


@dataclass(frozen=True)
class UltimatumOutcome:
    offer: float
    threshold: float
    agreed: bool
    proposer_payoff: float
    responder_payoff: float


@dataclass(frozen=True)
class InteractionRecord:
    proposer_id: int
    responder_id: int
    mu_play: UltimatumOutcome
    x_play: UltimatumOutcome
    zfa_applied_proposer: bool
    zfa_applied_responder: bool
    proposer_x: float = float("nan")
    responder_x: float = float("nan")


def payoff(offer: float, threshold: float, stake: float = STAKE) -> UltimatumOutcome:
    """Accept iff ``offer >= threshold``; a rejection pays both sides nothing."""
    if offer >= threshold:
        return UltimatumOutcome(offer, threshold, True, stake - offer, offer)
    return UltimatumOutcome(offer, threshold, False, 0.0, 0.0)


def apply_zfa(role: Role, mu: float, x: float, beta_mu: float = 0.0, beta_x: float = 0.0) -> float:
    """Replacement mean-feedback for an all-zero round.

    ``mu - x`` for a proposer, ``x - mu`` for a responder; the sample's
    feedback stays 0.
    """
    if beta_mu != 0.0 or beta_x != 0.0:
        raise ValueError("zero-feedback avoidance only applies when both feedbacks are 0")
    if role == "proposer":
        return mu - x
    if role == "responder":
        return x - mu
    raise ValueError(f"unknown role {role!r}")


def _actions(agent: Agent, rng: np.random.Generator) -> tuple[float, float, float]:
    """(played mean, raw sample, played sample) for one agent."""
    if agent.is_fixed:
        v = clamp_strategy(agent.fixed_value)
        return v, v, v
    x = agent.cala.sample(rng)
    return clamp_strategy(agent.cala.mu), x, clamp_strategy(x)


def _learn(agent: Agent, role: Role, x: float, beta_mu: float, beta_x: float,
           zfa: bool, limit_update: bool, clamp_mean: bool) -> bool:
    used_zfa = False
    if zfa and beta_mu == 0.0 and beta_x == 0.0:
        beta_mu = apply_zfa(role, agent.cala.mu, x)
        used_zfa = True
    cala = agent.cala.update(x, beta_mu, beta_x, limit_update)
    if clamp_mean:
        cala = cala.__class__(clamp_strategy(cala.mu), cala.sigma, cala.lam,
                              cala.big_k, cala.sigma_floor)
    agent.cala = cala
    return used_zfa


def play_pairwise(
    proposer: Agent,
    responder: Agent,
    rng: np.random.Generator,
    *,
    zfa: bool = True,
    limit_update: bool = True,
    clamp_mean: bool = False,
    feedback_scale: float = 1.0,
) -> InteractionRecord:
    """Play one game and update both learners in place.

    The proposer's sample is drawn before the responder's.  Samples are
    clamped to [0, 10] for play but enter the update unclamped.  With
    ``clamp_mean`` the updated mean is rounded back into [0, 10].
    """
    p_mu, p_x, p_xp = _actions(proposer, rng)
    r_mu, r_x, r_xp = _actions(responder, rng)
    mu_play = payoff(p_mu, r_mu)
    x_play = payoff(p_xp, r_xp)

    zfa_p = zfa_r = False
    if not proposer.is_fixed:
        zfa_p = _learn(proposer, "proposer", p_x, mu_play.proposer_payoff / feedback_scale,
                       x_play.proposer_payoff / feedback_scale, zfa, limit_update, clamp_mean)
    if not responder.is_fixed:
        zfa_r = _learn(responder, "responder", r_x, mu_play.responder_payoff / feedback_scale,
                       x_play.responder_payoff / feedback_scale, zfa, limit_update, clamp_mean)
    return InteractionRecord(proposer.id, responder.id, mu_play, x_play, zfa_p, zfa_r, p_x, r_x)
