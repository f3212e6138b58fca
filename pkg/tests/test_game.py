import numpy as np
import pytest

from ultinet.automaton import Cala
from ultinet.game import apply_zfa, payoff, play_pairwise
from ultinet.population import Agent, AgentKind
from ultinet.verify import check_payoff_conservation, check_zfa_direction


def ds(i, mu, sigma=1.0):
    return Agent(i, AgentKind.DYNAMIC_HUMAN, Cala(mu, sigma))


def fs(i):
    return Agent(i, AgentKind.FIXED, None, 4.5)


def test_payoff_accept_and_reject():
    o = payoff(4.0, 3.0)
    assert o.agreed and o.proposer_payoff == 6.0 and o.responder_payoff == 4.0
    o = payoff(2.0, 3.0)
    assert not o.agreed and o.proposer_payoff == 0.0 and o.responder_payoff == 0.0


def test_payoff_tie_accepts():
    assert payoff(4.5, 4.5).agreed


def test_zfa_signs():
    assert apply_zfa("proposer", 3.0, 2.0) == 1.0
    assert apply_zfa("responder", 3.0, 2.0) == -1.0
    with pytest.raises(ValueError):
        apply_zfa("proposer", 3.0, 2.0, beta_x=1.0)
    with pytest.raises(ValueError):
        apply_zfa("bystander", 3.0, 2.0)


def test_fixed_agents_never_change():
    rng = np.random.default_rng(0)
    a, b = fs(0), fs(1)
    rec = play_pairwise(a, b, rng)
    assert rec.mu_play.agreed and rec.x_play.agreed
    assert a.fixed_value == b.fixed_value == 4.5


def test_pairwise_matches_manual_update():
    rng = np.random.default_rng(7)
    p, r = ds(0, 3.0, 0.5), ds(1, 4.0, 0.5)
    rec = play_pairwise(p, r, np.random.default_rng(7))
    xp, xr = rng.normal(3.0, 0.5), rng.normal(4.0, 0.5)
    assert rec.proposer_x == xp and rec.responder_x == xr
    # mu-play 3 vs 4 is rejected
    assert not rec.mu_play.agreed
    bx_p = 10 - xp if xp >= xr else 0.0
    bx_r = xp if xp >= xr else 0.0
    bm_p = 3.0 - xp if bx_p == 0 else 0.0
    bm_r = xr - 4.0 if bx_r == 0 else 0.0
    assert p.cala == Cala(3.0, 0.5).update(xp, bm_p, bx_p)
    assert r.cala == Cala(4.0, 0.5).update(xr, bm_r, bx_r)


def test_all_zero_round_uses_zfa():
    rng = np.random.default_rng(0)
    p, r = ds(0, 1.0, 1e-3), fs(1)
    rec = play_pairwise(p, r, rng)
    assert rec.zfa_applied_proposer and not rec.zfa_applied_responder
    assert p.cala.mu > 1.0


def test_samples_are_clamped_for_play():
    rng = np.random.default_rng(0)
    p, r = ds(0, -3.0, 0.1), ds(1, -3.0, 0.1)
    rec = play_pairwise(p, r, rng)
    assert rec.x_play.offer == 0.0 and rec.x_play.threshold == 0.0
    assert rec.mu_play.offer == 0.0
    assert rec.proposer_x < 0


def test_clamp_mean_option():
    rng = np.random.default_rng(2)
    p = ds(0, 0.0, 2.0)
    for _ in range(200):
        play_pairwise(p, ds(1, 0.0, 2.0), rng, clamp_mean=True)
        assert 0.0 <= p.cala.mu <= 10.0


def test_payoff_conservation_suite():
    result = check_payoff_conservation(seed=11)
    assert result.passed, result.detail


def test_zfa_direction_suite():
    result = check_zfa_direction(seed=11)
    assert result.passed, result.detail
