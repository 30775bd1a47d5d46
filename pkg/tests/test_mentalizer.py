"""Tests for partner mentalizing."""

import numpy as np
import pytest

from haicapy.belief import BeliefDistribution, LikelihoodMatrix
from haicapy.config import TomConfig
from haicapy.enums import IntentionKind, ItemKind, ItemParam, LowAction
from haicapy.exceptions import StructuralError
from haicapy.intention import (
    GOAL_DOMAIN, INTENTION_DOMAIN, WAIT, Intention, IntentionSpace)
from haicapy.kitchen import PotState, observe
from haicapy.layout import load_layout
from haicapy.mentalizer import (
    ActionPredictor, InferredMind, action_likelihood, predict_action, tom_update)

ACTIONS = list(LowAction)


def _mind(intentions, goals):
    return InferredMind(BeliefDistribution(INTENTION_DOMAIN, intentions),
                        BeliefDistribution(GOAL_DOMAIN, goals))


def _table(rows):
    return LikelihoodMatrix(GOAL_DOMAIN, INTENTION_DOMAIN, rows)


def _oracle(prev, action, config, rows, predictions):
    """Enumerates the joint over (intention, goal) pairs."""
    rows = np.asarray(rows)
    goals = prev.goal_belief.probs
    joint = {}
    for g in range(rows.shape[0]):
        for i in range(rows.shape[1]):
            likelihood = config.alpha if predictions[i][g] == action \
                else (1 - config.alpha) / 5
            joint[(i, g)] = likelihood * rows[g, i] * goals[g]
    total = sum(joint.values())
    intentions = [sum(joint[(i, g)] for g in range(rows.shape[0])) / total
                  for i in range(rows.shape[1])]
    goal_post = [sum(joint[(i, g)] for i in range(rows.shape[1])) / total
                 for g in range(rows.shape[0])]

    def softmax(values):
        weights = [np.exp(config.beta * (value + config.mu)) for value in values]
        return [weight / sum(weights) for weight in weights]

    return softmax(intentions), softmax(goal_post)


def test_action_likelihood():
    config = TomConfig()
    assert action_likelihood(LowAction.Up, LowAction.Up, config) == pytest.approx(0.9)
    assert action_likelihood(LowAction.Up, LowAction.Wait, config) == pytest.approx(0.02)
    flat = TomConfig(alpha=1 / 6)
    for action in ACTIONS:
        assert action_likelihood(action, LowAction.Left, flat) == pytest.approx(1 / 6)


def test_zero_beta_gives_uniform_posteriors():
    rows = [[0.7, 0.2, 0.1], [0.1, 0.1, 0.8]]
    result = tom_update(_mind([0.2, 0.3, 0.5], [0.9, 0.1]), LowAction.Up,
                        None, TomConfig(beta=0.0), _table(rows),
                        lambda obs, i, g: LowAction.Up if i == 0 else LowAction.Down)
    assert result.intention_belief.probs == pytest.approx([1 / 3] * 3)
    assert result.goal_belief.probs == pytest.approx([0.5, 0.5])


def test_two_by_two_enumeration():
    rows = [[0.6, 0.4], [0.25, 0.75]]
    predictions = [[LowAction.Right, LowAction.Right], [LowAction.Wait, LowAction.Up]]
    prev = _mind([0.5, 0.5], [0.3, 0.7])
    config = TomConfig()
    result = tom_update(prev, LowAction.Right, 'obs', config, _table(rows),
                        lambda obs, i, g: predictions[i][g])
    intentions, goals = _oracle(prev, LowAction.Right, config, rows, predictions)
    assert result.intention_belief.probs == pytest.approx(intentions, abs=1e-12)
    assert result.goal_belief.probs == pytest.approx(goals, abs=1e-12)


def test_random_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(100):
        intention_count = int(rng.integers(1, 7))
        goal_count = int(rng.integers(1, 4))
        rows = rng.dirichlet(np.ones(intention_count), size=goal_count)
        predictions = [[ACTIONS[int(rng.integers(6))] for _ in range(goal_count)]
                       for _ in range(intention_count)]
        prev = _mind(rng.dirichlet(np.ones(intention_count)),
                     rng.dirichlet(np.ones(goal_count)) + 0.01)
        config = TomConfig(alpha=float(rng.uniform(0.2, 1.0)),
                           beta=float(rng.uniform(0, 5)),
                           mu=float(rng.uniform(0, 1)))
        action = ACTIONS[int(rng.integers(6))]
        result = tom_update(prev, action, None, config, _table(rows),
                            lambda obs, i, g: predictions[i][g])
        intentions, goals = _oracle(prev, action, config, rows, predictions)
        assert result.intention_belief.probs == pytest.approx(intentions, abs=1e-9)
        assert result.goal_belief.probs == pytest.approx(goals, abs=1e-9)
        assert np.all(result.intention_belief.probs > 0)
        assert np.all(result.goal_belief.probs > 0)


def test_uninformative_action_keeps_prior_structure():
    rows = np.array([[0.5, 0.3, 0.2], [0.1, 0.1, 0.8]])
    goals = np.array([0.25, 0.75])
    config = TomConfig()
    result = tom_update(_mind([1 / 3] * 3, goals), LowAction.Wait, None, config,
                        _table(rows), lambda obs, i, g: LowAction.Wait)
    marginal = rows.T @ goals

    def softmax(values):
        weights = np.exp(config.beta * (values + config.mu))
        return weights / weights.sum()

    assert result.intention_belief.probs == pytest.approx(softmax(marginal))
    assert result.goal_belief.probs == pytest.approx(softmax(goals))


def test_observed_action_shifts_belief():
    rows = [[0.5, 0.5], [0.5, 0.5]]
    result = tom_update(_mind([0.5, 0.5], [0.5, 0.5]), LowAction.Up, None, TomConfig(),
                        _table(rows),
                        lambda obs, i, g: LowAction.Up if i == 0 else LowAction.Down)
    assert result.intention_belief.argmax() == 0
    assert result.intention_belief[0] > result.intention_belief[1]


def test_consistent_actions_win_within_three_steps():
    # Both goals and the prior point at intention 1; the partner keeps doing
    # what intention 0 predicts
    rows = [[0.9, 0.1], [0.1, 0.9]]
    mind = _mind([0.1, 0.9], [0.1, 0.9])

    def predictor(obs, intention, goal):
        return LowAction.Up if intention == 0 else LowAction.Down

    previous = 0.0
    for _ in range(3):
        mind = tom_update(mind, LowAction.Up, None, TomConfig(), _table(rows), predictor)
        assert mind.intention_belief.argmax() == 0
        assert mind.intention_belief[0] >= previous
        previous = mind.intention_belief[0]
    assert mind.goal_belief[0] > 0.1


def test_mismatched_table_raises():
    with pytest.raises(StructuralError):
        tom_update(_mind([0.5, 0.5], [1.0]), LowAction.Up, None, TomConfig(),
                   _table([[0.2, 0.3, 0.5]]), lambda obs, i, g: LowAction.Up)


@pytest.mark.parametrize('partner, expected', [
    ((1, 2), LowAction.Wait),
    # Standing where the observer would face the onion dispenser
    ((1, 1), LowAction.Down),
])
def test_predict_wait_intention(small_layout, make_state, partner, expected):
    state = make_state(small_layout, [((2, 2), LowAction.Up, None),
                                      (partner, LowAction.Left, None)])
    assert predict_action(observe(state, 0), WAIT) == expected


def test_predict_partner_at_dispenser(small_layout, make_state):
    state = make_state(small_layout, [((2, 2), LowAction.Up, None),
                                      ((1, 1), LowAction.Left, None)])
    intention = Intention(IntentionKind.GetItem, ItemParam.Onion)
    assert predict_action(observe(state, 0), intention, space_size=17) == LowAction.Interact


def test_predict_blocked_partner_waits(make_state):
    layout = load_layout("XXPXX\nX2 1D\nXXXXX")
    state = make_state(layout, [((3, 1), LowAction.Up, None),
                                ((1, 1), LowAction.Up, None)],
                       pots=[PotState(ItemKind.Onion, 3, 5)])
    intention = Intention(IntentionKind.GetItem, ItemParam.Dish)
    assert predict_action(observe(state, 0), intention, space_size=17) == LowAction.Wait


def test_action_predictor(small_layout, make_state):
    space = IntentionSpace(small_layout)
    predictor = ActionPredictor(space)
    state = make_state(small_layout, [((2, 2), LowAction.Up, None),
                                      ((1, 1), LowAction.Left, None)])
    observation = observe(state, 0)
    onion = space.index(Intention(IntentionKind.GetItem, ItemParam.Onion))
    assert predictor(observation, onion, 0) == LowAction.Interact
    assert predictor(observation, onion, 1) == LowAction.Interact
    # A waiting partner would make way for the observer
    assert predictor(observation, space.index(WAIT), 0) == LowAction.Down

    solo = observe(make_state(small_layout, [((2, 2), LowAction.Up, None)]), 0)
    assert predictor(solo, onion, 0) == LowAction.Wait


def test_uniform_mind(small_layout):
    mind = InferredMind.uniform(IntentionSpace(small_layout))
    assert mind.intention_belief.probs == pytest.approx([1 / 16] * 16)
    assert mind.goal_belief.probs == pytest.approx([0.5, 0.5])
