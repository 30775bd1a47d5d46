"""
This module contains the layered predictive belief update, including
belief resonance with the inferred beliefs of a partner.

A layer integrates a top-down prediction and bottom-up evidence with its
own prior through Kalman-style blends; the gain between prediction and
evidence is derived from the free energy and the precision of the
prediction error. Resonance blends the inferred partner belief into the
prediction before (or, in the swapped order, after) that final step.
"""

import logging
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import entropy

from haicapy.const import PROB_EPSILON, VARIANCE_FLOOR, NORMALIZATION_TOLERANCE
from haicapy.exceptions import ConfigurationError, StructuralError
from haicapy.util import serializable

_LOGGER = logging.getLogger(__name__)


def _normalize(values: np.ndarray) -> np.ndarray:
    # Floor, normalize, then floor again so no entry ends up below epsilon;
    # the second floor moves the sum by at most size * epsilon.
    values = np.maximum(values, PROB_EPSILON)
    values = values / values.sum()
    return np.maximum(values, PROB_EPSILON)


def _check_gain(gain: float, name: str = 'gain') -> float:
    gain = float(gain)
    if not 0.0 <= gain <= 1.0:
        raise ConfigurationError(
            "{} must be within [0, 1]; got {}".format(name, gain))
    return gain


class BeliefDistribution(object):
    """Normalized probability vector over a named discrete domain.

    Instances are immutable; every operation returns a new distribution."""

    __slots__ = ('_domain_id', '_probs')

    def __init__(self, domain_id: str, probs: Sequence[float]):
        values = np.array(probs, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise StructuralError(
                "Belief over '{}' must be a non-empty vector".format(domain_id))
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise StructuralError(
                "Belief over '{}' has negative or non-finite entries".format(domain_id))
        if values.sum() <= 0:
            raise StructuralError(
                "Belief over '{}' has no probability mass".format(domain_id))
        values = _normalize(values)
        values.flags.writeable = False
        self._domain_id = domain_id
        self._probs = values

    @classmethod
    def uniform(cls, domain_id: str, size: int) -> 'BeliefDistribution':
        """Uniform distribution over a domain of the given size."""
        return cls(domain_id, np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, domain_id: str, size: int, index: int) -> 'BeliefDistribution':
        """Distribution with (almost) all mass on one state."""
        values = np.zeros(size)
        values[index] = 1.0
        return cls(domain_id, values)

    #
    # PROPERTIES
    #

    @property
    def domain_id(self) -> str:
        """Identifier of the discrete domain."""
        return self._domain_id

    @property
    def probs(self) -> np.ndarray:
        """Read-only probability vector."""
        return self._probs

    @property
    def size(self) -> int:
        """Number of states in the domain."""
        return self._probs.size

    #
    # METHODS - Public
    #

    def argmax(self) -> int:
        """Index of the most probable state (first one on ties)."""
        return int(np.argmax(self._probs))

    def check_domain(self, other: 'BeliefDistribution') -> None:
        """Raises StructuralError if the other belief is over another domain."""
        if other.domain_id != self._domain_id or other.size != self.size:
            raise StructuralError(
                "Domain mismatch: '{}'[{}] vs '{}'[{}]".format(
                    self._domain_id, self.size, other.domain_id, other.size))

    def __getitem__(self, index: int) -> float:
        return float(self._probs[index])

    def __len__(self) -> int:
        return self._probs.size

    def __repr__(self) -> str:
        return "<{}: domain_id={}, probs=[{}]>".format(
            self.__class__.__name__,
            self._domain_id,
            ', '.join('{:.4f}'.format(value) for value in self._probs))

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class LikelihoodMatrix(object):
    """Conditional probability table P(to | from), one row per 'from' state."""

    def __init__(self, from_domain: str, to_domain: str, rows: Sequence[Sequence[float]]):
        table = np.array(rows, dtype=float)
        if table.ndim != 2 or table.size == 0:
            raise StructuralError(
                "Likelihood table {}->{} must be a non-empty matrix".format(
                    from_domain, to_domain))
        if np.any(table < 0) or not np.all(np.isfinite(table)):
            raise StructuralError(
                "Likelihood table {}->{} has negative or non-finite entries".format(
                    from_domain, to_domain))
        if not np.allclose(table.sum(axis=1), 1.0, rtol=0, atol=NORMALIZATION_TOLERANCE):
            raise StructuralError(
                "Likelihood table {}->{} is not row-stochastic".format(
                    from_domain, to_domain))
        table.flags.writeable = False
        self._from_domain = from_domain
        self._to_domain = to_domain
        self._rows = table

    @classmethod
    def from_relevance(cls, from_domain: str, to_domain: str,
                       relevance: Sequence[Sequence[float]]) -> 'LikelihoodMatrix':
        """Builds a table by normalizing each row of non-negative relevance
           weights; eg. 0/1 affordance checks between two layers."""
        table = np.array(relevance, dtype=float)
        sums = table.sum(axis=1, keepdims=True)
        if np.any(sums <= 0):
            raise StructuralError(
                "Every '{}' state needs at least one relevant '{}' state".format(
                    from_domain, to_domain))
        return cls(from_domain, to_domain, table / sums)

    #
    # PROPERTIES
    #

    @property
    def from_domain(self) -> str:
        """Domain of the conditioning states."""
        return self._from_domain

    @property
    def rows(self) -> np.ndarray:
        """Read-only table; rows[i, j] = P(to_j | from_i)."""
        return self._rows

    @property
    def shape(self) -> Tuple[int, int]:
        """(from size, to size)."""
        return self._rows.shape

    @property
    def to_domain(self) -> str:
        """Domain of the conditioned states."""
        return self._to_domain

    #
    # METHODS - Public
    #

    def __repr__(self) -> str:
        return "<{}: {} -> {}, shape={}>".format(
            self.__class__.__name__,
            self._from_domain,
            self._to_domain,
            self._rows.shape)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class ResonanceConfig(object):
    """Susceptibility of an agent to the inferred beliefs of its partner."""

    def __init__(self, sp: float):
        self._sp = _check_gain(sp, 'Susceptibility parameter')

    @property
    def sp(self) -> float:
        """Gain applied to the inferred belief; 0 disables resonance."""
        return self._sp

    def __repr__(self) -> str:
        return "<{}: sp={}>".format(self.__class__.__name__, self._sp)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class LayerState(object):
    """
    One predictive layer.

    Holds the prior and the fixed prediction / evidence gains, along with
    the diagnostics of the most recent update (prediction, evidence,
    intermediate belief, integration gain, free energy, precision and
    prediction error).
    """

    def __init__(self, prior: BeliefDistribution, k_p: float, k_e: float):
        self._prior = prior
        self._k_p = _check_gain(k_p, 'K_p')
        self._k_e = _check_gain(k_e, 'K_e')
        self._prediction = prior
        self._evidence = prior
        self._intermediate = prior
        self._k_t = 0.0
        self._free_energy = 0.0
        self._precision = 0.0
        self._prediction_error = np.zeros(prior.size)

    #
    # PROPERTIES
    #

    @property
    def domain_id(self) -> str:
        """Identifier of the layer's domain."""
        return self._prior.domain_id

    @property
    def evidence(self) -> BeliefDistribution:
        """Bottom-up evidence blended with the prior, from the last update."""
        return self._evidence

    @property
    def free_energy(self) -> float:
        """Free energy of the last update."""
        return self._free_energy

    @property
    def intermediate(self) -> BeliefDistribution:
        """Belief after the resonance blend (the prediction without one)."""
        return self._intermediate

    @property
    def k_e(self) -> float:
        """Gain for the bottom-up evidence."""
        return self._k_e

    @property
    def k_p(self) -> float:
        """Gain for the top-down prediction."""
        return self._k_p

    @property
    def k_t(self) -> float:
        """Integration gain computed in the last update, within [0, 1]."""
        return self._k_t

    @property
    def precision(self) -> float:
        """Precision of the last prediction error."""
        return self._precision

    @property
    def prediction(self) -> BeliefDistribution:
        """Top-down prediction blended with the prior, from the last update."""
        return self._prediction

    @property
    def prediction_error(self) -> np.ndarray:
        """Evidence minus prediction, from the last update."""
        return self._prediction_error

    @property
    def prior(self) -> BeliefDistribution:
        """Belief carried over from the previous step."""
        return self._prior

    @prior.setter
    def prior(self, prior: BeliefDistribution) -> None:
        self._prior.check_domain(prior)
        self._prior = prior

    #
    # METHODS - Public
    #

    def copy(self) -> 'LayerState':
        """Returns an independent copy of the layer."""
        other = LayerState(self._prior, self._k_p, self._k_e)
        other._record(self._prediction, self._evidence, self._intermediate,
                      self._k_t, self._free_energy, self._precision,
                      self._prediction_error)
        return other

    def __repr__(self) -> str:
        return "<{}: domain_id={}, k_p={}, k_e={}, k_t={:.4f}, " \
               "free_energy={:.4f}, precision={:.4f}>".format(
                   self.__class__.__name__,
                   self.domain_id,
                   self._k_p,
                   self._k_e,
                   self._k_t,
                   self._free_energy,
                   self._precision)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)

    #
    # METHODS - Private / Internal
    #

    def _record(self, prediction: BeliefDistribution, evidence: BeliefDistribution,
                intermediate: BeliefDistribution, k_t: float, free_energy_value: float,
                precision_value: float, prediction_error: np.ndarray) -> None:
        self._prediction = prediction
        self._evidence = evidence
        self._intermediate = intermediate
        self._k_t = k_t
        self._free_energy = free_energy_value
        self._precision = precision_value
        self._prediction_error = prediction_error


def kalman_blend(prior: BeliefDistribution, incoming: BeliefDistribution,
                 gain: float) -> BeliefDistribution:
    """
    Moves the prior towards the incoming belief by the given gain.

    :param prior: belief to start from.
    :param incoming: belief to move towards.
    :param gain: fraction of the distance to move, within [0, 1].
    :return renormalized blend; the prior itself for gain 0 and the
            incoming belief itself for gain 1.
    """
    prior.check_domain(incoming)
    gain = _check_gain(gain)
    if gain == 0.0:
        return prior
    if gain == 1.0:
        return incoming
    return BeliefDistribution(
        prior.domain_id, prior.probs + gain * (incoming.probs - prior.probs))


def propagate_likelihood(source: BeliefDistribution,
                         table: LikelihoodMatrix) -> BeliefDistribution:
    """Treats the source belief as soft evidence and pushes it through the
       table: result[j] = sum_i P(j | i) * source[i]."""
    if source.domain_id != table.from_domain or source.size != table.shape[0]:
        raise StructuralError(
            "Cannot propagate '{}'[{}] through table from '{}'[{}]".format(
                source.domain_id, source.size, table.from_domain, table.shape[0]))
    return BeliefDistribution(table.to_domain, source.probs @ table.rows)


def free_energy(prediction: BeliefDistribution, evidence: BeliefDistribution) -> float:
    """Entropy of the prediction plus its KL divergence from the evidence
       (natural logarithm)."""
    prediction.check_domain(evidence)
    energy = entropy(prediction.probs) + entropy(prediction.probs, evidence.probs)
    return max(float(energy), 0.0)


def precision(prediction_error: Sequence[float]) -> float:
    """Log inverse (population) variance of the prediction error, with the
       variance floored so an exact prediction stays finite."""
    values = np.asarray(prediction_error, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise StructuralError("Prediction error needs at least two entries")
    variance = max(float(np.var(values)), VARIANCE_FLOOR)
    return float(np.log(1.0 / variance))


def _integration_gain(prediction: BeliefDistribution, evidence: BeliefDistribution) \
        -> Tuple[float, float, float, np.ndarray]:
    error = evidence.probs - prediction.probs
    pi = precision(error)
    energy = free_energy(prediction, evidence)
    denominator = energy + pi
    if denominator <= 0:
        gain = 0.0
    else:
        gain = min(max(energy / denominator, 0.0), 1.0)
    return gain, energy, pi, error


def _move(base: BeliefDistribution, evidence: BeliefDistribution, gain: float,
          literal_sign: bool) -> BeliefDistribution:
    if not literal_sign:
        return kalman_blend(base, evidence, gain)
    # Printed sign: moves away from the evidence
    return BeliefDistribution(
        base.domain_id, base.probs + gain * (base.probs - evidence.probs))


def _begin_update(layer: LayerState, top_down: BeliefDistribution,
                  bottom_up: BeliefDistribution,
                  resonance: Optional[Tuple[BeliefDistribution, ResonanceConfig]]):
    layer.prior.check_domain(top_down)
    layer.prior.check_domain(bottom_up)
    if resonance is not None:
        layer.prior.check_domain(resonance[0])
    prediction = kalman_blend(layer.prior, top_down, layer.k_p)
    evidence = kalman_blend(layer.prior, bottom_up, layer.k_e)
    return prediction, evidence


def layer_update(layer: LayerState, top_down: BeliefDistribution,
                 bottom_up: BeliefDistribution,
                 resonance: Optional[Tuple[BeliefDistribution, ResonanceConfig]] = None,
                 literal_sign: bool = False) -> BeliefDistribution:
    """
    Computes the layer's posterior; resonance is applied to the prediction
    before it is validated against the evidence.

    The layer's diagnostics are updated; its prior is left for the caller
    to replace with the returned posterior.

    :param layer: the layer to update.
    :param top_down: prediction from the layer above (or the task).
    :param bottom_up: evidence from the layer below (or the environment).
    :param resonance: optional (inferred partner belief, resonance config).
    :param literal_sign: move away from the evidence in the final blend,
                         as the resonance equation is printed.
    :return posterior belief for the layer.
    """
    prediction, evidence = _begin_update(layer, top_down, bottom_up, resonance)
    k_t, energy, pi, error = _integration_gain(prediction, evidence)
    if resonance is not None:
        inferred, config = resonance
        intermediate = kalman_blend(prediction, inferred, config.sp)
    else:
        intermediate = prediction
    posterior = _move(intermediate, evidence, k_t, literal_sign)
    layer._record(prediction, evidence, intermediate, k_t, energy, pi, error) # pylint: disable=protected-access
    return posterior


def swapped_layer_update(layer: LayerState, top_down: BeliefDistribution,
                         bottom_up: BeliefDistribution,
                         resonance: Optional[Tuple[BeliefDistribution, ResonanceConfig]] = None,
                         literal_sign: bool = False) -> BeliefDistribution:
    """
    As layer_update, but the agent integrates its own prediction and
    evidence first and blends in the inferred partner belief last.
    """
    prediction, evidence = _begin_update(layer, top_down, bottom_up, resonance)
    k_t, energy, pi, error = _integration_gain(prediction, evidence)
    intermediate = _move(prediction, evidence, k_t, literal_sign)
    if resonance is not None:
        inferred, config = resonance
        posterior = kalman_blend(intermediate, inferred, config.sp)
    else:
        posterior = intermediate
    layer._record(prediction, evidence, intermediate, k_t, energy, pi, error) # pylint: disable=protected-access
    return posterior
