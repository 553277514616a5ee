"""Matched loss/link families and the proper scoring rules they induce.

A family ties together the pieces that belong to one margin loss:

* ``loss(v)``            the loss of margin v when the outcome is positive
                         (the negative outcome costs ``loss(-v)``),
* ``link(p)``            the probability-to-margin map that minimizes the
                         conditional risk at posterior p,
* ``inverse_link(v)``    its inverse, recovering a probability from a margin,
* ``min_cond_risk(p)``   the risk attained at the minimizer.

Two families are built in:

    exponential   loss(v) = exp(-v)
                  link(p) = log(p / (1 - p)) / 2
                  inverse_link(v) = exp(2v) / (1 + exp(2v))
                  min_cond_risk(p) = 2 sqrt(p (1 - p))

    linear        loss(v) = (1 - v)^2
                  link(p) = 2p - 1
                  inverse_link(v) = (v + 1) / 2, clamped to [0, 1]
                  min_cond_risk(p) = 4 p (1 - p)

The exponential link diverges at 0 and 1, so probabilities are clipped to
[clip, 1 - clip] before the log; the default clip of 1e-6 bounds margins by
log((1 - 1e-6) / 1e-6) / 2, about 6.91, and keeps every exp finite.

Scoring rules are the elicitation view of the same objects: a pair of
per-outcome score functions whose expected value is maximized by honest
forecasting.  They are generated from a convex honest-score function via
the Savage construction, and each loss family induces one whose honest
score is the negated minimum conditional risk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "LinkSpec",
    "ScoringRule",
    "make_link",
    "savage_scores",
    "matched_scoring_rule",
    "reconstruct_loss",
    "conditional_risk",
]

DEFAULT_CLIP = 1e-6


def _scalarize(x):
    return float(x) if np.ndim(x) == 0 else x


def _exp_loss(v):
    return np.exp(-v)


def _exp_link(p):
    return 0.5 * np.log(p / (1.0 - p))


def _exp_inverse(v):
    # exp(2v) / (1 + exp(2v)), computed from exp(-2|v|) so it never overflows
    u = np.exp(-2.0 * np.abs(v))
    return np.where(np.asarray(v) >= 0, 1.0 / (1.0 + u), u / (1.0 + u))


def _exp_min_risk(p):
    return 2.0 * np.sqrt(p * (1.0 - p))


def _exp_min_risk_deriv(p):
    return (1.0 - 2.0 * p) / np.sqrt(p * (1.0 - p))


def _sq_loss(v):
    return (1.0 - v) ** 2


def _sq_link(p):
    return 2.0 * p - 1.0


def _sq_inverse(v):
    return np.clip((v + 1.0) / 2.0, 0.0, 1.0)


def _sq_min_risk(p):
    return 4.0 * p * (1.0 - p)


def _sq_min_risk_deriv(p):
    return 4.0 - 8.0 * p


_FAMILIES: dict[str, dict[str, Callable]] = {
    "exponential": {
        "loss": _exp_loss,
        "link": _exp_link,
        "inverse": _exp_inverse,
        "min_risk": _exp_min_risk,
        "min_risk_deriv": _exp_min_risk_deriv,
    },
    "linear": {
        "loss": _sq_loss,
        "link": _sq_link,
        "inverse": _sq_inverse,
        "min_risk": _sq_min_risk,
        "min_risk_deriv": _sq_min_risk_deriv,
    },
}

# Families whose link or risk derivative diverges at 0/1 and needs clipping.
_CLIPPED_FAMILIES = frozenset({"exponential"})


@dataclass(frozen=True)
class LinkSpec:
    """One matched family: loss, optimal link, inverse link, minimum risk.

    ``clip`` is the probability clipping bound applied before divergent
    maps (the log-odds link and the risk derivative of the exponential
    family); the linear family needs no clipping and ignores it.
    """

    name: str
    clip: float = DEFAULT_CLIP

    def __post_init__(self) -> None:
        if self.name not in _FAMILIES:
            raise ValueError(f"unknown link family {self.name!r}; "
                             f"expected one of {sorted(_FAMILIES)}")
        if not 0.0 < self.clip < 0.5:
            raise ValueError("clip must lie strictly between 0 and 0.5")

    def _clipped(self, prob):
        prob = np.asarray(prob, dtype=float)
        if self.name in _CLIPPED_FAMILIES:
            return np.clip(prob, self.clip, 1.0 - self.clip)
        return prob

    def loss(self, margin):
        """Loss of margin ``margin`` against a positive outcome."""
        return _scalarize(_FAMILIES[self.name]["loss"](np.asarray(margin, dtype=float)))

    def link(self, prob):
        """Margin-scale prediction for probability ``prob``."""
        return _scalarize(_FAMILIES[self.name]["link"](self._clipped(prob)))

    def inverse_link(self, margin):
        """Probability recovered from margin ``margin``."""
        return _scalarize(_FAMILIES[self.name]["inverse"](np.asarray(margin, dtype=float)))

    def min_cond_risk(self, prob):
        """Conditional risk attained by the optimal margin at ``prob``."""
        return _scalarize(_FAMILIES[self.name]["min_risk"](np.asarray(prob, dtype=float)))

    def min_cond_risk_deriv(self, prob):
        """Analytic derivative of ``min_cond_risk`` (clipped domain)."""
        return _scalarize(_FAMILIES[self.name]["min_risk_deriv"](self._clipped(prob)))

    @property
    def max_margin(self) -> float:
        """Largest margin the clipped link can produce."""
        return float(self.link(1.0))


def make_link(name: str, clip: float = DEFAULT_CLIP) -> LinkSpec:
    """Build the named family; ``name`` is 'exponential' or 'linear'."""
    return LinkSpec(name=name, clip=clip)


@dataclass(frozen=True)
class ScoringRule:
    """A Savage pair of per-outcome score functions.

    ``event_score(p)`` is earned by forecast p when the event happens,
    ``nonevent_score(p)`` when it does not, and ``honest_score(p)`` is the
    expected score of an honest forecast at true chance p.  For a proper
    rule the expected score is maximized exactly at the honest forecast.
    """

    honest_score: Callable
    event_score: Callable
    nonevent_score: Callable

    def expected_score(self, true_prob, forecast):
        """Expected score of announcing ``forecast`` at true chance ``true_prob``."""
        true_prob = np.asarray(true_prob, dtype=float)
        return _scalarize(true_prob * self.event_score(forecast)
                          + (1.0 - true_prob) * self.nonevent_score(forecast))


def savage_scores(honest_score: Callable, honest_score_deriv: Callable) -> ScoringRule:
    """Generate the per-outcome score pair from a convex honest-score curve.

    With h the honest score and h' its (caller-supplied, analytic)
    derivative:

        event_score(p)    = h(p) + (1 - p) h'(p)
        nonevent_score(p) = h(p) - p h'(p)

    Convexity of h is what makes the resulting rule proper; it is checked
    by property tests, not at call time.
    """

    def event(prob):
        prob = np.asarray(prob, dtype=float)
        return _scalarize(honest_score(prob) + (1.0 - prob) * honest_score_deriv(prob))

    def nonevent(prob):
        prob = np.asarray(prob, dtype=float)
        return _scalarize(honest_score(prob) - prob * honest_score_deriv(prob))

    def honest(prob):
        return _scalarize(honest_score(np.asarray(prob, dtype=float)))

    return ScoringRule(honest_score=honest, event_score=event, nonevent_score=nonevent)


def matched_scoring_rule(link: LinkSpec) -> ScoringRule:
    """Scoring rule induced by a loss family: honest score = -min_cond_risk.

    Probabilities are clipped to the family's [clip, 1 - clip] window before
    evaluation, so forecasts of exactly 0 or 1 score finitely.  For the
    exponential family this produces event_score(p) = -loss(link(p)) and
    nonevent_score(p) = -loss(-link(p)).
    """
    inner = savage_scores(
        lambda p: -np.asarray(_FAMILIES[link.name]["min_risk"](p)),
        lambda p: -np.asarray(_FAMILIES[link.name]["min_risk_deriv"](p)),
    )

    def honest(prob):
        return inner.honest_score(link._clipped(prob))

    def event(prob):
        return inner.event_score(link._clipped(prob))

    def nonevent(prob):
        return inner.nonevent_score(link._clipped(prob))

    return ScoringRule(honest_score=honest, event_score=event, nonevent_score=nonevent)


def reconstruct_loss(link: LinkSpec, margin):
    """Rebuild the loss at ``margin`` from the risk side of the family alone.

    Evaluates min_cond_risk(q) + (1 - q) * min_cond_risk'(q) at
    q = inverse_link(margin).  For the exponential family this reproduces
    exp(-margin) on the clip-limited margin range; for the linear family it
    reproduces (1 - margin)^2 on (-1, 1).
    """
    q = link._clipped(np.asarray(link.inverse_link(margin), dtype=float))
    return _scalarize(link.min_cond_risk(q) + (1.0 - q) * link.min_cond_risk_deriv(q))


def conditional_risk(link: LinkSpec, prob, margin):
    """Expected loss of predicting ``margin`` at posterior ``prob``:
    prob * loss(margin) + (1 - prob) * loss(-margin)."""
    prob = np.asarray(prob, dtype=float)
    margin = np.asarray(margin, dtype=float)
    return _scalarize(prob * link.loss(margin) + (1.0 - prob) * link.loss(-margin))
