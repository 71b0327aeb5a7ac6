import numpy as np

from fedscore.errors import ShapeMismatch
from fedscore.learner.learner_types import AdamConfig, AdamState


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState, learning_rate: float = 0.001,
              adam: AdamConfig = AdamConfig()) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; inputs are left untouched."""
    if not (params.shape == grads.shape == state.m.shape == state.v.shape):
        raise ShapeMismatch(
            f"params {params.shape}, grads {grads.shape}, state {state.m.shape}/{state.v.shape}")
    if state.t < 0:
        raise ValueError("Adam step counter must be >= 0")
    t = state.t + 1
    m = adam.beta1 * state.m + (1.0 - adam.beta1) * grads
    v = adam.beta2 * state.v + (1.0 - adam.beta2) * grads * grads
    m_hat = m / (1.0 - adam.beta1 ** t)
    v_hat = v / (1.0 - adam.beta2 ** t)
    updated = params - learning_rate * m_hat / (np.sqrt(v_hat) + adam.epsilon)
    return updated, AdamState(m, v, t)
