"""Binary cross-entropy on logits."""

import numpy as np
from scipy.special import expit

from ..models import ShapeError

__all__ = ["bce_loss"]


def bce_loss(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean of log(1 + e^z) - y z and its gradient (sigmoid(z) - y) / n."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if logits.shape != labels.shape or logits.ndim != 1:
        msg = f"logits {logits.shape} and labels {labels.shape} must be equal-length vectors"
        raise ShapeError(msg)
    n = max(len(logits), 1)
    loss = float(np.sum(np.logaddexp(0.0, logits) - labels * logits) / n)
    return loss, (expit(logits) - labels) / n
