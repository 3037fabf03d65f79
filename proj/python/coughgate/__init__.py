"""Single-cough classification experiment engine: feature extraction,
classical classifiers, and leave-one-out evaluation, all backed by the
C++ core."""

from ._core import (
    __version__,
    classifier_tokens,
    confusion_metrics,
    dct2,
    hamming_window,
    kernel_eval,
    loocv,
    mel_scale,
    mel_scale_inv,
    power_spectrum,
    roc_auc,
    sfs,
    synthetic_features,
)

__all__ = [
    "__version__",
    "classifier_tokens",
    "confusion_metrics",
    "dct2",
    "hamming_window",
    "kernel_eval",
    "loocv",
    "mel_scale",
    "mel_scale_inv",
    "power_spectrum",
    "roc_auc",
    "sfs",
    "synthetic_features",
]
