"""Surrogate models of ground-truth-based document image quality metrics.

Train regressors that predict a binarization's F-Measure from metrics
comparing the processed image with its original, then use them where no
ground truth exists, e.g. to tune a binarizer per image.
"""

__version__ = "0.1.0"
