"""Imbalanced-classification toolkit for card-fraud detection.

Random undersampling and SMOTE, IQR outlier removal, correlation and t-SNE
analysis, a from-scratch neural network with four baselines, and a
precision/recall/F1 evaluation suite, tied together by an experiment
runner (:func:`fraudnet.pipeline.run_pipeline`) and the ``fraudnet`` CLI.
"""

__version__ = "0.1.0"
