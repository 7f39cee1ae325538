"""Mutual-information learned classifiers.

Submodules: :mod:`milc.nn` (numpy MLP engine), :mod:`milc.distributions`
(Shannon quantities), :mod:`milc.losses` (training objectives),
:mod:`milc.bounds` (closed-form bounds), :mod:`milc.gauss` (binary Gaussian
model) and :mod:`milc.harness` (data, training runs, reports).
"""

__version__ = "0.1.0"
