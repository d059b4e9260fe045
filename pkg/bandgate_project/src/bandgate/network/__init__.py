"""
Downstream classifier, loss and optimizers.
"""
from .classifier import Classifier, ForwardCache
from .loss import LossSpec, batch_weighted_cross_entropy, weighted_cross_entropy
from .optimizers import SGD, Adam, build_optimizer
