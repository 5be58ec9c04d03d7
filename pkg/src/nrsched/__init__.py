"""Downlink resource-block scheduling with a 2-D Hopfield network solving the
generalized proportional fair objective."""

__version__ = "0.1.0"
