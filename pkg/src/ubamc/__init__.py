"""Exact acceptance probabilities of Markov chains against unambiguous automata."""

__version__ = "0.1.0"
