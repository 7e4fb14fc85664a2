"""Experiments, oracles, property checks and the command-line interface."""
