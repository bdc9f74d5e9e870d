"""Experiment pipelines: analogical reasoning and digit classification."""
