"""Weakly orthogonal infinitary term rewriting, executable at desk scale."""
