"""Threshold file formats and plotting."""
