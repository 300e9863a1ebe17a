"""Lattice geometry, disorder, ground states and the cluster analytics built on them."""
