"""Finite-volume simulator for a chemotaxis model of ant foraging with pheromone trails."""

__version__ = "0.1.0"
