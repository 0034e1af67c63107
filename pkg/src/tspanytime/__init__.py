"""Anytime benchmarking of TSP heuristics: instance generators, solvers, run orchestration and analysis."""

__version__ = "0.1.0"

from .core import (DistanceMode, Instance, NeighborLists, Point, Tour, build_neighbor_lists, distance,
                   tour_length, validate_tour)

__all__ = ["DistanceMode", "Instance", "NeighborLists", "Point", "Tour", "build_neighbor_lists", "distance",
           "tour_length", "validate_tour", "__version__"]
