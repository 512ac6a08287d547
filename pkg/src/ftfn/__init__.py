"""Fault-tolerant fusion networks from teleported gates.

Construction and verification of gate-teleportation fusion networks,
foliated surface-code syndrome lattices, and Monte Carlo threshold
estimation with exact minimum-weight perfect-matching decoding.
"""

__version__ = "0.1.0"
