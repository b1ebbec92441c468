"""
covsim - UAV coverage extension simulator

Channel, traffic and capacity models for UAV-provided emergency coverage that is
extended through edge-of-coverage relays and multi-hop D2D links, plus a CLI
that turns configured sweeps into deterministic CSV.
"""

__version__ = "1.0.0"
