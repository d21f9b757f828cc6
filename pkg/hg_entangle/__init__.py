"""hg-entangle: Hermite-Gaussian mode structure of thin-crystal SPDC photon pairs.

Computes the HG decomposition of down-converted biphotons, checks the
quasi-conservation and parity laws, converts between HG and LG bases, and
simulates parity-encoded Hong-Ou-Mandel interference and teleportation.
"""

__version__ = "0.1.0"
