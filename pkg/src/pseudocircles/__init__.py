"""Good drawings of complete graphs, pseudocircle arrangements, and
pseudospherical extensions, all on an exact combinatorial-map substrate."""

__version__ = "0.1.0"
