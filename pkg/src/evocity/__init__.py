"""evocity: git history mining into evolving 3D software city scenes."""

__version__ = "0.1.0"
