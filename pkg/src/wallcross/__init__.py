"""wallcross - exact counting invariants and wall-crossing for quivers and curves."""

__version__ = "1.0.0"
