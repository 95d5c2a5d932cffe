"""pitchside: a deterministic 2D robotic-soccer world with a coordination
stack (Delaunay formations, setplays, action scoring, match statistics) and
a bounded-KL stochastic optimizer."""

__version__ = "0.1.0"
