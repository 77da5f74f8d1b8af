"""Knowledge-graph reinforcement learning on symbolic grid worlds"""

__version__ = "1.0.0"
