"""Late-time local operator entanglement of chaotic spin chains."""

__version__ = "0.1.0"
