"""Figure rendering for sshqed CSV outputs."""

__version__ = "0.1.0"
