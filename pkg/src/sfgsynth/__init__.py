"""Design and verification of three-qubit circuits built from optically
controlled (SFG) two-qubit gates."""

__version__ = "0.1.0"
