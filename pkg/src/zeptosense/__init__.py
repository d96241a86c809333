"""Zeptometer distance sensing with a levitated optomechanical mirror.

Submodules: ``hilbert`` (truncated Fock-space kernel), ``trap``
(diamagnetic trap frequency), ``dynamics`` (closed-form evolution),
``channels`` (cavity loss), ``metrology`` (Fisher information) and
``experiments`` / ``cli`` (configured sweeps).
"""
from . import channels, dynamics, errors, hilbert, metrology, trap

__version__ = "0.1.0"

__all__ = ["channels", "dynamics", "errors", "hilbert", "metrology", "trap"]
