"""Seedable simulator for entanglement-based hybrid key distribution."""
from .bitstring import BitString, concat, xor_ext
from .channel import EveConfig, QubitRef, open_channels
from .errors import (
    EavesdroppingDetected,
    InvalidArgument,
    NoCloneViolation,
    ProtocolViolation,
    SingularityError,
)
from .protocols import ProtocolConfig, SessionTranscript, derive_key, run_protocol1, run_protocol3
from .qstate import Basis, BellKind, GateSpec, StateVector

__version__ = "0.1.0"
