"""Reference oracle bridge: real pretrained models behind the wire protocol."""

from .config import BridgeConfig
from .models import ModelOracle

__all__ = ["BridgeConfig", "ModelOracle"]
__version__ = "0.1.0"
