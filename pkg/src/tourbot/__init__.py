"""Desk-scale tour-guide robot platform: simulator, bridge, tours, analytics."""

from .config import AppConfig
from .errors import (
    BusyError,
    ConflictError,
    NotFoundError,
    ProtocolError,
    StoreFormatError,
    TourbotError,
    ValidationError,
)
from .model import Location, Pose2D, RobotMode, RobotStatus, Tour, TourRun, TourStop
from .store import TourStore, load_store, save_store
from .world import World

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "BusyError",
    "ConflictError",
    "Location",
    "NotFoundError",
    "Pose2D",
    "ProtocolError",
    "RobotMode",
    "RobotStatus",
    "StoreFormatError",
    "Tour",
    "TourRun",
    "TourStop",
    "TourbotError",
    "TourStore",
    "ValidationError",
    "World",
    "__version__",
    "load_store",
    "save_store",
]
