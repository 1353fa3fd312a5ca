"""HTTP service and its tag store."""
from .app import ServiceConfig, create_app
from .store import TagStore

__all__ = ["ServiceConfig", "TagStore", "create_app"]
