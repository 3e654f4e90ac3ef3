"""HTTP facade over the experiment drivers.

The FastAPI application in app.py exposes one POST endpoint per
subcommand under /v1/, with pydantic request models in schemas.py.  The
CLI talks to this app in process by default (no sockets are opened), so
the same request/response contract serves both local and remote use.
"""

from .app import create_app

__all__ = ["create_app"]
