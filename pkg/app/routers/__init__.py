# Routers package: one command handler per subcommand
from . import (
    hilbert_router,
    verify_router,
    mc_router,
    identity_router,
)
