from problems import DEFAULT_RESTARTS

# Library version recorded in every run report
VERSION = "0.1.0"

# Default root seed
DEFAULT_SEED = 0

# Default worker threads for optimizer restarts
DEFAULT_THREADS = 1

__all__ = ["VERSION", "DEFAULT_SEED", "DEFAULT_THREADS", "DEFAULT_RESTARTS"]
