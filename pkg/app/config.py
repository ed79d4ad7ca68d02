"""
Configuration settings for the toolkit
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Series Configuration
DEFAULT_ORDER = int(os.getenv("NCALG_ORDER", 8))
DET_BOUND = int(os.getenv("NCALG_DET_BOUND", 12))

# Brute-force Oracle Configuration
# dim F[r] grows exponentially in r, so every enumeration is capped
PATH_CAP = int(os.getenv("NCALG_PATH_CAP", 1_000_000))
NECKLACE_CAP = int(os.getenv("NCALG_NECKLACE_CAP", 2_000_000))
SEARCH_BUDGET = int(os.getenv("NCALG_SEARCH_BUDGET", 200_000))

# Monte Carlo Configuration
DEFAULT_SEED = int(os.getenv("NCALG_SEED", 42))
DEFAULT_SAMPLES = int(os.getenv("NCALG_SAMPLES", 20_000))
STAT_SIGMAS = float(os.getenv("NCALG_STAT_SIGMAS", 3.0))
STAT_FLOOR = float(os.getenv("NCALG_STAT_FLOOR", 0.05))

# Worker Configuration
THREADS = max(1, int(os.getenv("NCALG_THREADS", 4)))

# Logging Configuration
LOG_LEVEL = os.getenv("NCALG_LOG_LEVEL", "WARNING").upper()

# Output Configuration
OUTPUT_FORMATS = ("json", "csv", "text")
