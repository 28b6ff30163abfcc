import os
from dotenv import load_dotenv

# Load environment variables from .env
load_dotenv()

# Kernel series
QOSC_KERNEL_ORDER = int(os.environ.get("QOSC_KERNEL_ORDER", "12"))
QOSC_STABILITY_STEP = int(os.environ.get("QOSC_STABILITY_STEP", "2"))

# Randomized verification
QOSC_RANDOM_SEED = int(os.environ.get("QOSC_RANDOM_SEED", "20240521"))
QOSC_VERIFY_SAMPLES = float(os.environ.get("QOSC_VERIFY_SAMPLES", "1.0"))

# Numeric tolerances
QOSC_SPECTRUM_TOL = float(os.environ.get("QOSC_SPECTRUM_TOL", "1e-9"))
QOSC_EVOLUTION_TOL = float(os.environ.get("QOSC_EVOLUTION_TOL", "1e-12"))
QOSC_RELATION_TOL = float(os.environ.get("QOSC_RELATION_TOL", "1e-12"))
QOSC_TRACE_TOL = float(os.environ.get("QOSC_TRACE_TOL", "1e-8"))
QOSC_BCH_TOL = float(os.environ.get("QOSC_BCH_TOL", "1e-6"))
QOSC_ACTION_TOL = float(os.environ.get("QOSC_ACTION_TOL", "1e-12"))
QOSC_PHI_TOL = float(os.environ.get("QOSC_PHI_TOL", "1e-12"))

# Output and logging
QOSC_OUTPUT = os.environ.get("QOSC_OUTPUT", "text")
QOSC_LOG_LEVEL = os.environ.get("QOSC_LOG_LEVEL", "WARNING")

# HTTP service
API_HOST = os.environ.get("API_HOST", "0.0.0.0")
API_PORT = int(os.environ.get("API_PORT", "8000"))

# Environment (development/production)
ENVIRONMENT = os.environ.get("ENVIRONMENT", "development")
