"""
Configuration file for the motivic Milnor fiber engine.
Values come from the environment (a local .env file is honoured).
"""
import os

from dotenv import load_dotenv

load_dotenv()

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Knowledge base of pinned realization values
MM_KB_PATH = os.environ.get("MM_KB_PATH", os.path.join(BASE_DIR, "knowledge_base.tsv"))

# Logging
MM_LOG_LEVEL = os.environ.get("MM_LOG_LEVEL", "WARNING")

# Computation guards
ZETA_CHECK_ORDER = int(os.environ.get("ZETA_CHECK_ORDER", "20"))  # closed form vs. enumeration
MAX_EXPONENT = int(os.environ.get("MAX_EXPONENT", "64"))  # largest exponent accepted by the parser
HM_MAX_POINTS = int(os.environ.get("HM_MAX_POINTS", "200000"))  # lattice enumeration guard

# Web surface
WEB_HOST = os.environ.get("WEB_HOST", "0.0.0.0")
WEB_PORT = int(os.environ.get("WEB_PORT", "5000"))
