import logging
import os

from dotenv import load_dotenv

# --- Configuration ---
load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s - %(levelname)s - %(message)s")

PORT = int(os.getenv("PORT", 6991))
KP_WORKERS = int(os.getenv("KP_WORKERS", 1))
DEFAULT_DEGREE = int(os.getenv("DEFAULT_DEGREE", 3))
DEFAULT_WINDOW = int(os.getenv("DEFAULT_WINDOW", 8))
DEFAULT_FLOOR = int(os.getenv("DEFAULT_FLOOR", -4))
CORPUS_SEED = int(os.getenv("CORPUS_SEED", 20240601))
# Largest offset from the flag generator tried when searching a zeta that reaches the big cell
ZETA_SEARCH_BUDGET = int(os.getenv("ZETA_SEARCH_BUDGET", 6))

logging.debug(f"[CONFIG] LOG_LEVEL: {LOG_LEVEL}")
logging.debug(f"[CONFIG] PORT: {PORT}")
logging.debug(f"[CONFIG] KP_WORKERS: {KP_WORKERS}")
logging.debug(f"[CONFIG] DEFAULT_DEGREE: {DEFAULT_DEGREE} DEFAULT_WINDOW: {DEFAULT_WINDOW} DEFAULT_FLOOR: {DEFAULT_FLOOR}")
logging.debug(f"[CONFIG] CORPUS_SEED: {CORPUS_SEED} ZETA_SEARCH_BUDGET: {ZETA_SEARCH_BUDGET}")
