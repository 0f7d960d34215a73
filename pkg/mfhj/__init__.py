from loguru import logger

__version__ = "1.0.0"

# Library use is silent; the CLI turns logging on.
logger.disable("mfhj")
