from .utils import setup_logging

setup_logging("info")
