"""AQFT Gluing Checker Package"""

__version__ = "0.1.0"
