"""
Command-line front end.
"""
from .commands import cli, main
