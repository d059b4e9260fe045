"""
Settings and constants.
"""
