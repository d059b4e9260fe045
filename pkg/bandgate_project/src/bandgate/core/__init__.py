"""
Core plumbing: exceptions, logging, base classes, randomness and numerics.
"""
