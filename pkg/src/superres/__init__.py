"""
Superres - Superresolution quantum sensing toolkit
Resolve two nearly identical incoherent tones with a spin sensor
"""

__version__ = "1.0.0"
