"""
Fisher information, Cramer-Rao bounds and frequency-separation estimation
"""
