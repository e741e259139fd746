"""
Readout chain: SNR, noise budget, SSR traces and histogram fits
"""
