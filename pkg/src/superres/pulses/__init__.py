"""
RF mapping-pulse fidelity
"""
