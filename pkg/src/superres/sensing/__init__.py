"""
Transition probabilities and their brute-force oracles
"""
