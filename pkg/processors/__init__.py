"""
Processors package - decomposition, learners, ensemble and evaluation
"""
