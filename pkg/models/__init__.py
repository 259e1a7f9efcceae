"""
Models package - data models, specifications and errors
"""
