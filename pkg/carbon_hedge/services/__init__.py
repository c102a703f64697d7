"""
Numerical engines of the pipeline
"""
