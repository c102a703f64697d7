"""
Run directory management
"""
