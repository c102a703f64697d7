"""
Repository layer for file-based data access
"""
