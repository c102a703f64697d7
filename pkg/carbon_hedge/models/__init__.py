"""
Domain models and schemas using Pydantic
"""
