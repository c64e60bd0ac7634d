"""Exact post-processing order on measurements and order dimension of finite posets."""
__version__ = "0.1.0"
